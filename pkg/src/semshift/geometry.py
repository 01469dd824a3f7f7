"""Dense vector primitives: cosine similarity/distance, norms, means.

Inputs may arrive as float32 (the stored precision of occurrence files);
all accumulation here happens in float64 because the downstream transport
solver is sensitive to rounding in the cost matrix.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyInput, ZeroVector


def as_vector(values) -> np.ndarray:
    """Coerce to a 1-D float64 array and validate finiteness."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] < 1:
        raise DimensionMismatch(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ZeroVector("vector contains NaN or Inf components")
    return v


def l2_norm(p) -> float:
    """Euclidean norm of a vector."""
    return float(np.linalg.norm(as_vector(p)))


def cosine_similarity(p, q) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1].

    Raises ZeroVector if either input has zero norm: a zero embedding
    indicates corrupted extraction and must never silently score 0.
    """
    p = as_vector(p)
    q = as_vector(q)
    if p.shape[0] != q.shape[0]:
        raise DimensionMismatch(f"dims differ: {p.shape[0]} vs {q.shape[0]}")
    np_, nq = np.linalg.norm(p), np.linalg.norm(q)
    if np_ == 0.0 or nq == 0.0:
        raise ZeroVector("cosine similarity undefined for zero-norm vector")
    sim = float(np.dot(p, q) / (np_ * nq))
    return min(1.0, max(-1.0, sim))


def cosine_distance(p, q) -> float:
    """1 - cosine_similarity; lands in [0, 2]."""
    return 1.0 - cosine_similarity(p, q)


def mean_vector(vs: Sequence | Iterable) -> np.ndarray:
    """Component-wise arithmetic mean of a nonempty sequence of vectors."""
    vs = [as_vector(v) for v in vs]
    if not vs:
        raise EmptyInput("mean_vector of empty sequence")
    dim = vs[0].shape[0]
    for v in vs[1:]:
        if v.shape[0] != dim:
            raise DimensionMismatch(f"dims differ: {dim} vs {v.shape[0]}")
    stacked = np.stack(vs)
    # n copies of one vector must average to that vector bit-exactly;
    # summation rounding would otherwise break this for some n.
    if all(np.array_equal(v, vs[0]) for v in vs[1:]):
        return vs[0].copy()
    return np.mean(stacked, axis=0)


def pairwise_cosine_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cosine-distance matrix between the rows of two matrices.

    Vectorized form of cosine_distance over a Cartesian product; rows
    with zero norm raise ZeroVector with the offending row index.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(f"dims differ: {a.shape[1]} vs {b.shape[1]}")
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    for name, norms in (("source", na), ("destination", nb)):
        zero = np.nonzero(norms == 0.0)[0]
        if zero.size:
            raise ZeroVector(f"zero-norm {name} vector at row {zero[0]}")
    sims = (a @ b.T) / np.outer(na, nb)
    np.clip(sims, -1.0, 1.0, out=sims)
    return 1.0 - sims
