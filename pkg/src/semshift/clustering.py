"""Cluster-based change scoring: joint k-means over both periods'
occurrence vectors, then JSD or Wasserstein distance between the two
periods' cluster distributions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch, TooFewPoints
from .geometry import pairwise_cosine_distances
from .occurrences import UsageSet
from .transport import OTProblem, solve_exact


@dataclass(frozen=True)
class ClusterModel:
    k: int
    centroids: np.ndarray  # (k, dim)
    assignments: np.ndarray  # (n,) ints in [0, k)
    inertia: float


def _kmeans_pp_init(vectors: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = vectors.shape[0]
    centroids = np.empty((k, vectors.shape[1]))
    centroids[0] = vectors[rng.integers(n)]
    d2 = np.sum((vectors - centroids[0]) ** 2, axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            centroids[c] = vectors[rng.integers(n)]
        else:
            centroids[c] = vectors[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((vectors - centroids[c]) ** 2, axis=1))
    return centroids


def _lloyd(vectors: np.ndarray, centroids: np.ndarray, max_iter: int):
    k = centroids.shape[0]
    assignments = None
    for _ in range(max_iter):
        d2 = ((vectors[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assign = d2.argmin(axis=1)
        # Repair empty clusters: reseed at the point farthest from its
        # assigned centroid.
        for c in range(k):
            if not np.any(new_assign == c):
                far = int(d2[np.arange(len(vectors)), new_assign].argmax())
                new_assign[far] = c
        if assignments is not None and np.array_equal(new_assign, assignments):
            break
        assignments = new_assign
        for c in range(k):
            centroids[c] = vectors[assignments == c].mean(axis=0)
    d2 = ((vectors[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    inertia = float(d2[np.arange(len(vectors)), assignments].sum())
    return centroids, assignments, inertia


def kmeans(
    vectors,
    k: int,
    seed: int,
    restarts: int = 10,
    max_iter: int = 300,
) -> ClusterModel:
    """Best-inertia model over k-means++ restarts; deterministic given seed.

    Restart r uses its own generator seeded with seed + r, so results do
    not depend on evaluation order.
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.shape[0] < k:
        raise TooFewPoints(f"{vectors.shape[0]} points for k={k}")
    best = None
    for r in range(restarts):
        rng = np.random.default_rng(seed + r)
        centroids = _kmeans_pp_init(vectors, k, rng)
        centroids, assignments, inertia = _lloyd(vectors, centroids, max_iter)
        if best is None or inertia < best.inertia:
            best = ClusterModel(k, centroids, assignments, inertia)
    return best


def jsd(p, q) -> float:
    """Jensen-Shannon divergence, log base 2, so the result lies in [0, 1]."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise LengthMismatch(f"distribution lengths differ: {p.shape} vs {q.shape}")
    m = 0.5 * (p + q)

    def kl(x, y):
        mask = x > 0
        return float(np.sum(x[mask] * np.log2(x[mask] / y[mask])))

    return 0.5 * kl(p, m) + 0.5 * kl(q, m)


def cluster_distributions(assignments: np.ndarray, k: int, n_src: int):
    """Per-period cluster membership fractions from a joint clustering."""
    src = np.bincount(assignments[:n_src], minlength=k).astype(np.float64)
    dst = np.bincount(assignments[n_src:], minlength=k).astype(np.float64)
    return src / src.sum(), dst / dst.sum()


def cluster_change_score(
    src: UsageSet,
    dst: UsageSet,
    k: int = 5,
    seed: int = 0,
    measure: str = "jsd",
    restarts: int = 10,
    normalize_vectors: bool = False,
) -> float:
    """Joint k-means over both periods, then JSD or WD between the
    per-period cluster distributions. WD uses cosine distance between
    centroids as ground cost, solved exactly.
    """
    joint = np.vstack([src.vectors, dst.vectors])
    if normalize_vectors:
        joint = joint / np.linalg.norm(joint, axis=1, keepdims=True)
    if joint.shape[0] < k:
        raise TooFewPoints(f"{joint.shape[0]} points for k={k}")
    model = kmeans(joint, k, seed=seed, restarts=restarts)
    p, q = cluster_distributions(model.assignments, k, len(src))
    if measure == "jsd":
        return jsd(p, q)
    if measure == "wd":
        cost = pairwise_cosine_distances(model.centroids, model.centroids)
        plan = solve_exact(OTProblem(cost, p, q))
        return plan.objective
    raise ValueError(f"unknown measure {measure!r}")
