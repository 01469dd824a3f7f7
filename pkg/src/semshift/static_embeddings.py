"""Static-embedding baselines: Orthogonal Procrustes alignment with
cosine-distance scoring, and nearest-neighbor-overlap scoring.

Tables are loaded from the word2vec text format (header line with
vocabulary size and dimension, then one token + floats per line).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvariantViolation,
    MissingWord,
    ParseError,
    ShapeMismatch,
    VocabularyTooSmall,
)
from .geometry import cosine_distance

log = logging.getLogger(__name__)


@dataclass
class StaticEmbeddingTable:
    words: list
    matrix: np.ndarray  # (vocab, dim)

    def __post_init__(self):
        self._index = {w: i for i, w in enumerate(self.words)}
        if len(self._index) != len(self.words):
            raise InvariantViolation("duplicate words in embedding table")

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def vector(self, word: str) -> np.ndarray:
        return self.matrix[self._index[word]]

    def rows(self, words) -> np.ndarray:
        return self.matrix[[self._index[w] for w in words]]


def load_word2vec(path) -> StaticEmbeddingTable:
    """Read word2vec text format; rejects duplicates and bad dimensions."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ParseError("expected header 'vocab_count dim'", f"{path}:1")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise ParseError(f"non-integer header field: {header}", f"{path}:1") from exc
        words = []
        seen = set()
        matrix = np.empty((count, dim))
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split(" ")
            word, values = parts[0], parts[1:]
            # Tolerate the trailing-space variant some exporters produce.
            if values and values[-1] == "":
                values = values[:-1]
            row = lineno - 2
            if row >= count:
                raise ParseError(f"more rows than declared vocab_count {count}", f"{path}:{lineno}")
            if len(values) != dim:
                raise ParseError(f"expected {dim} values, got {len(values)}", f"{path}:{lineno}")
            if word in seen:
                raise ParseError(f"duplicate token {word!r}", f"{path}:{lineno}")
            seen.add(word)
            try:
                matrix[row] = [float(v) for v in values]
            except ValueError as exc:
                raise ParseError(f"non-numeric value: {exc}", f"{path}:{lineno}") from exc
            if not np.all(np.isfinite(matrix[row])) or not np.any(matrix[row]):
                raise InvariantViolation(f"{path}:{lineno}: zero or non-finite vector for {word!r}")
            words.append(word)
    if len(words) != count:
        raise ParseError(f"declared {count} rows, found {len(words)}", str(path))
    return StaticEmbeddingTable(words, matrix)


def save_word2vec(table: StaticEmbeddingTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table)} {table.dim}\n")
        for word in table.words:
            values = " ".join(repr(float(x)) for x in table.vector(word))
            fh.write(f"{word} {values}\n")


def procrustes_align(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Orthogonal matrix Q minimizing ||XQ - Y||_F, via SVD of X^T Y.

    No centering or scaling: a pure rotation/reflection. A rank-deficient
    cross-covariance still yields a minimizer; it is logged, not raised.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.shape != Y.shape:
        raise ShapeMismatch(f"anchor matrices differ: {X.shape} vs {Y.shape}")
    U, s, Vt = np.linalg.svd(X.T @ Y)
    if s.size and s[-1] <= 1e-12 * max(1.0, s[0]):
        log.warning("rank-deficient cross-covariance in Procrustes alignment")
    return U @ Vt


def sgns_op_cd_score(
    word: str,
    table_a: StaticEmbeddingTable,
    table_b: StaticEmbeddingTable,
    anchors,
) -> float:
    """Cosine distance between the word's Procrustes-aligned period-A
    vector and its period-B vector."""
    for table, period in ((table_a, "A"), (table_b, "B")):
        if word not in table:
            raise MissingWord(word, period)
        for anchor in anchors:
            if anchor not in table:
                raise MissingWord(anchor, period)
    Q = procrustes_align(table_a.rows(anchors), table_b.rows(anchors))
    return cosine_distance(table_a.vector(word) @ Q, table_b.vector(word))


def _neighbors(table: StaticEmbeddingTable, word: str, n: int) -> set:
    v = table.vector(word)
    sims = table.matrix @ v / (np.linalg.norm(table.matrix, axis=1) * np.linalg.norm(v))
    order = sorted(
        (w for w in table.words if w != word),
        key=lambda w: (-sims[table._index[w]], w),
    )
    return set(order[:n])


def nn_overlap_score(
    word: str,
    table_a: StaticEmbeddingTable,
    table_b: StaticEmbeddingTable,
    n: int = 100,
) -> float:
    """1 - (overlap of the word's top-n neighbor lists) / n.

    Neighbors are computed within each period's own table, so no
    alignment is needed; higher score = more change.
    """
    for table, period in ((table_a, "A"), (table_b, "B")):
        if word not in table:
            raise MissingWord(word, period)
        if len(table) - 1 < n:
            raise VocabularyTooSmall(f"period {period} has {len(table) - 1} other words, need {n}")
    overlap = _neighbors(table_a, word, n) & _neighbors(table_b, word, n)
    return 1.0 - len(overlap) / n
