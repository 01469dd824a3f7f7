"""Per-occurrence embeddings: layer pooling, usage sets, file formats.

An occurrence is one sighting of a target word in one period, already
pooled over its subword tokens by the extractor, leaving one vector per
model layer (index 0 = static embedding layer, index k = final hidden
layer). This module turns stacks of layer vectors into per-occurrence
word vectors under a layer strategy and owns the occurrence file format
(JSON Lines, plus a packed binary variant).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyInput,
    InconsistentDepth,
    InvariantViolation,
    LayerOutOfRange,
    MixedWordOrPeriod,
    ParseError,
)
from .geometry import l2_norm, mean_vector

BINARY_MAGIC = b"OCE1"


@dataclass(frozen=True)
class LayerStack:
    """Ordered per-layer vectors for one occurrence, embedding layer first."""

    layers: tuple  # tuple of 1-D float arrays, length depth + 1

    def __post_init__(self):
        if len(self.layers) < 2:
            raise InvariantViolation("layer stack needs at least 2 layers")
        dim = self.layers[0].shape[0]
        for i, layer in enumerate(self.layers):
            if layer.ndim != 1 or layer.shape[0] != dim:
                raise DimensionMismatch(f"layer {i} has dim {layer.shape}, expected ({dim},)")
            if not np.all(np.isfinite(layer)):
                raise InvariantViolation(f"layer {i} contains NaN or Inf")

    @property
    def depth(self) -> int:
        """k: index of the final hidden layer."""
        return len(self.layers) - 1

    @property
    def dim(self) -> int:
        return self.layers[0].shape[0]


@dataclass(frozen=True)
class OccurrenceEmbedding:
    word: str
    period: str
    occ_id: str
    stack: LayerStack


@dataclass(frozen=True)
class Single:
    """Use one layer as the occurrence vector."""

    index: int


@dataclass(frozen=True)
class AvgPool:
    """Average layers lo..hi inclusive."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise LayerOutOfRange(f"AvgPool range {self.lo}..{self.hi} is empty")


LayerStrategy = Union[Single, AvgPool]


def default_strategy(depth: int) -> Single:
    """Second-to-last hidden layer, the default word representation."""
    return Single(depth - 1)


def strategy_label(strat: LayerStrategy) -> str:
    if isinstance(strat, Single):
        return f"single:{strat.index}"
    return f"avgpool:{strat.lo}-{strat.hi}"


def parse_strategy(text: str) -> LayerStrategy:
    """Parse 'N' or 'LO:HI' into a layer strategy."""
    if ":" in text:
        lo, hi = text.split(":", 1)
        return AvgPool(int(lo), int(hi))
    return Single(int(text))


def pool_layers(occ: OccurrenceEmbedding, strat: LayerStrategy) -> np.ndarray:
    """Collapse an occurrence's layer stack into a single vector."""
    depth = occ.stack.depth
    if isinstance(strat, Single):
        if not 0 <= strat.index <= depth:
            raise LayerOutOfRange(f"layer {strat.index} outside 0..{depth}")
        return np.asarray(occ.stack.layers[strat.index], dtype=np.float64)
    if not (0 <= strat.lo and strat.hi <= depth):
        raise LayerOutOfRange(f"range {strat.lo}..{strat.hi} outside 0..{depth}")
    return mean_vector(occ.stack.layers[strat.lo : strat.hi + 1])


@dataclass(frozen=True)
class UsageSet:
    """All pooled occurrence vectors for one word in one period.

    Row order follows occ_id lexicographic order so cost matrices and
    solver output are reproducible.
    """

    word: str
    period: str
    vectors: np.ndarray  # (n_occurrences, dim) float64
    occ_ids: tuple = field(default=())

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def build_usage_set(
    occs: Sequence[OccurrenceEmbedding],
    word: str,
    period: str,
    strat: LayerStrategy,
) -> UsageSet:
    """Pool every occurrence of (word, period) under one layer strategy."""
    if not occs:
        raise EmptyInput(f"no occurrences for word={word!r} period={period!r}")
    for occ in occs:
        if occ.word != word or occ.period != period:
            raise MixedWordOrPeriod(
                f"occurrence {occ.occ_id!r} belongs to ({occ.word!r}, {occ.period!r}), "
                f"expected ({word!r}, {period!r})"
            )
    ordered = sorted(occs, key=lambda o: o.occ_id)
    vectors = np.stack([pool_layers(o, strat) for o in ordered])
    return UsageSet(word, period, vectors, tuple(o.occ_id for o in ordered))


def layer_norm_stats(occs: Sequence[OccurrenceEmbedding]) -> list[dict]:
    """Mean/median/std of L2 norms at each layer, one row per layer index."""
    if not occs:
        raise EmptyInput("layer_norm_stats of empty sequence")
    depth = occs[0].stack.depth
    for occ in occs:
        if occ.stack.depth != depth:
            raise InconsistentDepth(
                f"occurrence {occ.occ_id!r} has depth {occ.stack.depth}, expected {depth}"
            )
    rows = []
    for layer in range(depth + 1):
        # sorted before reduction so the summary is bit-identical under
        # any permutation of the input occurrences
        norms = np.sort([l2_norm(o.stack.layers[layer]) for o in occs])
        rows.append(
            {
                "layer": layer,
                "mean": float(norms.mean()),
                "median": float(np.median(norms)),
                "std": float(norms.std()),
            }
        )
    return rows


def group_occurrences(occs: Iterable[OccurrenceEmbedding]) -> dict:
    """Index occurrences by (word, period)."""
    groups: dict = {}
    for occ in occs:
        groups.setdefault((occ.word, occ.period), []).append(occ)
    return groups


# ---------------------------------------------------------------------------
# File formats. Canonical text form: JSON Lines, one record per
# (occurrence, layer). Packed binary form: OCE1 magic, length-prefixed
# JSON header, then fixed-layout records with float32 values.
# ---------------------------------------------------------------------------


def _assemble(records: list[tuple], where: str) -> list[OccurrenceEmbedding]:
    """Group (word, period, occ_id, layer, values) rows into occurrences."""
    by_occ: dict = {}
    for word, period, occ_id, layer, values in records:
        key = (word, period, occ_id)
        layers = by_occ.setdefault(key, {})
        if layer in layers:
            raise ParseError(f"duplicate layer {layer} for occurrence {occ_id!r}", where)
        layers[layer] = values
    occs = []
    for (word, period, occ_id), layers in by_occ.items():
        depth = max(layers)
        if sorted(layers) != list(range(depth + 1)):
            raise InvariantViolation(
                f"occurrence {occ_id!r} of {word!r}/{period!r} is missing layers: "
                f"have {sorted(layers)}"
            )
        stack = LayerStack(tuple(layers[i] for i in range(depth + 1)))
        occs.append(OccurrenceEmbedding(word, period, occ_id, stack))
    occs.sort(key=lambda o: (o.word, o.period, o.occ_id))
    return occs


def _read_jsonl(path) -> list[OccurrenceEmbedding]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", where) from exc
            try:
                word = obj["word"]
                period = obj["period"]
                occ_id = obj["occ_id"]
                layer = obj["layer"]
                dim = obj["dim"]
                values = obj["values"]
            except KeyError as exc:
                raise ParseError(f"missing field {exc.args[0]!r}", where) from exc
            if not isinstance(layer, int) or layer < 0:
                raise ParseError(f"layer must be a nonnegative integer, got {layer!r}", where)
            if len(values) != dim:
                raise ParseError(f"dim={dim} but {len(values)} values", where)
            arr = np.asarray(values, dtype=np.float64)
            if not np.all(np.isfinite(arr)):
                raise InvariantViolation(f"{where}: non-finite component in occurrence {occ_id!r}")
            records.append((word, period, occ_id, layer, arr))
    return _assemble(records, str(path))


def _write_jsonl(occs: Sequence[OccurrenceEmbedding], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for occ in sorted(occs, key=lambda o: (o.word, o.period, o.occ_id)):
            for layer, vec in enumerate(occ.stack.layers):
                stored = np.asarray(vec, dtype=np.float32)
                rec = {
                    "word": occ.word,
                    "period": occ.period,
                    "occ_id": occ.occ_id,
                    "layer": layer,
                    "dim": int(stored.shape[0]),
                    "values": [float(x) for x in stored],
                }
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def _read_bytes(fh, n: int, what: str):
    data = fh.read(n)
    if len(data) != n:
        raise ParseError(f"truncated file while reading {what}", f"{fh.name}:byte {fh.tell()}")
    return data


def _read_lp_str(fh, what: str) -> str:
    (n,) = struct.unpack("<I", _read_bytes(fh, 4, f"{what} length"))
    return _read_bytes(fh, n, what).decode("utf-8")


def _write_lp_str(fh, s: str) -> None:
    data = s.encode("utf-8")
    fh.write(struct.pack("<I", len(data)))
    fh.write(data)


def _read_binary(path) -> list[OccurrenceEmbedding]:
    records = []
    with open(path, "rb") as fh:
        magic = _read_bytes(fh, 4, "magic")
        if magic != BINARY_MAGIC:
            raise ParseError(f"bad magic {magic!r}, expected {BINARY_MAGIC!r}", f"{path}:byte 0")
        header = json.loads(_read_lp_str(fh, "header"))
        dim = header["dim"]
        n_records = header["records"]
        for _ in range(n_records):
            word = _read_lp_str(fh, "word")
            period = _read_lp_str(fh, "period")
            occ_id = _read_lp_str(fh, "occ_id")
            (layer,) = struct.unpack("<H", _read_bytes(fh, 2, "layer"))
            raw = _read_bytes(fh, 4 * dim, "values")
            arr = np.frombuffer(raw, dtype="<f4").astype(np.float64)
            if not np.all(np.isfinite(arr)):
                raise InvariantViolation(
                    f"{path}: non-finite component in occurrence {occ_id!r} layer {layer}"
                )
            records.append((word, period, occ_id, int(layer), arr))
        trailing = fh.read(1)
        if trailing:
            raise ParseError("trailing bytes after last record", f"{path}:byte {fh.tell() - 1}")
    return _assemble(records, str(path))


def _write_binary(occs: Sequence[OccurrenceEmbedding], path) -> None:
    occs = sorted(occs, key=lambda o: (o.word, o.period, o.occ_id))
    dim = occs[0].stack.dim if occs else 0
    depth = occs[0].stack.depth if occs else 0
    n_records = sum(len(o.stack.layers) for o in occs)
    with open(path, "wb") as fh:
        fh.write(BINARY_MAGIC)
        _write_lp_str(fh, json.dumps({"dim": dim, "layers": depth + 1, "records": n_records}))
        for occ in occs:
            for layer, vec in enumerate(occ.stack.layers):
                _write_lp_str(fh, occ.word)
                _write_lp_str(fh, occ.period)
                _write_lp_str(fh, occ.occ_id)
                fh.write(struct.pack("<H", layer))
                fh.write(np.asarray(vec, dtype="<f4").tobytes())


def read_occurrence_file(path) -> list[OccurrenceEmbedding]:
    """Read either format, sniffing the binary magic bytes."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == BINARY_MAGIC:
        return _read_binary(path)
    return _read_jsonl(path)


def write_occurrence_file(occs: Sequence[OccurrenceEmbedding], path, binary: bool = False) -> None:
    if binary:
        _write_binary(occs, path)
    else:
        _write_jsonl(occs, path)
