"""Writers for the occurrence-embedding file formats and the skip report.

The formats mirror what the scoring toolkit reads: JSON-lines with one
record per (occurrence, layer), or the equivalent length-prefixed binary
layout (magic "OCE1"). Records are emitted in (word, period, occ_id)
order with layers ascending, and vectors are stored as float32.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .pipeline import OccurrenceVectors, SkippedOccurrence

BINARY_MAGIC = b"OCE1"


def _sorted(occs):
    return sorted(occs, key=lambda o: (o.word, o.period, o.occ_id))


def write_jsonl(occs: list[OccurrenceVectors], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for occ in _sorted(occs):
            for layer, vec in enumerate(occ.layers):
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


def _write_lp_str(fh, s: str) -> None:
    data = s.encode("utf-8")
    fh.write(struct.pack("<I", len(data)))
    fh.write(data)


def write_binary(occs: list[OccurrenceVectors], path) -> None:
    occs = _sorted(occs)
    dim = int(np.asarray(occs[0].layers[0]).shape[0]) if occs else 0
    depth = len(occs[0].layers) - 1 if occs else 0
    n_records = sum(len(o.layers) for o in occs)
    with open(path, "wb") as fh:
        fh.write(BINARY_MAGIC)
        _write_lp_str(fh, json.dumps({"dim": dim, "layers": depth + 1, "records": n_records}))
        for occ in occs:
            for layer, vec in enumerate(occ.layers):
                _write_lp_str(fh, occ.word)
                _write_lp_str(fh, occ.period)
                _write_lp_str(fh, occ.occ_id)
                fh.write(struct.pack("<H", layer))
                fh.write(np.asarray(vec, dtype="<f4").tobytes())


def write_occurrences(occs: list[OccurrenceVectors], path, binary: bool = False) -> None:
    (write_binary if binary else write_jsonl)(occs, path)


def write_report(skipped: list[SkippedOccurrence], n_processed: int, path) -> None:
    """Sidecar JSON listing every skipped occurrence and summary counts."""
    payload = {
        "processed": n_processed,
        "skipped": len(skipped),
        "skipped_occurrences": [
            {"word": s.word, "period": s.period, "occ_id": s.occ_id, "reason": s.reason}
            for s in skipped
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2)
        fh.write("\n")
