"""Batched hidden-state extraction with subword-span mean pooling.

For every occurrence the target word's character span is mapped to the
model tokens that overlap it; at each hidden layer (embedding layer
included) the vectors of those tokens are averaged into one word vector.
Occurrences whose span maps to zero tokens — typically because the
sentence was truncated at the model's maximum length — are skipped and
reported, never silently dropped.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

from .records import SentenceOccurrence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OccurrenceVectors:
    """Per-layer pooled vectors for one successfully processed occurrence."""

    word: str
    period: str
    occ_id: str
    layers: tuple  # one float32 vector per layer, embedding layer first


@dataclass(frozen=True)
class SkippedOccurrence:
    """An occurrence dropped from the output, with the reason why."""

    word: str
    period: str
    occ_id: str
    reason: str


def _span_token_indices(offsets, special_mask, span_start: int, span_end: int) -> list[int]:
    """Token positions whose character range overlaps the target span."""
    picked = []
    for idx, ((tok_start, tok_end), special) in enumerate(zip(offsets, special_mask)):
        if special or tok_end <= tok_start:
            continue
        if tok_start < span_end and tok_end > span_start:
            picked.append(idx)
    return picked


def extract(
    occurrences: list[SentenceOccurrence],
    model_path: str,
    batch_size: int = 8,
    device: str = "cpu",
    surface_match: bool = False,
) -> tuple[list[OccurrenceVectors], list[SkippedOccurrence]]:
    """Run the model over all sentences and pool target-span subwords.

    Returns (processed, skipped). ``surface_match=True`` additionally
    skips occurrences whose span text differs from the target word's
    surface form. Inference runs under no_grad in eval mode, so repeated
    runs over identical inputs are deterministic.
    """
    tokenizer = AutoTokenizer.from_pretrained(model_path, use_fast=True)
    model = AutoModel.from_pretrained(model_path, output_hidden_states=True)
    model.to(device)
    model.eval()

    processed: list[OccurrenceVectors] = []
    skipped: list[SkippedOccurrence] = []

    def skip(occ, reason):
        logger.warning("skipping occurrence %r of %r/%r: %s", occ.occ_id, occ.word, occ.period, reason)
        skipped.append(SkippedOccurrence(occ.word, occ.period, occ.occ_id, reason))

    todo = []
    for occ in occurrences:
        if surface_match and occ.span_text != occ.word:
            skip(occ, f"span text {occ.span_text!r} does not match word surface form")
            continue
        todo.append(occ)

    with torch.no_grad():
        for lo in range(0, len(todo), batch_size):
            batch = todo[lo : lo + batch_size]
            enc = tokenizer(
                [occ.sentence for occ in batch],
                padding=True,
                truncation=True,
                return_offsets_mapping=True,
                return_special_tokens_mask=True,
                return_tensors="pt",
            )
            offsets = enc.pop("offset_mapping").tolist()
            special = enc.pop("special_tokens_mask").tolist()
            enc = {k: v.to(device) for k, v in enc.items()}
            hidden = model(**enc).hidden_states  # (depth+1) x (B, T, H)
            for b, occ in enumerate(batch):
                token_idx = _span_token_indices(
                    offsets[b], special[b], occ.span_start, occ.span_end
                )
                if not token_idx:
                    skip(occ, "target span maps to zero model tokens (sentence truncated?)")
                    continue
                layers = tuple(
                    layer[b, token_idx].mean(dim=0).cpu().numpy().astype(np.float32)
                    for layer in hidden
                )
                processed.append(OccurrenceVectors(occ.word, occ.period, occ.occ_id, layers))
    return processed, skipped
