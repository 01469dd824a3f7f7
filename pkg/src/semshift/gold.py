"""Gold-standard aggregation of sentence-pair relatedness annotations.

Annotators label each sentence pair on a 1..4 relatedness scale; 0 marks
a decision that could not be made and is treated as missing. A word's
gold score is the mean of all usable labels over all its pairs (higher =
more stable meaning). Reliability statistics: Krippendorff's alpha with
nominal/ordinal/interval differences, pairwise Cohen's weighted kappa,
and an absolute-agreement breakdown.
"""

from __future__ import annotations

import csv
import itertools
import logging
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, NoUsableJudgments, ParseError

log = logging.getLogger(__name__)

LABELS = (1, 2, 3, 4)


@dataclass(frozen=True)
class AnnotationRecord:
    word: str
    year_old: int
    sent_old: str
    year_new: int
    sent_new: str
    scores: tuple  # per-annotator labels, each in {0,1,2,3,4}; 0 = missing


def read_annotations(path) -> list[AnnotationRecord]:
    """Parse the annotation TSV; malformed rows abort with a row number."""
    records = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty annotation file", str(path)) from None
        fixed = ["word", "year_old", "sentence_old", "year_new", "sentence_new"]
        if header[: len(fixed)] != fixed:
            raise ParseError(f"bad header, expected columns {fixed} first", f"{path}:1")
        n_annotators = len(header) - len(fixed)
        if n_annotators < 1:
            raise ParseError("no annotator score columns", f"{path}:1")
        for rowno, row in enumerate(reader, start=2):
            if not row:
                continue
            where = f"{path}:{rowno}"
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} columns, got {len(row)}", where)
            try:
                year_old, year_new = int(row[1]), int(row[3])
            except ValueError as exc:
                raise ParseError(f"non-integer year: {exc}", where) from exc
            scores = []
            for cell in row[len(fixed) :]:
                try:
                    label = int(cell)
                except ValueError as exc:
                    raise ParseError(f"non-integer label {cell!r}", where) from exc
                if label not in (0, 1, 2, 3, 4):
                    raise ParseError(f"label {label} outside {{0..4}}", where)
                scores.append(label)
            records.append(
                AnnotationRecord(row[0], year_old, row[2], year_new, row[4], tuple(scores))
            )
    return records


def compare_score(records) -> float:
    """Mean of all non-zero labels over all of one word's sentence pairs.

    Each 0 drops that single annotator decision, not the whole pair.
    """
    labels = [s for rec in records for s in rec.scores if s != 0]
    if not labels:
        raise NoUsableJudgments("all labels are 0")
    return float(np.mean(labels))


def build_gold_table(records) -> dict:
    """word -> (compare score, number of usable judgments).

    Words whose every decision is 0 are excluded with a warning.
    """
    by_word: dict = {}
    for rec in records:
        by_word.setdefault(rec.word, []).append(rec)
    table = {}
    for word in sorted(by_word):
        recs = by_word[word]
        try:
            score = compare_score(recs)
        except NoUsableJudgments:
            log.warning("excluding word %r: no usable judgments", word)
            continue
        n = sum(1 for rec in recs for s in rec.scores if s != 0)
        table[word] = (score, n)
    return table


def write_gold_tsv(table: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("word\tcompare_score\tn_judgments\n")
        for word in sorted(table):
            score, n = table[word]
            fh.write(f"{word}\t{score!r}\t{n}\n")


def read_gold_tsv(path) -> dict:
    table = {}
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header[:2] != ["word", "compare_score"]:
            raise ParseError("expected gold TSV header 'word\\tcompare_score\\t...'", f"{path}:1")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            try:
                table[parts[0]] = (float(parts[1]), int(parts[2]) if len(parts) > 2 else 0)
            except (IndexError, ValueError) as exc:
                raise ParseError(f"bad gold row: {exc}", f"{path}:{lineno}") from exc
    return table


# ---------------------------------------------------------------------------
# Reliability coefficients. All treat 0 labels as missing data.
# ---------------------------------------------------------------------------


def _coincidence_matrix(records):
    """Standard coincidence counts over labels 1..4; units with fewer
    than two usable labels contribute nothing."""
    idx = {label: i for i, label in enumerate(LABELS)}
    o = np.zeros((len(LABELS), len(LABELS)))
    for rec in records:
        usable = [s for s in rec.scores if s != 0]
        m_u = len(usable)
        if m_u < 2:
            continue
        for c, k in itertools.permutations(usable, 2):
            o[idx[c], idx[k]] += 1.0 / (m_u - 1)
    return o


def _delta_sq(metric: str, n_c: np.ndarray) -> np.ndarray:
    """Squared difference delta^2(c, k) for each label pair."""
    values = np.array(LABELS, dtype=np.float64)
    L = len(LABELS)
    d = np.zeros((L, L))
    for i in range(L):
        for j in range(L):
            if i == j:
                continue
            if metric == "nominal":
                d[i, j] = 1.0
            elif metric == "interval":
                d[i, j] = (values[i] - values[j]) ** 2
            elif metric == "ordinal":
                lo, hi = min(i, j), max(i, j)
                d[i, j] = (n_c[lo : hi + 1].sum() - (n_c[lo] + n_c[hi]) / 2.0) ** 2
            else:
                raise ValueError(f"unknown metric {metric!r}")
    return d


def krippendorff_alpha(records, metric: str = "interval") -> float:
    """Krippendorff's alpha, 1 - observed/expected disagreement."""
    o = _coincidence_matrix(records)
    n_c = o.sum(axis=1)
    n = n_c.sum()
    if n < 2:
        raise InsufficientData("need at least one unit with two usable labels")
    d = _delta_sq(metric, n_c)
    d_obs = float((o * d).sum()) / n
    d_exp = float((np.outer(n_c, n_c) * d).sum()) / (n * (n - 1))
    if d_exp == 0.0:
        # No label variance at all; agreement is trivially perfect.
        return 1.0
    return 1.0 - d_obs / d_exp


def weighted_kappa(a, b, weights: str = "linear") -> float:
    """Cohen's weighted kappa between two annotator columns on the 1..4
    label space. Items where either label is 0 are excluded."""
    pairs = [(x, y) for x, y in zip(a, b, strict=True) if x != 0 and y != 0]
    if not pairs:
        raise InsufficientData("no jointly usable items")
    L = len(LABELS)
    obs = np.zeros((L, L))
    for x, y in pairs:
        obs[x - 1, y - 1] += 1
    obs /= obs.sum()
    exp = np.outer(obs.sum(axis=1), obs.sum(axis=0))
    i = np.arange(L)
    diff = np.abs(i[:, None] - i[None, :]) / (L - 1)
    if weights == "linear":
        w = diff
    elif weights == "quadratic":
        w = diff**2
    else:
        raise ValueError(f"unknown weight scheme {weights!r}")
    denom = float((w * exp).sum())
    if denom == 0.0:
        raise InsufficientData("no expected disagreement (single label value)")
    return 1.0 - float((w * obs).sum()) / denom


def pairwise_weighted_kappas(records, weights: str = "linear") -> dict:
    """Weighted kappa for every annotator pair, keyed '(i, j)' 1-based."""
    n_annot = len(records[0].scores)
    out = {}
    for i, j in itertools.combinations(range(n_annot), 2):
        col_i = [rec.scores[i] for rec in records]
        col_j = [rec.scores[j] for rec in records]
        out[f"({i + 1}, {j + 1})"] = weighted_kappa(col_i, col_j, weights)
    return out


def agreement_report(records) -> dict:
    """Absolute agreement rate plus a breakdown of disagreeing label pairs.

    An item counts as matched when all its usable (non-zero) labels are
    identical; items with fewer than two usable labels are skipped. The
    breakdown counts each unordered pair of differing labels once per
    disagreeing annotator pair.
    """
    matched = 0
    considered = 0
    breakdown: Counter = Counter()
    for rec in records:
        usable = [s for s in rec.scores if s != 0]
        if len(usable) < 2:
            continue
        considered += 1
        if len(set(usable)) == 1:
            matched += 1
        else:
            for x, y in itertools.combinations(usable, 2):
                if x != y:
                    breakdown[(min(x, y), max(x, y))] += 1
    rate = matched / considered if considered else 0.0
    total_disagreements = sum(breakdown.values())
    return {
        "agreement_rate": rate,
        "items_considered": considered,
        "items_matched": matched,
        "disagreements": {
            f"{x}-{y}": count for (x, y), count in sorted(breakdown.items())
        },
        "disagreement_fractions": {
            f"{x}-{y}": count / total_disagreements
            for (x, y), count in sorted(breakdown.items())
        }
        if total_disagreements
        else {},
    }
