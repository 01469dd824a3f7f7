"""Ranking evaluation: Spearman correlation with tie-aware fractional
ranks, error-reduction rates, average-rank merging of system rankings,
and layer sweeps of the transport score.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import DivisionDomain, InsufficientOverlap
from .occurrences import LayerStrategy, build_usage_set, group_occurrences, strategy_label
from .transport import ot_change_score


@dataclass(frozen=True)
class RankedList:
    """Words ordered by a change score.

    higher_means_change records the score's direction explicitly; gold
    relatedness scores set it to False (higher = more stable meaning).
    """

    entries: tuple  # of (word, score)
    higher_means_change: bool = True

    def __post_init__(self):
        words = [w for w, _ in self.entries]
        if len(set(words)) != len(words):
            raise ValueError("duplicate words in ranked list")
        if not all(np.isfinite(s) for _, s in self.entries):
            raise ValueError("non-finite score in ranked list")

    def scores(self) -> dict:
        return dict(self.entries)

    def change_scores(self) -> dict:
        """Scores oriented so that larger always means more change."""
        sign = 1.0 if self.higher_means_change else -1.0
        return {w: sign * s for w, s in self.entries}


def _common_words(lists) -> list:
    common = set(w for w, _ in lists[0].entries)
    for rl in lists[1:]:
        common &= set(w for w, _ in rl.entries)
    return sorted(common)


def spearman(a: RankedList, b: RankedList) -> float:
    """Spearman's rho: Pearson correlation of fractional (average) ranks
    over the two lists' common words, after direction normalization."""
    words = _common_words([a, b])
    if len(words) < 3:
        raise InsufficientOverlap(f"only {len(words)} words in common, need at least 3")
    sa, sb = a.change_scores(), b.change_scores()
    ra = rankdata([sa[w] for w in words])
    rb = rankdata([sb[w] for w in words])
    if np.std(ra) == 0 or np.std(rb) == 0:
        raise InsufficientOverlap("constant ranking, correlation undefined")
    return float(np.corrcoef(ra, rb)[0, 1])


def error_reduction(rho_new: float, rho_base: float) -> float:
    """Relative shrinkage of the gap to perfect correlation."""
    if rho_base >= 1.0:
        raise DivisionDomain("baseline correlation must be < 1")
    return (rho_new - rho_base) / (1.0 - rho_base)


def merge_average_rank(lists) -> RankedList:
    """Average each word's fractional rank across direction-normalized
    lists (rank 1 = most changed); output sorted ascending, ties broken
    lexicographically by word."""
    if len(lists) < 2:
        raise InsufficientOverlap("need at least two lists to merge")
    words = _common_words(lists)
    if not words:
        raise InsufficientOverlap("no common words")
    sums = np.zeros(len(words))
    for rl in lists:
        scores = rl.change_scores()
        # rank 1 = largest change score
        ranks = rankdata([-scores[w] for w in words])
        sums += ranks
    avg = sums / len(lists)
    order = sorted(range(len(words)), key=lambda i: (avg[i], words[i]))
    return RankedList(
        tuple((words[i], float(avg[i])) for i in order),
        higher_means_change=False,
    )


def gold_ranked_list(gold_table: dict) -> RankedList:
    """RankedList from a gold table (word -> (score, n) or word -> score)."""
    entries = []
    for word in sorted(gold_table):
        value = gold_table[word]
        score = value[0] if isinstance(value, tuple) else value
        entries.append((word, float(score)))
    return RankedList(tuple(entries), higher_means_change=False)


def score_all_words(occs, strat: LayerStrategy, **solver_kwargs) -> RankedList:
    """Transport change score for every word present in both periods.

    Raises if the store does not contain exactly two period labels or a
    word appears in only one of them.
    """
    groups = group_occurrences(occs)
    periods = sorted({period for _, period in groups})
    if len(periods) != 2:
        raise InsufficientOverlap(f"expected exactly 2 periods, found {periods}")
    old, new = periods
    words = sorted({word for word, _ in groups})
    entries = []
    for word in words:
        for period in (old, new):
            if (word, period) not in groups:
                raise InsufficientOverlap(f"word {word!r} missing from period {period!r}")
        src = build_usage_set(groups[(word, old)], word, old, strat)
        dst = build_usage_set(groups[(word, new)], word, new, strat)
        entries.append((word, ot_change_score(src, dst, **solver_kwargs)))
    return RankedList(tuple(entries), higher_means_change=True)


def layer_sweep(occs, gold_table: dict, strategies, **solver_kwargs) -> list[dict]:
    """Spearman against gold for each layer strategy."""
    gold_list = gold_ranked_list(gold_table)
    rows = []
    for strat in strategies:
        ranked = score_all_words(occs, strat, **solver_kwargs)
        rho = spearman(ranked, gold_list)
        rows.append(
            {
                "strategy": strategy_label(strat),
                "spearman": rho,
                "n_words": len(_common_words([ranked, gold_list])),
            }
        )
    return rows
