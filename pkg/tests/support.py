"""Shared test helpers: occurrence builders and a small annotation sample."""

import numpy as np

from semshift.occurrences import LayerStack, OccurrenceEmbedding


def make_occurrence(word, period, occ_id, layers):
    """Build an occurrence from a list of per-layer value lists."""
    return OccurrenceEmbedding(
        word,
        period,
        occ_id,
        LayerStack(tuple(np.asarray(v, dtype=np.float64) for v in layers)),
    )


def random_occurrences(rng, words, periods, n_occ, depth, dim):
    occs = []
    for word in words:
        for period in periods:
            for i in range(n_occ):
                layers = rng.normal(size=(depth + 1, dim))
                occs.append(make_occurrence(word, period, f"{i:04d}", layers))
    return occs


SAMPLE_ANNOTATIONS = (
    "word\tyear_old\tsentence_old\tyear_new\tsentence_new\tscore_a1\tscore_a2\tscore_a3\n"
    "globinski\t1997\tstara poved ena\t2018\tnova poved ena\t2\t3\t2\n"
    "burka\t1997\tstara poved dve\t2018\tnova poved dve\t1\t1\t1\n"
    "glinast\t1997\tstara poved tri\t2018\tnova poved tri\t4\t4\t4\n"
    "ogaben\t1997\tstara poved stiri\t2018\tnova poved stiri\t4\t3\t4\n"
    "gazela\t1997\tstara poved pet\t2018\tnova poved pet\t2\t2\t2\n"
)
