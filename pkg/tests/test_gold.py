import numpy as np
import pytest

from semshift.errors import InsufficientData, NoUsableJudgments, ParseError
from semshift.gold import (
    AnnotationRecord,
    agreement_report,
    build_gold_table,
    compare_score,
    krippendorff_alpha,
    pairwise_weighted_kappas,
    read_annotations,
    read_gold_tsv,
    weighted_kappa,
    write_gold_tsv,
)


def rec(word, scores):
    return AnnotationRecord(word, 1997, "old", 2018, "new", tuple(scores))


class TestReadAnnotations:
    def test_sample_file(self, sample_annotation_file):
        records = read_annotations(sample_annotation_file)
        assert len(records) == 5
        assert records[0].word == "globinski"
        assert records[0].scores == (2, 3, 2)
        assert records[1].year_old == 1997

    def test_label_out_of_range_names_row(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text(
            "word\tyear_old\tsentence_old\tyear_new\tsentence_new\tscore_a1\n"
            "w\t1990\ts\t2018\ts\t5\n"
        )
        with pytest.raises(ParseError, match=":2"):
            read_annotations(path)

    def test_missing_column_names_row(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text(
            "word\tyear_old\tsentence_old\tyear_new\tsentence_new\tscore_a1\n"
            "w\t1990\ts\t2018\ts\n"
        )
        with pytest.raises(ParseError, match=":2"):
            read_annotations(path)


class TestCompareScore:
    def test_all_fours(self):
        assert compare_score([rec("w", (4, 4, 4))] * 3) == pytest.approx(4.0)

    def test_zero_drops_single_decision(self):
        got = compare_score([rec("w", (4, 4, 0)), rec("w", (2, 2, 2))])
        assert got == pytest.approx(2.8)

    def test_no_usable(self):
        with pytest.raises(NoUsableJudgments):
            compare_score([rec("w", (0, 0, 0))])

    def test_permutation_invariance(self, rng):
        records = [rec("w", tuple(rng.integers(0, 5, 3))) for _ in range(20)]
        if all(s == 0 for r in records for s in r.scores):
            return
        base = compare_score(records)
        assert compare_score(records[::-1]) == base
        flipped = [rec("w", r.scores[::-1]) for r in records]
        assert compare_score(flipped) == base

    def test_range(self, rng):
        for _ in range(50):
            scores = tuple(int(x) for x in rng.integers(0, 5, 3))
            if all(s == 0 for s in scores):
                continue
            assert 1.0 <= compare_score([rec("w", scores)]) <= 4.0


class TestGoldTable:
    def test_appendix_sample_means(self, sample_annotation_file):
        records = read_annotations(sample_annotation_file)
        table = build_gold_table(records)
        assert table["glinast"][0] == pytest.approx(4.0, abs=1e-12)
        assert table["burka"][0] == pytest.approx(1.0, abs=1e-12)
        assert table["globinski"][0] == pytest.approx(7.0 / 3.0, abs=1e-12)
        assert table["ogaben"][0] == pytest.approx(11.0 / 3.0, abs=1e-12)
        assert table["gazela"][0] == pytest.approx(2.0, abs=1e-12)
        assert all(n == 3 for _, n in table.values())

    def test_all_zero_word_excluded(self):
        records = [rec("ok", (3, 3, 3)), rec("dropme", (0, 0, 0))]
        table = build_gold_table(records)
        assert "dropme" not in table
        assert table["ok"][0] == pytest.approx(3.0)

    def test_word_independence(self):
        records = [rec("a", (1, 2, 3)), rec("b", (4, 4, 4))]
        with_b = build_gold_table(records)
        without_b = build_gold_table([records[0]])
        assert with_b["a"] == without_b["a"]

    def test_tsv_round_trip(self, tmp_path):
        table = {"a": (1.5, 3), "b": (4.0, 6)}
        path = tmp_path / "gold.tsv"
        write_gold_tsv(table, path)
        assert read_gold_tsv(path) == table


class TestKrippendorffAlpha:
    def test_perfect_agreement(self):
        records = [rec("w", (1, 1, 1)), rec("w", (4, 4, 4)), rec("w", (2, 2, 2))]
        for metric in ("nominal", "ordinal", "interval"):
            assert krippendorff_alpha(records, metric) == pytest.approx(1.0)

    def test_single_item_all_different(self):
        # Hand-computed coincidence matrix for one unit with labels
        # (1, 2, 3): observed coincidences o_ck = 1/2 for each unordered
        # pair, and expected n_c n_k / (n - 1) = 1/2 as well, so observed
        # equals expected disagreement and alpha is exactly 0 for every
        # difference metric.
        records = [rec("w", (1, 2, 3))]
        for metric in ("nominal", "ordinal", "interval"):
            assert krippendorff_alpha(records, metric) == pytest.approx(0.0, abs=1e-12)

    def test_systematic_disagreement_negative(self):
        # Two units, both (1, 2): hand computation gives nominal
        # D_o = 1, D_e = 2/3, so alpha = -1/2.
        records = [rec("w", (1, 2)), rec("w", (1, 2))]
        assert krippendorff_alpha(records, "nominal") == pytest.approx(-0.5, abs=1e-12)

    def test_zero_treated_as_missing(self):
        with_zero = [rec("w", (3, 3, 0)), rec("w", (2, 4, 0))]
        without = [rec("w", (3, 3)), rec("w", (2, 4))]
        for metric in ("nominal", "ordinal", "interval"):
            assert krippendorff_alpha(with_zero, metric) == krippendorff_alpha(without, metric)

    def test_insufficient_data(self):
        with pytest.raises(InsufficientData):
            krippendorff_alpha([rec("w", (1, 0, 0))], "nominal")


class TestWeightedKappa:
    def test_identical_columns(self):
        col = [1, 2, 3, 4, 2, 3]
        for weights in ("linear", "quadratic"):
            assert weighted_kappa(col, col, weights) == pytest.approx(1.0)

    def test_independent_columns_near_zero(self):
        rng = np.random.default_rng(0)
        a = rng.integers(1, 5, 100_000)
        b = rng.integers(1, 5, 100_000)
        for weights in ("linear", "quadratic"):
            assert abs(weighted_kappa(list(a), list(b), weights)) < 0.02

    def test_zero_pairs_excluded(self):
        a = [1, 2, 0, 3]
        b = [1, 2, 4, 0]
        assert weighted_kappa(a, b, "linear") == weighted_kappa([1, 2], [1, 2], "linear")

    def test_pairwise(self):
        records = [rec("w", (1, 1, 2)), rec("w", (3, 3, 3)), rec("w", (4, 4, 2))]
        kappas = pairwise_weighted_kappas(records, "linear")
        assert set(kappas) == {"(1, 2)", "(1, 3)", "(2, 3)"}
        assert kappas["(1, 2)"] == pytest.approx(1.0)


class TestAgreementReport:
    def test_unanimous(self):
        report = agreement_report([rec("w", (2, 2, 2)), rec("w", (4, 4, 4))])
        assert report["agreement_rate"] == 1.0
        assert report["disagreements"] == {}

    def test_breakdown(self):
        records = [rec("w", (3, 4, 4)), rec("w", (2, 3, 3)), rec("w", (1, 1, 1))]
        report = agreement_report(records)
        assert report["agreement_rate"] == pytest.approx(1 / 3)
        assert report["disagreements"] == {"2-3": 2, "3-4": 2}
        assert report["disagreement_fractions"]["3-4"] == pytest.approx(0.5)

    def test_sample_file(self, sample_annotation_file):
        records = read_annotations(sample_annotation_file)
        report = agreement_report(records)
        assert report["items_considered"] == 5
        assert report["items_matched"] == 3
