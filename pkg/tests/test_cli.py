import json

import numpy as np
import pytest

from semshift.cli import main
from semshift.static_embeddings import StaticEmbeddingTable, save_word2vec
from semshift.occurrences import write_occurrence_file

from support import random_occurrences


@pytest.fixture
def occurrence_file(rng, tmp_path):
    occs = random_occurrences(
        rng, ["alpha", "beta", "gamma", "delta"], ["1990-1997", "2018"], 5, 12, 6
    )
    path = tmp_path / "occs.jsonl"
    write_occurrence_file(occs, path)
    return path


def read_scores(path):
    lines = path.read_text().splitlines()
    assert lines[0] == "word\tscore"
    return {w: float(s) for w, s in (line.split("\t") for line in lines[1:])}


class TestScoreOt:
    def test_writes_sorted_tsv(self, occurrence_file, tmp_path):
        out = tmp_path / "scores.tsv"
        assert main(["score-ot", "--embeddings", str(occurrence_file), "--out", str(out), "--jobs", "1"]) == 0
        scores = read_scores(out)
        assert set(scores) == {"alpha", "beta", "gamma", "delta"}
        values = [float(line.split("\t")[1]) for line in out.read_text().splitlines()[1:]]
        assert values == sorted(values, reverse=True)

    def test_byte_identical_reruns(self, occurrence_file, tmp_path):
        out1, out2 = tmp_path / "a.tsv", tmp_path / "b.tsv"
        main(["score-ot", "--embeddings", str(occurrence_file), "--out", str(out1), "--jobs", "1"])
        main(["score-ot", "--embeddings", str(occurrence_file), "--out", str(out2), "--jobs", "2"])
        assert out1.read_bytes() == out2.read_bytes()

    def test_missing_period_is_diagnostic_error(self, rng, tmp_path, capsys):
        occs = random_occurrences(rng, ["solo"], ["1990-1997"], 3, 2, 4)
        occs += random_occurrences(rng, ["both"], ["1990-1997", "2018"], 3, 2, 4)
        path = tmp_path / "occs.jsonl"
        write_occurrence_file(occs, path)
        rc = main(["score-ot", "--embeddings", str(path), "--out", str(tmp_path / "o.tsv")])
        assert rc == 1
        assert "solo" in capsys.readouterr().err

    def test_empty_file_errors(self, tmp_path, capsys):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        rc = main(["score-ot", "--embeddings", str(path), "--out", str(tmp_path / "o.tsv")])
        assert rc == 1
        assert "no occurrences" in capsys.readouterr().err

    def test_nonexistent_path_errors(self, tmp_path, capsys):
        rc = main(["score-ot", "--embeddings", str(tmp_path / "nope"), "--out", str(tmp_path / "o.tsv")])
        assert rc == 1

    def test_sinkhorn_solver_flag(self, occurrence_file, tmp_path):
        out = tmp_path / "scores.tsv"
        rc = main(
            [
                "score-ot", "--embeddings", str(occurrence_file), "--out", str(out),
                "--solver", "sinkhorn", "--reg", "0.05", "--max-iter", "2000", "--tol", "1e-6",
                "--jobs", "1",
            ]
        )
        assert rc == 0
        assert set(read_scores(out)) == {"alpha", "beta", "gamma", "delta"}


class TestScoreBaseline:
    def test_cluster_requires_seed(self, occurrence_file, tmp_path, capsys):
        rc = main(
            ["score-baseline", "--method", "cluster-jsd", "--embeddings", str(occurrence_file),
             "--out", str(tmp_path / "o.tsv")]
        )
        assert rc == 1
        assert "seed" in capsys.readouterr().err

    def test_cluster_wd_identical_periods(self, rng, tmp_path):
        # same vectors in both periods -> near-zero change under WD
        occs = []
        layers = rng.normal(size=(8, 3, 4))
        from support import make_occurrence

        for period in ("1990-1997", "2018"):
            for i in range(8):
                occs.append(make_occurrence("w", period, f"{i}", layers[i]))
        path = tmp_path / "occs.jsonl"
        write_occurrence_file(occs, path)
        out = tmp_path / "scores.tsv"
        rc = main(
            ["score-baseline", "--method", "cluster-wd", "--embeddings", str(path),
             "--k", "3", "--seed", "0", "--out", str(out)]
        )
        assert rc == 0
        assert read_scores(out)["w"] == pytest.approx(0.0, abs=1e-9)

    def test_sgns_rotation(self, rng, tmp_path):
        from scipy.stats import ortho_group

        words = [f"w{i}" for i in range(15)]
        A = StaticEmbeddingTable(words, rng.normal(size=(15, 5)))
        B = StaticEmbeddingTable(words, A.matrix @ ortho_group.rvs(5, random_state=1))
        pa, pb = tmp_path / "a.txt", tmp_path / "b.txt"
        save_word2vec(A, pa)
        save_word2vec(B, pb)
        out = tmp_path / "scores.tsv"
        rc = main(
            ["score-baseline", "--method", "sgns-op-cd", "--static-a", str(pa),
             "--static-b", str(pb), "--out", str(out)]
        )
        assert rc == 0
        assert all(v < 1e-6 for v in read_scores(out).values())

    def test_nn_overlap_identical_tables(self, rng, tmp_path):
        words = [f"w{i}" for i in range(12)]
        A = StaticEmbeddingTable(words, rng.normal(size=(12, 5)))
        pa = tmp_path / "a.txt"
        save_word2vec(A, pa)
        out = tmp_path / "scores.tsv"
        rc = main(
            ["score-baseline", "--method", "nn-overlap", "--static-a", str(pa),
             "--static-b", str(pa), "--neighbors", "5", "--out", str(out)]
        )
        assert rc == 0
        assert all(v == 0.0 for v in read_scores(out).values())


class TestGoldAndEvaluate:
    def test_gold_outputs(self, sample_annotation_file, tmp_path):
        out = tmp_path / "gold.tsv"
        rc = main(["gold", "--annotations", str(sample_annotation_file), "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "word\tcompare_score\tn_judgments"
        scores = {line.split("\t")[0]: float(line.split("\t")[1]) for line in lines[1:]}
        assert scores["glinast"] == pytest.approx(4.0)
        assert scores["burka"] == pytest.approx(1.0)
        report = json.loads((tmp_path / "gold.tsv.agreement.json").read_text())
        assert set(report["krippendorff_alpha"]) == {"nominal", "ordinal", "interval"}
        assert "agreement_rate" in report["agreement"]

    def test_bad_label_row_number(self, tmp_path, capsys):
        path = tmp_path / "ann.tsv"
        path.write_text(
            "word\tyear_old\tsentence_old\tyear_new\tsentence_new\tscore_a1\n"
            "w\t1990\ts\t2018\ts\t5\n"
        )
        rc = main(["gold", "--annotations", str(path), "--out", str(tmp_path / "g.tsv")])
        assert rc == 1
        assert ":2" in capsys.readouterr().err

    def test_evaluate_with_baseline(self, tmp_path):
        scores = tmp_path / "scores.tsv"
        scores.write_text("word\tscore\na\t0.9\nb\t0.5\nc\t0.1\nd\t0.05\n")
        base = tmp_path / "base.tsv"
        base.write_text("word\tscore\na\t0.6\nb\t0.8\nc\t0.2\nd\t0.1\n")
        gold = tmp_path / "gold.tsv"
        gold.write_text("word\tcompare_score\tn_judgments\na\t1.0\t3\nb\t2.0\t3\nc\t3.5\t3\nd\t3.9\t3\n")
        out = tmp_path / "report.json"
        rc = main(
            ["evaluate", "--scores", str(scores), "--gold", str(gold),
             "--baseline-scores", str(base), "--out", str(out)]
        )
        assert rc == 0
        report = json.loads(out.read_text())
        assert report["spearman"] == pytest.approx(1.0)
        assert report["n_words"] == 4
        assert report["direction_normalized"] is True
        assert report["baseline_spearman"] < 1.0
        assert report["error_reduction"] == pytest.approx(1.0)


class TestSweepAndNorms:
    def test_layer_sweep_outputs(self, occurrence_file, tmp_path):
        gold = tmp_path / "gold.tsv"
        gold.write_text(
            "word\tcompare_score\tn_judgments\n"
            "alpha\t1.2\t3\nbeta\t2.4\t3\ngamma\t3.1\t3\ndelta\t4.0\t3\n"
        )
        out = tmp_path / "sweep.tsv"
        rc = main(["layer-sweep", "--embeddings", str(occurrence_file), "--gold", str(gold), "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 1 + 17
        rows = json.loads((tmp_path / "sweep.tsv.json").read_text())
        assert len(rows) == 17

    def test_norm_report(self, occurrence_file, tmp_path):
        out = tmp_path / "norms.tsv"
        rc = main(["norm-report", "--embeddings", str(occurrence_file), "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "layer\tmean\tmedian\tstd"
        assert len(lines) == 1 + 13
