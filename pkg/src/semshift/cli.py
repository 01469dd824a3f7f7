"""Command-line entry point.

Subcommands: score-ot, score-baseline, gold, evaluate, layer-sweep,
norm-report. Defaults mirror the standard setup: second-to-last layer,
k = 5 clusters, uniform marginals, exact solver. Output files are sorted
deterministically (score descending, then word ascending) so runs are
diffable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import clustering, evaluation, gold, occurrences, static_embeddings, transport
from .errors import ParseError, SemshiftError
from .occurrences import AvgPool, Single, default_strategy


def _check_paths(args) -> None:
    for name in ("embeddings", "static_a", "static_b", "annotations", "gold", "scores", "baseline_scores"):
        path = getattr(args, name, None)
        if path is not None and not os.path.exists(path):
            raise ParseError(f"input path does not exist: {path}")


def _strategy_from_args(args, depth: int):
    if getattr(args, "avgpool", None):
        lo, hi = args.avgpool.split(":")
        return AvgPool(int(lo), int(hi))
    if getattr(args, "layer", None) is not None:
        return Single(args.layer)
    return default_strategy(depth)


def _solver_kwargs(args) -> dict:
    if getattr(args, "solver", "exact") == "sinkhorn":
        return {
            "solver": "sinkhorn",
            "reg": args.reg,
            "max_iter": args.max_iter,
            "tol": args.tol,
        }
    return {"solver": "exact"}


def _write_scores(entries, path) -> None:
    ordered = sorted(entries, key=lambda e: (-e[1], e[0]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("word\tscore\n")
        for word, score in ordered:
            fh.write(f"{word}\t{score!r}\n")


def _read_scores(path) -> evaluation.RankedList:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or (lineno == 1 and line.startswith("word\t")):
                continue
            parts = line.split("\t")
            try:
                entries.append((parts[0], float(parts[1])))
            except (IndexError, ValueError) as exc:
                raise ParseError(f"bad score row: {line!r}", f"{path}:{lineno}") from exc
    return evaluation.RankedList(tuple(entries), higher_means_change=True)


def _score_word_ot(task):
    word, src_vectors, dst_vectors, solver_kwargs = task
    src = occurrences.UsageSet(word, "old", src_vectors)
    dst = occurrences.UsageSet(word, "new", dst_vectors)
    return word, transport.ot_change_score(src, dst, **solver_kwargs)


def _run_pool(tasks, worker, jobs: int):
    if jobs <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, tasks))


def cmd_score_ot(args) -> int:
    occs = occurrences.read_occurrence_file(args.embeddings)
    if not occs:
        raise ParseError("no occurrences", str(args.embeddings))
    strat = _strategy_from_args(args, occs[0].stack.depth)
    groups = occurrences.group_occurrences(occs)
    periods = sorted({p for _, p in groups})
    if len(periods) != 2:
        raise SemshiftError(f"expected exactly 2 periods, found {periods}")
    old, new = periods
    words = sorted({w for w, _ in groups})
    tasks = []
    for word in words:
        for period in (old, new):
            if (word, period) not in groups:
                raise SemshiftError(f"word {word!r} is missing from period {period!r}")
        src = occurrences.build_usage_set(groups[(word, old)], word, old, strat)
        dst = occurrences.build_usage_set(groups[(word, new)], word, new, strat)
        tasks.append((word, src.vectors, dst.vectors, _solver_kwargs(args)))
    results = _run_pool(tasks, _score_word_ot, args.jobs)
    _write_scores(results, args.out)
    return 0


def cmd_score_baseline(args) -> int:
    if args.method in ("cluster-jsd", "cluster-wd"):
        occs = occurrences.read_occurrence_file(args.embeddings)
        if not occs:
            raise ParseError("no occurrences", str(args.embeddings))
        strat = _strategy_from_args(args, occs[0].stack.depth)
        groups = occurrences.group_occurrences(occs)
        periods = sorted({p for _, p in groups})
        if len(periods) != 2:
            raise SemshiftError(f"expected exactly 2 periods, found {periods}")
        old, new = periods
        measure = "jsd" if args.method == "cluster-jsd" else "wd"
        entries = []
        for word in sorted({w for w, _ in groups}):
            for period in (old, new):
                if (word, period) not in groups:
                    raise SemshiftError(f"word {word!r} is missing from period {period!r}")
            src = occurrences.build_usage_set(groups[(word, old)], word, old, strat)
            dst = occurrences.build_usage_set(groups[(word, new)], word, new, strat)
            entries.append(
                (
                    word,
                    clustering.cluster_change_score(
                        src,
                        dst,
                        k=args.k,
                        seed=args.seed,
                        measure=measure,
                        restarts=args.restarts,
                        normalize_vectors=args.normalize_vectors,
                    ),
                )
            )
    else:
        table_a = static_embeddings.load_word2vec(args.static_a)
        table_b = static_embeddings.load_word2vec(args.static_b)
        shared = sorted(set(table_a.words) & set(table_b.words))
        if not shared:
            raise SemshiftError("no shared vocabulary between the two tables")
        words = args.words.split(",") if args.words else shared
        entries = []
        if args.method == "sgns-op-cd":
            for word in words:
                entries.append((word, static_embeddings.sgns_op_cd_score(word, table_a, table_b, shared)))
        else:
            for word in words:
                entries.append((word, static_embeddings.nn_overlap_score(word, table_a, table_b, n=args.neighbors)))
    _write_scores(entries, args.out)
    return 0


def cmd_gold(args) -> int:
    records = gold.read_annotations(args.annotations)
    table = gold.build_gold_table(records)
    gold.write_gold_tsv(table, args.out)
    report = {
        "agreement": gold.agreement_report(records),
        "krippendorff_alpha": {
            metric: gold.krippendorff_alpha(records, metric)
            for metric in ("nominal", "ordinal", "interval")
        },
        "pairwise_weighted_kappa": {
            scheme: gold.pairwise_weighted_kappas(records, scheme)
            for scheme in ("linear", "quadratic")
        },
        "n_words": len(table),
        "n_pairs": len(records),
    }
    agreement_out = args.agreement_out or f"{args.out}.agreement.json"
    with open(agreement_out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def cmd_evaluate(args) -> int:
    scores = _read_scores(args.scores)
    gold_list = evaluation.gold_ranked_list(gold.read_gold_tsv(args.gold))
    rho = evaluation.spearman(scores, gold_list)
    report = {
        "system": str(args.scores),
        "spearman": rho,
        "n_words": len(set(w for w, _ in scores.entries) & set(w for w, _ in gold_list.entries)),
        "direction_normalized": True,
    }
    if args.baseline_scores:
        base = _read_scores(args.baseline_scores)
        rho_base = evaluation.spearman(base, gold_list)
        report["baseline_spearman"] = rho_base
        report["error_reduction"] = evaluation.error_reduction(rho, rho_base)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(f"spearman\t{report['spearman']:.6f}")
    print(f"n_words\t{report['n_words']}")
    if "error_reduction" in report:
        print(f"baseline_spearman\t{report['baseline_spearman']:.6f}")
        print(f"error_reduction\t{report['error_reduction']:.6f}")
    return 0


def default_sweep_strategies(depth: int):
    strategies = [Single(i) for i in range(depth + 1)]
    strategies += [
        AvgPool(depth - 4, depth),
        AvgPool(depth - 3, depth),
        AvgPool(depth - 4, depth - 1),
        AvgPool(depth - 3, depth - 1),
    ]
    return strategies


def cmd_layer_sweep(args) -> int:
    occs = occurrences.read_occurrence_file(args.embeddings)
    if not occs:
        raise ParseError("no occurrences", str(args.embeddings))
    gold_table = gold.read_gold_tsv(args.gold)
    strategies = default_sweep_strategies(occs[0].stack.depth)
    rows = evaluation.layer_sweep(occs, gold_table, strategies, **_solver_kwargs(args))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("strategy\tspearman\tn_words\n")
        for row in rows:
            fh.write(f"{row['strategy']}\t{row['spearman']!r}\t{row['n_words']}\n")
    with open(f"{args.out}.json", "w", encoding="utf-8") as fh:
        json.dump(rows, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for row in rows:
        print(f"{row['strategy']}\t{row['spearman']:.4f}")
    return 0


def cmd_norm_report(args) -> int:
    occs = occurrences.read_occurrence_file(args.embeddings)
    if not occs:
        raise ParseError("no occurrences", str(args.embeddings))
    rows = occurrences.layer_norm_stats(occs)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("layer\tmean\tmedian\tstd\n")
        for row in rows:
            fh.write(f"{row['layer']}\t{row['mean']!r}\t{row['median']!r}\t{row['std']!r}\n")
    for row in rows:
        print(f"layer {row['layer']:2d}  mean {row['mean']:.4f}  median {row['median']:.4f}  std {row['std']:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semshift")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solver_flags(p):
        p.add_argument("--solver", choices=["exact", "sinkhorn"], default="exact")
        p.add_argument("--reg", type=float, default=0.01)
        p.add_argument("--max-iter", type=int, default=10_000)
        p.add_argument("--tol", type=float, default=1e-9)

    def add_layer_flags(p):
        p.add_argument("--layer", type=int, default=None, help="single layer index")
        p.add_argument("--avgpool", default=None, metavar="LO:HI", help="average layers LO..HI")

    p = sub.add_parser("score-ot", help="transport change score per word")
    p.add_argument("--embeddings", required=True)
    add_layer_flags(p)
    add_solver_flags(p)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_score_ot)

    p = sub.add_parser("score-baseline", help="baseline change score per word")
    p.add_argument("--method", required=True, choices=["cluster-jsd", "cluster-wd", "sgns-op-cd", "nn-overlap"])
    p.add_argument("--embeddings")
    p.add_argument("--static-a", dest="static_a")
    p.add_argument("--static-b", dest="static_b")
    add_layer_flags(p)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--normalize-vectors", action="store_true")
    p.add_argument("--neighbors", type=int, default=100)
    p.add_argument("--words", default=None, help="comma-separated target words (static methods)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_score_baseline)

    p = sub.add_parser("gold", help="aggregate annotations into gold scores")
    p.add_argument("--annotations", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--agreement-out", default=None)
    p.set_defaults(func=cmd_gold)

    p = sub.add_parser("evaluate", help="Spearman of a score file against gold")
    p.add_argument("--scores", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--baseline-scores", dest="baseline_scores", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("layer-sweep", help="Spearman per layer strategy")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--gold", required=True)
    add_solver_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_layer_sweep)

    p = sub.add_parser("norm-report", help="per-layer L2 norm statistics")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_norm_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _check_paths(args)
        if args.command == "score-baseline" and args.method.startswith("cluster") and args.seed is None:
            raise SemshiftError("--seed is required for clustering methods")
        if args.command == "score-baseline":
            if args.method.startswith("cluster") and not args.embeddings:
                raise SemshiftError("--embeddings is required for clustering methods")
            if not args.method.startswith("cluster") and not (args.static_a and args.static_b):
                raise SemshiftError("--static-a and --static-b are required for static methods")
        return args.func(args)
    except SemshiftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
