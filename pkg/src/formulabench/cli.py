"""Command-line entry point for the full pipeline.

Subcommands: parse, cluster, pool, judge-aggregate, kappa, eval, compare,
retrieve, serve. Exit codes: 0 success, 1 validation error, 2 I/O error.
A key=value config file can pre-set any flag of the invoked subcommand;
flags given on the command line win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import nullcontext

from . import clustering, collection, judgments, meta, metrics, pooling
from .errors import FormulaBenchError, ParseFailureError, TokenizeError
from .latex import (
    canonical_key,
    normalize_tokens,
    parse_slt,
    serialize_opt,
    serialize_slt,
    slt_to_opt,
    tokenize_latex,
)
from .latex.opt import OptFailureError
from .retriever import RUN_TAG, BaselineRetriever


def _split_csv(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


DEFAULT_MEASURES = {
    "arqmath-visual": "ndcg-prime,map-prime,p-prime@10",
    "ntcir-instance": "p@5,p@10,p@hit,map,mrr",
}


# --- subcommand implementations -------------------------------------------


def _analyze_formula(latex: str, gains: str | None = None) -> dict:
    key = canonical_key(latex)
    record: dict = {
        "latex": latex,
        "key": {"kind": key.kind, "digest": key.digest, "serialized": key.serialized},
        "tokens": None,
        "slt": None,
        "opt": None,
    }
    try:
        toks = normalize_tokens(tokenize_latex(latex))
    except TokenizeError as e:
        record["error"] = str(e)
        return record
    record["tokens"] = [t.text for t in toks]
    try:
        slt = parse_slt(toks)
    except ParseFailureError as e:
        record["error"] = str(e)
        return record
    record["slt"] = serialize_slt(slt)
    try:
        record["opt"] = serialize_opt(slt_to_opt(slt))
    except OptFailureError as e:
        record["opt_error"] = str(e)
    return record


def cmd_parse(args) -> int:
    if args.latex is None and args.input is None:
        raise FormulaBenchError("parse needs --latex or --input")
    formulas = []
    if args.latex is not None:
        formulas.append(args.latex)
    if args.input is not None:
        with open(args.input, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if line.strip() and not line.lstrip().startswith("#"):
                    formulas.append(line)
    records = [_analyze_formula(f) for f in formulas]
    out = _open_out(args.out)
    with out as fh:
        if args.format == "json":
            json.dump({"formulas": records}, fh, indent=2)
            fh.write("\n")
        else:
            for r in records:
                fh.write(
                    "\t".join(
                        [
                            r["latex"],
                            r["key"]["kind"],
                            r["key"]["digest"],
                            r["slt"] or "-",
                            r["opt"] or "-",
                        ]
                    )
                    + "\n"
                )
    return 0


def cmd_cluster(args) -> int:
    corpus = collection.read_corpus(args.corpus)
    clusters = clustering.cluster_corpus(corpus)
    clustering.write_cluster_map(clusters, args.out)
    print(f"instances={len(corpus)} clusters={len(clusters)}")
    return 0


def _load_runs(paths) -> list[collection.RankedRun]:
    runs = [collection.read_run(p) for p in paths]
    tags = [r.run_tag for r in runs]
    if len(set(tags)) != len(tags):
        raise FormulaBenchError(f"duplicate run tags across files: {sorted(tags)}")
    return runs


def _load_cluster_index(args) -> clustering.ClusterIndex | None:
    if getattr(args, "clusters", None) is None:
        return None
    corpus = None
    if getattr(args, "corpus", None) is not None:
        corpus = collection.read_corpus(args.corpus)
    return clustering.read_cluster_map(args.clusters, corpus)


def cmd_pool(args) -> int:
    runs = _load_runs(args.runs)
    topic_ids = sorted({t for run in runs for t in run.topics})
    index = _load_cluster_index(args)
    pools = []
    for topic_id in topic_ids:
        if args.style == "round-robin":
            pool = pooling.pool_round_robin_min_unique(runs, topic_id, args.min_unique)
        elif args.style == "top-k":
            pool = pooling.pool_top_k(runs, topic_id, args.k)
        else:
            if index is None:
                raise FormulaBenchError("visually-distinct pooling needs --clusters")
            pool = pooling.pool_visually_distinct(
                runs,
                topic_id,
                index,
                primary_depth=args.primary_depth,
                other_depth=args.other_depth,
                primary_tags=set(_split_csv(args.primary_tags)),
            )
        pools.append(pool)
    if args.cap is not None:
        if index is None:
            raise FormulaBenchError("--cap needs --clusters to group instances")
        reduced = []
        over = total = 0
        for pool in pools:
            small, report = pooling.select_pool_instances(
                pool, index, args.cap, args.select, args.rrf_k
            )
            reduced.append(small)
            over += report["over_cap"]
            total += report["clusters"]
        pools = reduced
        fraction = over / total if total else 0.0
        print(f"clusters={total} over_cap={over} fraction={fraction:.4f}")
    pooling.write_pools(pools, args.out)
    print(f"topics={len(pools)} pooled_items={sum(len(p.items) for p in pools)}")
    return 0


def cmd_judge_aggregate(args) -> int:
    if args.mode == "sum":
        if args.qrels_b is None:
            raise FormulaBenchError("sum aggregation needs --qrels-a and --qrels-b")
        a = collection.read_qrels(args.qrels_a)
        b = collection.read_qrels(args.qrels_b)
        result = judgments.aggregate_sum_ntcir(a, b)
    elif args.mode == "max":
        index = _load_cluster_index(args)
        if index is None:
            raise FormulaBenchError("max aggregation needs --clusters")
        result = judgments.aggregate_max_visual(collection.read_qrels(args.qrels_a), index)
    else:
        result = judgments.binarize(collection.read_qrels(args.qrels_a))
    collection.write_qrels(result, args.out)
    print(f"records={len(result.records)} scale={result.scale.name}")
    return 0


def cmd_kappa(args) -> int:
    a = collection.read_qrels(args.qrels_a)
    b = collection.read_qrels(args.qrels_b)
    value = judgments.cohen_kappa(a, b)
    if args.format == "json":
        print(json.dumps({"kappa": value, "n": len(a.records)}))
    else:
        print(f"kappa\t{value:.4f}")
    return 0


def _evaluate(args, run) -> metrics.EvalResult:
    qrels = collection.read_qrels(args.qrels)
    index = _load_cluster_index(args)
    measures = _split_csv(args.measures or DEFAULT_MEASURES[args.convention])
    return metrics.evaluate_run(
        run,
        qrels,
        args.convention,
        measures,
        cluster_index=index,
        gain=args.gains,
        cutoff=args.cutoff,
        item_space=args.item_space,
        threads=args.threads,
    )


def cmd_eval(args) -> int:
    runs = _load_runs(args.runs)
    results = [_evaluate(args, run) for run in runs]
    with _open_out(args.out) as fh:
        if args.format == "json":
            metrics.write_eval_json(results, fh)
        else:
            metrics.write_eval_tsv(results, fh)
    return 0


def cmd_compare(args) -> int:
    runs = _load_runs(args.runs)
    qrels = collection.read_qrels(args.qrels)
    topics = collection.read_topics(args.topics)
    index = _load_cluster_index(args)
    stratum_results: dict[str, list[metrics.EvalResult]] = {}
    for run in runs:
        per_stratum = meta.stratify_by_complexity(
            run,
            qrels,
            topics,
            args.convention,
            [args.measure],
            cluster_index=index,
            gain=args.gains,
            item_space=args.item_space,
            threads=args.threads,
        )
        for stratum, result in per_stratum.items():
            stratum_results.setdefault(stratum, []).append(result)
    report = meta.compare_strata(stratum_results, metrics.parse_measure(args.measure)[0])
    with _open_out(args.out) as fh:
        if args.format == "json":
            json.dump(report, fh, indent=2)
            fh.write("\n")
        else:
            meta.write_comparison_tsv(report, fh)
    if args.plot_data is not None:
        with open(args.plot_data, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(meta.plot_data(report), fh, indent=2)
            fh.write("\n")
    return 0


def cmd_retrieve(args) -> int:
    corpus = collection.read_corpus(args.corpus)
    if args.clusters is not None:
        index = clustering.read_cluster_map(args.clusters, corpus)
    else:
        index = clustering.ClusterIndex(clustering.cluster_corpus(corpus))
    retriever = BaselineRetriever(index, corpus)
    with _open_out(args.out) as fh:
        if args.topics is not None:
            topics = collection.read_topics(args.topics)
            run = retriever.build_run(topics, args.limit, args.tag)
            for topic_id in run.topics:
                for e in run.topics[topic_id]:
                    fh.write(f"{topic_id}\tQ0\t{e.item_id}\t{e.rank}\t{e.score!r}\t{run.run_tag}\n")
        elif args.query is not None:
            for e in retriever.retrieve(args.query, args.limit):
                fh.write(f"{e.rank}\t{e.item_id}\t{e.score:.4f}\n")
        else:
            raise FormulaBenchError("retrieve needs --query or --topics")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import AssessmentService, create_app

    pools = pooling.read_pools(args.pool)
    corpus = collection.read_corpus(args.corpus)
    topics = collection.read_topics(args.topics) if args.topics else []
    index = _load_cluster_index(args)
    service = AssessmentService(
        pools,
        corpus,
        topics,
        args.journal,
        cluster_index=index,
        item_space=args.item_space,
    )
    app = create_app(service, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# --- plumbing -------------------------------------------------------------


def _open_out(path):
    if path is None or path == "-":
        return nullcontext(sys.stdout)
    return open(path, "w", encoding="utf-8", newline="\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="formulabench",
        description="Formula retrieval test-collection toolkit.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file pre-setting this subcommand's flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="tokenize and parse formulas")
    p.add_argument("--latex", help="one LaTeX formula")
    p.add_argument("--input", help="file with one formula per line")
    p.add_argument("--format", choices=["json", "tsv"], default="json")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("cluster", parents=[common], help="cluster a corpus by visual identity")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("pool", parents=[common], help="build judgment pools from runs")
    p.add_argument("--style", choices=["round-robin", "top-k", "visually-distinct"], required=True)
    p.add_argument("--runs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--min-unique", type=int, default=100)
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--primary-depth", type=int, default=25)
    p.add_argument("--other-depth", type=int, default=10)
    p.add_argument("--primary-tags", default="")
    p.add_argument("--clusters")
    p.add_argument("--corpus")
    p.add_argument("--cap", type=int)
    p.add_argument("--select", choices=["frequency", "rrf"], default="frequency")
    p.add_argument("--rrf-k", type=float, default=60.0)
    p.set_defaults(func=cmd_pool)

    p = sub.add_parser("judge-aggregate", parents=[common], help="aggregate or binarize judgments")
    p.add_argument("--mode", choices=["sum", "max", "binarize"], required=True)
    p.add_argument("--qrels-a", required=True)
    p.add_argument("--qrels-b")
    p.add_argument("--clusters")
    p.add_argument("--corpus")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_judge_aggregate)

    p = sub.add_parser("kappa", parents=[common], help="inter-annotator agreement")
    p.add_argument("--qrels-a", required=True)
    p.add_argument("--qrels-b", required=True)
    p.add_argument("--format", choices=["json", "tsv"], default="tsv")
    p.set_defaults(func=cmd_kappa)

    p = sub.add_parser("eval", parents=[common], help="score runs against judgments")
    p.add_argument("--runs", "--run", nargs="+", required=True, dest="runs")
    p.add_argument("--qrels", required=True)
    p.add_argument("--convention", choices=list(metrics.CONVENTIONS), required=True)
    p.add_argument("--clusters")
    p.add_argument("--corpus")
    p.add_argument("--measures", help="comma-separated measure list")
    p.add_argument("--gains", choices=["linear", "exp"], default="linear")
    p.add_argument("--cutoff", type=int)
    p.add_argument("--item-space", choices=["instance", "visual"], default="instance")
    p.add_argument("--threads", type=int, default=os.cpu_count())
    p.add_argument("--format", choices=["json", "tsv"], default="tsv")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", parents=[common], help="compare system rankings across strata")
    p.add_argument("--runs", nargs="+", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--topics", required=True)
    p.add_argument("--convention", choices=list(metrics.CONVENTIONS), required=True)
    p.add_argument("--clusters")
    p.add_argument("--corpus")
    p.add_argument("--measure", default="ndcg-prime")
    p.add_argument("--gains", choices=["linear", "exp"], default="linear")
    p.add_argument("--item-space", choices=["instance", "visual"], default="instance")
    p.add_argument("--threads", type=int, default=os.cpu_count())
    p.add_argument("--format", choices=["json", "tsv"], default="tsv")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--plot-data", help="write rank trajectories as JSON")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("retrieve", parents=[common], help="run the baseline retriever")
    p.add_argument("--query", help="one LaTeX query")
    p.add_argument("--topics", help="topics file; emits a full run")
    p.add_argument("--corpus", required=True)
    p.add_argument("--clusters")
    p.add_argument("--limit", type=int, default=1000)
    p.add_argument("--tag", default=RUN_TAG)
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("serve", parents=[common], help="start the assessment service")
    p.add_argument("--pool", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--topics")
    p.add_argument("--clusters")
    p.add_argument("--journal", required=True)
    p.add_argument("--item-space", choices=["instance", "visual"], default="instance")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8391)
    p.add_argument("--ui-dir", help="static UI bundle directory")
    p.set_defaults(func=cmd_serve)

    return parser


def _config_tokens(path: str) -> list[str]:
    tokens = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise FormulaBenchError(f"{path}: config line without '=': {line!r}")
            tokens.extend([f"--{key.strip()}", value.strip()])
    return tokens


def _inject_config(argv: list[str]) -> list[str]:
    """Insert config-file tokens right after the subcommand, so explicit
    command-line flags (parsed later) override them."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        return argv
    path = argv[idx + 1]
    tokens = _config_tokens(path)
    return argv[:1] + tokens + argv[1:]


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        if argv and not argv[0].startswith("-"):
            argv = _inject_config(argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except FormulaBenchError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
