"""Command-line interface.

Subcommands: ``simulate`` (one model run to an event log), ``sweep``
(alpha grid to sweep.csv), ``analyze`` (corpus to metric series files),
``fetch`` (remote corpus to CSV), ``summarize`` (cross-corpus
regressions). Exit codes: 0 success, 2 usage error, 3 data/validation
error, 4 numerical error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields as dataclass_fields
from pathlib import Path

from . import __version__
from .analyze import METRIC_GROUPS, AnalysisOptions, analyze_corpus, summarize_disciplines, write_analysis
from .corpus import corpus_from_event_log, load_corpus, write_corpus
from .errors import DataError, FetchError, MetricError
from .fetch import fetch_remote_corpus
from .sweep import SweepConfig, SweepError, run_sweep
from .urn import ModelParams, run, write_event_log

log = logging.getLogger(__name__)

USAGE_EXIT = 2
DATA_EXIT = 3
NUMERIC_EXIT = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citelab",
        description="Simulate citation-network growth and compute scientometric indicators.",
    )
    parser.add_argument("--version", action="version", version=f"citelab {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the generative model once")
    sim.add_argument("--alpha", type=float, default=0.0, help="growth exponent per step")
    sim.add_argument("--n0", type=float, default=None, help="arrival scale (default: half the initial urns)")
    sim.add_argument("--p", type=float, default=0.8, help="probability of citing an already-cited paper")
    sim.add_argument("--n-ref", type=int, default=10, help="references per paper")
    sim.add_argument("--visibility-window", type=int, default=2, help="steps before an uncited paper drops out")
    sim.add_argument("--target-papers", type=int, default=50_000, help="stop when the population reaches this")
    sim.add_argument("--seed", type=int, default=0, help="64-bit RNG seed")
    sim.add_argument("--out", required=True, help="event log output path (.jsonl)")
    sim.add_argument("--corpus-out", default=None, help="also write papers.csv/edges.csv here")

    swp = sub.add_parser("sweep", help="run an alpha grid with replicas")
    swp.add_argument("--config", default=None, help="JSON config file (flags override it)")
    swp.add_argument("--alpha-grid", default=None, help="comma-separated alpha values")
    swp.add_argument("--replicas", type=int, default=None, help="replicas per alpha")
    swp.add_argument("--profile", choices=["desk", "paper"], default=None,
                     help="desk: 20 replicas; paper: 100 replicas")
    swp.add_argument("--seed", type=int, default=None, help="base seed for stream derivation")
    swp.add_argument("--out", default=None, help="output directory")
    swp.add_argument("--workers", type=int, default=None, help="worker process cap")
    swp.add_argument("--save-logs", action="store_true", help="keep per-replica event logs")
    swp.add_argument("--target-papers", type=int, default=None, help="model override")
    swp.add_argument("--n-ref", type=int, default=None, help="model override")

    ana = sub.add_parser("analyze", help="compute metric series from a corpus")
    ana.add_argument("--corpus", default=None, help="directory holding papers.csv and edges.csv")
    ana.add_argument("--papers", default=None, help="papers.csv path")
    ana.add_argument("--edges", default=None, help="edges.csv path")
    ana.add_argument("--out", required=True, help="output directory for series files")
    ana.add_argument("--metrics", default=None,
                     help=f"comma-separated groups from: {','.join(METRIC_GROUPS)}")
    ana.add_argument("--all", action="store_true", help="run the full battery")
    ana.add_argument("--lenient", action="store_true",
                     help="drop rather than reject dangling edges and out-of-window papers")
    ana.add_argument("--year-range", default=None,
                     help="publication window as FROM:TO (default 1980:2019)")
    ana.add_argument("--no-year-window", action="store_true",
                     help="accept any publication year")
    ana.add_argument("--k", type=int, default=50, help="top-k size for turnover")
    ana.add_argument("--min-citations", type=int, default=10, help="attention-curve citation filter")
    ana.add_argument("--last-pub-year", type=int, default=2005, help="attention-curve cohort cutoff")
    ana.add_argument("--window", type=int, default=10, help="attention-curve window length")
    ana.add_argument("--elite-threshold", type=float, default=0.8, help="elite citation share")
    ana.add_argument("--damping", type=float, default=0.85, help="PageRank damping factor")
    ana.add_argument("--uptake-horizon", type=int, default=2, help="uptake window in years")
    ana.add_argument("--gini-population", choices=["cited", "published"], default="cited",
                     help="include zero-share papers published up to each year or not")
    ana.add_argument("--dgini-from", type=int, default=None, help="Gini variation start year")
    ana.add_argument("--dgini-to", type=int, default=None, help="Gini variation end year")

    fet = sub.add_parser("fetch", help="retrieve a corpus from a paged scholarly API")
    fet.add_argument("--base-url", required=True)
    fet.add_argument("--concept", required=True, help="concept filter for the disciplinary set")
    fet.add_argument("--from-year", type=int, default=1980)
    fet.add_argument("--to-year", type=int, default=2019)
    fet.add_argument("--page-size", type=int, default=200)
    fet.add_argument("--out", required=True, help="output directory")
    fet.add_argument("--rps", type=float, default=10.0, help="requests-per-second cap")
    fet.add_argument("--max-retries", type=int, default=5)

    summ = sub.add_parser("summarize", help="cross-corpus regressions over analyses")
    summ.add_argument("analyses", nargs="+", help="analysis output directories")
    summ.add_argument("--out", required=True, help="report JSON path")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _dispatch(args)
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"citelab: usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (DataError, FetchError) as exc:
        print(f"citelab: data error: {exc}", file=sys.stderr)
        return DATA_EXIT
    except (MetricError, SweepError) as exc:
        print(f"citelab: numerical error: {exc}", file=sys.stderr)
        return NUMERIC_EXIT


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "simulate":
        return _cmd_simulate(args)
    if args.command == "sweep":
        return _cmd_sweep(args)
    if args.command == "analyze":
        return _cmd_analyze(args)
    if args.command == "fetch":
        return _cmd_fetch(args)
    if args.command == "summarize":
        return _cmd_summarize(args)
    raise AssertionError(f"unhandled command {args.command}")


def _cmd_simulate(args) -> int:
    params = ModelParams(
        alpha=args.alpha,
        n0=args.n0,
        p=args.p,
        n_ref=args.n_ref,
        visibility_window=args.visibility_window,
        target_total_papers=args.target_papers,
        seed=args.seed,
    )
    params.validate()
    event_log = run(params)
    write_event_log(event_log, args.out)
    print(
        f"simulated {event_log.total_papers()} papers over {len(event_log.steps)} steps "
        f"({event_log.total_citations()} citations) -> {args.out}"
    )
    if args.corpus_out:
        out = Path(args.corpus_out)
        out.mkdir(parents=True, exist_ok=True)
        corpus = corpus_from_event_log(event_log)
        write_corpus(corpus, out / "papers.csv", out / "edges.csv")
        print(f"corpus written -> {out}/papers.csv, {out}/edges.csv")
    return 0


def _cmd_sweep(args) -> int:
    config = SweepConfig.from_json(args.config) if args.config else SweepConfig()
    if args.profile:
        config.apply_profile(args.profile)
    if args.alpha_grid is not None:
        config.alpha_grid = [float(a) for a in args.alpha_grid.split(",") if a.strip()]
    if args.replicas is not None:
        config.replicas = args.replicas
    if args.seed is not None:
        config.base_seed = args.seed
    if args.out is not None:
        config.output_dir = args.out
    if args.workers is not None:
        config.workers = args.workers
    if args.save_logs:
        config.save_logs = True
    if args.target_papers is not None:
        config.model["target_total_papers"] = args.target_papers
    if args.n_ref is not None:
        config.model["n_ref"] = args.n_ref
    result = run_sweep(config)
    print(f"sweep complete: {len(result.rows)} replicas -> {result.output_dir / 'sweep.csv'}")
    for agg in result.aggregates:
        print(
            f"  alpha={agg['alpha']:g}: dGini={agg['mean_gini_delta']:+.4f} "
            f"dJaccard={agg['mean_jaccard_delta']:+.4f} beta={agg['mean_heaps_beta']:.4f} "
            f"({agg['replicas_ok']} ok)"
        )
    return 0


def _cmd_analyze(args) -> int:
    if args.corpus:
        papers_path = Path(args.corpus) / "papers.csv"
        edges_path = Path(args.corpus) / "edges.csv"
    elif args.papers and args.edges:
        papers_path, edges_path = Path(args.papers), Path(args.edges)
    else:
        raise ValueError("provide --corpus DIR or both --papers and --edges")
    if args.all:
        selection = list(METRIC_GROUPS)
    elif args.metrics:
        selection = [m.strip() for m in args.metrics.split(",") if m.strip()]
    else:
        raise ValueError("empty metric selection: pass --metrics or --all")

    if args.no_year_window:
        year_range = None
    elif args.year_range:
        lo, _, hi = args.year_range.partition(":")
        year_range = (int(lo), int(hi))
    else:
        year_range = (1980, 2019)

    corpus, report = load_corpus(
        papers_path, edges_path, strict=not args.lenient, year_range=year_range
    )
    if report.self_loops_dropped or report.dangling_dropped or report.papers_dropped_out_of_range:
        log.info(
            "load report: %d self-loops, %d dangling edges, %d out-of-window papers dropped",
            report.self_loops_dropped,
            report.dangling_dropped,
            report.papers_dropped_out_of_range,
        )
    options = AnalysisOptions(
        k=args.k,
        min_citations=args.min_citations,
        last_pub_year=args.last_pub_year,
        window=args.window,
        elite_threshold=args.elite_threshold,
        damping=args.damping,
        uptake_horizon=args.uptake_horizon,
        gini_population=args.gini_population,
        dgini_from=args.dgini_from,
        dgini_to=args.dgini_to,
        metadata={"corpus": str(papers_path.parent)},
    )
    series, summary = analyze_corpus(corpus, selection, options)
    written = write_analysis(series, summary, args.out)
    print(f"analyzed {len(corpus.papers)} papers: {len(series)} series -> {args.out}")
    for path in written:
        print(f"  {path}")
    return 0


def _cmd_fetch(args) -> int:
    report = fetch_remote_corpus(
        base_url=args.base_url,
        concept_filter=args.concept,
        year_range=(args.from_year, args.to_year),
        page_size=args.page_size,
        out_dir=args.out,
        rps=args.rps,
        max_retries=args.max_retries,
    )
    print(
        f"fetched {report.papers_written} papers / {report.edges_written} edges "
        f"in {report.requests_made} requests ({report.retries} retries) -> {args.out}"
    )
    return 0


def _cmd_summarize(args) -> int:
    summaries = []
    for directory in args.analyses:
        path = Path(directory) / "summary.json"
        if not path.exists():
            raise DataError(f"{path}: not found (run analyze first)")
        summaries.append(json.loads(path.read_text(encoding="utf-8")))
    report = summarize_disciplines(summaries)
    Path(args.out).write_text(json.dumps(report, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    print(f"{'corpus':<24} {'alpha':>10} {'beta':>10} {'dGini':>10}")
    for row in report["rows"]:
        print(f"{str(row['corpus'])[:24]:<24} {row['alpha']:>10.4f} {row['beta']:>10.4f} "
              f"{row['delta_gini']:>10.4f}")
    for key in ("alpha_vs_beta", "alpha_vs_delta_gini"):
        reg = report[key]
        print(f"{key}: slope={reg['slope']:+.4f} pearson_r={reg['pearson_r']:+.4f} "
              f"r2={reg['r_squared']:.4f}")
    print(f"report -> {args.out}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
