"""Corpus analysis battery: every indicator as MetricSeries files plus a
per-corpus summary row (growth exponent, discovery-pace exponent, Gini
variation) that cross-corpus comparisons consume."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Corpus
from .errors import MetricError
from .metrics import (
    attention_curves,
    build_yearly_citation_graph,
    cocitation_relative_density,
    cross_series_regression,
    cycle_stats,
    discovery_fraction_series,
    elite_set,
    fit_exponential_growth,
    heaps_curve,
    heaps_fit,
    normalized_publication_series,
    pagerank,
    ranked_jaccard,
    topk_turnover_series,
    two_year_uptake,
    yearly_gini_series,
)
from .series import MetricSeries

log = logging.getLogger(__name__)

METRIC_GROUPS = [
    "growth",
    "uptake",
    "gini",
    "cycles",
    "turnover",
    "elite",
    "cocitation",
    "heaps",
    "discovery",
]


@dataclass
class AnalysisOptions:
    k: int = 50
    min_citations: int = 10
    last_pub_year: int = 2005
    window: int = 10
    elite_threshold: float = 0.8
    damping: float = 0.85
    uptake_horizon: int = 2
    gini_population: str = "cited"
    # Gini-variation endpoint years; None picks the corpus's first/last
    # citation-bearing years.
    dgini_from: int | None = None
    dgini_to: int | None = None
    metadata: dict[str, str] = field(default_factory=dict)


def analyze_corpus(
    corpus: Corpus,
    selection: list[str],
    options: AnalysisOptions | None = None,
) -> tuple[dict[str, MetricSeries], dict]:
    """Compute the selected metric groups.

    Returns (series by name, summary). Whole-metric failures raise
    MetricError naming the metric; per-year preconditions that individual
    years miss are skipped and counted in that series' meta.
    """
    opts = options or AnalysisOptions()
    unknown = set(selection) - set(METRIC_GROUPS)
    if unknown:
        raise ValueError(f"unknown metrics: {sorted(unknown)}; choose from {METRIC_GROUPS}")
    if not selection:
        raise ValueError("empty metric selection")

    series: dict[str, MetricSeries] = {}
    summary: dict = {
        "papers": len(corpus.papers),
        "edges": len(corpus.edges),
        "year_range": list(corpus.year_range),
    }
    summary.update(opts.metadata)

    for group in METRIC_GROUPS:  # fixed order keeps outputs deterministic
        if group not in selection:
            continue
        handler = _HANDLERS[group]
        try:
            handler(corpus, opts, series, summary)
        except MetricError as exc:
            raise MetricError(f"{group}: {exc}") from exc
    return series, summary


def _growth(corpus, opts, series, summary):
    pubs = normalized_publication_series(corpus)
    series[pubs.name] = pubs
    fit = fit_exponential_growth(pubs)
    summary["alpha"] = fit.exponent
    summary["alpha_prefactor"] = fit.prefactor
    summary["alpha_r_squared"] = fit.r_squared


def _uptake(corpus, opts, series, summary):
    mean_series, zero_series = two_year_uptake(corpus, horizon=opts.uptake_horizon)
    series[mean_series.name] = mean_series
    series[zero_series.name] = zero_series


def _gini(corpus, opts, series, summary):
    gs = yearly_gini_series(corpus, population=opts.gini_population)
    series[gs.name] = gs
    by_year = dict(gs.points)
    year_from = opts.dgini_from if opts.dgini_from is not None else gs.points[0][0]
    year_to = opts.dgini_to if opts.dgini_to is not None else gs.points[-1][0]
    if year_from not in by_year or year_to not in by_year:
        raise MetricError(
            f"gini variation endpoints {year_from}-{year_to} not present in the series"
        )
    g0, g1 = by_year[year_from], by_year[year_to]
    summary["delta_gini_from"] = int(year_from)
    summary["delta_gini_to"] = int(year_to)
    summary["delta_gini_absolute"] = g1 - g0
    summary["delta_gini"] = (g1 - g0) / g0 if g0 != 0 else None


def _cycles(corpus, opts, series, summary):
    curves, meta = attention_curves(
        corpus,
        min_citations=opts.min_citations,
        last_pub_year=opts.last_pub_year,
        window=opts.window,
    )
    cohorts: dict[int, list] = {}
    for curve in curves:
        cohorts.setdefault(curve.t0, []).append(cycle_stats(curve))
    peak, share, half = [], [], []
    for year in sorted(cohorts):
        stats = cohorts[year]
        n = len(stats)
        peak.append((year, sum(s.t_peak for s in stats) / n))
        share.append((year, sum(s.f_c_peak for s in stats) / n))
        half.append((year, sum(s.t_half for s in stats) / n))
    meta = dict(meta, curves=str(len(curves)))
    series["attention_peak_time"] = MetricSeries("attention_peak_time", peak, dict(meta))
    series["attention_peak_share"] = MetricSeries("attention_peak_share", share, dict(meta))
    series["attention_half_life"] = MetricSeries("attention_half_life", half, dict(meta))


def _turnover(corpus, opts, series, summary):
    for by in ("citations", "pagerank"):
        ts = topk_turnover_series(corpus, k=opts.k, by=by)
        series[ts.name] = ts


def _elite(corpus, opts, series, summary):
    size_points, age_points = [], []
    for year in corpus.years_with_citations():
        es = elite_set(corpus, year, threshold=opts.elite_threshold)
        size_points.append((year, es.size_fraction))
        age_points.append((year, es.mean_age))
    if not size_points:
        raise MetricError("no citation-bearing years")
    meta = {"threshold": repr(opts.elite_threshold)}
    series["elite_size_fraction"] = MetricSeries("elite_size_fraction", size_points, dict(meta))
    series["elite_mean_age"] = MetricSeries("elite_mean_age", age_points, dict(meta))


def _cocitation(corpus, opts, series, summary):
    points = []
    skipped = []
    for year in corpus.years_with_citations():
        es = elite_set(corpus, year, threshold=opts.elite_threshold)
        try:
            points.append((year, cocitation_relative_density(corpus, year, es)))
        except MetricError:
            skipped.append(year)
    if not points:
        raise MetricError("no year admits a co-citation density ratio")
    meta = {"threshold": repr(opts.elite_threshold)}
    if skipped:
        meta["skipped_years"] = ",".join(str(y) for y in skipped)
    series["cocitation_relative_density"] = MetricSeries(
        "cocitation_relative_density", points, meta
    )


def _heaps(corpus, opts, series, summary):
    curve = heaps_curve(corpus)
    series[curve.name] = curve
    fit = heaps_fit(curve)
    summary["beta"] = fit.exponent
    summary["beta_prefactor"] = fit.prefactor
    summary["beta_r_squared"] = fit.r_squared


def _discovery(corpus, opts, series, summary):
    ds = discovery_fraction_series(corpus)
    series[ds.name] = ds
    summary["discovery_run_level"] = float(ds.meta["run_level_fraction"])


_HANDLERS = {
    "growth": _growth,
    "uptake": _uptake,
    "gini": _gini,
    "cycles": _cycles,
    "turnover": _turnover,
    "elite": _elite,
    "cocitation": _cocitation,
    "heaps": _heaps,
    "discovery": _discovery,
}


def write_analysis(
    series: dict[str, MetricSeries],
    summary: dict,
    out_dir: str | Path,
) -> list[Path]:
    """Emit every series as CSV + JSON plus summary.json; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in sorted(series):
        csv_path = out / f"{name}.csv"
        json_path = out / f"{name}.json"
        series[name].write_csv(csv_path)
        series[name].write_json(json_path)
        written += [csv_path, json_path]
    summary_path = out / "summary.json"
    summary_path.write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    written.append(summary_path)
    return written


def summarize_disciplines(summaries: list[dict]) -> dict:
    """Cross-corpus regression report over per-corpus (alpha, beta, dGini).

    Needs at least three analyzed corpora carrying 'alpha', 'beta' and
    'delta_gini' summary values.
    """
    if len(summaries) < 3:
        raise MetricError(f"need at least 3 corpus analyses, got {len(summaries)}")
    rows = []
    for i, summary in enumerate(summaries):
        missing = [k for k in ("alpha", "beta", "delta_gini") if summary.get(k) is None]
        if missing:
            raise MetricError(f"analysis #{i} is missing summary values: {missing}")
        rows.append(
            {
                "corpus": summary.get("corpus", f"corpus_{i}"),
                "alpha": summary["alpha"],
                "beta": summary["beta"],
                "delta_gini": summary["delta_gini"],
            }
        )
    alphas = [r["alpha"] for r in rows]
    report = {"rows": rows}
    for key in ("beta", "delta_gini"):
        reg = cross_series_regression(alphas, [r[key] for r in rows])
        report[f"alpha_vs_{key}"] = {
            "slope": reg.fit.exponent,
            "intercept": reg.fit.prefactor,
            "r_squared": reg.fit.r_squared,
            "pearson_r": reg.pearson_r,
            "n": reg.fit.n_points,
        }
    return report
