"""Discovery pace: distinct-cited growth curves and first-touch fractions.

Both metrics stream the time-ordered concatenation of reference lists:
citing papers sorted by (publication year, id), references in input
order. Event logs stream in log order, which coincides with that
ordering for simulated corpora.
"""
from __future__ import annotations

import math

import numpy as np

from ..corpus import Corpus
from ..errors import MetricError
from ..series import FitResult, MetricSeries

DEFAULT_SAMPLES_PER_DECADE = 50


def citation_stream(source) -> tuple[np.ndarray, np.ndarray]:
    """(target codes, citing years) for every citation in deterministic
    order. Codes are dense integers; equal code means equal cited paper."""
    targets: list = []
    years: list[int] = []
    if isinstance(source, Corpus):
        for pid in sorted(source.papers, key=lambda p: (source.papers[p].pub_year, p)):
            refs = source.references_of(pid)
            if not refs:
                continue
            year = source.papers[pid].pub_year
            targets.extend(refs)
            years.extend([year] * len(refs))
    else:  # event log
        for step in source.steps:
            for paper in step.papers:
                targets.extend(paper.refs)
                years.extend([step.t] * len(paper.refs))
    if not targets:
        raise MetricError("source contains no citations")
    _, codes = np.unique(np.asarray(targets), return_inverse=True)
    return codes, np.asarray(years, dtype=np.int64)


def heaps_curve(source) -> MetricSeries:
    """Distinct cited papers seen so far versus citations streamed so far."""
    codes, _ = citation_stream(source)
    first = np.zeros(codes.size, dtype=bool)
    _, first_positions = np.unique(codes, return_index=True)
    first[first_positions] = True
    distinct = np.cumsum(first)
    points = list(zip(range(1, codes.size + 1), distinct.tolist()))
    return MetricSeries(name="heaps_curve", points=points, meta={})


def heaps_fit(
    curve: MetricSeries,
    fit_range: tuple[float, float] | None = None,
    samples_per_decade: int = DEFAULT_SAMPLES_PER_DECADE,
) -> FitResult:
    """Power-law exponent of a distinct-growth curve.

    Least squares on log10-log10 points subsampled at log-spaced
    positions, so every decade carries equal weight. The default range
    discards the curve's first decade; the curve must span at least two
    decades overall.
    """
    xs = np.asarray(curve.xs, dtype=float)
    ys = np.asarray(curve.ys, dtype=float)
    if xs.size == 0:
        raise MetricError("empty curve")
    span = math.log10(xs[-1] / xs[0]) if xs[0] > 0 else 0.0
    if span < 2:
        raise MetricError(
            f"curve spans {span:.2f} decades; need at least 2 to fit past the first"
        )
    lo, hi = fit_range if fit_range is not None else (xs[0] * 10.0, xs[-1])
    lo = max(lo, xs[0])
    hi = min(hi, xs[-1])
    if not lo < hi:
        raise MetricError(f"empty fit range [{lo}, {hi}]")
    n_samples = max(2, int(math.log10(hi / lo) * samples_per_decade) + 1)
    grid = np.unique(np.floor(np.logspace(math.log10(lo), math.log10(hi), n_samples)))
    idx = np.searchsorted(xs, grid, side="right") - 1
    sample_x = xs[idx]
    sample_y = ys[idx]
    if np.any(sample_y <= 0):
        raise MetricError("curve has non-positive values inside the fit range")
    lx = np.log10(sample_x)
    ly = np.log10(sample_y)
    xm, ym = lx.mean(), ly.mean()
    sxx = ((lx - xm) ** 2).sum()
    if sxx == 0:
        raise MetricError("fit range collapses to a single x value")
    slope = float(((lx - xm) * (ly - ym)).sum() / sxx)
    intercept = float(ym - slope * xm)
    ss_res = float(((ly - (slope * lx + intercept)) ** 2).sum())
    ss_tot = float(((ly - ym) ** 2).sum())
    r_squared = 1.0 if ss_tot == 0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return FitResult(
        exponent=slope,
        prefactor=float(10.0 ** intercept),
        r_squared=r_squared,
        n_points=int(lx.size),
    )


def discovery_fraction_series(source) -> MetricSeries:
    """Per citing year, the fraction of citations whose target had never
    been cited earlier in the stream (first touches)."""
    codes, years = citation_stream(source)
    first = np.zeros(codes.size, dtype=bool)
    _, first_positions = np.unique(codes, return_index=True)
    first[first_positions] = True
    uniq_years, year_idx = np.unique(years, return_inverse=True)
    totals = np.bincount(year_idx)
    novel = np.bincount(year_idx, weights=first.astype(float))
    points = [
        (int(uniq_years[i]), float(novel[i] / totals[i]))
        for i in range(uniq_years.size)
        if totals[i] > 0
    ]
    total_fraction = float(first.sum() / codes.size)
    return MetricSeries(
        name="discovery_fraction",
        points=points,
        meta={"run_level_fraction": repr(total_fraction)},
    )
