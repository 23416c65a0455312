"""Publication growth, early citation uptake, and cross-corpus regressions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..corpus import Corpus
from ..errors import MetricError
from ..series import FitResult, MetricSeries


def normalized_publication_series(corpus: Corpus) -> MetricSeries:
    """Yearly in-discipline publication counts normalized to sum to 1,
    over the full span of in-discipline publication years."""
    counts: dict[int, int] = {}
    for rec in corpus.papers.values():
        if rec.in_discipline:
            counts[rec.pub_year] = counts.get(rec.pub_year, 0) + 1
    if not counts:
        raise MetricError("corpus has no in-discipline papers")
    total = sum(counts.values())
    years = range(min(counts), max(counts) + 1)
    points = [(year, counts.get(year, 0) / total) for year in years]
    return MetricSeries(
        name="normalized_publications",
        points=points,
        meta={"total_papers": str(total)},
    )


def fit_exponential_growth(series: MetricSeries) -> FitResult:
    """Least squares on (t, ln y): recovers the growth rate (exponent) and
    the back-transformed level at t=0 (prefactor)."""
    xs = np.asarray(series.xs, dtype=float)
    ys = np.asarray(series.ys, dtype=float)
    if xs.size < 2:
        raise MetricError("exponential fit needs at least 2 points")
    bad = xs[ys <= 0]
    if bad.size:
        raise MetricError(
            "exponential fit needs positive values; offending years: "
            + ", ".join(str(int(b)) if float(b).is_integer() else str(b) for b in bad)
        )
    slope, intercept, r_squared = _ols(xs, np.log(ys))
    return FitResult(
        exponent=slope,
        prefactor=float(np.exp(intercept)),
        r_squared=r_squared,
        n_points=int(xs.size),
    )


def two_year_uptake(corpus: Corpus, horizon: int = 2) -> tuple[MetricSeries, MetricSeries]:
    """Early uptake per publication cohort.

    For papers published in year t, the mean number of citations received
    in the inclusive window [t, t+horizon], and the fraction of the
    cohort receiving none at all. Cohorts whose window runs past the
    corpus range are excluded.
    """
    years = sorted(
        {rec.pub_year for rec in corpus.papers.values()}
    )
    if not years or years[-1] - years[0] < horizon:
        raise MetricError(f"corpus must span at least {horizon + 1} years")
    max_year = years[-1]
    mean_points = []
    zero_points = []
    skipped_empty = 0
    for year in range(years[0], max_year - horizon + 1):
        cohort = corpus.published_in(year)
        if not cohort:
            skipped_empty += 1
            continue
        sums = [
            sum(
                corpus.per_year_citations.get((pid, y), 0)
                for y in range(year, year + horizon + 1)
            )
            for pid in cohort
        ]
        mean_points.append((year, sum(sums) / len(cohort)))
        zero_points.append((year, sum(1 for s in sums if s == 0) / len(cohort)))
    meta = {"horizon": str(horizon), "skipped_empty_cohorts": str(skipped_empty)}
    return (
        MetricSeries(name="uptake_mean", points=mean_points, meta=meta),
        MetricSeries(name="uptake_uncited_fraction", points=zero_points, meta=dict(meta)),
    )


@dataclass(frozen=True)
class RegressionResult:
    fit: FitResult
    pearson_r: float


def cross_series_regression(xs, ys) -> RegressionResult:
    """Straight-line OLS plus the Pearson correlation for paired
    per-corpus values (the fit's exponent/prefactor hold slope/intercept)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size != y.size:
        raise ValueError("xs and ys must have the same length")
    if x.size < 3:
        raise MetricError("cross-corpus regression needs at least 3 pairs")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise MetricError("regression inputs must be finite")
    if np.ptp(x) == 0:
        raise MetricError("regressor has zero variance")
    if np.ptp(y) == 0:
        raise MetricError("response has zero variance; correlation undefined")
    slope, intercept, r_squared = _ols(x, y)
    sx = x.std()
    sy = y.std()
    r = float(((x - x.mean()) * (y - y.mean())).mean() / (sx * sy))
    return RegressionResult(
        fit=FitResult(
            exponent=slope, prefactor=intercept, r_squared=r_squared, n_points=int(x.size)
        ),
        pearson_r=r,
    )


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    xm = x.mean()
    ym = y.mean()
    sxx = ((x - xm) ** 2).sum()
    sxy = ((x - xm) * (y - ym)).sum()
    slope = float(sxy / sxx)
    intercept = float(ym - slope * xm)
    ss_res = float(((y - (slope * x + intercept)) ** 2).sum())
    ss_tot = float(((y - ym) ** 2).sum())
    r_squared = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return slope, intercept, max(0.0, min(1.0, r_squared))
