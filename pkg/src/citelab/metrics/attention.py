"""Attention shares, their inequality, and per-paper attention cycles."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..corpus import Corpus
from ..errors import MetricError
from ..series import MetricSeries

NORMALIZATION_TOL = 1e-9


def gini(values) -> float:
    """Gini index of a non-negative distribution, in [0, 1].

    Evaluated with the sort-based identity
        G = (2 * sum_i i*x_(i) - (n+1) * sum_i x_i) / (n * sum_i x_i)
    over the ascending order statistics, which equals the pairwise
    definition sum_ij |v_i - v_j| / (2 n^2 mean).
    """
    xs = np.sort(np.asarray(values, dtype=float))
    n = xs.size
    if n < 1:
        raise MetricError("gini needs at least one value")
    if xs[0] < 0:
        raise MetricError("gini is undefined for negative values")
    total = xs.sum()
    if total <= 0:
        raise MetricError("gini is undefined when all values are zero")
    ranks = np.arange(1, n + 1)
    return float((2.0 * np.dot(ranks, xs) - (n + 1) * total) / (n * total))


def attention_shares(corpus: Corpus, year: int) -> dict[str, float]:
    """Each cited paper's fraction of all citations issued in ``year``."""
    tallies = corpus.cited_in_year(year)
    total = sum(tallies.values())
    if total == 0:
        raise MetricError(f"no citations issued in year {year}")
    return {pid: k / total for pid, k in tallies.items()}


def yearly_gini_series(corpus: Corpus, population: str = "cited") -> MetricSeries:
    """Gini of the attention shares, one point per year with citations.

    ``population="cited"`` (default) measures inequality among papers
    that received at least one citation that year; ``"published"``
    additionally includes every paper already published by that year with
    a zero share. Years without citations are skipped and counted in the
    series metadata.
    """
    if population not in ("cited", "published"):
        raise ValueError(f"population must be 'cited' or 'published', got {population!r}")
    points = []
    years = corpus.years_with_citations()
    for year in years:
        tallies = corpus.cited_in_year(year)
        if population == "cited":
            values = list(tallies.values())
        else:
            values = [
                tallies.get(pid, 0)
                for pid, rec in corpus.papers.items()
                if rec.pub_year <= year
            ]
        points.append((year, gini(values)))
    skipped = 0
    if years:
        skipped = (years[-1] - years[0] + 1) - len(years)
    return MetricSeries(
        name="gini_yearly",
        points=points,
        meta={"population": population, "years_skipped": str(skipped)},
    )


@dataclass(frozen=True)
class AttentionCurve:
    """One paper's attention-share trajectory over its first ``window`` years."""

    paper_id: str
    t0: int
    shares: tuple[float, ...]
    normalized: tuple[float, ...]
    window: int

    def __post_init__(self):
        if len(self.shares) != self.window or len(self.normalized) != self.window:
            raise ValueError("curve length must equal the window")
        if any(s < 0 for s in self.shares):
            raise ValueError("shares must be non-negative")
        total = sum(self.normalized)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"normalized curve sums to {total}, expected 1")


def attention_curves(
    corpus: Corpus,
    min_citations: int = 10,
    last_pub_year: int = 2005,
    window: int = 10,
) -> tuple[list[AttentionCurve], dict[str, str]]:
    """Normalized share curves for papers with a complete first decade.

    A paper qualifies if it was published no later than ``last_pub_year``,
    its ``window`` first years fit inside the corpus range, and it
    collected at least ``min_citations`` citations in total. Papers whose
    window collects no share at all are excluded; exclusion counts are
    returned in the meta map.
    """
    max_year = corpus.year_range[1]
    effective_last = min(last_pub_year, max_year - window + 1)
    year_totals = {y: corpus.citations_in_year(y) for y in corpus.years_with_citations()}

    curves: list[AttentionCurve] = []
    excluded_zero = 0
    excluded_horizon = 0
    for pid in sorted(corpus.papers):
        rec = corpus.papers[pid]
        if rec.pub_year > last_pub_year:
            continue
        if rec.pub_year > effective_last:
            excluded_horizon += 1
            continue
        if corpus.total_citations_of(pid) < min_citations:
            continue
        shares = []
        for year in range(rec.pub_year, rec.pub_year + window):
            total = year_totals.get(year, 0)
            k = corpus.per_year_citations.get((pid, year), 0)
            shares.append(k / total if total else 0.0)
        mass = sum(shares)
        if mass <= 0:
            excluded_zero += 1
            continue
        normalized = tuple(s / mass for s in shares)
        curves.append(
            AttentionCurve(
                paper_id=pid,
                t0=rec.pub_year,
                shares=tuple(shares),
                normalized=normalized,
                window=window,
            )
        )
    meta = {
        "min_citations": str(min_citations),
        "last_pub_year": str(last_pub_year),
        "window": str(window),
        "excluded_zero_share": str(excluded_zero),
        "excluded_incomplete_window": str(excluded_horizon),
    }
    return curves, meta


@dataclass(frozen=True)
class CycleStats:
    """Shape of one normalized attention curve.

    ``t_peak``: years from publication to the maximum share (earliest on
    ties). ``f_c_peak``: cumulative share through the peak year.
    ``t_half``: years from the peak to the last point still at or above
    half the maximum, on the yearly grid with no interpolation.
    """

    t_peak: int
    f_c_peak: float
    t_half: int


def cycle_stats(curve: AttentionCurve) -> CycleStats:
    values = curve.normalized
    peak_value = max(values)
    if peak_value <= 0:
        raise MetricError(f"curve for {curve.paper_id} is all zero")
    t_peak = values.index(peak_value)
    f_c_peak = sum(values[: t_peak + 1])
    half = peak_value / 2.0
    t_last = max(i for i, v in enumerate(values) if v >= half)
    return CycleStats(t_peak=t_peak, f_c_peak=f_c_peak, t_half=t_last - t_peak)
