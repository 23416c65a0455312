"""Quantitative indicators computed from a citation corpus.

All operations are pure functions of an immutable Corpus (or, for the
stream-based ones, of an event log); callers may evaluate different
years or metrics concurrently without coordination.
"""
from .attention import (
    AttentionCurve,
    CycleStats,
    attention_curves,
    attention_shares,
    cycle_stats,
    gini,
    yearly_gini_series,
)
from .canons import (
    CitationGraph,
    EliteSet,
    build_yearly_citation_graph,
    cocitation_relative_density,
    elite_set,
    expanded_top_k,
    pagerank,
    rank_by_citations,
    ranked_jaccard,
    topk_turnover_series,
)
from .growth import (
    RegressionResult,
    cross_series_regression,
    fit_exponential_growth,
    normalized_publication_series,
    two_year_uptake,
)
from .heaps import (
    discovery_fraction_series,
    heaps_curve,
    heaps_fit,
)

__all__ = [
    "AttentionCurve",
    "CitationGraph",
    "CycleStats",
    "EliteSet",
    "RegressionResult",
    "attention_curves",
    "attention_shares",
    "build_yearly_citation_graph",
    "cocitation_relative_density",
    "cross_series_regression",
    "cycle_stats",
    "discovery_fraction_series",
    "elite_set",
    "expanded_top_k",
    "fit_exponential_growth",
    "gini",
    "heaps_curve",
    "heaps_fit",
    "normalized_publication_series",
    "pagerank",
    "rank_by_citations",
    "ranked_jaccard",
    "topk_turnover_series",
    "two_year_uptake",
    "yearly_gini_series",
]
