import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from citelab.errors import MetricError
from citelab.metrics.attention import (
    AttentionCurve,
    attention_curves,
    attention_shares,
    cycle_stats,
    gini,
    yearly_gini_series,
)

from conftest import make_corpus


def pairwise_gini_oracle(values):
    v = np.asarray(values, dtype=float)
    n = v.size
    return float(np.abs(v[:, None] - v[None, :]).sum() / (2 * n * n * v.mean()))


# -- gini -------------------------------------------------------------------


def test_gini_perfect_equality():
    assert gini([5, 5, 5, 5]) == 0.0


def test_gini_zero_one_exact():
    # by the pairwise formula: sum |diff| = 2, 2 n^2 mean = 4
    assert gini([0, 1]) == 0.5


def test_gini_against_pairwise_oracle():
    rng = random.Random(42)
    for _ in range(1000):
        n = rng.randint(1, 500)
        values = [rng.random() * 10 for _ in range(n)]
        if sum(values) == 0:
            values[0] = 1.0
        assert abs(gini(values) - pairwise_gini_oracle(values)) <= 1e-12


def test_gini_domain_errors():
    with pytest.raises(MetricError, match="negative"):
        gini([1.0, -0.5])
    with pytest.raises(MetricError, match="zero"):
        gini([0.0, 0.0])
    with pytest.raises(MetricError, match="at least one"):
        gini([])


@given(
    st.lists(st.floats(min_value=0.01, max_value=1e6), min_size=1, max_size=200),
    st.floats(min_value=0.01, max_value=1e3),
)
@settings(max_examples=100, deadline=None)
def test_gini_scale_and_permutation_invariance(values, scale):
    base = gini(values)
    assert abs(gini([v * scale for v in values]) - base) <= 1e-12
    shuffled = list(values)
    random.Random(0).shuffle(shuffled)
    assert gini(shuffled) == gini(sorted(values))
    assert 0.0 <= base <= 1.0


@given(
    st.lists(
        st.floats(min_value=0.0, max_value=100.0, allow_subnormal=False),
        min_size=2,
        max_size=60,
    )
)
@settings(max_examples=60, deadline=None)
def test_gini_matches_pairwise_property(values):
    if sum(values) < 1e-9:
        values = values + [1.0]
    assert abs(gini(values) - pairwise_gini_oracle(values)) <= 1e-12


# -- attention shares ---------------------------------------------------------


def test_shares_basic():
    corpus = make_corpus(
        {"a": (1980, True), "b": (1980, True), "c": (1981, True), "d": (1981, True)},
        [("c", "a"), ("c", "b"), ("d", "a"), ("d", "a")],
    )
    shares = attention_shares(corpus, 1981)
    assert shares == {"a": 0.75, "b": 0.25}


def test_shares_single_cited_paper():
    corpus = make_corpus({"a": (1980, True), "b": (1981, True)}, [("b", "a")])
    assert attention_shares(corpus, 1981) == {"a": 1.0}


def test_shares_empty_year_error():
    corpus = make_corpus({"a": (1980, True)}, [])
    with pytest.raises(MetricError, match="no citations"):
        attention_shares(corpus, 1985)


def test_shares_sum_to_one_random():
    rng = random.Random(5)
    papers = {f"p{i}": (1980 + i % 10, True) for i in range(50)}
    edges = []
    ids = list(papers)
    for _ in range(400):
        a, b = rng.sample(ids, 2)
        edges.append((a, b))
    corpus = make_corpus(papers, edges)
    for year in corpus.years_with_citations():
        assert abs(sum(attention_shares(corpus, year).values()) - 1.0) <= 1e-12


# -- yearly gini series -------------------------------------------------------


def test_yearly_gini_all_cited_once():
    corpus = make_corpus(
        {"a": (1980, True), "b": (1980, True), "x": (1981, True), "y": (1981, True)},
        [("x", "a"), ("y", "b")],
    )
    series = yearly_gini_series(corpus)
    assert series.points == [(1981, 0.0)]


def test_yearly_gini_degenerate_single_member():
    # one paper takes all citations: the nonzero-share population has one
    # member, so inequality is 0 by convention
    corpus = make_corpus(
        {"a": (1980, True), "x": (1981, True), "y": (1981, True)},
        [("x", "a"), ("y", "a")],
    )
    series = yearly_gini_series(corpus)
    assert series.points == [(1981, 0.0)]


def test_yearly_gini_hand_case():
    # shares (0.7, 0.1, 0.1, 0.1): pairwise sum 3.6, 2 n^2 mean = 8 -> 0.45
    papers = {c: (1980, True) for c in "abcd"}
    papers.update({f"x{i}": (1981, True) for i in range(10)})
    edges = [(f"x{i}", "a") for i in range(7)]
    edges += [("x7", "b"), ("x8", "c"), ("x9", "d")]
    corpus = make_corpus(papers, edges)
    series = yearly_gini_series(corpus)
    assert series.points[0][0] == 1981
    assert abs(series.points[0][1] - 0.45) <= 1e-12


def test_yearly_gini_published_population():
    corpus = make_corpus(
        {"a": (1980, True), "b": (1980, True), "x": (1981, True)},
        [("x", "a")],
    )
    cited_only = yearly_gini_series(corpus, population="cited")
    assert cited_only.points == [(1981, 0.0)]
    published = yearly_gini_series(corpus, population="published")
    # population {a, b, x} with citation counts (1, 0, 0)
    expected = pairwise_gini_oracle([1, 0, 0])
    assert abs(published.points[0][1] - expected) <= 1e-12
    with pytest.raises(ValueError):
        yearly_gini_series(corpus, population="everyone")


def test_yearly_gini_skips_quiet_years():
    corpus = make_corpus(
        {"a": (1980, True), "x": (1981, True), "y": (1985, True)},
        [("x", "a"), ("y", "a")],
    )
    series = yearly_gini_series(corpus)
    assert [p[0] for p in series.points] == [1981, 1985]
    assert series.meta["years_skipped"] == "3"


# -- attention curves ---------------------------------------------------------


def curve_corpus():
    """Papers published 1980-1981; citations spread over 1982-1995."""
    papers = {"target": (1982, True), "minor": (1982, True)}
    citers = {}
    for year in range(1982, 1996):
        for i in range(4):
            citers[f"c{year}_{i}"] = (year, True)
    papers.update(citers)
    edges = []
    # target: 2 citations each in 1983 and 1984, then quiet
    edges += [(f"c1983_{i}", "target") for i in range(2)]
    edges += [(f"c1984_{i}", "target") for i in range(2)]
    # extra citations elsewhere so year totals are nonzero
    for year in range(1982, 1996):
        edges.append((f"c{year}_3", "minor"))
    # make both papers pass the 10-citation filter
    edges += [(f"c{1990 + i % 5}_2", "target") for i in range(8)]
    edges += [(f"c{1985 + i % 5}_1", "minor") for i in range(4)]
    return make_corpus(papers, edges)


def test_curve_normalization_random():
    corpus = curve_corpus()
    curves, meta = attention_curves(corpus, min_citations=10, last_pub_year=1986, window=10)
    assert curves, "expected at least one qualifying curve"
    for curve in curves:
        assert abs(sum(curve.normalized) - 1.0) <= 1e-9
        assert all(s >= 0 for s in curve.shares)


def test_curve_share_normalization_hand_case():
    corpus = curve_corpus()
    curves, _ = attention_curves(corpus, min_citations=10, last_pub_year=1986, window=10)
    target = next(c for c in curves if c.paper_id == "target")
    assert target.t0 == 1982
    # shares in 1983/1984: 2 of 5 total each year; window total spread
    assert target.shares[0] == 0.0
    assert target.shares[1] > 0 and target.shares[2] > 0


def test_curve_citation_filter():
    corpus = curve_corpus()
    assert corpus.total_citations_of("target") == 12
    assert corpus.total_citations_of("minor") == 18
    curves, _ = attention_curves(corpus, min_citations=13, last_pub_year=1986, window=10)
    ids = {c.paper_id for c in curves}
    assert "target" not in ids and "minor" in ids


def test_curve_horizon_exclusion_counted():
    corpus = curve_corpus()  # years up to 1995
    curves, meta = attention_curves(corpus, min_citations=1, last_pub_year=1995, window=10)
    assert int(meta["excluded_incomplete_window"]) > 0
    for curve in curves:
        assert curve.t0 + curve.window - 1 <= corpus.year_range[1]


# -- cycle stats --------------------------------------------------------------


def make_curve(normalized):
    return AttentionCurve(
        paper_id="x",
        t0=1980,
        shares=tuple(normalized),
        normalized=tuple(normalized),
        window=len(normalized),
    )


def test_cycle_stats_hand_case():
    stats = cycle_stats(make_curve([0.1, 0.4, 0.3, 0.2, 0, 0, 0, 0, 0, 0]))
    assert stats.t_peak == 1
    assert abs(stats.f_c_peak - 0.5) <= 1e-12
    assert stats.t_half == 2  # last value >= 0.2 sits at index 3


def test_cycle_stats_single_spike():
    stats = cycle_stats(make_curve([1.0] + [0.0] * 9))
    assert (stats.t_peak, stats.f_c_peak, stats.t_half) == (0, 1.0, 0)


def test_cycle_stats_flat_curve_tie_rule():
    stats = cycle_stats(make_curve([0.1] * 10))
    assert stats.t_peak == 0
    assert abs(stats.f_c_peak - 0.1) <= 1e-12
    assert stats.t_half == 9


def test_cycle_stats_prefix_sum_recomputed_independently():
    rng = random.Random(7)
    for _ in range(200):
        raw = [rng.random() for _ in range(10)]
        total = sum(raw)
        norm = [v / total for v in raw]
        norm[-1] = 1.0 - sum(norm[:-1])  # force an exact unit sum
        stats = cycle_stats(make_curve(norm))
        oracle_prefix = 0.0
        for i in range(stats.t_peak + 1):
            oracle_prefix += norm[i]
        assert abs(stats.f_c_peak - oracle_prefix) <= 1e-12
        assert stats.t_half >= 0
        assert 0 <= stats.t_peak < 10
        assert stats.t_half <= 10 - 1 - stats.t_peak
