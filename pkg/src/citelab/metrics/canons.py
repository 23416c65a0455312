"""Canon stability: ranking turnover, elite structure, co-citation density."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..corpus import Corpus
from ..errors import ConvergenceError, MetricError
from ..series import MetricSeries


def expanded_top_k(ranking: list, k: int) -> Counter:
    """Rank-expanded multiset: the element at 1-indexed rank r appears
    k - r + 1 times, so position changes move multiset mass.

    Rankings shorter than k are used whole; for full rankings the
    multiset has cardinality k(k+1)/2.
    """
    if k <= 0:
        raise MetricError(f"k must be positive, got {k}")
    expanded: Counter = Counter()
    for r, item in enumerate(ranking[:k], start=1):
        expanded[item] += k - r + 1
    return expanded


def ranked_jaccard(rank_a: list, rank_b: list, k: int) -> float:
    """Multiset Jaccard similarity of the two rank-expanded top-k lists.

    1 for identical rankings, 0 for disjoint ones; sensitive to both
    membership and position; symmetric.
    """
    if not rank_a or not rank_b:
        raise MetricError("rankings must be non-empty")
    a = expanded_top_k(rank_a, k)
    b = expanded_top_k(rank_b, k)
    keys = a.keys() | b.keys()
    inter = sum(min(a[key], b[key]) for key in keys)
    union = sum(max(a[key], b[key]) for key in keys)
    return inter / union


def rank_by_citations(corpus: Corpus, year: int) -> list[str]:
    """Cited papers of ``year`` ordered by citations received that year,
    ties broken oldest-first then by id."""
    tallies = corpus.cited_in_year(year)
    return sorted(
        tallies, key=lambda pid: (-tallies[pid], corpus.papers[pid].pub_year, pid)
    )


def topk_turnover_series(corpus: Corpus, k: int = 50, by: str = "citations") -> MetricSeries:
    """Ranked Jaccard similarity between each year's top-k and the
    previous year's, by within-year citations or by PageRank centrality
    on the year's citation graph."""
    if by not in ("citations", "pagerank"):
        raise ValueError(f"by must be 'citations' or 'pagerank', got {by!r}")
    years = corpus.years_with_citations()
    rankings: dict[int, list[str]] = {}
    for year in years:
        if by == "citations":
            rankings[year] = rank_by_citations(corpus, year)
        else:
            graph = build_yearly_citation_graph(corpus, year)
            if not graph.nodes:
                continue
            scores = pagerank(graph)
            rankings[year] = sorted(
                scores, key=lambda pid: (-scores[pid], corpus.papers[pid].pub_year, pid)
            )
    points = []
    short_years = []
    for year in sorted(rankings):
        if year - 1 not in rankings:
            continue
        prev, now = rankings[year - 1], rankings[year]
        if min(len(prev), len(now)) < k:
            short_years.append(year)
        points.append((year, ranked_jaccard(prev, now, k)))
    if not points:
        raise MetricError("need at least two consecutive rankable years")
    meta = {"k": str(k), "by": by}
    if short_years:
        meta["short_ranking_years"] = ",".join(str(y) for y in short_years)
    return MetricSeries(name=f"turnover_{by}_top{k}", points=points, meta=meta)


@dataclass(frozen=True)
class CitationGraph:
    """Directed citation graph (citing -> cited) for one publication year."""

    nodes: tuple[str, ...]
    successors: dict[str, tuple[str, ...]]

    def edge_count(self) -> int:
        return sum(len(v) for v in self.successors.values())


def build_yearly_citation_graph(corpus: Corpus, year: int) -> CitationGraph:
    """Graph over the papers published in ``year`` and their citation
    neighbors of any year; edges keep pairs with at least one endpoint
    published in ``year``."""
    in_year = set(corpus.published_in(year))
    nodes = set(in_year)
    succ: dict[str, set[str]] = {}
    for pid in in_year:
        for ref in corpus.references_of(pid):
            nodes.add(ref)
            succ.setdefault(pid, set()).add(ref)
        for citer in corpus.citers_of(pid):
            nodes.add(citer)
            succ.setdefault(citer, set()).add(pid)
    ordered = tuple(sorted(nodes))
    return CitationGraph(
        nodes=ordered,
        successors={u: tuple(sorted(vs)) for u, vs in succ.items()},
    )


def pagerank(
    graph: CitationGraph,
    damping: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 1000,
) -> dict[str, float]:
    """PageRank by power iteration with uniform teleport and dangling-mass
    redistribution; converged when the L1 change drops below ``tol``."""
    n = len(graph.nodes)
    if n == 0:
        raise MetricError("pagerank needs a non-empty graph")
    index = {node: i for i, node in enumerate(graph.nodes)}
    src = []
    dst = []
    out_deg = np.zeros(n)
    for u, targets in graph.successors.items():
        ui = index[u]
        out_deg[ui] = len(targets)
        for v in targets:
            src.append(ui)
            dst.append(index[v])
    src_arr = np.asarray(src, dtype=np.intp)
    dst_arr = np.asarray(dst, dtype=np.intp)
    dangling = out_deg == 0
    safe_deg = np.where(dangling, 1.0, out_deg)

    x = np.full(n, 1.0 / n)
    residual = float("inf")
    for _ in range(max_iter):
        contrib = x / safe_deg
        flow = np.bincount(dst_arr, weights=contrib[src_arr], minlength=n)
        dangling_mass = x[dangling].sum()
        new_x = damping * (flow + dangling_mass / n) + (1.0 - damping) / n
        residual = float(np.abs(new_x - x).sum())
        x = new_x
        if residual < tol:
            return {node: float(x[i]) for node, i in index.items()}
    raise ConvergenceError(
        f"pagerank did not converge within {max_iter} iterations "
        f"(residual {residual:.3e})",
        residual=residual,
    )


@dataclass(frozen=True)
class EliteSet:
    """Smallest set of papers jointly holding ``threshold`` of a year's citations."""

    year: int
    members: frozenset[str]
    size_fraction: float
    mean_age: float


def elite_set(corpus: Corpus, year: int, threshold: float = 0.8) -> EliteSet:
    """Shortest prefix of the year's citation ranking whose citations
    reach ``threshold`` of the year total (ties: older paper, then id)."""
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    tallies = corpus.cited_in_year(year)
    if not tallies:
        raise MetricError(f"no citations issued in year {year}")
    ranking = rank_by_citations(corpus, year)
    total = sum(tallies.values())
    # Exact rational comparison: 0.8 * total must not admit one member too
    # many (or few) through float rounding.
    need = Fraction(str(threshold)) * total
    members = []
    acc = 0
    for pid in ranking:
        members.append(pid)
        acc += tallies[pid]
        if acc >= need:
            break
    ages = [year - corpus.papers[pid].pub_year for pid in members]
    return EliteSet(
        year=year,
        members=frozenset(members),
        size_fraction=len(members) / len(tallies),
        mean_age=sum(ages) / len(ages),
    )


def cocitation_relative_density(corpus: Corpus, year: int, elite: EliteSet) -> float:
    """Density of the elite-induced co-citation subgraph relative to the
    whole co-citation graph of ``year``.

    Nodes are the papers cited that year; two are linked when at least
    one paper published that year cites both (no multiplicity, no
    self-loops).
    """
    cited = corpus.cited_in_year(year)
    n = len(cited)
    if n < 2:
        raise MetricError(f"year {year} has fewer than two cited papers")
    members = elite.members
    m = len(members)
    if m < 2:
        raise MetricError("elite set has fewer than two members")

    pairs: set[tuple[str, str]] = set()
    for citing in corpus.published_in(year):
        refs = sorted(set(corpus.references_of(citing)))
        for i in range(len(refs)):
            for j in range(i + 1, len(refs)):
                pairs.add((refs[i], refs[j]))
    whole_density = len(pairs) / (n * (n - 1) / 2)
    if whole_density == 0:
        raise MetricError(f"co-citation graph of year {year} has no edges")
    elite_edges = sum(1 for a, b in pairs if a in members and b in members)
    elite_density = elite_edges / (m * (m - 1) / 2)
    return elite_density / whole_density
