#!/usr/bin/env python3
"""Build the bundled synthetic corpus and its golden metric values.

Every golden number is computed here by direct enumeration: pairwise
Gini, dense-matrix PageRank, nested-loop co-citation counting, per-paper
window sums. The script is deliberately independent of the citelab
package; tests compare library output against these files.

Run from anywhere: python tests/data/make_fixture.py
"""
import csv
import json
import random
from fractions import Fraction
from pathlib import Path

import numpy as np

HERE = Path(__file__).parent
CORPUS_DIR = HERE / "fixture_corpus"
GOLDEN_DIR = HERE / "golden"

FIRST_YEAR = 1980
LAST_YEAR = 1999
PER_YEAR = 10
SEED = 20250810

# analysis defaults mirrored by the acceptance test
TOP_K = 50
MIN_CITATIONS = 10
LAST_PUB_YEAR = 2005
WINDOW = 10
ELITE_NUM, ELITE_DEN = 4, 5  # threshold 0.8 as an exact rational
DAMPING = 0.85


def build_corpus():
    rng = random.Random(SEED)
    papers = {}  # id -> (pub_year, in_discipline)
    by_year = {}
    for year in range(FIRST_YEAR, LAST_YEAR + 1):
        for i in range(PER_YEAR):
            pid = f"p{year}_{i:02d}"
            papers[pid] = (year, rng.random() < 0.85)
            by_year.setdefault(year, []).append(pid)

    # Preferential reference lists over strictly earlier papers so a few
    # early papers accumulate enough citations to qualify for curves.
    citations = {pid: 0 for pid in papers}
    refs = {}
    for year in range(FIRST_YEAR + 1, LAST_YEAR + 1):
        earlier = [p for p in papers if papers[p][0] < year]
        for pid in by_year[year]:
            n_refs = rng.randint(3, 12)
            chosen = set()
            while len(chosen) < min(n_refs, len(earlier)):
                weights = [1 + 3 * citations[c] for c in earlier]
                total = sum(weights)
                r = rng.random() * total
                acc = 0.0
                for cand, w in zip(earlier, weights):
                    acc += w
                    if r < acc:
                        if cand not in chosen:
                            chosen.add(cand)
                        break
            for c in chosen:
                citations[c] += 1
            refs[pid] = sorted(chosen)
    return papers, refs


def write_corpus(papers, refs):
    CORPUS_DIR.mkdir(parents=True, exist_ok=True)
    with open(CORPUS_DIR / "papers.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "pub_year", "in_discipline"])
        for pid in sorted(papers):
            year, disc = papers[pid]
            w.writerow([pid, year, int(disc)])
    with open(CORPUS_DIR / "edges.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["citing_id", "cited_id"])
        for citing in sorted(refs):
            for cited in refs[citing]:
                w.writerow([citing, cited])


# -- brute-force metric evaluations ----------------------------------------


def k_of(papers, refs, pid, year):
    """Citations to pid from papers published in `year`, by direct scan."""
    k = 0
    for citing, cited in iter_edges(refs):
        if cited == pid and papers[citing][0] == year:
            k += 1
    return k


def iter_edges(refs):
    for citing in sorted(refs):
        for cited in refs[citing]:
            yield citing, cited


def yearly_tallies(papers, refs):
    tallies = {}
    for citing, cited in iter_edges(refs):
        year = papers[citing][0]
        tallies.setdefault(year, {}).setdefault(cited, 0)
        tallies[year][cited] += 1
    return tallies


def pairwise_gini(values):
    n = len(values)
    total = sum(values)
    num = 0.0
    for a in values:
        for b in values:
            num += abs(a - b)
    return num / (2 * n * n * (total / n))


def golden_normalized_publications(papers):
    counts = {}
    for pid, (year, disc) in papers.items():
        if disc:
            counts[year] = counts.get(year, 0) + 1
    total = sum(counts.values())
    return [[y, counts.get(y, 0) / total] for y in range(min(counts), max(counts) + 1)]


def golden_uptake(papers, refs, horizon=2):
    years = sorted({papers[p][0] for p in papers})
    mean_pts, zero_pts = [], []
    for year in range(years[0], years[-1] - horizon + 1):
        cohort = sorted(p for p in papers if papers[p][0] == year)
        if not cohort:
            continue
        sums = []
        for pid in cohort:
            s = 0
            for y in range(year, year + horizon + 1):
                s += k_of(papers, refs, pid, y)
            sums.append(s)
        mean_pts.append([year, sum(sums) / len(cohort)])
        zero_pts.append([year, sum(1 for s in sums if s == 0) / len(cohort)])
    return mean_pts, zero_pts


def golden_gini_yearly(tallies):
    return [[y, pairwise_gini(list(tallies[y].values()))] for y in sorted(tallies)]


def golden_cycles(papers, refs, tallies):
    totals = {}
    for _, cited in iter_edges(refs):
        totals[cited] = totals.get(cited, 0) + 1
    year_totals = {y: sum(t.values()) for y, t in tallies.items()}
    max_year = max(papers[p][0] for p in papers)
    effective_last = min(LAST_PUB_YEAR, max_year - WINDOW + 1)
    cohorts = {}
    for pid in sorted(papers):
        year = papers[pid][0]
        if year > effective_last or totals.get(pid, 0) < MIN_CITATIONS:
            continue
        shares = []
        for y in range(year, year + WINDOW):
            t = year_totals.get(y, 0)
            shares.append((tallies.get(y, {}).get(pid, 0) / t) if t else 0.0)
        mass = sum(shares)
        if mass <= 0:
            continue
        norm = [s / mass for s in shares]
        peak_val = max(norm)
        t_peak = norm.index(peak_val)
        f_c = sum(norm[: t_peak + 1])
        t_last = max(i for i, v in enumerate(norm) if v >= peak_val / 2)
        cohorts.setdefault(year, []).append((t_peak, f_c, t_last - t_peak))
    peak_pts, share_pts, half_pts = [], [], []
    for year in sorted(cohorts):
        stats = cohorts[year]
        n = len(stats)
        peak_pts.append([year, sum(s[0] for s in stats) / n])
        share_pts.append([year, sum(s[1] for s in stats) / n])
        half_pts.append([year, sum(s[2] for s in stats) / n])
    return peak_pts, share_pts, half_pts


def ranking_by_citations(papers, tally):
    return sorted(tally, key=lambda pid: (-tally[pid], papers[pid][0], pid))


def expanded(ranking, k):
    counts = {}
    for r, item in enumerate(ranking[:k], start=1):
        counts[item] = counts.get(item, 0) + (k - r + 1)
    return counts


def ranked_jaccard(rank_a, rank_b, k):
    a, b = expanded(rank_a, k), expanded(rank_b, k)
    keys = set(a) | set(b)
    inter = sum(min(a.get(x, 0), b.get(x, 0)) for x in keys)
    union = sum(max(a.get(x, 0), b.get(x, 0)) for x in keys)
    return inter / union


def golden_turnover_citations(papers, tallies):
    points = []
    for year in sorted(tallies):
        if year - 1 not in tallies:
            continue
        prev = ranking_by_citations(papers, tallies[year - 1])
        now = ranking_by_citations(papers, tallies[year])
        points.append([year, ranked_jaccard(prev, now, TOP_K)])
    return points


def dense_pagerank(nodes, edges, damping=DAMPING):
    """Dense power iteration to machine precision."""
    n = len(nodes)
    index = {node: i for i, node in enumerate(nodes)}
    matrix = np.zeros((n, n))
    out_deg = np.zeros(n)
    for u, v in edges:
        out_deg[index[u]] += 1
    for u, v in edges:
        matrix[index[v], index[u]] += 1.0 / out_deg[index[u]]
    dangling = out_deg == 0
    x = np.full(n, 1.0 / n)
    for _ in range(100000):
        new_x = damping * (matrix @ x + x[dangling].sum() / n) + (1 - damping) / n
        if np.abs(new_x - x).sum() < 1e-14:
            x = new_x
            break
        x = new_x
    return {node: x[index[node]] for node in nodes}


def yearly_graph(papers, refs, year):
    in_year = {p for p in papers if papers[p][0] == year}
    nodes = set(in_year)
    edges = set()
    for citing, cited in iter_edges(refs):
        if citing in in_year or cited in in_year:
            nodes.add(citing)
            nodes.add(cited)
            edges.add((citing, cited))
    return sorted(nodes), sorted(edges)


def golden_turnover_pagerank(papers, refs, tallies):
    rankings = {}
    for year in sorted(tallies):
        nodes, edges = yearly_graph(papers, refs, year)
        if not nodes:
            continue
        scores = dense_pagerank(nodes, edges)
        rankings[year] = sorted(
            scores, key=lambda pid: (-scores[pid], papers[pid][0], pid)
        )
    points = []
    for year in sorted(rankings):
        if year - 1 not in rankings:
            continue
        points.append([year, ranked_jaccard(rankings[year - 1], rankings[year], TOP_K)])
    return points


def golden_elite(papers, tallies):
    size_pts, age_pts, members_by_year = [], [], {}
    for year in sorted(tallies):
        tally = tallies[year]
        ranking = ranking_by_citations(papers, tally)
        total = sum(tally.values())
        members = []
        acc = 0
        for pid in ranking:
            members.append(pid)
            acc += tally[pid]
            if acc * ELITE_DEN >= ELITE_NUM * total:
                break
        size_pts.append([year, len(members) / len(tally)])
        ages = [year - papers[pid][0] for pid in members]
        age_pts.append([year, sum(ages) / len(ages)])
        members_by_year[str(year)] = sorted(members)
    return size_pts, age_pts, members_by_year


def golden_cocitation(papers, refs, tallies, members_by_year):
    points = []
    for year in sorted(tallies):
        cited = sorted(tallies[year])
        n = len(cited)
        members = set(members_by_year[str(year)])
        m = len(members)
        if n < 2 or m < 2:
            continue
        pairs = set()
        citing_papers = sorted(p for p in papers if papers[p][0] == year and p in refs)
        for citing in citing_papers:
            rl = sorted(set(refs[citing]))
            for i in range(len(rl)):
                for j in range(i + 1, len(rl)):
                    pairs.add((rl[i], rl[j]))
        whole = len(pairs) / (n * (n - 1) / 2)
        if whole == 0:
            continue
        elite_edges = sum(1 for a, b in pairs if a in members and b in members)
        elite_density = elite_edges / (m * (m - 1) / 2)
        points.append([year, elite_density / whole])
    return points


def citation_stream(papers, refs):
    stream = []
    for citing in sorted(refs, key=lambda p: (papers[p][0], p)):
        for cited in refs[citing]:
            stream.append((papers[citing][0], cited))
    return stream


def golden_heaps(papers, refs):
    seen = set()
    points = []
    for i, (_, cited) in enumerate(citation_stream(papers, refs), start=1):
        seen.add(cited)
        points.append([i, len(seen)])
    return points


def golden_discovery(papers, refs):
    seen = set()
    per_year = {}
    for year, cited in citation_stream(papers, refs):
        total, novel = per_year.get(year, (0, 0))
        is_new = cited not in seen
        seen.add(cited)
        per_year[year] = (total + 1, novel + (1 if is_new else 0))
    return [[y, per_year[y][1] / per_year[y][0]] for y in sorted(per_year)]


def ols(xs, ys):
    n = len(xs)
    xm = sum(xs) / n
    ym = sum(ys) / n
    sxx = sum((x - xm) ** 2 for x in xs)
    sxy = sum((x - xm) * (y - ym) for x, y in zip(xs, ys))
    slope = sxy / sxx
    return slope, ym - slope * xm


def golden_summary(papers, norm_points, gini_points, heaps_points):
    import math

    alpha, _ = ols([p[0] for p in norm_points], [math.log(p[1]) for p in norm_points])
    # Heaps fit: log-spaced subsample past the first decade, 50 per decade.
    # The grid is shared protocol with the implementation (same logspace
    # positions); the fit math below stays independent.
    xs = [p[0] for p in heaps_points]
    ys = [p[1] for p in heaps_points]
    lo, hi = xs[0] * 10.0, float(xs[-1])
    n_samples = max(2, int(math.log10(hi / lo) * 50) + 1)
    grid = [int(g) for g in np.unique(np.floor(np.logspace(math.log10(lo), math.log10(hi), n_samples)))]
    sample = [(x, ys[x - 1]) for x in grid]
    beta, _ = ols([math.log10(x) for x, _ in sample], [math.log10(y) for _, y in sample])
    g = dict((int(x), y) for x, y in gini_points)
    first, last = min(g), max(g)
    delta_gini = (g[last] - g[first]) / g[first]
    return {
        "alpha": alpha,
        "beta": beta,
        "delta_gini": delta_gini,
        "delta_gini_from": first,
        "delta_gini_to": last,
    }


def main():
    papers, refs = build_corpus()
    write_corpus(papers, refs)
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    tallies = yearly_tallies(papers, refs)

    series = {}
    series["normalized_publications"] = golden_normalized_publications(papers)
    series["uptake_mean"], series["uptake_uncited_fraction"] = golden_uptake(papers, refs)
    series["gini_yearly"] = golden_gini_yearly(tallies)
    (
        series["attention_peak_time"],
        series["attention_peak_share"],
        series["attention_half_life"],
    ) = golden_cycles(papers, refs, tallies)
    series["turnover_citations_top50"] = golden_turnover_citations(papers, tallies)
    series["turnover_pagerank_top50"] = golden_turnover_pagerank(papers, refs, tallies)
    size_pts, age_pts, members = golden_elite(papers, tallies)
    series["elite_size_fraction"] = size_pts
    series["elite_mean_age"] = age_pts
    series["cocitation_relative_density"] = golden_cocitation(papers, refs, tallies, members)
    series["heaps_curve"] = golden_heaps(papers, refs)
    series["discovery_fraction"] = golden_discovery(papers, refs)

    for name, points in series.items():
        path = GOLDEN_DIR / f"{name}.json"
        path.write_text(
            json.dumps({"name": name, "points": points}, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    (GOLDEN_DIR / "elite_members.json").write_text(
        json.dumps(members, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )
    (GOLDEN_DIR / "summary_expected.json").write_text(
        json.dumps(
            golden_summary(
                papers,
                series["normalized_publications"],
                series["gini_yearly"],
                series["heaps_curve"],
            ),
            sort_keys=True,
            indent=1,
        )
        + "\n",
        encoding="utf-8",
    )
    n_edges = sum(len(r) for r in refs.values())
    print(f"fixture: {len(papers)} papers, {n_edges} edges")
    print(f"golden: {len(series)} series + elite members + summary -> {GOLDEN_DIR}")


if __name__ == "__main__":
    main()
