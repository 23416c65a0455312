"""Citation corpus loading, validation and indexing.

A corpus is a validated citation graph: papers keyed by id, a citation
edge list, and per-year citation tallies where the year of a citation is
the publication year of the citing paper. Corpora are immutable after
construction and safe to share across threads.

File formats (CSV, UTF-8):
  papers.csv  id,pub_year,in_discipline     (in_discipline in {0,1})
  edges.csv   citing_id,cited_id
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, NamedTuple

from .errors import DataError

if TYPE_CHECKING:  # pragma: no cover
    from .urn import EventLog

DEFAULT_YEAR_RANGE = (1980, 2019)

PAPERS_HEADER = ["id", "pub_year", "in_discipline"]
EDGES_HEADER = ["citing_id", "cited_id"]


@dataclass(frozen=True)
class PaperRecord:
    id: str
    pub_year: int
    in_discipline: bool


class CitationEdge(NamedTuple):
    citing_id: str
    cited_id: str


@dataclass
class LoadReport:
    """Counts of what the loader kept and dropped.

    accepted + self_loops_dropped + dangling_dropped always equals the
    number of edge rows read.
    """

    papers_loaded: int = 0
    papers_dropped_out_of_range: int = 0
    edge_rows: int = 0
    edges_kept: int = 0
    self_loops_dropped: int = 0
    dangling_dropped: int = 0


class Corpus:
    """Immutable citation graph with per-year tallies and derived indexes."""

    def __init__(
        self,
        papers: dict[str, PaperRecord],
        edges: list[CitationEdge],
        year_range: tuple[int, int] | None = None,
    ):
        self.papers = papers
        self.edges = edges
        if year_range is None:
            if papers:
                ys = [p.pub_year for p in papers.values()]
                year_range = (min(ys), max(ys))
            else:
                year_range = (0, 0)
        self.year_range = year_range

        # k_x(t): citations to paper x from papers published in year t.
        self.per_year_citations: dict[tuple[str, int], int] = {}
        self._by_year: dict[int, dict[str, int]] = {}
        self._refs_by_citing: dict[str, list[str]] = {}
        self._citers_of: dict[str, list[str]] = {}
        self._total_citations: dict[str, int] = {}
        self._published_in: dict[int, list[str]] = {}
        for edge in edges:
            year = papers[edge.citing_id].pub_year
            key = (edge.cited_id, year)
            self.per_year_citations[key] = self.per_year_citations.get(key, 0) + 1
            by = self._by_year.setdefault(year, {})
            by[edge.cited_id] = by.get(edge.cited_id, 0) + 1
            self._refs_by_citing.setdefault(edge.citing_id, []).append(edge.cited_id)
            self._citers_of.setdefault(edge.cited_id, []).append(edge.citing_id)
            self._total_citations[edge.cited_id] = self._total_citations.get(edge.cited_id, 0) + 1
        for pid, rec in papers.items():
            self._published_in.setdefault(rec.pub_year, []).append(pid)

    # -- read-only views used throughout the metrics engine --------------

    def cited_in_year(self, year: int) -> dict[str, int]:
        """Map cited paper id -> k_x(year); empty when the year has no citations."""
        return self._by_year.get(year, {})

    def published_in(self, year: int) -> list[str]:
        return self._published_in.get(year, [])

    def references_of(self, citing_id: str) -> list[str]:
        """Cited ids in input order for one citing paper."""
        return self._refs_by_citing.get(citing_id, [])

    def citers_of(self, cited_id: str) -> list[str]:
        return self._citers_of.get(cited_id, [])

    def total_citations_of(self, paper_id: str) -> int:
        return self._total_citations.get(paper_id, 0)

    def years_with_citations(self) -> list[int]:
        return sorted(self._by_year)

    def citations_in_year(self, year: int) -> int:
        return sum(self._by_year.get(year, {}).values())

    def __len__(self) -> int:
        return len(self.papers)


def load_corpus(
    papers_path: str | Path,
    edges_path: str | Path,
    strict: bool = True,
    year_range: tuple[int, int] | None = DEFAULT_YEAR_RANGE,
) -> tuple[Corpus, LoadReport]:
    """Load and validate a corpus from its two CSV files.

    In strict mode any dangling edge or out-of-window publication year is
    an error. In lenient mode out-of-window papers, self-loops and
    dangling edges are dropped and counted in the report. Self-loops are
    never kept. ``year_range=None`` disables the publication window check.
    """
    report = LoadReport()
    papers: dict[str, PaperRecord] = {}
    for lineno, row in _read_rows(papers_path, PAPERS_HEADER):
        if len(row) != 3:
            raise DataError(f"{papers_path}:{lineno}: expected 3 fields, got {len(row)}")
        pid, year_s, disc_s = row
        if not pid:
            raise DataError(f"{papers_path}:{lineno}: empty paper id")
        try:
            year = int(year_s)
        except ValueError:
            raise DataError(f"{papers_path}:{lineno}: pub_year {year_s!r} is not an integer")
        if disc_s not in ("0", "1"):
            raise DataError(
                f"{papers_path}:{lineno}: in_discipline must be 0 or 1, got {disc_s!r}"
            )
        if pid in papers:
            raise DataError(f"{papers_path}:{lineno}: duplicate paper id {pid!r}")
        if year_range is not None and not (year_range[0] <= year <= year_range[1]):
            if strict:
                raise DataError(
                    f"{papers_path}:{lineno}: pub_year {year} outside window "
                    f"{year_range[0]}-{year_range[1]}"
                )
            report.papers_dropped_out_of_range += 1
            continue
        papers[pid] = PaperRecord(id=pid, pub_year=year, in_discipline=disc_s == "1")
    report.papers_loaded = len(papers)

    edges: list[CitationEdge] = []
    for lineno, row in _read_rows(edges_path, EDGES_HEADER):
        if len(row) != 2:
            raise DataError(f"{edges_path}:{lineno}: expected 2 fields, got {len(row)}")
        citing, cited = row
        report.edge_rows += 1
        if citing == cited:
            report.self_loops_dropped += 1
            continue
        if citing not in papers or cited not in papers:
            if strict:
                missing = citing if citing not in papers else cited
                raise DataError(f"{edges_path}:{lineno}: edge references unknown paper {missing!r}")
            report.dangling_dropped += 1
            continue
        edges.append(CitationEdge(citing, cited))
    report.edges_kept = len(edges)

    corpus = Corpus(papers, edges, year_range=year_range)
    return corpus, report


def write_corpus(corpus: Corpus, papers_path: str | Path, edges_path: str | Path) -> None:
    """Write a corpus in canonical form: papers sorted by id, edges sorted
    by (citing_id, cited_id), LF line endings."""
    with open(papers_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PAPERS_HEADER)
        for pid in sorted(corpus.papers):
            rec = corpus.papers[pid]
            writer.writerow([rec.id, rec.pub_year, int(rec.in_discipline)])
    with open(edges_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EDGES_HEADER)
        for edge in sorted(corpus.edges):
            writer.writerow([edge.citing_id, edge.cited_id])


def corpus_from_event_log(log: "EventLog") -> Corpus:
    """Bridge a simulation trace into the metrics engine.

    Simulated arrivals become in-discipline papers published at their
    arrival step. Papers seeded into the urns before step 0 are kept (so
    no edge dangles) but flagged out-of-discipline: initially uncited
    papers are dated -age, pre-cited seed papers one step older than the
    oldest of those.
    """
    papers: dict[str, PaperRecord] = {}
    seed_year = -(max((age for _, age in log.initial_u), default=0) + 1)
    for pid, _count in log.initial_s:
        key = _sim_id(pid)
        papers[key] = PaperRecord(id=key, pub_year=seed_year, in_discipline=False)
    for pid, age in log.initial_u:
        key = _sim_id(pid)
        papers[key] = PaperRecord(id=key, pub_year=-age, in_discipline=False)
    edges: list[CitationEdge] = []
    for step in log.steps:
        for paper in step.papers:
            key = _sim_id(paper.id)
            papers[key] = PaperRecord(id=key, pub_year=step.t, in_discipline=True)
            edges.extend(CitationEdge(key, _sim_id(ref)) for ref in paper.refs)
    return Corpus(papers, edges)


def _sim_id(n: int) -> str:
    # Zero-padded so lexicographic id order equals arrival order.
    return f"p{n:07d}"


def _read_rows(path: str | Path, header: list[str]) -> Iterable[tuple[int, list[str]]]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: file not found")
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file (expected header {','.join(header)})")
        if first != header:
            raise DataError(f"{path}: expected header {','.join(header)}, got {','.join(first)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            yield lineno, row
