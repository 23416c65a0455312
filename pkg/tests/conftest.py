from pathlib import Path

import pytest

from citelab.corpus import CitationEdge, Corpus, PaperRecord

DATA_DIR = Path(__file__).parent / "data"
FIXTURE_CORPUS = DATA_DIR / "fixture_corpus"
GOLDEN_DIR = DATA_DIR / "golden"


def make_corpus(papers, edges, year_range=None):
    """papers: {id: (pub_year, in_discipline)}; edges: [(citing, cited)]."""
    records = {pid: PaperRecord(pid, y, d) for pid, (y, d) in papers.items()}
    return Corpus(records, [CitationEdge(*e) for e in edges], year_range=year_range)


@pytest.fixture(scope="session")
def fixture_corpus():
    from citelab.corpus import load_corpus

    corpus, report = load_corpus(
        FIXTURE_CORPUS / "papers.csv", FIXTURE_CORPUS / "edges.csv", strict=True
    )
    assert report.dangling_dropped == 0 and report.self_loops_dropped == 0
    return corpus
