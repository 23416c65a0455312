"""citelab: simulate citation-network growth and measure how attention,
inequality and canon stability evolve as the literature expands."""

from .corpus import (
    CitationEdge,
    Corpus,
    LoadReport,
    PaperRecord,
    corpus_from_event_log,
    load_corpus,
    write_corpus,
)
from .errors import CitelabError, ConvergenceError, DataError, FetchError, MetricError
from .series import FitResult, MetricSeries, read_series_csv, read_series_json
from .urn import (
    CitedUrn,
    EventLog,
    ModelParams,
    SimState,
    UncitedUrn,
    arrivals_at,
    checkpoint_metrics,
    draw_reference,
    init_state,
    read_event_log,
    run,
    step,
    write_event_log,
)

__version__ = "0.1.0"
