"""Paged scholarly-graph API client that materializes corpus CSV files.

Retrieval mirrors the two-step dataset construction: first every work
matching the concept filter inside the year window (the disciplinary
set), then every work citing or cited by those (the extension set).
Works stream into a raw JSONL staging file as pages arrive; papers.csv
and edges.csv are assembled at the end, with edges restricted to papers
that made it into the final set.

Protocol: ``GET {base_url}/works`` with ``filter``, ``per_page`` and
either ``cursor`` (start ``*``; server echoes ``meta.next_cursor``, null
when done) or ``page`` (server omits ``next_cursor``; client walks page
numbers until a short page). Each result needs ``id``,
``publication_year`` and ``referenced_works``.

Progress survives crashes: a checkpoint file ``{cursor, rows_written}``
names the phase-encoded cursor and the staging rows already safe on
disk. Re-running with the same arguments resumes from there.
"""
from __future__ import annotations

import csv
import json
import logging
import os
import time
from dataclasses import dataclass
from pathlib import Path

import requests

from .corpus import EDGES_HEADER, PAPERS_HEADER
from .errors import FetchError

log = logging.getLogger(__name__)

API_KEY_HEADER_ENV = "CITELAB_API_KEY_HEADER"
API_KEY_ENV = "CITELAB_API_KEY"

RAW_NAME = "works_raw.jsonl"
CHECKPOINT_NAME = "fetch_checkpoint.json"

REQUIRED_FIELDS = ("id", "publication_year", "referenced_works")


@dataclass
class FetchReport:
    papers_written: int = 0
    edges_written: int = 0
    requests_made: int = 0
    retries: int = 0
    resumed_from_rows: int = 0
    dropped_out_of_window: int = 0


class _Client:
    """One-request-in-flight HTTP client with rate cap and backoff."""

    def __init__(self, base_url, page_size, rps, max_retries, backoff_base, session, report):
        self.works_url = base_url.rstrip("/") + "/works"
        self.page_size = page_size
        self.min_interval = 1.0 / rps if rps > 0 else 0.0
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.session = session or requests.Session()
        self.report = report
        self._last_request = 0.0
        self.headers = {}
        header_name = os.environ.get(API_KEY_HEADER_ENV)
        if header_name and os.environ.get(API_KEY_ENV):
            self.headers[header_name] = os.environ[API_KEY_ENV]

    def get_page(self, filter_expr: str, token: str) -> tuple[list[dict], str | None]:
        """Fetch one page; token is ``cursor=...`` or ``page=N``.

        Returns (results, next token or None when exhausted).
        """
        params = {"filter": filter_expr, "per_page": str(self.page_size)}
        kind, _, value = token.partition("=")
        params[kind] = value
        doc = self._request(params)
        if "results" not in doc:
            raise FetchError("response missing field 'results'")
        results = doc["results"]
        for item in results:
            for fieldname in REQUIRED_FIELDS:
                if fieldname not in item:
                    raise FetchError(f"work record missing field '{fieldname}'")
        meta = doc.get("meta", {})
        if kind == "cursor":
            if "next_cursor" not in meta:
                # Server does not speak cursors: fall back to page numbers.
                return results, "page=2" if len(results) == self.page_size else None
            nxt = meta["next_cursor"]
            return results, f"cursor={nxt}" if nxt else None
        page_no = int(value)
        if len(results) < self.page_size:
            return results, None
        return results, f"page={page_no + 1}"

    def _request(self, params: dict) -> dict:
        delay = self.backoff_base
        for attempt in range(self.max_retries + 1):
            wait = self.min_interval - (time.monotonic() - self._last_request)
            if wait > 0:
                time.sleep(wait)
            self._last_request = time.monotonic()
            try:
                self.report.requests_made += 1
                resp = self.session.get(
                    self.works_url, params=params, headers=self.headers, timeout=30
                )
                if resp.status_code == 200:
                    return resp.json()
                reason = f"HTTP {resp.status_code}"
            except requests.RequestException as exc:
                reason = f"{type(exc).__name__}: {exc}"
            if attempt == self.max_retries:
                raise FetchError(f"giving up after {attempt + 1} attempts: {reason}")
            self.report.retries += 1
            log.warning("request failed (%s); retrying in %.2fs", reason, delay)
            time.sleep(delay)
            delay *= 2


def fetch_remote_corpus(
    base_url: str,
    concept_filter: str,
    year_range: tuple[int, int],
    page_size: int = 200,
    out_dir: str | Path = ".",
    rps: float = 10.0,
    max_retries: int = 5,
    backoff_base: float = 0.5,
    session: requests.Session | None = None,
) -> FetchReport:
    """Materialize papers.csv and edges.csv for a concept's two-step corpus."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    raw_path = out / RAW_NAME
    checkpoint_path = out / CHECKPOINT_NAME
    report = FetchReport()
    client = _Client(base_url, page_size, rps, max_retries, backoff_base, session, report)

    raw_rows, cursor = _resume(raw_path, checkpoint_path)
    report.resumed_from_rows = len(raw_rows)
    stage = _Staging(raw_path, checkpoint_path, raw_rows)

    try:
        _fetch_all(client, concept_filter, year_range, stage, cursor)
    except FetchError:
        stage.save_checkpoint()
        raise

    report.dropped_out_of_window = stage.dropped_out_of_window(year_range)
    papers, edges = stage.assemble(year_range)
    _write_csvs(out, papers, edges)
    report.papers_written = len(papers)
    report.edges_written = len(edges)
    checkpoint_path.unlink(missing_ok=True)
    return report


def _fetch_all(client, concept_filter, year_range, stage, cursor):
    phase, _, token = cursor.partition("|")
    y0, y1 = year_range

    if phase == "disc":
        filter_expr = f"concept:{concept_filter},year:{y0}-{y1}"
        token = token or "cursor=*"
        while token:
            stage.phase_cursor = f"disc|{token}"
            results, token = client.get_page(filter_expr, token)
            stage.add_works(results, in_discipline=True)
        phase, token = "citing", ""

    if phase == "citing":
        disc_ids = stage.disciplinary_ids()
        start_idx, page_token = _split_citing_token(token)
        for idx in range(start_idx, len(disc_ids)):
            token = page_token or "cursor=*"
            page_token = ""
            while token:
                stage.phase_cursor = f"citing|{idx}:{token}"
                results, token = client.get_page(f"cites:{disc_ids[idx]}", token)
                stage.add_works(results, in_discipline=False)
        phase, token = "refs", ""

    if phase == "refs":
        missing = stage.unresolved_reference_ids()
        start_idx = int(token) if token else 0
        batches = [
            missing[i : i + client.page_size] for i in range(0, len(missing), client.page_size)
        ]
        for idx in range(start_idx, len(batches)):
            stage.phase_cursor = f"refs|{idx}"
            token_inner = "cursor=*"
            while token_inner:
                results, token_inner = client.get_page(
                    "ids:" + "|".join(batches[idx]), token_inner
                )
                stage.add_works(results, in_discipline=False)
        stage.phase_cursor = "done|"


def _split_citing_token(token: str) -> tuple[int, str]:
    if not token:
        return 0, ""
    idx, _, page_token = token.partition(":")
    return int(idx), page_token


class _Staging:
    """Append-only staging of fetched works plus the resume checkpoint."""

    def __init__(self, raw_path: Path, checkpoint_path: Path, existing_rows: list[dict]):
        self.raw_path = raw_path
        self.checkpoint_path = checkpoint_path
        self.rows = existing_rows
        self.phase_cursor = ""
        self._seen = {row["id"] for row in existing_rows}

    def add_works(self, results: list[dict], in_discipline: bool) -> None:
        new_rows = []
        for work in results:
            if work["id"] in self._seen:
                continue
            self._seen.add(work["id"])
            row = {
                "id": str(work["id"]),
                "publication_year": int(work["publication_year"]),
                "referenced_works": [str(r) for r in work["referenced_works"]],
                "in_discipline": bool(in_discipline),
            }
            self.rows.append(row)
            new_rows.append(row)
        with open(self.raw_path, "a", encoding="utf-8") as fh:
            for row in new_rows:
                fh.write(json.dumps(row, sort_keys=True) + "\n")
        self.save_checkpoint()

    def save_checkpoint(self) -> None:
        doc = {"cursor": self.phase_cursor, "rows_written": len(self.rows)}
        self.checkpoint_path.write_text(json.dumps(doc), encoding="utf-8")

    def disciplinary_ids(self) -> list[str]:
        return [row["id"] for row in self.rows if row["in_discipline"]]

    def unresolved_reference_ids(self) -> list[str]:
        referenced: set[str] = set()
        for row in self.rows:
            referenced.update(row["referenced_works"])
        return sorted(referenced - self._seen)

    def dropped_out_of_window(self, year_range: tuple[int, int]) -> int:
        y0, y1 = year_range
        return sum(1 for row in self.rows if not y0 <= row["publication_year"] <= y1)

    def assemble(self, year_range: tuple[int, int]):
        y0, y1 = year_range
        papers = {
            row["id"]: row
            for row in self.rows
            if y0 <= row["publication_year"] <= y1
        }
        edges = set()
        for row in self.rows:
            if row["id"] not in papers:
                continue
            for ref in row["referenced_works"]:
                if ref in papers and ref != row["id"]:
                    edges.add((row["id"], ref))
        return papers, sorted(edges)


def _resume(raw_path: Path, checkpoint_path: Path) -> tuple[list[dict], str]:
    if not checkpoint_path.exists():
        raw_path.unlink(missing_ok=True)
        return [], "disc|"
    doc = json.loads(checkpoint_path.read_text(encoding="utf-8"))
    rows_written = int(doc.get("rows_written", 0))
    rows: list[dict] = []
    if raw_path.exists():
        with open(raw_path, encoding="utf-8") as fh:
            for line in fh:
                if len(rows) >= rows_written:
                    break
                line = line.strip()
                if line:
                    rows.append(json.loads(line))
    # Drop any rows past the checkpoint (a crash mid-append).
    with open(raw_path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    log.info("resuming fetch from %d staged rows (cursor %r)", len(rows), doc.get("cursor"))
    return rows, str(doc.get("cursor") or "disc|")


def _write_csvs(out: Path, papers: dict[str, dict], edges: list[tuple[str, str]]) -> None:
    with open(out / "papers.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PAPERS_HEADER)
        for pid in sorted(papers):
            row = papers[pid]
            writer.writerow([pid, row["publication_year"], int(row["in_discipline"])])
    with open(out / "edges.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EDGES_HEADER)
        for citing, cited in edges:
            writer.writerow([citing, cited])
