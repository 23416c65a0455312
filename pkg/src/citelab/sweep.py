"""Parameter sweeps over the growth exponent with replica management.

Every (alpha, replica) job gets its own RNG stream derived by mixing the
base seed with the pair, so extending the grid never perturbs existing
replicas. Jobs run in a bounded worker pool; a crashed replica is
recorded and excluded from the aggregates without aborting the sweep.
Identical configurations produce byte-identical output files.
"""
from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CitelabError
from .metrics.heaps import heaps_curve, heaps_fit
from .urn import EventLog, ModelParams, checkpoint_metrics, run, write_event_log

log = logging.getLogger(__name__)

DEFAULT_ALPHA_GRID = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]

PROFILES = {
    "desk": {"replicas": 20},
    "paper": {"replicas": 100},
}

REPLICA_COLUMNS = [
    "alpha",
    "replica",
    "seed",
    "status",
    "gini_500",
    "gini_5000",
    "gini_delta",
    "gini_relative_delta",
    "jaccard_500",
    "jaccard_5000",
    "jaccard_delta",
    "jaccard_relative_delta",
    "heaps_beta",
    "heaps_r2",
    "discovery_fraction",
    "fallback_draws",
    "steps",
    "papers",
    "citations",
    "error",
]

AGGREGATED_METRICS = [
    "gini_500",
    "gini_5000",
    "gini_delta",
    "jaccard_500",
    "jaccard_5000",
    "jaccard_delta",
    "heaps_beta",
    "discovery_fraction",
]


class SweepError(CitelabError):
    """A grid point produced no successful replicas."""


@dataclass
class SweepConfig:
    alpha_grid: list[float] = field(default_factory=lambda: list(DEFAULT_ALPHA_GRID))
    replicas: int = 100
    base_seed: int = 0
    model: dict = field(default_factory=dict)  # ModelParams overrides
    metrics: dict = field(default_factory=dict)
    output_dir: str | Path = "sweep_out"
    workers: int | None = None
    save_logs: bool = False

    def validate(self) -> None:
        if self.replicas < 1:
            raise ValueError(f"replicas must be >= 1, got {self.replicas}")
        if not self.alpha_grid:
            raise ValueError("alpha_grid must not be empty")
        if any(a < 0 for a in self.alpha_grid):
            raise ValueError("alpha values must be >= 0")
        bad = set(self.model) - _MODEL_FIELDS
        if bad:
            raise ValueError(f"unknown model overrides: {sorted(bad)}")
        if "alpha" in self.model or "seed" in self.model:
            raise ValueError("alpha and seed are assigned per job; do not override them")

    def apply_profile(self, profile: str) -> None:
        if profile not in PROFILES:
            raise ValueError(f"unknown profile {profile!r}; choose from {sorted(PROFILES)}")
        for key, value in PROFILES[profile].items():
            setattr(self, key, value)

    @classmethod
    def from_json(cls, path: str | Path) -> "SweepConfig":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f for f in cls.__dataclass_fields__}
        bad = set(doc) - known - {"profile"}
        if bad:
            raise ValueError(f"unknown config keys: {sorted(bad)}")
        profile = doc.pop("profile", None)
        config = cls(**doc)
        if profile:
            config.apply_profile(profile)
        return config


_MODEL_FIELDS = set(ModelParams.__dataclass_fields__)


@dataclass
class SweepResult:
    rows: list[dict]
    aggregates: list[dict]
    output_dir: Path

    def rows_for(self, alpha: float, ok_only: bool = True) -> list[dict]:
        return [
            r
            for r in self.rows
            if r["alpha"] == alpha and (not ok_only or r["status"] == "ok")
        ]


def derive_seed(base_seed: int, alpha: float, replica: int) -> int:
    """Stable 64-bit stream seed for one (alpha, replica) job."""
    ss = np.random.SeedSequence(
        [base_seed & 0xFFFFFFFFFFFFFFFF, int(round(alpha * 1_000_000_000)), replica]
    )
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def replica_metrics(event_log: EventLog, metrics_cfg: dict | None = None) -> dict:
    """Checkpoint inequality/turnover readings plus the replica's Heaps
    exponent (fitted past the warm-up step, whose citations only target
    the seeded endowment) and the discovered-draw fraction."""
    cfg = metrics_cfg or {}
    checkpoints = tuple(cfg.get("population_checkpoints", (500, 5000)))
    k = int(cfg.get("topk", 50))
    counts = cfg.get("counts", "cumulative")
    row: dict = {}
    row.update(checkpoint_metrics(event_log, checkpoints, k=k, counts=counts))

    curve = heaps_curve(event_log)
    fit_min = cfg.get("heaps_fit_min_x")
    if fit_min is None:
        fit_min = event_log.steps[0].citations() if event_log.steps else 1
    fit = heaps_fit(curve, fit_range=(float(fit_min), float(curve.points[-1][0])))
    row["heaps_beta"] = fit.exponent
    row["heaps_r2"] = fit.r_squared

    total = event_log.total_citations()
    discovered = sum(s.discovered for s in event_log.steps)
    row["discovery_fraction"] = discovered / total if total else 0.0
    row["fallback_draws"] = sum(s.fallback_to_s + s.fallback_to_u for s in event_log.steps)
    row["steps"] = len(event_log.steps)
    row["papers"] = event_log.total_papers()
    row["citations"] = total
    return row


def _run_one(job: tuple) -> dict:
    alpha, replica, seed, model_overrides, metrics_cfg, log_path = job
    params = ModelParams(**{**model_overrides, "alpha": alpha, "seed": seed})
    event_log = run(params)
    if log_path:
        Path(log_path).parent.mkdir(parents=True, exist_ok=True)
        write_event_log(event_log, log_path)
    row = {"alpha": alpha, "replica": replica, "seed": seed, "status": "ok", "error": ""}
    row.update(replica_metrics(event_log, metrics_cfg))
    return row


def run_sweep(config: SweepConfig) -> SweepResult:
    config.validate()
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    jobs = []
    for alpha in config.alpha_grid:
        for replica in range(config.replicas):
            seed = derive_seed(config.base_seed, alpha, replica)
            log_path = None
            if config.save_logs:
                log_path = str(out_dir / f"alpha={alpha:g}" / f"replica={replica}.jsonl")
            jobs.append((alpha, replica, seed, dict(config.model), dict(config.metrics), log_path))

    workers = config.workers or os.cpu_count() or 1
    rows: list[dict] = []
    if workers == 1:
        for job in jobs:
            rows.append(_guarded(job))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for row in pool.map(_run_one_safe, jobs):
                rows.append(row)
    rows.sort(key=lambda r: (r["alpha"], r["replica"]))

    aggregates = []
    for alpha in config.alpha_grid:
        ok = [r for r in rows if r["alpha"] == alpha and r["status"] == "ok"]
        failed = [r for r in rows if r["alpha"] == alpha and r["status"] != "ok"]
        if not ok:
            raise SweepError(
                f"alpha={alpha:g}: all {config.replicas} replicas failed "
                f"(first error: {failed[0]['error'] if failed else 'none run'})"
            )
        if failed:
            log.warning("alpha=%g: %d replicas failed and were excluded", alpha, len(failed))
        agg = {"alpha": alpha, "replicas_ok": len(ok), "replicas_failed": len(failed)}
        for metric in AGGREGATED_METRICS:
            values = [r[metric] for r in ok]
            agg[f"mean_{metric}"] = _mean(values)
            agg[f"std_{metric}"] = _std(values)
        aggregates.append(agg)

    _write_rows(out_dir / "replicas.csv", REPLICA_COLUMNS, rows)
    agg_columns = ["alpha", "replicas_ok", "replicas_failed"]
    for metric in AGGREGATED_METRICS:
        agg_columns += [f"mean_{metric}", f"std_{metric}"]
    _write_rows(out_dir / "sweep.csv", agg_columns, aggregates)
    return SweepResult(rows=rows, aggregates=aggregates, output_dir=out_dir)


def _run_one_safe(job: tuple) -> dict:
    return _guarded(job)


def _guarded(job: tuple) -> dict:
    alpha, replica, seed = job[0], job[1], job[2]
    try:
        return _run_one(job)
    except Exception as exc:  # noqa: BLE001 - a crashed replica must not abort the sweep
        return {
            "alpha": alpha,
            "replica": replica,
            "seed": seed,
            "status": "failed",
            "error": f"{type(exc).__name__}: {exc}",
        }


def _mean(values: list[float]) -> float:
    return sum(values) / len(values)


def _std(values: list[float]) -> float:
    if len(values) < 2:
        return 0.0
    m = _mean(values)
    return (sum((v - m) ** 2 for v in values) / (len(values) - 1)) ** 0.5


def _write_rows(path: Path, columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)
