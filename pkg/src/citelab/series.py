"""Uniform output records for all computed indicators.

Every metric in the package emits a MetricSeries (per-year or per-checkpoint
points plus provenance metadata) or a FitResult. Series serialize to CSV
(``x,y`` rows under ``# meta:`` comment headers) and to JSON
(``{name, meta, points}``).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError


@dataclass
class MetricSeries:
    name: str
    points: list[tuple[float, float]]
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.points) > 1000:
            xs = np.fromiter((p[0] for p in self.points), dtype=float, count=len(self.points))
            ys = np.fromiter((p[1] for p in self.points), dtype=float, count=len(self.points))
            if not (np.diff(xs) > 0).all():
                raise DataError(f"series {self.name!r}: x values must be strictly increasing")
            if not np.isfinite(ys).all():
                raise DataError(f"series {self.name!r}: non-finite y value")
            return
        last_x = None
        for x, y in self.points:
            if last_x is not None and x <= last_x:
                raise DataError(
                    f"series {self.name!r}: x values must be strictly increasing "
                    f"(got {x} after {last_x})"
                )
            if not math.isfinite(y):
                raise DataError(f"series {self.name!r}: non-finite y at x={x}")
            last_x = x

    @property
    def xs(self) -> list[float]:
        return [p[0] for p in self.points]

    @property
    def ys(self) -> list[float]:
        return [p[1] for p in self.points]

    def write_csv(self, path: str | Path) -> None:
        lines = [f"# name: {self.name}"]
        lines.append("# meta: " + json.dumps(self.meta, sort_keys=True))
        lines.append("x,y")
        for x, y in self.points:
            lines.append(f"{_fmt(x)},{_fmt(y)}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    def write_json(self, path: str | Path) -> None:
        doc = {"name": self.name, "meta": self.meta, "points": [[x, y] for x, y in self.points]}
        Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n", encoding="utf-8")


def read_series_csv(path: str | Path) -> MetricSeries:
    name = ""
    meta: dict[str, str] = {}
    points: list[tuple[float, float]] = []
    seen_header = False
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("# name:"):
            name = line[len("# name:"):].strip()
        elif line.startswith("# meta:"):
            meta = json.loads(line[len("# meta:"):].strip())
        elif line.startswith("#"):
            continue
        elif line == "x,y":
            seen_header = True
        else:
            try:
                xs, ys = line.split(",")
                points.append((float(xs), float(ys)))
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: malformed series row {raw!r}") from exc
    if not seen_header:
        raise DataError(f"{path}: missing 'x,y' header row")
    return MetricSeries(name=name, points=points, meta=meta)


def read_series_json(path: str | Path) -> MetricSeries:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return MetricSeries(
        name=doc["name"],
        points=[(float(x), float(y)) for x, y in doc["points"]],
        meta=dict(doc["meta"]),
    )


def _fmt(v: float) -> str:
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return repr(v)


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit of a two-parameter law.

    ``exponent`` is the slope in the transformed space (growth rate for
    exponential fits, power-law exponent for log-log fits); ``prefactor``
    is the back-transformed intercept.
    """

    exponent: float
    prefactor: float
    r_squared: float
    n_points: int
