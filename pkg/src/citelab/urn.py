"""Two-urn generative model of citation formation under literature growth.

Papers arrive on an exponential schedule n0*exp(alpha*t). Each arrival
builds a reference list of ``n_ref`` distinct targets: with probability
``p`` a target is drawn from the cited urn (weight proportional to prior
citations, the rich-get-richer channel), otherwise uniformly without
replacement from the pool of recently published, still-uncited papers.
All papers of a step draw against the step-start state: cited-urn weights
are frozen for the whole step and newly cited papers only enter the cited
urn at step end. Uncited papers that survive ``visibility_window`` steps
without a citation drop out of circulation permanently.

A run is a pure function of (params, seed): the event log it returns is
bitwise reproducible.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Iterator, NamedTuple

import numpy as np

from .errors import DataError
from .metrics.attention import gini
from .metrics.canons import ranked_jaccard

_REJECT_CAP = 16  # failed weighted draws before switching to the exact path


@dataclass(frozen=True)
class ModelParams:
    alpha: float = 0.0
    n0: float | None = None  # None: half the combined initial urn sizes
    p: float = 0.8
    n_ref: int = 10
    visibility_window: int = 2
    init_s_size: int = 200
    init_s_count_range: tuple[int, int] = (1, 3)
    init_u_size: int = 100
    init_u_age_range: tuple[int, int] = (1, 2)
    target_total_papers: int = 50_000
    seed: int = 0

    def arrival_scale(self) -> float:
        if self.n0 is not None:
            return self.n0
        return (self.init_s_size + self.init_u_size) / 2

    def validate(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {self.p}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.n_ref < 1:
            raise ValueError(f"n_ref must be >= 1, got {self.n_ref}")
        if self.visibility_window < 1:
            raise ValueError(f"visibility_window must be >= 1, got {self.visibility_window}")
        if self.init_s_size < 1 or self.init_u_size < 0:
            raise ValueError("initial urn sizes must be positive")
        lo, hi = self.init_s_count_range
        if not 1 <= lo <= hi:
            raise ValueError(f"bad init_s_count_range {self.init_s_count_range}")
        alo, ahi = self.init_u_age_range
        if not 1 <= alo <= ahi <= self.visibility_window:
            raise ValueError(f"bad init_u_age_range {self.init_u_age_range}")
        if self.target_total_papers <= self.init_s_size + self.init_u_size:
            raise ValueError("target_total_papers must exceed the initial population")
        if self.n0 is not None and self.n0 <= 0:
            raise ValueError(f"n0 must be positive, got {self.n0}")


class CitedUrn:
    """Weighted reservoir of already-cited papers.

    Backed by a Fenwick tree so single draws (probability proportional to
    citation count) and count increments both run in O(log n). The step
    engine additionally takes an O(n) frozen prefix-sum snapshot once per
    step and resolves that step's draws against it in bulk, which is
    equivalent because weights do not move within a step.
    """

    def __init__(self, capacity: int = 1024):
        self._ids = np.zeros(capacity, dtype=np.int64)
        self._counts = np.zeros(capacity, dtype=np.int64)
        self._tree = np.zeros(capacity + 1, dtype=np.int64)
        self._slot: dict[int, int] = {}
        self._n = 0
        self._total = 0

    def __len__(self) -> int:
        return self._n

    def __contains__(self, paper_id: int) -> bool:
        return paper_id in self._slot

    @property
    def total_weight(self) -> int:
        return self._total

    def count_of(self, paper_id: int) -> int:
        slot = self._slot.get(paper_id)
        return int(self._counts[slot]) if slot is not None else 0

    def ids(self) -> list[int]:
        return self._ids[: self._n].tolist()

    def add(self, paper_id: int, count: int = 1) -> None:
        """Insert a new paper or add ``count`` citations to an existing one."""
        if count < 1:
            raise ValueError("count increments must be positive")
        slot = self._slot.get(paper_id)
        if slot is None:
            slot = self._n
            if slot == len(self._ids):
                self._grow()
            self._ids[slot] = paper_id
            self._slot[paper_id] = slot
            self._n += 1
        self._counts[slot] += count
        self._tree_add(slot, count)
        self._total += count

    def draw(self, rng: np.random.Generator) -> int:
        """One paper, probability proportional to its count. O(log n)."""
        if self._total <= 0:
            raise ValueError("cannot draw from an empty urn")
        r = int(rng.integers(0, self._total))
        return int(self._ids[self._find(r)])

    def draw_excluding(self, rng: np.random.Generator, exclude: set[int]) -> int | None:
        """Weighted draw over papers outside ``exclude``; None if impossible.

        Tries plain rejection first; after _REJECT_CAP misses falls back to
        an exact draw over the eligible weight.
        """
        if self._total <= 0:
            return None
        for _ in range(_REJECT_CAP):
            candidate = self.draw(rng)
            if candidate not in exclude:
                return candidate
        excluded_weight = sum(
            int(self._counts[self._slot[e]]) for e in exclude if e in self._slot
        )
        eligible = self._total - excluded_weight
        if eligible <= 0:
            return None
        r = int(rng.integers(0, eligible))
        acc = 0
        for slot in range(self._n):
            pid = int(self._ids[slot])
            if pid in exclude:
                continue
            acc += int(self._counts[slot])
            if r < acc:
                return pid
        raise AssertionError("exact excluded draw fell off the end")

    def cumulative_snapshot(self) -> np.ndarray:
        """Frozen prefix sums of the current counts (step-start snapshot)."""
        return np.cumsum(self._counts[: self._n])

    def id_array(self) -> np.ndarray:
        return self._ids[: self._n]

    # -- Fenwick internals ------------------------------------------------

    def _grow(self) -> None:
        new_cap = max(1024, len(self._ids) * 2)
        self._ids = np.resize(self._ids, new_cap)
        self._counts = np.resize(self._counts, new_cap)
        old_tree = self._tree
        self._tree = np.zeros(new_cap + 1, dtype=np.int64)
        self._tree[: len(old_tree)] = old_tree

    def _tree_add(self, slot: int, delta: int) -> None:
        i = slot + 1
        tree = self._tree
        n = len(tree) - 1
        while i <= n:
            tree[i] += delta
            i += i & (-i)

    def _prefix(self, i: int) -> int:
        total = 0
        tree = self._tree
        while i > 0:
            total += int(tree[i])
            i -= i & (-i)
        return total

    def _find(self, r: int) -> int:
        """Smallest slot whose inclusive prefix sum exceeds r."""
        pos = 0
        rem = r
        bit = 1 << (self._n.bit_length())
        tree = self._tree
        n = self._n
        while bit:
            nxt = pos + bit
            if nxt <= n and tree[nxt] <= rem:
                rem -= int(tree[nxt])
                pos = nxt
            bit >>= 1
        return pos  # 0-based slot


class UncitedUrn:
    """Recently published, never-cited papers with their ages in steps."""

    def __init__(self):
        self._ages: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._ages)

    def __contains__(self, paper_id: int) -> bool:
        return paper_id in self._ages

    def add(self, paper_id: int, age: int) -> None:
        self._ages[paper_id] = age

    def remove(self, paper_id: int) -> None:
        del self._ages[paper_id]

    def members(self) -> list[int]:
        return list(self._ages)

    def ages(self) -> dict[int, int]:
        return dict(self._ages)

    def end_of_step_sweep(self, new_ids: list[int], window: int) -> list[int]:
        """Insert arrivals, age everybody one step, expel the expired.

        Arrivals enter before the increment, so between steps every member
        sits at an age in [1, window]: a paper is discoverable for exactly
        ``window`` full steps after its arrival step.
        """
        for pid in new_ids:
            self._ages[pid] = 0
        expired = []
        survivors: dict[int, int] = {}
        for pid, age in self._ages.items():
            age += 1
            if age > window:
                expired.append(pid)
            else:
                survivors[pid] = age
        self._ages = survivors
        return expired


class SimPaper(NamedTuple):
    id: int
    refs: list[int]
    flags: tuple[str, ...]


@dataclass
class StepRecord:
    t: int
    arrivals: int
    papers: list[SimPaper]
    reinforced: int = 0
    discovered: int = 0
    fallback_to_s: int = 0
    fallback_to_u: int = 0

    def citations(self) -> int:
        return sum(len(p.refs) for p in self.papers)


@dataclass
class EventLog:
    params: ModelParams
    seed: int
    initial_s: list[tuple[int, int]]  # (paper id, starting citation count)
    initial_u: list[tuple[int, int]]  # (paper id, starting age)
    steps: list[StepRecord] = field(default_factory=list)

    def total_arrivals(self) -> int:
        return sum(s.arrivals for s in self.steps)

    def total_papers(self) -> int:
        return len(self.initial_s) + len(self.initial_u) + self.total_arrivals()

    def total_citations(self) -> int:
        return sum(s.citations() for s in self.steps)

    def iter_citations(self) -> Iterator[tuple[int, int, int]]:
        """(step, citing id, cited id) in deterministic log order."""
        for step in self.steps:
            for paper in step.papers:
                for ref in paper.refs:
                    yield step.t, paper.id, ref


@dataclass
class SimState:
    params: ModelParams
    rng: np.random.Generator
    cited: CitedUrn
    uncited: UncitedUrn
    t: int = 0
    total_papers: int = 0
    next_paper_id: int = 0
    initial_s: list[tuple[int, int]] = field(default_factory=list)
    initial_u: list[tuple[int, int]] = field(default_factory=list)


def arrivals_at(params: ModelParams, t: int) -> int:
    """Scheduled arrivals at step t: round-half-up of n0*exp(alpha*t), at least 1."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return max(1, math.floor(params.arrival_scale() * math.exp(params.alpha * t) + 0.5))


def init_state(params: ModelParams) -> SimState:
    params.validate()
    rng = np.random.Generator(np.random.PCG64(params.seed))
    cited = CitedUrn()
    lo, hi = params.init_s_count_range
    counts = rng.integers(lo, hi + 1, size=params.init_s_size).tolist()
    initial_s = []
    for pid, count in enumerate(counts):
        cited.add(pid, int(count))
        initial_s.append((pid, int(count)))
    uncited = UncitedUrn()
    alo, ahi = params.init_u_age_range
    ages = rng.integers(alo, ahi + 1, size=params.init_u_size).tolist()
    initial_u = []
    for offset, age in enumerate(ages):
        pid = params.init_s_size + offset
        uncited.add(pid, int(age))
        initial_u.append((pid, int(age)))
    return SimState(
        params=params,
        rng=rng,
        cited=cited,
        uncited=uncited,
        t=0,
        total_papers=params.init_s_size + params.init_u_size,
        next_paper_id=params.init_s_size + params.init_u_size,
        initial_s=initial_s,
        initial_u=initial_u,
    )


def draw_reference(
    state: SimState,
    rng: np.random.Generator,
    already_in_list: set[int],
    pool: list[int],
) -> tuple[int, str] | None:
    """One reference draw against the step-start state.

    ``pool`` is the step's remaining discovery pool (uncited papers not
    yet drawn this step); a successful uniform draw removes its pick.
    Returns (paper id, "reinforced"|"discovered"), or None when neither
    urn can supply an id outside ``already_in_list``.
    """
    want_cited = rng.random() < state.params.p
    if want_cited:
        pick = state.cited.draw_excluding(rng, already_in_list)
        if pick is not None:
            return pick, "reinforced"
        if pool:
            return _pool_pop(pool, rng.random()), "discovered"
        return None
    if pool:
        return _pool_pop(pool, rng.random()), "discovered"
    pick = state.cited.draw_excluding(rng, already_in_list)
    if pick is not None:
        return pick, "reinforced"
    return None


def _pool_pop(pool: list[int], u: float) -> int:
    j = int(u * len(pool))
    pick = pool[j]
    pool[j] = pool[-1]
    pool.pop()
    return pick


def step(state: SimState, max_new: int | None = None) -> StepRecord:
    """Advance the simulation one step and return its event record.

    All reference lists are resolved against the step-start snapshot of
    both urns; citation-count updates, pool removals, aging and arrivals
    land at step end. ``max_new`` caps scheduled arrivals (used by
    ``run`` to hit the target population exactly).
    """
    params = state.params
    rng = state.rng
    n_arrivals = arrivals_at(params, state.t)
    if max_new is not None:
        n_arrivals = min(n_arrivals, max_new)
    n_ref = params.n_ref

    cited = state.cited
    cum = cited.cumulative_snapshot()
    id_arr = cited.id_array()
    total_weight = int(cum[-1]) if len(cum) else 0
    pool = state.uncited.members()

    # One Bernoulli per planned draw, then one batch of weighted draws for
    # the cited channel and one batch of uniforms for the pool channel,
    # consumed in paper order; collision redraws and fallbacks use scalar
    # draws. The batches read the frozen snapshot, so this is equivalent
    # to resolving the step draw by draw.
    n_draws = n_arrivals * n_ref
    want_cited = (rng.random(n_draws) < params.p).tolist()
    m_cited = sum(want_cited)
    if m_cited and total_weight > 0:
        cited_targets = id_arr[
            np.searchsorted(cum, rng.integers(0, total_weight, size=m_cited), side="right")
        ].tolist()
    else:
        cited_targets = []
    pool_uniforms = rng.random(n_draws - m_cited).tolist()

    record = StepRecord(t=state.t, arrivals=n_arrivals, papers=[])
    pos = 0
    cited_pos = 0
    pool_pos = 0
    first_id = state.next_paper_id
    for i in range(n_arrivals):
        pid = first_id + i
        refs: list[int] = []
        in_list: set[int] = set()
        flags: list[str] = []
        for _ in range(n_ref):
            designated_cited = want_cited[pos]
            pos += 1
            target: int | None = None
            tag = ""
            if designated_cited:
                candidate = cited_targets[cited_pos] if total_weight > 0 else None
                if total_weight > 0:
                    cited_pos += 1
                target, tag = _resolve_cited(
                    cited, cum, id_arr, total_weight, rng, candidate, in_list, pool
                )
                if tag == "discovered":
                    record.fallback_to_u += 1
            else:
                if pool:
                    target = _pool_pop(pool, pool_uniforms[pool_pos])
                    pool_pos += 1
                    tag = "discovered"
                else:
                    target = _cited_retry(cited, cum, id_arr, total_weight, rng, in_list)
                    if target is not None:
                        tag = "reinforced"
                        record.fallback_to_s += 1
            if target is None:
                flags.append("short_refs")
                break
            refs.append(target)
            in_list.add(target)
            if tag == "reinforced":
                record.reinforced += 1
            else:
                record.discovered += 1
        record.papers.append(SimPaper(pid, refs, tuple(flags)))

    # End-of-step updates.
    tally: dict[int, int] = {}
    for paper in record.papers:
        for ref in paper.refs:
            tally[ref] = tally.get(ref, 0) + 1
    newly_cited = []
    for ref, count in tally.items():
        if ref in state.uncited:
            newly_cited.append(ref)
        cited.add(ref, count)
    for ref in newly_cited:
        state.uncited.remove(ref)
    new_ids = [p.id for p in record.papers]
    state.uncited.end_of_step_sweep(new_ids, params.visibility_window)

    state.next_paper_id += n_arrivals
    state.total_papers += n_arrivals
    state.t += 1
    return record


def _resolve_cited(cited, cum, id_arr, total_weight, rng, candidate, in_list, pool):
    """Designated cited-urn draw: dedupe against the open list, fall back
    to the pool when the whole urn is already in it."""
    if candidate is not None and candidate not in in_list:
        return candidate, "reinforced"
    pick = _cited_retry(cited, cum, id_arr, total_weight, rng, in_list)
    if pick is not None:
        return pick, "reinforced"
    if pool:
        return _pool_pop(pool, rng.random()), "discovered"
    return None, ""


def _cited_retry(cited, cum, id_arr, total_weight, rng, in_list):
    """Scalar weighted draws against the frozen snapshot with rejection,
    then the urn's exact excluded draw (still snapshot-safe: weights do
    not move within a step)."""
    if total_weight <= 0:
        return None
    for _ in range(_REJECT_CAP):
        r = int(rng.integers(0, total_weight))
        candidate = int(id_arr[int(np.searchsorted(cum, r, side="right"))])
        if candidate not in in_list:
            return candidate
    return cited.draw_excluding(rng, in_list)


def run(params: ModelParams) -> EventLog:
    """Simulate until the total population reaches the target exactly."""
    state = init_state(params)
    log = EventLog(
        params=params,
        seed=params.seed,
        initial_s=state.initial_s,
        initial_u=state.initial_u,
    )
    target = params.target_total_papers
    while state.total_papers < target:
        record = step(state, max_new=target - state.total_papers)
        log.steps.append(record)
    return log


# -- checkpoint metrics (population-size comparisons across runs) ---------


def checkpoint_metrics(
    log: EventLog,
    population_checkpoints: tuple[int, ...] = (500, 5000),
    k: int = 50,
    counts: str = "cumulative",
) -> dict[str, float | None]:
    """Inequality and canon-turnover readings at fixed population sizes.

    At the first step where the population (initial papers plus arrivals)
    reaches each checkpoint: the Gini index of citation counts over all
    ever-cited papers (``counts="cumulative"``, including the seeded
    endowment) or of that step's citations (``counts="per_step"``), and
    the ranked Jaccard similarity (top ``k``) between the step's and the
    previous step's within-step citation rankings. Also reports the
    absolute and relative change from the first to the last checkpoint.
    """
    if counts not in ("cumulative", "per_step"):
        raise ValueError(f"counts must be 'cumulative' or 'per_step', got {counts!r}")
    checkpoints = sorted(population_checkpoints)
    if not checkpoints:
        raise ValueError("need at least one checkpoint")
    if log.total_papers() < checkpoints[-1]:
        raise DataError(
            f"checkpoint {checkpoints[-1]} unreachable: run produced "
            f"{log.total_papers()} papers"
        )

    pub_year: dict[int, int] = {}
    oldest_age = max((age for _, age in log.initial_u), default=0)
    for pid, _count in log.initial_s:
        pub_year[pid] = -(oldest_age + 1)
    for pid, age in log.initial_u:
        pub_year[pid] = -age

    cumulative: dict[int, int] = {pid: count for pid, count in log.initial_s}
    population = len(log.initial_s) + len(log.initial_u)
    prev_step_tally: dict[int, int] | None = None
    remaining = list(checkpoints)
    out: dict[str, float | None] = {}

    for record in log.steps:
        step_tally: dict[int, int] = {}
        for paper in record.papers:
            pub_year[paper.id] = record.t
            for ref in paper.refs:
                step_tally[ref] = step_tally.get(ref, 0) + 1
                cumulative[ref] = cumulative.get(ref, 0) + 1
        population += record.arrivals
        while remaining and population >= remaining[0]:
            cp = remaining.pop(0)
            values = cumulative if counts == "cumulative" else step_tally
            out[f"gini_{cp}"] = gini(list(values.values()))
            if prev_step_tally is None:
                raise DataError(
                    f"checkpoint {cp} reached at the first step; no previous "
                    "step to compare rankings against"
                )
            rank_prev = _citation_ranking(prev_step_tally, pub_year)
            rank_now = _citation_ranking(step_tally, pub_year)
            out[f"jaccard_{cp}"] = ranked_jaccard(rank_prev, rank_now, k)
        prev_step_tally = step_tally
        if not remaining:
            break

    first, last = checkpoints[0], checkpoints[-1]
    for name in ("gini", "jaccard"):
        lo, hi = out[f"{name}_{first}"], out[f"{name}_{last}"]
        out[f"{name}_delta"] = hi - lo
        out[f"{name}_relative_delta"] = (hi - lo) / lo if lo != 0 else None
    return out


def _citation_ranking(tally: dict[int, int], pub_year: dict[int, int]) -> list[int]:
    return sorted(tally, key=lambda pid: (-tally[pid], pub_year[pid], pid))


# -- event log serialization (newline-delimited JSON) ----------------------


def write_event_log(log: EventLog, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "type": "header",
            "params": _params_doc(log.params),
            "seed": log.seed,
            "initial_s": [[pid, count] for pid, count in log.initial_s],
            "initial_u": [[pid, age] for pid, age in log.initial_u],
        }
        fh.write(json.dumps(header, separators=(",", ":")) + "\n")
        for record in log.steps:
            doc = {
                "type": "step",
                "t": record.t,
                "arrivals": record.arrivals,
                "papers": [
                    {"id": p.id, "refs": list(p.refs), "flags": list(p.flags)}
                    for p in record.papers
                ],
                "draws": {
                    "reinforced": record.reinforced,
                    "discovered": record.discovered,
                    "fallback_to_s": record.fallback_to_s,
                    "fallback_to_u": record.fallback_to_u,
                },
            }
            fh.write(json.dumps(doc, separators=(",", ":")) + "\n")


def read_event_log(path: str | Path) -> EventLog:
    log: EventLog | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            if doc.get("type") == "header":
                params_doc = dict(doc["params"])
                for key in ("init_s_count_range", "init_u_age_range"):
                    params_doc[key] = tuple(params_doc[key])
                log = EventLog(
                    params=ModelParams(**params_doc),
                    seed=doc["seed"],
                    initial_s=[tuple(x) for x in doc["initial_s"]],
                    initial_u=[tuple(x) for x in doc["initial_u"]],
                )
            elif doc.get("type") == "step":
                if log is None:
                    raise DataError(f"{path}:{lineno}: step record before header")
                log.steps.append(
                    StepRecord(
                        t=doc["t"],
                        arrivals=doc["arrivals"],
                        papers=[
                            SimPaper(p["id"], list(p["refs"]), tuple(p.get("flags", ())))
                            for p in doc["papers"]
                        ],
                        **doc.get("draws", {}),
                    )
                )
            else:
                raise DataError(f"{path}:{lineno}: unknown record type")
    if log is None:
        raise DataError(f"{path}: no header record found")
    return log


def _params_doc(params: ModelParams) -> dict:
    doc = asdict(params)
    doc["init_s_count_range"] = list(params.init_s_count_range)
    doc["init_u_age_range"] = list(params.init_u_age_range)
    return doc
