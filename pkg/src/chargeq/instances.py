"""Load-record ingestion and randomized scheduling-instance generation.

Two instance families are produced from a pool of charging-load records:

* SC1 -- weighted jobs ``(duration, priority)`` to be scheduled on ``k``
  identical charging points, minimizing total weighted completion time.
* SC2 -- load intervals partitioned into equally sized groups, from which
  at most one interval per group may be kept.

Instances are consecutive runs of chronologically ordered records starting
at a uniformly random index (wrapping around the pool), so that each
instance looks like a contiguous slice of real traffic.  All generation is
deterministic under a fixed seed.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "InstanceError",
    "LoadRecord",
    "SC1Instance",
    "SC2Instance",
    "load_records",
    "synthesize_records",
    "gen_sc1",
    "gen_sc2",
]

# Priorities are 1 + X with X ~ Poisson(lam) conditioned on X <= PRIORITY_CAP,
# giving the weight support {1, ..., 1 + PRIORITY_CAP}.
PRIORITY_CAP = 4
DEFAULT_PRIORITY_LAMBDA = 2.0

# Synthetic record pool defaults: one month of starts, log-normal durations
# clipped to a realistic charging range (minutes).
SYNTH_WINDOW_DAYS = 31
SYNTH_DURATION_RANGE = (15, 480)


class InstanceError(ValueError):
    """Raised for malformed record files or invalid generation requests."""


@dataclass(frozen=True)
class LoadRecord:
    """One charging load: ``[start, end)`` in epoch seconds.

    ``duration_min`` is the duration in whole minutes (rounded up so that
    any positive interval occupies at least one minute).
    """

    id: int
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.end <= self.start:
            raise InstanceError(
                f"record {self.id}: end ({self.end}) <= start ({self.start})"
            )

    @property
    def duration_min(self) -> int:
        return -((self.start - self.end) // 60)  # ceil((end-start)/60)


@dataclass(frozen=True)
class SC1Instance:
    """Jobs ``(duration_min, weight)`` on ``k`` identical machines."""

    jobs: tuple[tuple[int, int], ...]
    k: int
    seed: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise InstanceError(f"k must be >= 1, got {self.k}")
        for t, w in self.jobs:
            if t < 1 or w < 1:
                raise InstanceError(f"job ({t}, {w}) has non-positive field")

    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def durations(self) -> tuple[int, ...]:
        return tuple(t for t, _ in self.jobs)

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(w for _, w in self.jobs)

    def to_json(self) -> str:
        return json.dumps(
            {
                "problem": "sc1",
                "k": self.k,
                "seed": self.seed,
                "jobs": [[t, w] for t, w in self.jobs],
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "SC1Instance":
        d = json.loads(text)
        return cls(
            jobs=tuple((int(t), int(w)) for t, w in d["jobs"]),
            k=int(d["k"]),
            seed=int(d["seed"]),
        )


@dataclass(frozen=True)
class SC2Instance:
    """Intervals ``(start, end, group)`` with exactly ``group_size`` members per group."""

    intervals: tuple[tuple[int, int, int], ...]
    n_groups: int
    group_size: int
    seed: int

    def __post_init__(self) -> None:
        counts = [0] * self.n_groups
        for s, e, g in self.intervals:
            if e <= s:
                raise InstanceError(f"interval ({s}, {e}) is empty or reversed")
            if not 0 <= g < self.n_groups:
                raise InstanceError(f"group label {g} out of range [0, {self.n_groups})")
            counts[g] += 1
        if any(c != self.group_size for c in counts):
            raise InstanceError(
                f"group sizes {counts} differ from requested {self.group_size}"
            )

    @property
    def n(self) -> int:
        return len(self.intervals)

    def to_json(self) -> str:
        return json.dumps(
            {
                "problem": "sc2",
                "n_groups": self.n_groups,
                "group_size": self.group_size,
                "seed": self.seed,
                "intervals": [[s, e, g] for s, e, g in self.intervals],
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "SC2Instance":
        d = json.loads(text)
        return cls(
            intervals=tuple((int(s), int(e), int(g)) for s, e, g in d["intervals"]),
            n_groups=int(d["n_groups"]),
            group_size=int(d["group_size"]),
            seed=int(d["seed"]),
        )


def load_records(path: str | Path) -> list[LoadRecord]:
    """Parse a ``id,start,end`` CSV into records, reporting bad rows by line number."""
    path = Path(path)
    if not path.exists():
        raise InstanceError(f"record file not found: {path}")
    records: list[LoadRecord] = []
    errors: list[str] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["id", "start", "end"]:
            raise InstanceError(f"{path}: expected header 'id,start,end', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rid, start, end = (int(c) for c in row)
            except ValueError:
                errors.append(f"non-integer field at line {lineno}: {row}")
                continue
            if end <= start:
                errors.append(f"end <= start at line {lineno}")
                continue
            records.append(LoadRecord(rid, start, end))
    if errors:
        raise InstanceError(f"{path}: " + "; ".join(errors))
    return records


def synthesize_records(
    count: int = 2250,
    seed: int = 0,
    window_start: int = 1_493_596_800,  # 2017-05-01T00:00:00Z
    window_days: int = SYNTH_WINDOW_DAYS,
    duration_range: tuple[int, int] = SYNTH_DURATION_RANGE,
) -> list[LoadRecord]:
    """Generate a synthetic record pool standing in for real charging data.

    Start times are uniform over the window; durations (minutes) are
    log-normal with median ~60 min, clipped to ``duration_range``.  Records
    are returned sorted chronologically, ids re-assigned in that order.
    """
    if count < 1:
        raise InstanceError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    starts = rng.integers(0, window_days * 86_400, size=count) + window_start
    lo, hi = duration_range
    durations = np.clip(
        np.round(rng.lognormal(mean=math.log(60.0), sigma=0.9, size=count)), lo, hi
    ).astype(int)
    order = np.argsort(starts, kind="stable")
    return [
        LoadRecord(i, int(starts[j]), int(starts[j] + durations[j] * 60))
        for i, j in enumerate(order)
    ]


def _consecutive_slice(records: list[LoadRecord], n: int, rng: np.random.Generator):
    if not records:
        raise InstanceError("record pool is empty")
    if n > len(records):
        raise InstanceError(f"requested {n} loads but pool holds {len(records)}")
    start = int(rng.integers(0, len(records)))
    return [records[(start + i) % len(records)] for i in range(n)]


def _truncated_poisson(rng: np.random.Generator, lam: float, size: int) -> np.ndarray:
    """Poisson(lam) conditioned on values <= PRIORITY_CAP (rejection sampling)."""
    out = np.empty(size, dtype=int)
    filled = 0
    while filled < size:
        draw = rng.poisson(lam, size=2 * (size - filled))
        keep = draw[draw <= PRIORITY_CAP][: size - filled]
        out[filled : filled + keep.size] = keep
        filled += keep.size
    return out


def gen_sc1(
    records: list[LoadRecord],
    n: int,
    k: int,
    seed: int,
    priority_lambda: float = DEFAULT_PRIORITY_LAMBDA,
) -> SC1Instance:
    """Draw ``n`` consecutive loads and attach truncated-Poisson priorities."""
    rng = np.random.default_rng(seed)
    chosen = _consecutive_slice(records, n, rng)
    weights = 1 + _truncated_poisson(rng, priority_lambda, n)
    jobs = tuple((rec.duration_min, int(w)) for rec, w in zip(chosen, weights))
    return SC1Instance(jobs=jobs, k=k, seed=seed)


def gen_sc2(
    records: list[LoadRecord],
    n_groups: int,
    group_size: int,
    seed: int,
) -> SC2Instance:
    """Draw ``n_groups * group_size`` consecutive loads and shuffle group labels.

    Labels are a uniformly random permutation of the balanced multiset
    ``{0} * group_size + ... + {n_groups-1} * group_size``, so every group
    holds exactly ``group_size`` intervals.
    """
    if n_groups < 1 or group_size < 1:
        raise InstanceError("n_groups and group_size must be >= 1")
    rng = np.random.default_rng(seed)
    chosen = _consecutive_slice(records, n_groups * group_size, rng)
    labels = np.repeat(np.arange(n_groups), group_size)
    rng.shuffle(labels)
    intervals = tuple(
        (rec.start, rec.end, int(g)) for rec, g in zip(chosen, labels)
    )
    return SC2Instance(
        intervals=intervals, n_groups=n_groups, group_size=group_size, seed=seed
    )
