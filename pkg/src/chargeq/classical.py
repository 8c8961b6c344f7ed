"""Classical baselines and exact oracles.

Smith-rule scheduling, a pseudo-polynomial dynamic program for the exact
scheduling optimum, brute-force Max-k-Cut and MIS, a uniform-random
assignment baseline, and the full spectrum of cut ratios on complete
graphs.  Everything here is deterministic (given a seed where relevant)
and serves as ground truth for the quantum pipelines.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .instances import SC1Instance
from .reduction import WeightedGraph

__all__ = [
    "ResourceError",
    "ScheduleCostReport",
    "BaselineReport",
    "smith_order",
    "schedule_cost",
    "dp_optimum",
    "brute_maxkcut",
    "brute_mis",
    "random_baseline",
    "cut_ratio_spectrum",
]

DP_STATE_BUDGET = 2_000_000
MIS_NODE_CAP = 24
SPECTRUM_NODE_CAP = 20


class ResourceError(RuntimeError):
    """An exact method would exceed its configured enumeration budget."""


@dataclass
class ScheduleCostReport:
    """Total weighted completion time plus per-machine ``(job, completion)`` sequences."""

    total: int
    per_machine: list[list[tuple[int, int]]]


@dataclass
class BaselineReport:
    """Statistics of uniformly random assignments.

    ``mean_ratio`` is mean cut / optimum (when an optimum is supplied);
    ``schedule_mean`` / ``schedule_ratio`` additionally score each sample on
    the scheduling objective (after Smith ordering), with the ratio defined
    as optimum / achieved so that higher is better for both metrics.
    """

    mean_cut: float
    mean_ratio: float | None
    samples: np.ndarray
    schedule_mean: float | None = None
    schedule_ratio: float | None = None


def smith_order(jobs) -> list[int]:
    """Indices sorted by weight/duration non-increasing, ties by original index.

    On a single machine this order minimizes the total weighted completion
    time; ratios are compared exactly (no float ties).
    """
    for i, (t, _) in enumerate(jobs):
        if t <= 0:
            raise ValueError(f"job {i} has non-positive duration {t}")
    return sorted(range(len(jobs)), key=lambda i: (-Fraction(jobs[i][1], jobs[i][0]), i))


def schedule_cost(instance: SC1Instance, labels) -> ScheduleCostReport:
    """Evaluate an assignment: Smith-order each machine, accumulate completions."""
    lab = list(labels)
    if len(lab) != instance.n:
        raise ValueError(f"assignment length {len(lab)} != {instance.n} jobs")
    if any(not 0 <= m < instance.k for m in lab):
        raise ValueError(f"machine label out of range [0, {instance.k})")
    order = smith_order(instance.jobs)
    per_machine: list[list[tuple[int, int]]] = [[] for _ in range(instance.k)]
    clock = [0] * instance.k
    total = 0
    for j in order:
        m = lab[j]
        t, w = instance.jobs[j]
        clock[m] += t
        per_machine[m].append((j, clock[m]))
        total += w * clock[m]
    return ScheduleCostReport(total=total, per_machine=per_machine)


def dp_optimum(instance: SC1Instance, max_states: int = DP_STATE_BUDGET) -> int:
    """Exact minimum total weighted completion time over all assignments.

    Dynamic program over Smith-ordered jobs with state = sorted machine-load
    vector (machines are identical, so load vectors are canonicalized
    non-decreasing to deduplicate).  Raises :class:`ResourceError` when the
    live state count exceeds ``max_states``.
    """
    order = smith_order(instance.jobs)
    states: dict[tuple[int, ...], int] = {(0,) * instance.k: 0}
    for j in order:
        t, w = instance.jobs[j]
        nxt: dict[tuple[int, ...], int] = {}
        for loads, cost in states.items():
            seen = set()
            for m in range(instance.k):
                if loads[m] in seen:  # identical machines: same load, same result
                    continue
                seen.add(loads[m])
                new_cost = cost + w * (loads[m] + t)
                key = tuple(sorted(loads[:m] + (loads[m] + t,) + loads[m + 1 :]))
                if new_cost < nxt.get(key, new_cost + 1):
                    nxt[key] = new_cost
        states = nxt
        if len(states) > max_states:
            raise ResourceError(
                f"dp_optimum state count {len(states)} exceeds budget {max_states}"
            )
    return min(states.values())


def _default_maxkcut_states(k: int) -> int:
    # N <= 16 for k=2, N <= 10 for k=4.
    return 2**16 if k == 2 else 4**10


def brute_maxkcut(
    g: WeightedGraph, k: int, max_states: int | None = None
) -> tuple[float, np.ndarray]:
    """Exact Max-k-Cut by enumeration of all ``k^n`` assignments.

    Returns ``(best cut value, assignment)``; among ties the
    lexicographically smallest assignment wins.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    cap = _default_maxkcut_states(k) if max_states is None else max_states
    total = k**g.n
    if total > cap:
        raise ResourceError(f"k^n = {total} exceeds enumeration cap {cap}")
    codes = np.arange(total)
    # Node 0 is the most significant digit so row order == lexicographic order.
    digits = np.empty((total, g.n), dtype=np.int64)
    for u in range(g.n):
        digits[:, u] = (codes // k ** (g.n - 1 - u)) % k
    values = np.zeros(total)
    for u, v, w in g.edges():
        values += w * (digits[:, u] != digits[:, v])
    best = int(np.argmax(values))  # first occurrence == lexicographically smallest
    return float(values[best]), digits[best].copy()


def brute_mis(g: WeightedGraph, max_nodes: int = MIS_NODE_CAP) -> tuple[int, list[int]]:
    """Exact maximum independent set via branch and bound on bitmasks."""
    n = g.n
    if n > max_nodes:
        raise ResourceError(f"n = {n} exceeds MIS enumeration cap {max_nodes}")
    adj_mask = [0] * n
    for u, v in g.edge_pairs():
        adj_mask[u] |= 1 << v
        adj_mask[v] |= 1 << u

    best_size = 0
    best_set = 0

    def expand(cand: int, cur: int, cur_size: int) -> None:
        nonlocal best_size, best_set
        if cur_size + cand.bit_count() <= best_size:
            return
        if cand == 0:
            if cur_size > best_size:
                best_size, best_set = cur_size, cur
            return
        v = (cand & -cand).bit_length() - 1  # lowest candidate vertex
        expand(cand & ~((1 << v) | adj_mask[v]), cur | (1 << v), cur_size + 1)
        expand(cand & ~(1 << v), cur, cur_size)

    expand((1 << n) - 1, 0, 0)
    return best_size, [v for v in range(n) if best_set >> v & 1]


def random_baseline(
    g: WeightedGraph,
    k: int,
    trials: int,
    seed: int,
    optimum: float | None = None,
    instance: SC1Instance | None = None,
    schedule_optimum: int | None = None,
) -> BaselineReport:
    """Score ``trials`` uniformly random assignments.

    When an SC1 ``instance`` is supplied, each sample is also evaluated on the
    scheduling objective using the cut/schedule duality
    ``cost = sum(w*t) + W_total - cut`` (valid because machines are
    Smith-ordered).
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, k, size=(trials, g.n))
    cuts = np.zeros(trials)
    for u, v, w in g.edges():
        cuts += w * (labels[:, u] != labels[:, v])
    mean_cut = float(cuts.mean())
    mean_ratio = None if optimum is None else float((cuts / optimum).mean())
    schedule_mean = schedule_ratio = None
    if instance is not None:
        fixed = sum(w * t for t, w in instance.jobs)
        costs = fixed + g.w_total - cuts
        schedule_mean = float(costs.mean())
        if schedule_optimum is not None:
            schedule_ratio = float((schedule_optimum / costs).mean())
    return BaselineReport(
        mean_cut=mean_cut,
        mean_ratio=mean_ratio,
        samples=cuts,
        schedule_mean=schedule_mean,
        schedule_ratio=schedule_ratio,
    )


def cut_ratio_spectrum(n: int, max_n: int = SPECTRUM_NODE_CAP) -> np.ndarray:
    """Approximation ratios of all ``2^n`` cuts of unweighted K_n, sorted ascending.

    Every subset S cuts exactly ``|S| * (n - |S|)`` edges; ratios are taken
    against the optimum ``floor(n^2 / 4)``.  Note: the *expected* ratio of a
    uniformly random cut is ``sum_k C(n,k) k(n-k) / 2^n / floor(n^2/4)``
    (with the ``2^n`` normalizer), which tends to 1 as n grows.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > max_n:
        raise ResourceError(f"n = {n} exceeds spectrum cap {max_n}")
    subsets = np.arange(1 << n, dtype=np.uint64)
    sizes = np.bitwise_count(subsets).astype(np.int64)
    ratios = sizes * (n - sizes) / (n * n // 4)
    ratios.sort()
    return ratios
