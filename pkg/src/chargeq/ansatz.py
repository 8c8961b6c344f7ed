"""Shared machinery for running layered diagonal-phase ansätze.

Phase convention: a layer applies ``exp(+i * gamma * C)`` followed by the
transverse mixer ``exp(-i * beta * sum sigma_x)``, where ``C`` is the
minimization diagonal.  With this choice the depth-1 expectation matches
the closed-form mean-cut expression used for cross-validation; the mirror
convention ``exp(-i * gamma * C)`` reaches the same optima under
``(gamma, beta) -> (-gamma, -beta)``.

Default parameter box: ``gamma in [0, 2*pi]``, ``beta in [0, pi]``;
normalized problem weights make one turn the natural gamma period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import mixer_rows, phase_rows
from .optimizers import (
    EggOptions,
    LayeredFamily,
    Objective,
    OptimizerReport,
    egg_optimize,
)
from .statevector import (
    DiagonalCost,
    StateVector,
    apply_mixer,
    apply_phase,
    expectation,
    init_uniform,
    sample,
)

__all__ = [
    "GAMMA_BOUNDS",
    "BETA_BOUNDS",
    "QaoaParams",
    "QaoaResult",
    "ansatz_state",
    "make_layered_family",
    "run_layered_qaoa",
]

GAMMA_BOUNDS = (0.0, 2.0 * math.pi)
BETA_BOUNDS = (0.0, math.pi)


@dataclass
class QaoaParams:
    """Angle schedules ``gammas`` (phase) and ``betas`` (mixer), one pair per layer."""

    gammas: np.ndarray
    betas: np.ndarray

    def __post_init__(self) -> None:
        self.gammas = np.atleast_1d(np.asarray(self.gammas, dtype=float))
        self.betas = np.atleast_1d(np.asarray(self.betas, dtype=float))
        if self.gammas.shape != self.betas.shape or self.gammas.size < 1:
            raise ValueError("gammas and betas must be equal-length, non-empty")

    @property
    def depth(self) -> int:
        return self.gammas.size

    @classmethod
    def from_flat(cls, x: np.ndarray) -> "QaoaParams":
        x = np.asarray(x, dtype=float)
        if x.size % 2:
            raise ValueError("flat parameter vector must have even length")
        p = x.size // 2
        return cls(gammas=x[:p], betas=x[p:])

    def to_flat(self) -> np.ndarray:
        return np.concatenate([self.gammas, self.betas])


@dataclass
class QaoaResult:
    """Outcome of a layered run: final angles, scores and per-depth trace.

    ``expectation`` is reported in problem units (de-normalized);
    ``per_layer_trace`` holds one dict per depth with keys
    ``depth, expectation, ratio, evals, gammas, betas``.
    """

    params: QaoaParams
    expectation: float
    ratio: float | None
    evals: int
    per_layer_trace: list[dict] = field(default_factory=list)
    best_sampled: tuple[str, float] | None = None


def ansatz_state(cost: DiagonalCost, params: QaoaParams) -> StateVector:
    """Prepare the state from the uniform superposition, one phase+mixer pair per layer."""
    state = init_uniform(cost.n_qubits)
    for g, b in zip(params.gammas, params.betas):
        apply_phase(state, cost, -g)  # exp(+i g C); see module docstring
        apply_mixer(state, b)
    return state


def _bounds(depth: int) -> np.ndarray:
    return np.array([GAMMA_BOUNDS] * depth + [BETA_BOUNDS] * depth)


def _layer_batch(amps: np.ndarray, values: np.ndarray, gammas, betas, n_qubits: int):
    """Apply one phase+mixer layer to a block of states with per-row angles."""
    amps = np.ascontiguousarray(amps, dtype=np.complex128)
    gammas = np.ascontiguousarray(gammas, dtype=float)
    betas = np.asarray(betas, dtype=float)
    phase_rows(amps, values, gammas)
    mixer_rows(amps, np.cos(betas), np.sin(betas), n_qubits)
    return amps


def make_layered_family(cost: DiagonalCost) -> LayeredFamily:
    """Build the depth-indexed objective family minimizing ``<C>``.

    Tail objectives reuse the frozen-prefix state, so each call costs a
    single layer regardless of depth; both objectives support vectorized
    batch evaluation (used by the population optimizer and the
    finite-difference gradients).
    """
    values = cost.values
    n_qubits = cost.n_qubits

    def tail(prefix: np.ndarray) -> Objective:
        prefix_params = None
        if prefix.size:
            prefix_params = QaoaParams.from_flat(prefix)
        base = (
            init_uniform(n_qubits)
            if prefix_params is None
            else ansatz_state(cost, prefix_params)
        )

        def evaluate(x: np.ndarray) -> float:
            state = base.copy()
            apply_phase(state, cost, -x[0])
            apply_mixer(state, x[1])
            return expectation(state, cost)

        def evaluate_batch(xs: np.ndarray) -> np.ndarray:
            amps = np.broadcast_to(base.amps, (xs.shape[0], values.size))
            amps = _layer_batch(amps, values, xs[:, 0], xs[:, 1], n_qubits)
            return (amps.real**2 + amps.imag**2) @ values

        return Objective(evaluate, [GAMMA_BOUNDS, BETA_BOUNDS], batch_fn=evaluate_batch)

    def full(depth: int) -> Objective:
        def evaluate(x: np.ndarray) -> float:
            return expectation(ansatz_state(cost, QaoaParams.from_flat(x)), cost)

        def evaluate_batch(xs: np.ndarray) -> np.ndarray:
            m = xs.shape[0]
            amps = np.full((m, values.size), 2.0 ** (-n_qubits / 2.0), dtype=complex)
            for layer in range(depth):
                amps = _layer_batch(
                    amps, values, xs[:, layer], xs[:, depth + layer], n_qubits
                )
            return (amps.real**2 + amps.imag**2) @ values

        return Objective(evaluate, _bounds(depth), batch_fn=evaluate_batch)

    return LayeredFamily(tail=tail, full=full)


def run_layered_qaoa(
    cost: DiagonalCost,
    p_max: int,
    opts: EggOptions | None = None,
    seed: int = 0,
    value_diag: DiagonalCost | None = None,
    optimum: float | None = None,
    scale: float = 1.0,
    shots: int = 0,
) -> tuple[QaoaResult, list[OptimizerReport]]:
    """Optimize depth by depth and score each depth's state.

    ``cost`` is the (possibly normalized) minimization diagonal driving the
    optimization.  Reported values come from ``value_diag`` (defaults to
    ``-cost / scale``, i.e. the de-normalized maximization objective), and
    ``ratio = <value> / optimum`` when an optimum is supplied.  With
    ``shots > 0`` the final state is sampled and the best-scoring bitstring
    kept.
    """
    if value_diag is None:
        value_diag = DiagonalCost(-cost.values / scale)
    family = make_layered_family(cost)
    reports = egg_optimize(family, p_max, opts, seed)

    trace = []
    final_state = None
    for depth, report in enumerate(reports, start=1):
        params = QaoaParams.from_flat(report.best_x)
        state = ansatz_state(cost, params)
        value = expectation(state, value_diag)
        trace.append(
            {
                "depth": depth,
                "expectation": value,
                "ratio": None if optimum is None else value / optimum,
                "evals": report.evals,
                "gammas": params.gammas.tolist(),
                "betas": params.betas.tolist(),
            }
        )
        if depth == p_max:
            final_state = state

    best_sampled = None
    if shots > 0 and final_state is not None:
        draws = sample(final_state, shots, seed)
        vals = value_diag.values
        best = max(draws, key=lambda s: vals[int(s[::-1], 2)])
        best_sampled = (best, float(vals[int(best[::-1], 2)]))

    final = trace[-1]
    result = QaoaResult(
        params=QaoaParams.from_flat(reports[-1].best_x),
        expectation=final["expectation"],
        ratio=final["ratio"],
        evals=sum(r.evals for r in reports),
        per_layer_trace=trace,
        best_sampled=best_sampled,
    )
    return result, reports
