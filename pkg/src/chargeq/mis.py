"""UD-MIS QAOA with a penalty cost, plus exact analog Rydberg-Hamiltonian evolution.

The penalty diagonal ``C(z) = -sum z_i + U * sum_edges z_i z_j`` with U > 1
has exactly the maximum independent sets as its minimizers.  Approximation
ratios are scored after greedily repairing each basis state to an
independent set (drop the higher-degree endpoint of every violated edge),
so ratios always land in [0, 1].

``analog_evolve`` integrates the driven Rydberg Hamiltonian exactly (dense
eigendecomposition) with the full ``1/r^6`` interaction.  All energies are
angular frequencies (rad/s): the interaction coefficient is C6/hbar.  For
zero drive the Hamiltonian is diagonal and reproduces the penalty cost up
to a detuning-dependent scale and a constant offset from the
number-operator expansion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ansatz import QaoaResult, run_layered_qaoa
from .optimizers import EggOptions
from .reduction import WeightedGraph
from .statevector import QUBIT_CAP, DiagonalCost, SimulatorError, StateVector

__all__ = [
    "MisCostSpec",
    "RydbergParams",
    "mis_cost_diagonal",
    "independent_repair_sizes",
    "run_qaoa_mis",
    "blockade_radius",
    "positions_to_udgraph",
    "random_ud_points",
    "analog_evolve",
    "default_penalty",
]

ANALOG_QUBIT_CAP = 12

# Defaults sized so the blockade radius comes out near 15 um:
# (c6 / omega)^(1/6) = (5.42e6 / 0.476)^(1/6) ~ 15.0.
DEFAULT_C6 = 5.42e6  # rad * um^6 / s (C6 / hbar)
DEFAULT_OMEGA = 0.476  # rad/s


def default_penalty(g: WeightedGraph) -> float:
    """Twice the max degree, floor 10: dominates any single-vertex gain."""
    degs = g.degrees()
    return max(10.0, 2.0 * float(degs.max() if degs.size else 0))


@dataclass
class MisCostSpec:
    """Graph plus penalty strength U > 1 for adjacent selected pairs."""

    graph: WeightedGraph
    penalty: float

    def __post_init__(self) -> None:
        if self.penalty <= 1.0:
            raise ValueError(f"penalty must exceed 1, got {self.penalty}")


@dataclass
class RydbergParams:
    """Drive and geometry: Rabi frequency, detuning (rad/s), C6/hbar, positions (um)."""

    omega: float
    delta: float
    c6: float
    positions: np.ndarray

    def __post_init__(self) -> None:
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        if self.omega < 0.0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        d = _pairwise_distances(self.positions)
        n = self.positions.shape[0]
        if n > 1 and float(d[np.triu_indices(n, 1)].min()) == 0.0:
            raise ValueError("positions must be pairwise distinct")


def mis_cost_diagonal(spec: MisCostSpec) -> DiagonalCost:
    """``C(z) = -sum z_i + U * sum_edges z_i z_j`` over n qubits."""
    n = spec.graph.n
    if n > QUBIT_CAP:
        raise SimulatorError(f"{n} qubits exceeds cap {QUBIT_CAP}")
    idx = np.arange(1 << n)
    bits = [(idx >> q) & 1 for q in range(n)]
    values = -sum(bits).astype(float)
    for u, v in spec.graph.edge_pairs():
        values += spec.penalty * (bits[u] & bits[v])
    return DiagonalCost(values)


def independent_repair_sizes(g: WeightedGraph) -> np.ndarray:
    """Size of the greedy independent-set repair of every basis state.

    Edges are processed once in lexicographic order; whenever both
    endpoints are selected, the higher-degree endpoint is dropped (ties:
    the higher index).  Selections only shrink, so one pass yields an
    independent set for every state.
    """
    n = g.n
    idx = np.arange(1 << n)
    selected = np.stack([(idx >> q & 1).astype(bool) for q in range(n)], axis=1)
    degs = g.degrees()
    for u, v in g.edge_pairs():
        drop = v if degs[v] >= degs[u] else u
        both = selected[:, u] & selected[:, v]
        selected[both, drop] = False
    return selected.sum(axis=1).astype(float)


def run_qaoa_mis(
    spec: MisCostSpec,
    p_max: int,
    opts: EggOptions | None = None,
    seed: int = 0,
    mis_size: int | None = None,
) -> QaoaResult:
    """Layer-wise optimized QAOA on the penalty cost.

    The reported ratio is the expected repaired independent-set size over
    the exact MIS size (computed here by branch and bound when not given).
    """
    from .classical import brute_mis

    if mis_size is None:
        mis_size, _ = brute_mis(spec.graph)
    cost = mis_cost_diagonal(spec)
    value_diag = DiagonalCost(independent_repair_sizes(spec.graph))
    result, _ = run_layered_qaoa(
        cost,
        p_max,
        opts=opts,
        seed=seed,
        value_diag=value_diag,
        optimum=float(mis_size),
    )
    return result


def blockade_radius(c6: float = DEFAULT_C6, omega: float = DEFAULT_OMEGA) -> float:
    """``(c6 / omega)^(1/6)`` in um."""
    if omega <= 0.0:
        raise ValueError(f"omega must be > 0, got {omega}")
    return (c6 / omega) ** (1.0 / 6.0)


def _pairwise_distances(positions: np.ndarray) -> np.ndarray:
    diff = positions[:, None, :] - positions[None, :, :]
    return np.sqrt((diff**2).sum(axis=2))


def positions_to_udgraph(positions, r_b: float) -> WeightedGraph:
    """Unit-disk graph: edge iff Euclidean distance <= r_b (closed threshold)."""
    pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    d = _pairwise_distances(pos)
    w = (d <= r_b).astype(float)
    np.fill_diagonal(w, 0.0)
    return WeightedGraph(w, origin="synthetic")


def random_ud_points(
    n: int, seed: int, box: float = 100.0, min_spacing: float = 5.0, max_tries: int = 10_000
) -> np.ndarray:
    """Uniform points in a box with a minimum pairwise spacing (rejection sampling)."""
    rng = np.random.default_rng(seed)
    points: list[np.ndarray] = []
    for _ in range(max_tries):
        cand = rng.random(2) * box
        if all(np.linalg.norm(cand - p) >= min_spacing for p in points):
            points.append(cand)
            if len(points) == n:
                return np.array(points)
    raise RuntimeError(f"could not place {n} points with spacing {min_spacing} in {box}")


def _rydberg_hamiltonian(params: RydbergParams, omega: float, delta: float) -> np.ndarray:
    """Dense H in rad/s: (omega/2) sum sigma_x - (delta/2) sum sigma_z + sum V_ij n_i n_j.

    ``sigma_z`` here takes value +1 on the Rydberg state |1>, so positive
    detuning favors excitation; ``n_i`` projects onto |1>.  The interaction
    uses the full 1/r^6 tail (no blockade truncation).
    """
    n = params.positions.shape[0]
    dim = 1 << n
    idx = np.arange(dim)
    bits = np.stack([(idx >> q) & 1 for q in range(n)], axis=1)

    diag = -(delta / 2.0) * (2.0 * bits.sum(axis=1) - n)
    d = _pairwise_distances(params.positions)
    for i in range(n):
        for j in range(i + 1, n):
            v = params.c6 / d[i, j] ** 6
            diag = diag + v * (bits[:, i] & bits[:, j])

    h = np.diag(diag.astype(np.complex128))
    half_omega = omega / 2.0
    for q in range(n):
        flipped = idx ^ (1 << q)
        h[idx, flipped] += half_omega
    return h


def analog_evolve(
    state: StateVector,
    params: RydbergParams,
    schedule: list[tuple[float, float, float]],
) -> StateVector:
    """Exact piecewise-constant evolution ``exp(-i H_k t_k)`` applied in sequence.

    ``schedule`` entries are ``(omega, delta, duration)``; ``params``
    supplies geometry and the interaction coefficient.  Dense
    eigendecomposition caps the register at 12 qubits.
    """
    n = params.positions.shape[0]
    if n > ANALOG_QUBIT_CAP:
        raise SimulatorError(f"analog evolution capped at {ANALOG_QUBIT_CAP} qubits")
    if state.n_qubits != n:
        raise SimulatorError(f"state has {state.n_qubits} qubits, layout has {n}")
    amps = state.amps
    for omega, delta, duration in schedule:
        if omega == 0.0:
            h_diag = np.real(np.diagonal(_rydberg_hamiltonian(params, 0.0, delta)))
            amps = amps * np.exp(-1j * h_diag * duration)
        else:
            h = _rydberg_hamiltonian(params, omega, delta)
            evals, evecs = np.linalg.eigh(h)
            amps = evecs @ (np.exp(-1j * evals * duration) * (evecs.conj().T @ amps))
    state.amps = amps
    return state


def rabi_pi_time(omega: float) -> float:
    """Duration of a resonant pi pulse at Rabi frequency ``omega``."""
    return math.pi / omega
