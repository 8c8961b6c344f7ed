"""Exact dense statevector primitives for diagonal-phase + transverse-mixer ansätze.

Basis convention: basis state index ``z`` encodes qubit ``q`` in bit ``q``
(least significant bit = qubit 0); ``bitstring(z, n)`` renders qubit 0 as
the leftmost character.  The mixer convention is ``exp(-i * beta * sigma_x)``
per qubit, i.e. the 2x2 rotation ``[[cos b, -i sin b], [-i sin b, cos b]]``
with angle ``beta`` (not ``2*beta``); analytic checks share this convention
end to end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SimulatorError",
    "StateVector",
    "DiagonalCost",
    "init_uniform",
    "apply_phase",
    "apply_mixer",
    "expectation",
    "sample",
    "bitstring",
]

QUBIT_CAP = 24  # 2^24 complex128 amplitudes ~ 256 MiB


class SimulatorError(ValueError):
    """Raised for dimension mismatches or cap violations."""


@dataclass
class StateVector:
    """Complex amplitudes over ``2^n_qubits`` computational-basis states."""

    n_qubits: int
    amps: np.ndarray

    def __post_init__(self) -> None:
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (1 << self.n_qubits,):
            raise SimulatorError(
                f"amplitude count {self.amps.shape} != 2^{self.n_qubits}"
            )

    def norm(self) -> float:
        return float(np.sqrt((self.amps.real**2 + self.amps.imag**2).sum()))

    def probabilities(self) -> np.ndarray:
        return self.amps.real**2 + self.amps.imag**2

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amps.copy())


@dataclass
class DiagonalCost:
    """Real cost value per computational-basis state."""

    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        n = int(self.values.shape[0]).bit_length() - 1
        if self.values.ndim != 1 or (1 << n) != self.values.shape[0]:
            raise SimulatorError(f"length {self.values.shape} is not a power of two")
        if not np.all(np.isfinite(self.values)):
            raise SimulatorError("cost values must be finite")
        self.n_qubits = n

    @property
    def minimum(self) -> float:
        return float(self.values.min())


def init_uniform(n: int, cap: int = QUBIT_CAP) -> StateVector:
    """Uniform superposition over all ``2^n`` basis states."""
    if not 1 <= n <= cap:
        raise SimulatorError(f"n = {n} outside [1, {cap}]")
    amps = np.full(1 << n, 2.0 ** (-n / 2.0), dtype=np.complex128)
    return StateVector(n, amps)


def _values(cost: DiagonalCost | np.ndarray) -> np.ndarray:
    return cost.values if isinstance(cost, DiagonalCost) else np.asarray(cost, float)


def apply_phase(state: StateVector, cost: DiagonalCost, gamma: float) -> StateVector:
    """In place: ``amp[z] *= exp(-i * gamma * C(z))``."""
    vals = _values(cost)
    if vals.shape != state.amps.shape:
        raise SimulatorError(
            f"cost length {vals.shape} != state length {state.amps.shape}"
        )
    state.amps *= np.exp(-1j * gamma * vals)
    return state


def apply_mixer(state: StateVector, beta: float) -> StateVector:
    """In place: apply ``exp(-i * beta * sigma_x)`` to every qubit."""
    if beta == 0.0:
        return state
    c = np.cos(beta)
    s = np.sin(beta)
    for q in range(state.n_qubits):
        a = state.amps.reshape(-1, 2, 1 << q)
        a0 = a[:, 0, :].copy()
        a1 = a[:, 1, :]
        a[:, 0, :] = c * a0 - 1j * s * a1
        a[:, 1, :] = c * a1 - 1j * s * a0
    return state


def expectation(state: StateVector, cost: DiagonalCost) -> float:
    """``sum_z |amp[z]|^2 * C(z)``."""
    vals = _values(cost)
    if vals.shape != state.amps.shape:
        raise SimulatorError(
            f"cost length {vals.shape} != state length {state.amps.shape}"
        )
    return float(state.probabilities() @ vals)


def sample(state: StateVector, shots: int, seed: int) -> list[str]:
    """``shots`` i.i.d. bitstring draws from ``|amp|^2``; deterministic per seed."""
    if shots < 1:
        raise SimulatorError(f"shots must be >= 1, got {shots}")
    probs = state.probabilities()
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    rng = np.random.default_rng(seed)
    idx = np.searchsorted(cdf, rng.random(shots), side="right")
    return [bitstring(int(z), state.n_qubits) for z in idx]


def bitstring(z: int, n: int) -> str:
    """Qubit 0 leftmost: ``bitstring(1, 2) == '10'``."""
    return "".join("1" if z >> q & 1 else "0" for q in range(n))
