"""Compiled inner loops for batched ansatz evaluation.

The pure-numpy fallback is semantically identical; the compiled path just
avoids the temporary arrays that dominate at 12+ qubits.  Both operate in
place on an ``(m, 2^n)`` complex block, one row per parameter set.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


if HAVE_NUMBA:

    @njit(parallel=True, cache=True)
    def phase_rows(amps, values, gammas):  # pragma: no cover - compiled
        m, dim = amps.shape
        for i in prange(m):
            g = gammas[i]
            for z in range(dim):
                amps[i, z] = amps[i, z] * np.exp(1j * g * values[z])

    @njit(parallel=True, cache=True)
    def mixer_rows(amps, cos_b, sin_b, n_qubits):  # pragma: no cover - compiled
        m, dim = amps.shape
        for i in prange(m):
            c = cos_b[i]
            ms = -1j * sin_b[i]
            for q in range(n_qubits):
                step = 1 << q
                for base in range(0, dim, 2 * step):
                    for off in range(step):
                        lo = base + off
                        hi = lo + step
                        a0 = amps[i, lo]
                        a1 = amps[i, hi]
                        amps[i, lo] = c * a0 + ms * a1
                        amps[i, hi] = c * a1 + ms * a0

else:

    def phase_rows(amps, values, gammas):
        amps *= np.exp(1j * np.multiply.outer(gammas, values))

    def mixer_rows(amps, cos_b, sin_b, n_qubits):
        m = amps.shape[0]
        c = cos_b[:, None, None]
        ms = (-1j * sin_b)[:, None, None]
        for q in range(n_qubits):
            a = amps.reshape(m, -1, 2, 1 << q)
            a0 = a[:, :, 0, :].copy()
            a1 = a[:, :, 1, :]
            a[:, :, 0, :] = c * a0 + ms * a1
            a[:, :, 1, :] = c * a1 + ms * a0
