"""Derivative-free and finite-difference optimizers with exact evaluation accounting.

All methods operate on an :class:`Objective`, which counts every function
call and carries per-dimension closed box bounds that every queried point
respects.  Included: exhaustive grid search, Nelder-Mead, BFGS with central
finite differences, differential evolution (DE/rand/1/bin), the INTERP
depth-extension heuristic, and a layer-wise warm-started procedure that
globally searches each new layer's two angles with DE before a local polish
over all angles.
"""

from __future__ import annotations

import itertools
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Objective",
    "OptimizerReport",
    "DEOptions",
    "EggOptions",
    "LayeredFamily",
    "grid_search",
    "nelder_mead",
    "bfgs_fd",
    "diff_evolution",
    "interp_init",
    "egg_optimize",
    "landscape_grid",
    "count_strict_local_minima",
]


class Objective:
    """A pure vector-to-scalar map with bounds and an exact call counter.

    ``batch_fn``, when provided, evaluates a whole ``(m, arity)`` block in
    one vectorized call; the counter advances by ``m`` either way, so
    accounting is identical to ``m`` scalar calls.
    """

    def __init__(
        self,
        fn: Callable[[np.ndarray], float],
        bounds,
        batch_fn: Callable[[np.ndarray], np.ndarray] | None = None,
    ) -> None:
        self.fn = fn
        self.batch_fn = batch_fn
        self.bounds = np.asarray(bounds, dtype=float)
        if self.bounds.ndim != 2 or self.bounds.shape[1] != 2:
            raise ValueError(f"bounds must be (arity, 2), got {self.bounds.shape}")
        if np.any(self.bounds[:, 0] > self.bounds[:, 1]):
            raise ValueError("lower bounds exceed upper bounds")
        self._evals = 0
        self._lock = threading.Lock()

    @property
    def arity(self) -> int:
        return self.bounds.shape[0]

    @property
    def evals(self) -> int:
        return self._evals

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.bounds[:, 0], self.bounds[:, 1])

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        with self._lock:
            self._evals += 1
        return float(self.fn(x))

    def call_batch(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        with self._lock:
            self._evals += xs.shape[0]
        if self.batch_fn is not None:
            return np.asarray(self.batch_fn(xs), dtype=float)
        return np.array([float(self.fn(x)) for x in xs])


@dataclass
class OptimizerReport:
    best_x: np.ndarray
    best_f: float
    evals: int
    converged: bool
    reason: str
    trajectory: list[float] | None = None


@dataclass
class DEOptions:
    """DE/rand/1/bin controls; ``pop=None`` means ``15 * arity`` (min 4)."""

    pop: int | None = None
    mutation: float = 0.7
    crossover: float = 0.9
    max_gens: int = 200
    budget: int = 20_000
    tol: float = 1e-9
    seed_points: Sequence[np.ndarray] = field(default_factory=list)
    workers: int = 1


@dataclass
class EggOptions:
    """Options for the layer-wise warm-started optimization."""

    de: DEOptions = field(default_factory=DEOptions)
    polish: str | None = "bfgs"  # "bfgs" | "nelder-mead" | None
    polish_budget: int = 600
    seed_zero: bool = True  # inject the (0, 0) continuation point into DE


@dataclass
class LayeredFamily:
    """Objective family indexed by depth, for layer-wise optimization.

    ``tail(prefix_x)`` returns a 2-dim objective over the newest parameter
    pair with the prefix frozen (implementations may reuse the prefix
    state); ``full(depth)`` returns the full ``2 * depth``-dim objective.
    Parameter vectors are laid out ``[g_1..g_p, b_1..b_p]``.
    """

    tail: Callable[[np.ndarray], Objective]
    full: Callable[[int], Objective]


def grid_search(obj: Objective, resolution: int) -> OptimizerReport:
    """Exhaustive evaluation on the inclusive lattice over the bounds."""
    if obj.arity > 3:
        raise ValueError(f"grid_search limited to arity <= 3, got {obj.arity}")
    if resolution < 1:
        raise ValueError(f"resolution must be >= 1, got {resolution}")
    axes = [np.linspace(lo, hi, resolution) for lo, hi in obj.bounds]
    best_x, best_f = None, np.inf
    for point in itertools.product(*axes):
        x = np.array(point)
        f = obj(x)
        if f < best_f:
            best_x, best_f = x, f
    return OptimizerReport(
        best_x=best_x,
        best_f=best_f,
        evals=resolution**obj.arity,
        converged=True,
        reason="lattice exhausted",
    )


def nelder_mead(
    obj: Objective,
    x0,
    tol: float = 1e-8,
    budget: int = 2000,
    initial_step: float = 0.25,
) -> OptimizerReport:
    """Simplex search with coefficients (reflect 1, expand 2, contract 0.5, shrink 0.5).

    Terminates when the simplex diameter falls below ``tol`` or the
    evaluation budget is exhausted.  Every query is clipped into the box.
    """
    alpha, gamma_e, rho, sigma = 1.0, 2.0, 0.5, 0.5
    n = obj.arity
    x0 = obj.clip(np.asarray(x0, dtype=float))
    start = obj.evals

    simplex = [x0]
    for i in range(n):
        step = np.zeros(n)
        width = obj.bounds[i, 1] - obj.bounds[i, 0]
        step[i] = initial_step * (width if np.isfinite(width) and width > 0 else 1.0)
        cand = obj.clip(x0 + step)
        if np.allclose(cand, x0):
            cand = obj.clip(x0 - step)
        simplex.append(cand)
    values = [obj(x) for x in simplex]
    trajectory = [min(values)]

    def diameter() -> float:
        pts = np.array(simplex)
        return float(np.max(np.linalg.norm(pts - pts[0], axis=1)))

    converged, reason = False, "budget exhausted"
    while obj.evals - start < budget:
        order = np.argsort(values, kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        trajectory.append(values[0])
        if diameter() < tol:
            converged, reason = True, f"simplex diameter < {tol}"
            break
        centroid = np.mean(simplex[:-1], axis=0)
        xr = obj.clip(centroid + alpha * (centroid - simplex[-1]))
        fr = obj(xr)
        if values[0] <= fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
        elif fr < values[0]:
            xe = obj.clip(centroid + gamma_e * (xr - centroid))
            fe = obj(xe)
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
        else:
            xc = obj.clip(centroid + rho * (simplex[-1] - centroid))
            fc = obj(xc)
            if fc < values[-1]:
                simplex[-1], values[-1] = xc, fc
            else:  # shrink toward the best vertex
                for i in range(1, n + 1):
                    simplex[i] = obj.clip(simplex[0] + sigma * (simplex[i] - simplex[0]))
                    values[i] = obj(simplex[i])
    best = int(np.argmin(values))
    return OptimizerReport(
        best_x=simplex[best],
        best_f=values[best],
        evals=obj.evals - start,
        converged=converged,
        reason=reason,
        trajectory=trajectory,
    )


def _fd_gradient(obj: Objective, x: np.ndarray, f_x: float, h0: float = 1e-5):
    """Central finite differences with step ``h0 * (|x_i| + 1)``, clipped to bounds.

    The ``2 * arity`` probes go through one batched call.  Returns
    ``(gradient, best_point_seen, best_value_seen)`` so probe evaluations
    can improve the incumbent.
    """
    n = x.size
    probes = np.empty((2 * n, n))
    for i in range(n):
        h = h0 * (abs(x[i]) + 1.0)
        xp = x.copy()
        xp[i] += h
        xm = x.copy()
        xm[i] -= h
        probes[2 * i] = obj.clip(xp)
        probes[2 * i + 1] = obj.clip(xm)
    fs = obj.call_batch(probes)
    grad = np.zeros(n)
    for i in range(n):
        dx = probes[2 * i, i] - probes[2 * i + 1, i]
        grad[i] = (fs[2 * i] - fs[2 * i + 1]) / dx if dx != 0.0 else 0.0
    best = int(np.argmin(fs))
    if fs[best] < f_x:
        return grad, probes[best].copy(), float(fs[best])
    return grad, x, f_x


def bfgs_fd(
    obj: Objective,
    x0,
    tol: float = 1e-8,
    budget: int = 2000,
    max_iters: int = 200,
    fd_step: float = 1e-5,
) -> OptimizerReport:
    """BFGS with central finite-difference gradients and a weak-Wolfe line search.

    Each gradient costs ``2 * arity`` evaluations, all counted.  The report
    carries the best point seen anywhere in the run (probes included), so
    polishing never worsens its starting value.
    """
    c1, c2 = 1e-4, 0.9
    n = obj.arity
    x = obj.clip(np.asarray(x0, dtype=float))
    start = obj.evals
    f = obj(x)
    best_x, best_f = x.copy(), f
    H = np.eye(n)
    grad, bx, bf = _fd_gradient(obj, x, f, fd_step)
    if bf < best_f:
        best_x, best_f = bx, bf
    trajectory = [f]
    converged, reason = False, "budget exhausted"

    for _ in range(max_iters):
        if obj.evals - start >= budget:
            break
        gnorm = float(np.linalg.norm(grad))
        if gnorm < tol:
            converged, reason = True, f"gradient norm < {tol}"
            break
        d = -H @ grad
        if grad @ d >= 0.0:  # safeguard against a broken metric
            H = np.eye(n)
            d = -grad
        slope = float(grad @ d)

        # Weak Wolfe bisection (Lewis-Overton): Armijo on f, curvature on g.
        lo_t, hi_t, t = 0.0, np.inf, 1.0
        accepted = None
        for _ in range(25):
            if obj.evals - start >= budget:
                break
            xt = obj.clip(x + t * d)
            ft = obj(xt)
            if ft < best_f:
                best_x, best_f = xt, ft
            if ft > f + c1 * t * slope:
                hi_t = t
            else:
                gt, bx, bf = _fd_gradient(obj, xt, ft, fd_step)
                if bf < best_f:
                    best_x, best_f = bx, bf
                if gt @ d < c2 * slope:
                    lo_t = t
                else:
                    accepted = (xt, ft, gt)
                    break
            t = 0.5 * (lo_t + hi_t) if np.isfinite(hi_t) else 2.0 * t
        if accepted is None:
            converged, reason = False, "line search failure"
            break

        x_new, f_new, grad_new = accepted
        s = x_new - x
        y = grad_new - grad
        sy = float(s @ y)
        if sy > 1e-12:
            rho_k = 1.0 / sy
            I = np.eye(n)
            H = (I - rho_k * np.outer(s, y)) @ H @ (I - rho_k * np.outer(y, s)) + (
                rho_k * np.outer(s, s)
            )
        x, f, grad = x_new, f_new, grad_new
        trajectory.append(f)
        if len(trajectory) > 1 and abs(trajectory[-2] - trajectory[-1]) < tol * (
            1.0 + abs(trajectory[-1])
        ):
            converged, reason = True, "function change below tolerance"
            break

    return OptimizerReport(
        best_x=best_x,
        best_f=best_f,
        evals=obj.evals - start,
        converged=converged,
        reason=reason,
        trajectory=trajectory,
    )


def diff_evolution(
    obj: Objective, opts: DEOptions | None = None, seed: int = 0
) -> OptimizerReport:
    """DE/rand/1/bin with generational (deferred) updates.

    All random draws for a generation happen before any evaluation, and the
    trial batch is evaluated in submission order, so results are
    deterministic per seed and independent of the worker count.
    ``opts.seed_points`` are injected into the initial population.
    """
    opts = opts or DEOptions()
    n = obj.arity
    pop_size = opts.pop if opts.pop is not None else max(4, 15 * n)
    if pop_size < 4:
        raise ValueError(f"population must be >= 4, got {pop_size}")
    rng = np.random.default_rng(seed)
    lo, hi = obj.bounds[:, 0], obj.bounds[:, 1]
    start = obj.evals

    pop = lo + rng.random((pop_size, n)) * (hi - lo)
    for i, pt in enumerate(opts.seed_points):
        if i >= pop_size:
            break
        pop[i] = obj.clip(np.asarray(pt, dtype=float))

    def evaluate(batch: np.ndarray) -> np.ndarray:
        if opts.workers > 1 and obj.batch_fn is None:
            with ThreadPoolExecutor(max_workers=opts.workers) as ex:
                return np.array(list(ex.map(obj, batch)))
        return obj.call_batch(batch)

    fitness = evaluate(pop)
    trajectory = [float(fitness.min())]
    converged, reason = False, "generation limit reached"

    for _ in range(opts.max_gens):
        if obj.evals - start + pop_size > opts.budget:
            reason = "budget exhausted"
            break
        trials = np.empty_like(pop)
        for i in range(pop_size):
            a, b, c = _distinct_indices(rng, pop_size, i)
            mutant = pop[a] + opts.mutation * (pop[b] - pop[c])
            mutant = np.clip(mutant, lo, hi)
            cross = rng.random(n) < opts.crossover
            cross[rng.integers(n)] = True
            trials[i] = np.where(cross, mutant, pop[i])
        trial_fit = evaluate(trials)
        improved = trial_fit <= fitness
        pop[improved] = trials[improved]
        fitness[improved] = trial_fit[improved]
        trajectory.append(float(fitness.min()))
        if fitness.max() - fitness.min() < opts.tol:
            converged, reason = True, f"population spread < {opts.tol}"
            break

    best = int(np.argmin(fitness))
    return OptimizerReport(
        best_x=pop[best].copy(),
        best_f=float(fitness[best]),
        evals=obj.evals - start,
        converged=converged,
        reason=reason,
        trajectory=trajectory,
    )


def _distinct_indices(rng: np.random.Generator, pop_size: int, exclude: int):
    idx = []
    while len(idx) < 3:
        j = int(rng.integers(pop_size))
        if j != exclude and j not in idx:
            idx.append(j)
    return idx


def interp_init(params: np.ndarray) -> np.ndarray:
    """Linear depth-extension of one parameter family from depth p to p+1.

    ``new_i = ((i-1)/p) * old_{i-1} + ((p-i+1)/p) * old_i`` for i = 1..p+1
    with zero padding at both ends.  Apply separately to the gamma and beta
    families.
    """
    old = np.asarray(params, dtype=float)
    p = old.size
    if p < 1:
        raise ValueError("need at least one parameter")
    padded = np.concatenate([[0.0], old, [0.0]])
    i = np.arange(1, p + 2)
    return ((i - 1) / p) * padded[i - 1] + ((p - i + 1) / p) * padded[i]


def egg_optimize(
    family: LayeredFamily,
    p_max: int,
    opts: EggOptions | None = None,
    seed: int = 0,
) -> list[OptimizerReport]:
    """Layer-wise optimization: DE over each new angle pair, then a full polish.

    Depth 1 is plain DE over two parameters.  For each further depth the
    previous parameters are frozen, DE explores only the newest
    ``(gamma, beta)`` (with the continuation point (0, 0) seeded into the
    population so the incumbent value can never be lost), and a local
    optimizer then re-calibrates all parameters.  One report per depth is
    returned; ``best_x`` holds the full parameter vector at that depth.
    """
    opts = opts or EggOptions()
    if p_max < 1:
        raise ValueError(f"p_max must be >= 1, got {p_max}")
    rng = np.random.default_rng(seed)
    reports: list[OptimizerReport] = []
    current = np.empty(0)

    for depth in range(1, p_max + 1):
        tail_obj = family.tail(current)
        de_opts = DEOptions(**vars(opts.de))
        seed_points = list(de_opts.seed_points)
        if depth > 1 and opts.seed_zero:
            seed_points.insert(0, np.zeros(2))
        de_opts.seed_points = seed_points
        de_report = diff_evolution(tail_obj, de_opts, seed=int(rng.integers(2**32)))

        g_prev, b_prev = current[: depth - 1], current[depth - 1 :]
        x_full = np.concatenate([g_prev, de_report.best_x[:1], b_prev, de_report.best_x[1:]])
        best_f = de_report.best_f
        evals = de_report.evals
        converged, reason = de_report.converged, de_report.reason

        if opts.polish is not None:
            full_obj = family.full(depth)
            if opts.polish == "bfgs":
                polish = bfgs_fd(full_obj, x_full, budget=opts.polish_budget)
            elif opts.polish == "nelder-mead":
                polish = nelder_mead(full_obj, x_full, budget=opts.polish_budget)
            else:
                raise ValueError(f"unknown polish method {opts.polish!r}")
            evals += polish.evals
            if polish.best_f <= best_f:
                x_full, best_f = polish.best_x, polish.best_f
            converged, reason = polish.converged, polish.reason

        current = x_full
        reports.append(
            OptimizerReport(
                best_x=x_full.copy(),
                best_f=best_f,
                evals=evals,
                converged=converged,
                reason=reason,
            )
        )
    return reports


@dataclass
class LandscapeGrid:
    matrix: np.ndarray
    x_axis: np.ndarray
    y_axis: np.ndarray
    argmin: tuple[int, int]

    @property
    def best_point(self) -> np.ndarray:
        return np.array([self.x_axis[self.argmin[0]], self.y_axis[self.argmin[1]]])

    @property
    def best_value(self) -> float:
        return float(self.matrix[self.argmin])


def landscape_grid(
    obj: Objective, resolution: int, bounds=None
) -> LandscapeGrid:
    """Row-major matrix of a 2-dim objective on the lattice, plus its argmin."""
    if obj.arity != 2:
        raise ValueError(f"landscape_grid needs a 2-dim objective, got {obj.arity}")
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    box = obj.bounds if bounds is None else np.asarray(bounds, dtype=float)
    xs = np.linspace(box[0, 0], box[0, 1], resolution)
    ys = np.linspace(box[1, 0], box[1, 1], resolution)
    m = np.empty((resolution, resolution))
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            m[i, j] = obj(np.array([x, y]))
    arg = np.unravel_index(int(np.argmin(m)), m.shape)
    return LandscapeGrid(matrix=m, x_axis=xs, y_axis=ys, argmin=(int(arg[0]), int(arg[1])))


def count_strict_local_minima(matrix: np.ndarray) -> int:
    """Grid points strictly below all existing 8-neighbors (edges included)."""
    m = np.asarray(matrix, dtype=float)
    rows, cols = m.shape
    count = 0
    for i in range(rows):
        for j in range(cols):
            neighbors = [
                m[a, b]
                for a in range(max(0, i - 1), min(rows, i + 2))
                for b in range(max(0, j - 1), min(cols, j + 2))
                if (a, b) != (i, j)
            ]
            if all(m[i, j] < v for v in neighbors):
                count += 1
    return count
