"""Scikit-learn style front-ends for the solvers.

Each estimator's ``fit`` consumes a problem graph (or a scheduling
instance), optimizes on it, and exposes results through trailing-underscore
attributes; ``get_params`` / ``set_params`` / ``clone`` work as usual so
the solvers compose with the wider ecosystem.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .ansatz import QaoaParams, ansatz_state
from .classical import brute_maxkcut, brute_mis
from .embedding import EmbedSpec, Infeasible, solve_layout
from .instances import SC1Instance
from .maxkcut import cost_diagonal, decode_assignment, run_qaoa_maxkcut
from .mis import MisCostSpec, default_penalty, mis_cost_diagonal, run_qaoa_mis
from .optimizers import DEOptions, EggOptions
from .reduction import WeightedGraph, normalize, sc1_to_graph
from .statevector import sample

__all__ = ["QaoaMaxKCutSolver", "QaoaMisSolver", "UnitDiskEmbedder"]


def _egg_options(de_pop, de_gens, de_budget, polish, polish_budget):
    return EggOptions(
        de=DEOptions(pop=de_pop, max_gens=de_gens, budget=de_budget),
        polish=polish,
        polish_budget=polish_budget,
    )


class QaoaMaxKCutSolver(BaseEstimator):
    """Max-k-Cut via layered QAOA with layer-wise warm-started optimization.

    Parameters
    ----------
    k : number of color classes (power of two).
    depth : number of phase/mixer layers.
    normalize_weights : rescale edge weights before optimizing so cost
        phases stay within one turn; reported values are de-normalized.
    exact_ratio : compute the exact optimum by enumeration (small graphs)
        so ``ratio_`` is available.
    """

    def __init__(
        self,
        k: int = 2,
        depth: int = 3,
        normalize_weights: bool = True,
        exact_ratio: bool = True,
        de_pop: int = 20,
        de_gens: int = 30,
        de_budget: int = 900,
        polish: str | None = "bfgs",
        polish_budget: int = 400,
        seed: int = 0,
    ):
        self.k = k
        self.depth = depth
        self.normalize_weights = normalize_weights
        self.exact_ratio = exact_ratio
        self.de_pop = de_pop
        self.de_gens = de_gens
        self.de_budget = de_budget
        self.polish = polish
        self.polish_budget = polish_budget
        self.seed = seed

    def fit(self, X: WeightedGraph | SC1Instance, y=None):
        graph = sc1_to_graph(X) if isinstance(X, SC1Instance) else X
        work, scale = (
            normalize(graph) if self.normalize_weights else (graph, 1.0)
        )
        optimum = None
        if self.exact_ratio:
            optimum, _ = brute_maxkcut(graph, self.k)
        result = run_qaoa_maxkcut(
            work,
            self.k,
            self.depth,
            opts=_egg_options(
                self.de_pop, self.de_gens, self.de_budget, self.polish, self.polish_budget
            ),
            seed=self.seed,
            optimum=optimum,
            scale=scale,
        )
        self.graph_ = graph
        self.scale_ = scale
        self.result_ = result
        self.gammas_ = result.params.gammas
        self.betas_ = result.params.betas
        self.expectation_ = result.expectation
        self.ratio_ = result.ratio
        self.optimum_ = optimum
        return self

    def predict(self, X=None, shots: int = 512) -> np.ndarray:
        """Best sampled color assignment for the fitted graph."""
        if not hasattr(self, "result_"):
            raise NotFittedError("call fit first")
        work = (
            normalize(self.graph_)[0] if self.normalize_weights else self.graph_
        )
        cost = cost_diagonal(work, self.k)
        state = ansatz_state(cost, QaoaParams(self.gammas_, self.betas_))
        draws = sample(state, shots, self.seed)
        vals = cost.values
        best = min(draws, key=lambda s: vals[int(s[::-1], 2)])
        return decode_assignment(int(best[::-1], 2), self.graph_.n, self.k)

    def score(self, X=None, y=None) -> float:
        if not hasattr(self, "result_"):
            raise NotFittedError("call fit first")
        if self.ratio_ is None:
            raise ValueError("fit with exact_ratio=True to obtain a score")
        return float(self.ratio_)


class QaoaMisSolver(BaseEstimator):
    """Maximum-independent-set QAOA on the penalty cost.

    ``ratio_`` is the expected size of the greedily repaired sample over
    the exact MIS size.
    """

    def __init__(
        self,
        depth: int = 5,
        penalty: float | None = None,
        de_pop: int = 20,
        de_gens: int = 30,
        de_budget: int = 900,
        polish: str | None = "bfgs",
        polish_budget: int = 400,
        seed: int = 0,
    ):
        self.depth = depth
        self.penalty = penalty
        self.de_pop = de_pop
        self.de_gens = de_gens
        self.de_budget = de_budget
        self.polish = polish
        self.polish_budget = polish_budget
        self.seed = seed

    def fit(self, X: WeightedGraph, y=None):
        penalty = default_penalty(X) if self.penalty is None else self.penalty
        spec = MisCostSpec(graph=X, penalty=penalty)
        mis_size, mis_set = brute_mis(X)
        result = run_qaoa_mis(
            spec,
            self.depth,
            opts=_egg_options(
                self.de_pop, self.de_gens, self.de_budget, self.polish, self.polish_budget
            ),
            seed=self.seed,
            mis_size=mis_size,
        )
        self.graph_ = X
        self.spec_ = spec
        self.result_ = result
        self.mis_size_ = mis_size
        self.mis_set_ = mis_set
        self.ratio_ = result.ratio
        return self

    def predict(self, X=None, shots: int = 512) -> np.ndarray:
        """Indicator vector of the best sampled independent set (after repair)."""
        if not hasattr(self, "result_"):
            raise NotFittedError("call fit first")
        cost = mis_cost_diagonal(self.spec_)
        state = ansatz_state(cost, self.result_.params)
        draws = sample(state, shots, self.seed)
        g = self.graph_
        degs = g.degrees()
        best_sel, best_size = np.zeros(g.n, dtype=bool), -1
        for s in draws:
            sel = np.array([c == "1" for c in s])
            for u, v in g.edge_pairs():
                if sel[u] and sel[v]:
                    sel[v if degs[v] >= degs[u] else u] = False
            if int(sel.sum()) > best_size:
                best_sel, best_size = sel, int(sel.sum())
        return best_sel

    def score(self, X=None, y=None) -> float:
        if not hasattr(self, "result_"):
            raise NotFittedError("call fit first")
        return float(self.ratio_)


class UnitDiskEmbedder(BaseEstimator):
    """Fit 2D atom coordinates whose unit-disk graph equals the input graph.

    ``transform`` returns the coordinate array; raises if the annealer
    reported the instance infeasible within budget.
    """

    def __init__(
        self,
        r: float = 15.0,
        rho: float = 5.0,
        l_bar: float = 100.0,
        budget: int = 200_000,
        restarts: int = 8,
        seed: int = 0,
    ):
        self.r = r
        self.rho = rho
        self.l_bar = l_bar
        self.budget = budget
        self.restarts = restarts
        self.seed = seed

    def fit(self, X: WeightedGraph, y=None):
        spec = EmbedSpec(graph=X, r=self.r, rho=self.rho, l_bar=self.l_bar)
        outcome = solve_layout(
            spec, seed=self.seed, budget=self.budget, restarts=self.restarts
        )
        self.feasible_ = not isinstance(outcome, Infeasible)
        if self.feasible_:
            self.layout_ = outcome
            self.positions_ = outcome.positions
        else:
            self.report_ = outcome
        return self

    def transform(self, X=None) -> np.ndarray:
        if not hasattr(self, "feasible_"):
            raise NotFittedError("call fit first")
        if not self.feasible_:
            raise ValueError(f"no feasible layout found: {self.report_.message}")
        return self.positions_

    def fit_transform(self, X: WeightedGraph, y=None) -> np.ndarray:
        return self.fit(X).transform()
