"""Problem-to-graph reductions and weight normalization.

Both scheduling problems reduce to graph problems on a shared dense
representation:

* SC1 -> complete weighted graph with ``w_uv = min(w_u * t_v, w_v * t_u)``;
  maximizing the k-cut of this graph is equivalent to minimizing the total
  weighted completion time on k machines.
* SC2 -> unweighted conflict graph: an edge joins two intervals iff they
  overlap (open intervals, touching endpoints do not count) or share a
  group label.  Independent sets of this graph are feasible selections.

``normalize`` rescales edge weights so the largest conceivable cut phase is
about one full turn, which flattens the depth-1 optimization landscape.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .instances import SC1Instance, SC2Instance

__all__ = [
    "GraphError",
    "WeightedGraph",
    "cut_value",
    "sc1_to_graph",
    "sc2_to_graph",
    "normalize",
    "graph_to_json",
    "graph_from_json",
    "graph_to_edge_list",
    "graph_from_edge_list",
]


class GraphError(ValueError):
    """Raised for malformed graphs or invalid graph operations."""


@dataclass
class WeightedGraph:
    """Dense symmetric nonnegative edge weights with zero diagonal.

    Unweighted graphs are represented with 0/1 weights; ``adjacency`` gives
    the boolean edge matrix either way.
    """

    weights: np.ndarray
    origin: str = "synthetic"

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise GraphError(f"weights must be square, got shape {w.shape}")
        if not np.allclose(w, w.T, atol=0.0):
            raise GraphError("weights must be symmetric")
        if np.any(np.diagonal(w) != 0.0):
            raise GraphError("diagonal must be zero")
        if np.any(w < 0.0):
            raise GraphError("weights must be nonnegative")
        if not np.all(np.isfinite(w)):
            raise GraphError("weights must be finite")
        self.weights = w

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def w_total(self) -> float:
        return float(np.triu(self.weights, 1).sum())

    @property
    def w_max(self) -> float:
        return float(self.weights.max()) if self.n else 0.0

    def adjacency(self) -> np.ndarray:
        return self.weights > 0.0

    def degrees(self) -> np.ndarray:
        return self.adjacency().sum(axis=1)

    def edges(self) -> list[tuple[int, int, float]]:
        us, vs = np.nonzero(np.triu(self.weights, 1))
        return [(int(u), int(v), float(self.weights[u, v])) for u, v in zip(us, vs)]

    def edge_pairs(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v, _ in self.edges()]

    @classmethod
    def from_edges(
        cls, n: int, edges, origin: str = "synthetic"
    ) -> "WeightedGraph":
        """Build from ``(u, v)`` pairs or ``(u, v, w)`` triples."""
        w = np.zeros((n, n))
        for e in edges:
            u, v = int(e[0]), int(e[1])
            wt = float(e[2]) if len(e) > 2 else 1.0
            w[u, v] = w[v, u] = wt
        return cls(w, origin=origin)

    @classmethod
    def complete(cls, n: int, weight: float = 1.0, origin: str = "synthetic"):
        w = np.full((n, n), float(weight))
        np.fill_diagonal(w, 0.0)
        return cls(w, origin=origin)


def cut_value(g: WeightedGraph, labels) -> float:
    """Total weight of edges whose endpoints carry different labels."""
    lab = np.asarray(labels)
    if lab.shape != (g.n,):
        raise GraphError(f"labels shape {lab.shape} does not match n={g.n}")
    diff = lab[:, None] != lab[None, :]
    return float((np.triu(g.weights, 1) * diff).sum())


def sc1_to_graph(instance: SC1Instance) -> WeightedGraph:
    """Complete graph on jobs with ``w_uv = min(w_u * t_v, w_v * t_u)``.

    For any machine assignment, the schedule cost decomposes as
    ``sum(w_j * t_j) + W_total - cut``, so maximizing the cut minimizes the
    total weighted completion time.
    """
    t = np.asarray(instance.durations, dtype=float)
    w = np.asarray(instance.weights, dtype=float)
    m = np.minimum(np.outer(w, t), np.outer(w, t).T)  # min(w_u t_v, w_v t_u)
    np.fill_diagonal(m, 0.0)
    return WeightedGraph(m, origin="sc1")


def _overlaps(a: tuple[int, int], b: tuple[int, int]) -> bool:
    # Open-interval intersection: back-to-back loads on one plug are compatible.
    return a[0] < b[1] and b[0] < a[1]


def sc2_to_graph(instance: SC2Instance) -> WeightedGraph:
    """Conflict graph: edge iff intervals overlap or share a group.

    The result is the union of an interval graph and a cluster graph (each
    group induces a clique).
    """
    n = instance.n
    w = np.zeros((n, n))
    iv = instance.intervals
    for i in range(n):
        for j in range(i + 1, n):
            if iv[i][2] == iv[j][2] or _overlaps(iv[i][:2], iv[j][:2]):
                w[i, j] = w[j, i] = 1.0
    return WeightedGraph(w, origin="sc2")


def normalize(g: WeightedGraph) -> tuple[WeightedGraph, float]:
    """Rescale weights by ``s = 2*pi / (w_max * n^2 / 4)``; returns ``(graph, s)``.

    ``w_max * n^2 / 4`` upper-bounds the maximum cut, so after scaling every
    attainable cost phase fits within one turn.  Divide reported costs by
    ``s`` to de-normalize.
    """
    if g.w_max <= 0.0:
        raise GraphError("cannot normalize an all-zero graph")
    bound = g.w_max * g.n * g.n / 4.0
    s = 2.0 * math.pi / bound
    return WeightedGraph(g.weights * s, origin=g.origin), s


def graph_to_json(g: WeightedGraph) -> str:
    """Dense lower-triangle JSON serialization."""
    tri = [[float(g.weights[i, j]) for j in range(i)] for i in range(g.n)]
    return json.dumps({"n": g.n, "origin": g.origin, "lower": tri}, indent=2)


def graph_from_json(text: str) -> WeightedGraph:
    d = json.loads(text)
    n = int(d["n"])
    w = np.zeros((n, n))
    for i, row in enumerate(d["lower"]):
        for j, val in enumerate(row):
            w[i, j] = w[j, i] = float(val)
    return WeightedGraph(w, origin=d.get("origin", "synthetic"))


def graph_to_edge_list(g: WeightedGraph) -> str:
    """Plain ``u v w`` lines, one per positive-weight edge."""
    lines = [f"{u} {v} {w:.17g}" for u, v, w in g.edges()]
    return "\n".join([f"# n={g.n}"] + lines) + "\n"


def graph_from_edge_list(text: str) -> WeightedGraph:
    n = None
    edges = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if "n=" in line:
                n = int(line.split("n=")[1])
            continue
        u, v, w = line.split()
        edges.append((int(u), int(v), float(w)))
    if n is None:
        n = 1 + max(max(u, v) for u, v, _ in edges) if edges else 0
    return WeightedGraph.from_edges(n, edges)
