"""Graph-to-plane layout: place atoms so the unit-disk graph equals the target.

A feasible layout puts every connected pair at distance in ``[rho, r]``,
every non-connected pair strictly beyond ``r``, and all atoms inside a
square of side at most ``l_bar``.  The stochastic solver anneals continuous
positions against a squared-hinge penalty (with a small safety margin so
accepted layouts round-trip exactly through the unit-disk construction);
it either returns a verified :class:`Layout` or an :class:`Infeasible`
report with diagnostics, never a silently invalid layout.

Two mixed-integer formulations of the same feasibility problem can be
exported as LP-format text for external solvers: a reformulation-
linearization model over binary coordinate expansions (``udrlt``) and a
more compact disjunctive model over a family of ring directions
(``udrphi``).  Note the ``udrphi`` non-edge constraint
``|dx| > r or |dy| > r`` is deliberately weaker than the Euclidean
separation (it admits diagonal near-pairs); the verifier always enforces
the Euclidean form.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .reduction import WeightedGraph

__all__ = [
    "EmbedSpec",
    "Layout",
    "Infeasible",
    "VerifyReport",
    "ExportedModel",
    "verify_layout",
    "solve_layout",
    "export_model",
    "layout_to_json",
    "layout_from_json",
]

BOUNDARY_TOL = 1e-9  # tolerance on [rho, r] boundary arithmetic
STRICT_EPS = 1e-6  # non-edge separation: d^2 >= r^2 + STRICT_EPS (um^2)
SAFETY_MARGIN = 0.05  # um; the solver targets this much slack inside every band
NODE_CAP = 30


@dataclass
class EmbedSpec:
    """Target graph plus machine geometry (all lengths in um)."""

    graph: WeightedGraph
    r: float = 15.0
    rho: float = 5.0
    l_bar: float = 100.0

    def __post_init__(self) -> None:
        if not 0.0 < self.rho < self.r <= self.l_bar:
            raise ValueError(
                f"need 0 < rho < r <= l_bar, got rho={self.rho}, r={self.r}, "
                f"l_bar={self.l_bar}"
            )


@dataclass
class Layout:
    """Atom coordinates realizing ``spec.graph`` inside ``[0, side]^2``."""

    positions: np.ndarray
    spec: EmbedSpec
    side: float

    def __post_init__(self) -> None:
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 2)


@dataclass
class VerifyReport:
    feasible: bool
    violations: list[tuple[str, int, int, float]]  # (kind, i, j, distance)


@dataclass
class Infeasible:
    """Best attempt diagnostics when no feasible layout was found in budget."""

    best_penalty: float
    violations: dict[str, int]
    iterations: int
    message: str


def _distances(positions: np.ndarray) -> np.ndarray:
    diff = positions[:, None, :] - positions[None, :, :]
    return np.sqrt((diff**2).sum(axis=2))


def verify_layout(layout: Layout) -> VerifyReport:
    """Check every pair constraint; list each offender with its distance.

    Edge pairs must satisfy ``rho <= d <= r`` (within 1e-9 on the
    boundaries); non-edge pairs ``d^2 >= r^2 + 1e-6`` (the shared strict
    margin); all pairs ``d >= rho``; all coordinates inside ``[0, side]``.
    """
    spec = layout.spec
    n = spec.graph.n
    if layout.positions.shape != (n, 2):
        raise ValueError(
            f"layout has {layout.positions.shape[0]} positions for {n} nodes"
        )
    adj = spec.graph.adjacency()
    d = _distances(layout.positions)
    violations: list[tuple[str, int, int, float]] = []
    for i in range(n):
        for j in range(i + 1, n):
            dist = float(d[i, j])
            if adj[i, j]:
                if dist < spec.rho - BOUNDARY_TOL:
                    violations.append(("edge-short", i, j, dist))
                elif dist > spec.r + BOUNDARY_TOL:
                    violations.append(("edge-long", i, j, dist))
            else:
                if dist * dist < spec.r * spec.r + STRICT_EPS - BOUNDARY_TOL:
                    violations.append(("non-edge-close", i, j, dist))
                if dist < spec.rho - BOUNDARY_TOL:
                    violations.append(("pair-overlap", i, j, dist))
    lo = layout.positions.min()
    hi = layout.positions.max()
    if lo < -BOUNDARY_TOL or hi > layout.side + BOUNDARY_TOL:
        violations.append(("outside-box", -1, -1, float(hi - lo)))
    if layout.side > spec.l_bar + BOUNDARY_TOL:
        violations.append(("side-too-large", -1, -1, float(layout.side)))
    return VerifyReport(feasible=not violations, violations=violations)


def _penalty(positions: np.ndarray, spec: EmbedSpec, extent_weight: float = 1e-4):
    """Squared-hinge constraint violations plus a small bounding-side term.

    Hinges include :data:`SAFETY_MARGIN`, so a zero hinge sum means every
    pair sits strictly inside its band and the layout both verifies and
    round-trips through the unit-disk construction.  Returns
    ``(hinge + extent_weight * extent, hinge, census)``.
    """
    adj = spec.graph.adjacency()
    d = _distances(positions)
    n = positions.shape[0]
    iu, ju = np.triu_indices(n, 1)
    dist = d[iu, ju]
    is_edge = adj[iu, ju]
    m = SAFETY_MARGIN
    short = np.maximum(0.0, spec.rho + m - dist)  # all pairs keep physical spacing
    long = np.where(is_edge, np.maximum(0.0, dist - (spec.r - m)), 0.0)
    close = np.where(~is_edge, np.maximum(0.0, spec.r + m - dist), 0.0)
    hinge = float((short**2).sum() + (long**2).sum() + (close**2).sum())
    extent = float(positions.max(axis=0).max() - positions.min(axis=0).min()) if n else 0.0
    return hinge + extent_weight * extent, hinge, {
        "edge-short-or-overlap": int((short > 0).sum()),
        "edge-long": int((long > 0).sum()),
        "non-edge-close": int((close > 0).sum()),
    }


def _finalize(positions: np.ndarray, spec: EmbedSpec) -> Layout | None:
    """Translate to the origin corner, verify, and confirm the round trip."""
    from .mis import positions_to_udgraph

    pos = positions - positions.min(axis=0)
    side = float(pos.max()) if pos.size else 0.0
    if side > spec.l_bar:
        return None
    layout = Layout(positions=pos, spec=spec, side=side)
    if not verify_layout(layout).feasible:
        return None
    realized = positions_to_udgraph(pos, spec.r)
    if not np.array_equal(realized.adjacency(), spec.graph.adjacency()):
        return None
    return layout


def _grid_init(n: int, spec: EmbedSpec, rng: np.random.Generator) -> np.ndarray:
    cells = math.ceil(math.sqrt(n))
    spacing = min(spec.l_bar / max(cells - 1, 1), spec.r + 2 * SAFETY_MARGIN + 1.0)
    pts = [
        (col * spacing, row * spacing)
        for row in range(cells)
        for col in range(cells)
    ][:n]
    return np.array(pts) + rng.random((n, 2)) * 0.1


def solve_layout(
    spec: EmbedSpec,
    seed: int = 0,
    budget: int = 200_000,
    restarts: int = 8,
    node_cap: int = NODE_CAP,
) -> Layout | Infeasible:
    """Simulated annealing over continuous positions; restarts share the budget.

    Proposal moves displace one atom by a Gaussian step whose scale cools
    geometrically together with the Metropolis temperature.  The solver
    returns as soon as a candidate passes the full verifier and round-trip
    check; otherwise an :class:`Infeasible` report carries the best penalty
    and a violation census.
    """
    n = spec.graph.n
    if n > node_cap:
        raise ValueError(f"{n} nodes exceeds solver cap {node_cap}")
    rng = np.random.default_rng(seed)
    if n == 0:
        return Layout(positions=np.zeros((0, 2)), spec=spec, side=0.0)
    if n == 1:
        return Layout(positions=np.zeros((1, 2)), spec=spec, side=0.0)

    iters_per_restart = max(1, budget // restarts)
    best_pen = math.inf
    best_census: dict[str, int] = {}
    total_iters = 0

    for restart in range(restarts):
        pos = (
            _grid_init(n, spec, rng)
            if restart == 0
            else rng.random((n, 2)) * spec.l_bar
        )
        pos = np.clip(pos, 0.0, spec.l_bar)
        pen, hinge, census = _penalty(pos, spec)
        temperature = max(pen, 1.0)
        cooling = (1e-7 / temperature) ** (1.0 / iters_per_restart)
        sigma = spec.r / 2.0
        sigma_cool = (0.02 / sigma) ** (1.0 / iters_per_restart)

        for _ in range(iters_per_restart):
            total_iters += 1
            if hinge == 0.0:
                layout = _finalize(pos, spec)
                if layout is not None:
                    return layout
            node = int(rng.integers(n))
            trial = pos.copy()
            trial[node] = np.clip(
                trial[node] + rng.normal(0.0, sigma, size=2), 0.0, spec.l_bar
            )
            trial_pen, trial_hinge, trial_census = _penalty(trial, spec)
            delta = trial_pen - pen
            if delta <= 0.0 or rng.random() < math.exp(-delta / max(temperature, 1e-12)):
                pos, pen, hinge, census = trial, trial_pen, trial_hinge, trial_census
            temperature *= cooling
            sigma = max(sigma * sigma_cool, 0.02)
        if hinge == 0.0:
            layout = _finalize(pos, spec)
            if layout is not None:
                return layout
        if hinge < best_pen:
            best_pen, best_census = hinge, census

    return Infeasible(
        best_penalty=best_pen,
        violations=best_census,
        iterations=total_iters,
        message=f"no feasible layout within {budget} iterations x {restarts} restarts",
    )


# --------------------------------------------------------------------------
# Mixed-integer model export (LP text format)
# --------------------------------------------------------------------------


@dataclass
class ExportedModel:
    text: str
    counts: dict[str, int]
    variant: str

    def __str__(self) -> str:
        return self.text


def _node_pairs(n: int):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def export_model(
    spec: EmbedSpec, variant: str = "udrlt", phi_count: int = 8
) -> ExportedModel:
    """Emit the layout feasibility problem as a deterministic LP-format model.

    Coordinates are integers on ``[0, l_bar]``.  ``udrlt`` expands them in
    binary and linearizes every coordinate product with the standard triple
    ``w <= a; w <= b; w >= a + b - 1``; ``udrphi`` keeps integer coordinates
    and encodes ring membership as a big-M disjunction over ``phi_count``
    directions.  Identical specs yield byte-identical text.
    """
    if variant == "udrlt":
        return _export_udrlt(spec)
    if variant == "udrphi":
        if phi_count < 4:
            raise ValueError(f"udrphi needs phi_count >= 4, got {phi_count}")
        return _export_udrphi(spec, phi_count)
    raise ValueError(f"unknown variant {variant!r}")


def _export_udrlt(spec: EmbedSpec) -> ExportedModel:
    n = spec.graph.n
    l_int = int(math.floor(spec.l_bar))
    bits = max(1, math.ceil(math.log2(l_int + 1)))
    adj = spec.graph.adjacency()

    cons: list[str] = []
    binaries: list[str] = []
    generals: list[str] = [f"x_{i}" for i in range(n)] + [f"y_{i}" for i in range(n)] + ["L"]

    for i in range(n):
        for axis in ("x", "y"):
            binaries += [f"b{axis}_{i}_{k}" for k in range(bits)]
            expansion = " + ".join(f"{2**k} b{axis}_{i}_{k}" for k in range(bits))
            cons.append(f"link_{axis}_{i}: {axis}_{i} - {expansion} = 0")
            cons.append(f"box_{axis}_{i}: {axis}_{i} - L <= -1")
    cons.append(f"lmax: L <= {l_int}")

    # Self products b_k * b_k' (k < k') per node and axis, shared by all pairs.
    for i in range(n):
        for axis in ("x", "y"):
            for k in range(bits):
                for k2 in range(k + 1, bits):
                    w = f"w{axis}s_{i}_{k}_{k2}"
                    binaries.append(w)
                    cons.append(f"lin1_{w}: {w} - b{axis}_{i}_{k} <= 0")
                    cons.append(f"lin2_{w}: {w} - b{axis}_{i}_{k2} <= 0")
                    cons.append(
                        f"lin3_{w}: {w} - b{axis}_{i}_{k} - b{axis}_{i}_{k2} >= -1"
                    )

    def square_terms(axis: str, i: int, sign: int) -> list[str]:
        # sign * x_i^2 = sign * (sum 4^k b_k + sum_{k<k2} 2^(k+k2+1) w_s)
        terms = []
        for k in range(bits):
            terms.append(_term(sign * 4**k, f"b{axis}_{i}_{k}"))
        for k in range(bits):
            for k2 in range(k + 1, bits):
                terms.append(_term(sign * 2 ** (k + k2 + 1), f"w{axis}s_{i}_{k}_{k2}"))
        return terms

    cross_products = 0
    for i, j in _node_pairs(n):
        pair_terms: list[str] = []
        for axis in ("x", "y"):
            for k in range(bits):
                for k2 in range(bits):
                    w = f"w{axis}_{i}_{j}_{k}_{k2}"
                    binaries.append(w)
                    cross_products += 1
                    cons.append(f"lin1_{w}: {w} - b{axis}_{i}_{k} <= 0")
                    cons.append(f"lin2_{w}: {w} - b{axis}_{j}_{k2} <= 0")
                    cons.append(
                        f"lin3_{w}: {w} - b{axis}_{i}_{k} - b{axis}_{j}_{k2} >= -1"
                    )
                    pair_terms.append(_term(-(2 ** (k + k2 + 1)), w))  # -2 x_i x_j
            pair_terms += square_terms(axis, i, 1) + square_terms(axis, j, 1)
        expr = " ".join(pair_terms).lstrip("+ ").replace("  ", " ")
        if adj[i, j]:
            cons.append(f"ring_lo_{i}_{j}: {expr} >= {spec.rho**2:.17g}")
            cons.append(f"ring_hi_{i}_{j}: {expr} <= {spec.r**2:.17g}")
        else:
            cons.append(f"sep_{i}_{j}: {expr} >= {spec.r**2 + STRICT_EPS:.17g}")

    counts = {
        "coordinate_bits": 2 * n * bits,
        "cross_products": cross_products,
        "self_products": 2 * n * (bits * (bits - 1) // 2),
        "binaries": len(binaries),
        "generals": len(generals),
        "constraints": len(cons),
        "bits": bits,
    }
    text = _render_lp("udrlt", spec, cons, binaries, generals, l_int, [])
    return ExportedModel(text=text, counts=counts, variant="udrlt")


def _export_udrphi(spec: EmbedSpec, phi_count: int) -> ExportedModel:
    n = spec.graph.n
    l_int = int(math.floor(spec.l_bar))
    adj = spec.graph.adjacency()
    big_m = float(2 * l_int + 2 * math.ceil(spec.r) + 2)
    sep = math.floor(spec.r) + 1  # integer coords: "> r" becomes ">= floor(r)+1"

    cons: list[str] = []
    binaries: list[str] = []
    generals = [f"x_{i}" for i in range(n)] + [f"y_{i}" for i in range(n)] + ["L"]
    warnings = [
        "warning: the non-edge constraint (|dx| > r) or (|dy| > r) is weaker",
        "than euclidean separation d > r and admits diagonal near-pairs;",
        "validate candidate solutions with the euclidean verifier.",
    ]

    for i in range(n):
        for axis in ("x", "y"):
            cons.append(f"box_{axis}_{i}: {axis}_{i} - L <= -1")
    cons.append(f"lmax: L <= {l_int}")

    disjunct_rows = 0
    for i, j in _node_pairs(n):
        if adj[i, j]:
            sel = []
            for m in range(phi_count):
                u = f"u_{i}_{j}_{m}"
                binaries.append(u)
                sel.append(u)
                phi = 2.0 * math.pi * m / phi_count
                for axis, trig in (("x", math.cos(phi)), ("y", math.sin(phi))):
                    lo = min(spec.rho * trig, spec.r * trig)
                    hi = max(spec.rho * trig, spec.r * trig)
                    d = f"{axis}_{j} - {axis}_{i}"
                    cons.append(
                        f"ring_{u}_{axis}_hi: {d} + {big_m:.17g} {u} <= {hi + big_m:.17g}"
                    )
                    cons.append(
                        f"ring_{u}_{axis}_lo: {d} - {big_m:.17g} {u} >= {lo - big_m:.17g}"
                    )
                    disjunct_rows += 2
            cons.append(f"ring_pick_{i}_{j}: " + " + ".join(sel) + " = 1")
        else:
            vs = [f"v_{i}_{j}_{t}" for t in range(4)]
            binaries += vs
            for var, expr in zip(
                vs,
                (
                    f"x_{j} - x_{i}",
                    f"x_{i} - x_{j}",
                    f"y_{j} - y_{i}",
                    f"y_{i} - y_{j}",
                ),
            ):
                # dx >= sep - M(1 - v): binding only when the indicator is set.
                cons.append(
                    f"sep_{var}: {expr} - {big_m:.17g} {var} >= {sep - big_m:.17g}"
                )
            cons.append(f"sep_pick_{i}_{j}: " + " + ".join(vs) + " >= 1")

    counts = {
        "indicators_per_edge": phi_count,
        "rows_per_disjunct": 4,
        "binaries": len(binaries),
        "generals": len(generals),
        "constraints": len(cons),
        "disjunct_rows": disjunct_rows,
    }
    text = _render_lp("udrphi", spec, cons, binaries, generals, l_int, warnings)
    return ExportedModel(text=text, counts=counts, variant="udrphi")


def _term(coef: int, var: str) -> str:
    return f"+ {coef} {var}" if coef >= 0 else f"- {-coef} {var}"


def _render_lp(
    variant: str,
    spec: EmbedSpec,
    cons: list[str],
    binaries: list[str],
    generals: list[str],
    l_int: int,
    warnings: list[str],
) -> str:
    lines = [
        f"\\ unit-disk layout model ({variant})",
        f"\\ n={spec.graph.n} r={spec.r:.17g} rho={spec.rho:.17g} l_bar={spec.l_bar:.17g}",
    ]
    lines += [f"\\ {w}" for w in warnings]
    lines.append("Minimize")
    lines.append(" obj: L")
    lines.append("Subject To")
    lines += [f" {c}" for c in cons]
    lines.append("Bounds")
    for v in generals:
        lines.append(f" 0 <= {v} <= {l_int}")
    lines.append("Generals")
    lines.append(" " + " ".join(generals))
    lines.append("Binaries")
    for start in range(0, len(binaries), 8):
        lines.append(" " + " ".join(binaries[start : start + 8]))
    lines.append("End")
    return "\n".join(lines) + "\n"


def layout_to_json(layout: Layout) -> str:
    return json.dumps(
        {
            "positions": [[float(x), float(y)] for x, y in layout.positions],
            "side": layout.side,
            "r": layout.spec.r,
            "rho": layout.spec.rho,
            "l_bar": layout.spec.l_bar,
        },
        indent=2,
    )


def layout_from_json(text: str, graph: WeightedGraph) -> Layout:
    d = json.loads(text)
    spec = EmbedSpec(graph=graph, r=d["r"], rho=d["rho"], l_bar=d["l_bar"])
    return Layout(positions=np.array(d["positions"]), spec=spec, side=float(d["side"]))
