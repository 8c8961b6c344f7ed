"""QAOA pipelines, classical baselines and Rydberg-layout tooling for smart charging."""

__version__ = "0.1.0"

from .ansatz import QaoaParams, QaoaResult
from .classical import (
    brute_maxkcut,
    brute_mis,
    cut_ratio_spectrum,
    dp_optimum,
    random_baseline,
    schedule_cost,
    smith_order,
)
from .embedding import EmbedSpec, Infeasible, Layout, export_model, solve_layout, verify_layout
from .estimators import QaoaMaxKCutSolver, QaoaMisSolver, UnitDiskEmbedder
from .instances import SC1Instance, SC2Instance, gen_sc1, gen_sc2, load_records, synthesize_records
from .maxkcut import analytic_p1, cost_diagonal, qaoa_expectation, run_qaoa_maxkcut, synthesize_circuit
from .mis import (
    MisCostSpec,
    RydbergParams,
    analog_evolve,
    blockade_radius,
    mis_cost_diagonal,
    positions_to_udgraph,
    run_qaoa_mis,
)
from .optimizers import (
    DEOptions,
    EggOptions,
    Objective,
    bfgs_fd,
    diff_evolution,
    egg_optimize,
    grid_search,
    interp_init,
    landscape_grid,
    nelder_mead,
)
from .parity import parity_cost, parity_layout, parity_resources
from .reduction import WeightedGraph, cut_value, normalize, sc1_to_graph, sc2_to_graph
from .statevector import (
    DiagonalCost,
    StateVector,
    apply_mixer,
    apply_phase,
    expectation,
    init_uniform,
    sample,
)
