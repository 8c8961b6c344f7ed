"""Command-line experiment runner.

Subcommands: ``gen`` (instances to JSON), ``run`` (config-driven pipeline),
``baseline`` (random-assignment statistics), ``landscape`` (depth-1 grid as
CSV), ``embed`` (unit-disk layout), ``export-model`` (LP text),
``resources`` (parity-encoding budget), ``spectrum`` (all cut ratios of a
complete graph).  Exit codes: 0 success, 1 configuration error, 2 partial
instance failures during ``run``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .classical import brute_maxkcut, dp_optimum, random_baseline, cut_ratio_spectrum
from .embedding import EmbedSpec, Infeasible, export_model, layout_to_json, solve_layout
from .experiments import ConfigError, ExperimentConfig, run_experiment
from .instances import gen_sc1, gen_sc2, synthesize_records, load_records
from .maxkcut import analytic_p1
from .optimizers import Objective, landscape_grid
from .parity import parity_resources
from .reduction import graph_from_edge_list, normalize, sc1_to_graph, sc2_to_graph
from .ansatz import BETA_BOUNDS, GAMMA_BOUNDS


def _pool(args):
    if getattr(args, "records", None):
        return load_records(args.records)
    return synthesize_records(seed=getattr(args, "records_seed", 0))


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_gen(args) -> int:
    pool = _pool(args)
    out = _out_dir(args)
    for seed in range(args.seed, args.seed + args.count):
        if args.problem == "sc1":
            inst = gen_sc1(pool, args.n, args.k, seed)
            path = out / f"sc1_n{args.n}_k{args.k}_s{seed}.json"
        else:
            n_groups, group_size = args.groups
            inst = gen_sc2(pool, n_groups, group_size, seed)
            path = out / f"sc2_g{n_groups}x{group_size}_s{seed}.json"
        path.write_text(inst.to_json())
        print(path)
    return 0


def _cmd_run(args) -> int:
    try:
        config = ExperimentConfig.from_json(Path(args.config).read_text())
    except (OSError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    report = run_experiment(config, args.out)
    print(
        f"wrote {args.out}/report.json: {len(report.records)} records, "
        f"{len(report.failures)} failures"
    )
    return 2 if report.failures else 0


def _cmd_baseline(args) -> int:
    pool = _pool(args)
    inst = gen_sc1(pool, args.n, args.k, args.seed)
    graph = sc1_to_graph(inst)
    optimum, _ = brute_maxkcut(graph, args.k)
    base = random_baseline(
        graph,
        args.k,
        args.trials,
        args.seed,
        optimum=optimum,
        instance=inst,
        schedule_optimum=dp_optimum(inst),
    )
    print(
        json.dumps(
            {
                "n": args.n,
                "k": args.k,
                "seed": args.seed,
                "trials": args.trials,
                "optimum_cut": optimum,
                "mean_cut": base.mean_cut,
                "mean_cut_ratio": base.mean_ratio,
                "mean_schedule_cost": base.schedule_mean,
                "mean_schedule_ratio": base.schedule_ratio,
            },
            indent=2,
        )
    )
    return 0


def _cmd_landscape(args) -> int:
    pool = _pool(args)
    inst = gen_sc1(pool, args.n, 2, args.seed)
    graph = sc1_to_graph(inst)
    work, scale = normalize(graph)
    if args.scale_div != 1.0:
        # Evaluate at an alternative zoom: weights scaled by s / scale_div.
        work = type(work)(graph.weights * (scale / args.scale_div), origin=graph.origin)
    obj = Objective(
        lambda x: -analytic_p1(work, x[0], x[1]), [GAMMA_BOUNDS, BETA_BOUNDS]
    )
    grid = landscape_grid(obj, args.resolution)
    out = _out_dir(args)
    path = out / f"landscape_n{args.n}_s{args.seed}_div{args.scale_div:g}.csv"
    np.savetxt(path, grid.matrix, delimiter=",")
    print(path)
    return 0


def _cmd_embed(args) -> int:
    pool = _pool(args)
    n_groups, group_size = args.groups
    inst = gen_sc2(pool, n_groups, group_size, args.seed)
    graph = sc2_to_graph(inst)
    spec = EmbedSpec(graph=graph, r=args.radius, rho=args.rho, l_bar=args.l_bar)
    outcome = solve_layout(spec, seed=args.seed, budget=args.budget)
    out = _out_dir(args)
    path = out / f"layout_g{n_groups}x{group_size}_s{args.seed}.json"
    if isinstance(outcome, Infeasible):
        path.write_text(
            json.dumps(
                {
                    "feasible": False,
                    "best_penalty": outcome.best_penalty,
                    "violations": outcome.violations,
                    "message": outcome.message,
                },
                indent=2,
            )
        )
        print(f"{path} (infeasible)")
        return 0
    path.write_text(layout_to_json(outcome))
    print(path)
    return 0


def _cmd_export_model(args) -> int:
    if args.graph:
        graph = graph_from_edge_list(Path(args.graph).read_text())
    else:
        pool = _pool(args)
        n_groups, group_size = args.groups
        graph = sc2_to_graph(gen_sc2(pool, n_groups, group_size, args.seed))
    spec = EmbedSpec(graph=graph, r=args.radius, rho=args.rho, l_bar=args.l_bar)
    model = export_model(spec, variant=args.variant, phi_count=args.phi_count)
    out = _out_dir(args)
    path = out / f"model_{args.variant}_n{graph.n}_s{args.seed}.lp"
    path.write_text(model.text)
    print(path)
    return 0


def _cmd_resources(args) -> int:
    print(json.dumps(parity_resources(args.n), indent=2))
    return 0


def _cmd_spectrum(args) -> int:
    ratios = cut_ratio_spectrum(args.n)
    out = _out_dir(args)
    path = out / f"spectrum_n{args.n}.csv"
    np.savetxt(path, ratios, delimiter=",")
    print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chargeq",
        description="QAOA pipelines and classical baselines for smart-charging scheduling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, records=True):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="out")
        if records:
            p.add_argument("--records", help="CSV of load records (id,start,end)")
            p.add_argument("--records-seed", dest="records_seed", type=int, default=0)

    p = sub.add_parser("gen", help="generate instances as JSON")
    p.add_argument("--problem", choices=["sc1", "sc2"], required=True)
    p.add_argument("--n", type=int, default=10, help="sc1 job count")
    p.add_argument("--k", type=int, default=2, help="sc1 machine count")
    p.add_argument("--groups", type=int, nargs=2, default=(4, 3), metavar=("G", "SIZE"))
    p.add_argument("--count", type=int, default=1, help="instances (consecutive seeds)")
    add_common(p)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("run", help="run a config-driven experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="out")
    p.add_argument("--jobs", type=int, default=1, help="reserved; runs sequential")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("baseline", help="random-assignment baseline on an sc1 instance")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--trials", type=int, default=10_000)
    add_common(p)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("landscape", help="depth-1 landscape matrix as CSV")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--resolution", type=int, default=30)
    p.add_argument(
        "--scale-div",
        dest="scale_div",
        type=float,
        default=1.0,
        help="divide the normalization factor (1 = fully normalized)",
    )
    add_common(p)
    p.set_defaults(func=_cmd_landscape)

    p = sub.add_parser("embed", help="solve a unit-disk layout for an sc2 conflict graph")
    p.add_argument("--groups", type=int, nargs=2, default=(3, 3), metavar=("G", "SIZE"))
    p.add_argument("--radius", type=float, default=15.0)
    p.add_argument("--rho", type=float, default=5.0)
    p.add_argument("--l-bar", dest="l_bar", type=float, default=100.0)
    p.add_argument("--budget", type=int, default=200_000)
    add_common(p)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("export-model", help="emit a layout MILP in LP format")
    p.add_argument("--variant", choices=["udrlt", "udrphi"], default="udrlt")
    p.add_argument("--phi-count", dest="phi_count", type=int, default=8)
    p.add_argument("--graph", help="edge-list file (u v w); overrides --groups")
    p.add_argument("--groups", type=int, nargs=2, default=(3, 3), metavar=("G", "SIZE"))
    p.add_argument("--radius", type=float, default=15.0)
    p.add_argument("--rho", type=float, default=5.0)
    p.add_argument("--l-bar", dest="l_bar", type=float, default=100.0)
    add_common(p)
    p.set_defaults(func=_cmd_export_model)

    p = sub.add_parser("resources", help="parity-encoding resource estimate")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_resources)

    p = sub.add_parser("spectrum", help="sorted cut ratios of complete K_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default="out")
    p.set_defaults(func=_cmd_spectrum)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
