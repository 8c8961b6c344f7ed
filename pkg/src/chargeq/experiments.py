"""Config-driven experiment pipeline: generate, reduce, optimize, score, report.

A run executes, per instance seed and size: instance generation, reduction
to a graph, weight normalization, a depth sweep of layer-wise optimized
QAOA, classical baselines and exact oracles, then writes ``report.json``
plus flat CSV tables suitable for plotting depth/ratio curves and per-depth
ratio distributions.  One failing instance is recorded and skipped without
corrupting the report (the exit status signals partial failure).

Configs are JSON with a strict schema: unknown keys are rejected at every
level, so typos fail fast instead of silently invalidating a benchmark.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .classical import brute_maxkcut, brute_mis, dp_optimum, random_baseline
from .instances import gen_sc1, gen_sc2, load_records, synthesize_records
from .maxkcut import run_qaoa_maxkcut
from .mis import (
    MisCostSpec,
    blockade_radius,
    default_penalty,
    positions_to_udgraph,
    random_ud_points,
    run_qaoa_mis,
)
from .optimizers import DEOptions, EggOptions
from .reduction import WeightedGraph, normalize, sc1_to_graph, sc2_to_graph

__all__ = ["ConfigError", "ExperimentConfig", "ExperimentReport", "run_experiment"]


class ConfigError(ValueError):
    """Raised for malformed experiment configurations."""


def _check_keys(d: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(d)
    if missing:
        raise ConfigError(f"{where}: missing keys {sorted(missing)}")


@dataclass
class ExperimentConfig:
    """Validated experiment description (see :meth:`from_dict` for the schema)."""

    problem: str
    sizes: list[int]
    seeds: list[int]
    k: int = 2
    groups: tuple[int, int] | None = None
    p_max: int = 3
    shots: int = 0
    normalize_weights: bool = True
    baseline_trials: int = 2000
    records_count: int = 2250
    records_seed: int = 0
    records_path: str | None = None
    ud_radius: float | None = None
    optimizer: dict = field(default_factory=dict)

    SCHEMA = {
        "problem",
        "sizes",
        "seeds",
        "k",
        "groups",
        "p_max",
        "shots",
        "normalize",
        "baseline_trials",
        "records",
        "ud_radius",
        "optimizer",
    }
    OPTIMIZER_SCHEMA = {"de_pop", "de_gens", "de_budget", "polish", "polish_budget"}
    RECORDS_SCHEMA = {"source", "count", "seed", "path"}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        _check_keys(d, cls.SCHEMA, {"problem", "seeds"}, "config")
        problem = d["problem"]
        if problem not in ("sc1", "sc2", "synthetic-graph", "ud-mis"):
            raise ConfigError(f"unknown problem {problem!r}")
        groups = None
        if problem == "sc2":
            if "groups" not in d:
                raise ConfigError("sc2 needs 'groups': [n_groups, group_size]")
            groups = (int(d["groups"][0]), int(d["groups"][1]))
            sizes = [groups[0] * groups[1]]
        else:
            if "sizes" not in d:
                raise ConfigError(f"{problem} needs 'sizes'")
            sizes = [int(s) for s in d["sizes"]]
        records = d.get("records", {"source": "synthetic"})
        _check_keys(records, cls.RECORDS_SCHEMA, {"source"}, "config.records")
        optimizer = d.get("optimizer", {})
        _check_keys(optimizer, cls.OPTIMIZER_SCHEMA, set(), "config.optimizer")
        cfg = cls(
            problem=problem,
            sizes=sizes,
            seeds=[int(s) for s in d["seeds"]],
            k=int(d.get("k", 2)),
            groups=groups,
            p_max=int(d.get("p_max", 3)),
            shots=int(d.get("shots", 0)),
            normalize_weights=bool(d.get("normalize", True)),
            baseline_trials=int(d.get("baseline_trials", 2000)),
            records_count=int(records.get("count", 2250)),
            records_seed=int(records.get("seed", 0)),
            records_path=records.get("path"),
            ud_radius=d.get("ud_radius"),
            optimizer=optimizer,
        )
        if cfg.p_max < 1:
            raise ConfigError(f"p_max must be >= 1, got {cfg.p_max}")
        if not cfg.seeds:
            raise ConfigError("seeds must be non-empty")
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def egg_options(self) -> EggOptions:
        o = self.optimizer
        return EggOptions(
            de=DEOptions(
                pop=o.get("de_pop", 16),
                max_gens=o.get("de_gens", 25),
                budget=o.get("de_budget", 600),
            ),
            polish=o.get("polish", "bfgs"),
            polish_budget=o.get("polish_budget", 350),
        )


@dataclass
class ExperimentReport:
    config_hash: str
    records: list[dict]
    failures: list[dict]
    aggregates: dict

    def to_dict(self) -> dict:
        return {
            "version": __version__,
            "config_hash": self.config_hash,
            "records": self.records,
            "failures": self.failures,
            "aggregates": self.aggregates,
        }


def _config_hash(config: ExperimentConfig) -> str:
    canon = json.dumps(vars(config), sort_keys=True, default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _record_pool(config: ExperimentConfig):
    if config.records_path:
        return load_records(config.records_path)
    return synthesize_records(count=config.records_count, seed=config.records_seed)


def _random_complete_graph(n: int, seed: int) -> WeightedGraph:
    rng = np.random.default_rng(seed)
    w = np.triu(rng.uniform(0.25, 1.0, size=(n, n)), 1)
    return WeightedGraph(w + w.T, origin="synthetic")


def _run_single(config: ExperimentConfig, pool, size: int, seed: int) -> dict:
    started = time.perf_counter()
    opts = config.egg_options()
    record: dict = {"problem": config.problem, "size": size, "seed": seed}

    if config.problem in ("sc1", "synthetic-graph"):
        if config.problem == "sc1":
            instance = gen_sc1(pool, size, config.k, seed)
            graph = sc1_to_graph(instance)
        else:
            instance = None
            graph = _random_complete_graph(size, seed)
        optimum, _ = brute_maxkcut(graph, config.k)
        work, scale = normalize(graph) if config.normalize_weights else (graph, 1.0)
        result = run_qaoa_maxkcut(
            work,
            config.k,
            config.p_max,
            opts=opts,
            seed=seed,
            optimum=optimum,
            scale=scale,
            shots=config.shots,
        )
        schedule_optimum = dp_optimum(instance) if instance is not None else None
        base = random_baseline(
            graph,
            config.k,
            config.baseline_trials,
            seed,
            optimum=optimum,
            instance=instance,
            schedule_optimum=schedule_optimum,
        )
        record.update(
            {
                "optimum": optimum,
                "ratios": [t["ratio"] for t in result.per_layer_trace],
                "expectations": [t["expectation"] for t in result.per_layer_trace],
                "evals": [t["evals"] for t in result.per_layer_trace],
                "baseline_mean_ratio": base.mean_ratio,
                "baseline_schedule_ratio": base.schedule_ratio,
                "best_sampled": list(result.best_sampled) if result.best_sampled else None,
            }
        )
    elif config.problem in ("sc2", "ud-mis"):
        if config.problem == "sc2":
            n_groups, group_size = config.groups
            instance = gen_sc2(pool, n_groups, group_size, seed)
            graph = sc2_to_graph(instance)
        else:
            r_b = config.ud_radius or blockade_radius()
            points = random_ud_points(size, seed, box=2.2 * r_b, min_spacing=r_b / 3.0)
            graph = positions_to_udgraph(points, r_b)
        mis_size, _ = brute_mis(graph)
        spec = MisCostSpec(graph=graph, penalty=default_penalty(graph))
        result = run_qaoa_mis(
            spec, config.p_max, opts=opts, seed=seed, mis_size=mis_size
        )
        record.update(
            {
                "optimum": mis_size,
                "ratios": [t["ratio"] for t in result.per_layer_trace],
                "expectations": [t["expectation"] for t in result.per_layer_trace],
                "evals": [t["evals"] for t in result.per_layer_trace],
            }
        )
    else:  # pragma: no cover - guarded by config validation
        raise ConfigError(f"unhandled problem {config.problem}")

    record["wall_time_s"] = time.perf_counter() - started
    return record


def _aggregate(records: list[dict], p_max: int) -> dict:
    per_depth: list[list[float]] = [[] for _ in range(p_max)]
    for rec in records:
        for depth_idx, ratio in enumerate(rec.get("ratios", [])):
            if ratio is not None:
                per_depth[depth_idx].append(ratio)
    quantiles = {}
    for depth_idx, ratios in enumerate(per_depth, start=1):
        if not ratios:
            continue
        arr = np.array(ratios)
        quantiles[str(depth_idx)] = {
            "median": float(np.median(arr)),
            "q25": float(np.quantile(arr, 0.25)),
            "q75": float(np.quantile(arr, 0.75)),
            "mean": float(arr.mean()),
            "count": int(arr.size),
        }
    return {
        "ratio_quantiles_by_depth": quantiles,
        "ratio_lists_by_depth": {
            str(i + 1): sorted(v) for i, v in enumerate(per_depth) if v
        },
    }


def run_experiment(config: ExperimentConfig, out_dir: str | Path) -> ExperimentReport:
    """Execute all (size, seed) cells, then write report.json and curves.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pool = (
        _record_pool(config)
        if config.problem in ("sc1", "sc2")
        else None
    )

    records: list[dict] = []
    failures: list[dict] = []
    for size in config.sizes:
        for seed in config.seeds:
            try:
                records.append(_run_single(config, pool, size, seed))
            except Exception as exc:  # fail-soft per instance
                failures.append(
                    {
                        "problem": config.problem,
                        "size": size,
                        "seed": seed,
                        "error": f"{type(exc).__name__}: {exc}",
                    }
                )

    report = ExperimentReport(
        config_hash=_config_hash(config),
        records=records,
        failures=failures,
        aggregates=_aggregate(records, config.p_max),
    )
    (out / "report.json").write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True)
    )
    with (out / "curves.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["problem", "size", "seed", "depth", "ratio", "expectation", "evals"])
        for rec in records:
            for depth_idx, ratio in enumerate(rec.get("ratios", []), start=1):
                writer.writerow(
                    [
                        rec["problem"],
                        rec["size"],
                        rec["seed"],
                        depth_idx,
                        "" if ratio is None else f"{ratio:.12g}",
                        f"{rec['expectations'][depth_idx - 1]:.12g}",
                        rec["evals"][depth_idx - 1],
                    ]
                )
    return report
