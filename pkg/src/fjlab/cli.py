"""Command-line entry point.

Subcommands: ``simulate`` (one graph: final opinions both ways, eigenvalue
diagnostics), ``bounds`` (evaluate every theoretical quantity for a
configuration), ``experiment scaling|degree-sweep|stubbornness-sweep``
(Monte-Carlo sweeps emitting CSV tables), and ``validate`` (Monte-Carlo
certification that the bounds hold on sampled graphs).

Configuration comes from a flat ``key = value`` text file plus command-line
flags; flags override file values, file values override preset values.
Every run writes ``manifest.json`` (effective configuration with per-key
provenance, library versions, wall time) into the output directory, so any
run can be reproduced from its manifest alone.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 bound-hypothesis violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

import numpy as np
import scipy

from . import __version__
from .bounds import (
    HypothesisError,
    all_stubborn_eigenvalue_bound,
    evaluate_bound_report,
    min_eigenvalue_lower_bound,
    degree_tail_bounds,
    eigenvalue_threshold_bound,
    mixed_population_distance_bound,
)
from .experiments import (
    experiment_degree_sweep,
    experiment_scaling,
    experiment_stubbornness_sweep,
    expected_influence_matrix,
    run_trial,
    stable_trial_seed,
)
from .fj_core import (
    ConvergenceVerdict,
    StubbornnessProfile,
    convergence_condition,
    final_opinions_direct,
    final_opinions_iterative,
    influence_matrix,
    system_matrix,
)
from .graph_model import (
    CommunityPartition,
    ProbabilityMatrix,
    SbmSpec,
    expected_degree_stats,
    realized_degree_stats,
    sample_graph,
    sbm_probability_matrix,
)
from .linalg_kernels import NumericalError, min_eigenvalue_symmetric

__all__ = ["ConfigError", "RunConfig", "parse_config", "main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_HYPOTHESIS = 4


class ConfigError(ValueError):
    """Bad or missing configuration; the message names the offending key."""


def _nearest_int(x: float) -> int:
    return math.floor(x + 0.5)


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _parse_float_list(raw: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in raw.split(",") if tok.strip())


def _parse_int_list(raw: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in raw.split(",") if tok.strip())


# key -> (parser from config-file string, range check or None)
_KEY_SCHEMA: dict[str, tuple[Callable[[str], Any], Callable[[Any], bool] | None, str]] = {
    "n": (int, lambda v: v >= 1, "must be a positive integer"),
    "r_s": (float, lambda v: 0.0 < v <= 1.0, "must lie in (0, 1]"),
    "p_s": (float, lambda v: 0.0 <= v <= 1.0, "must lie in [0, 1]"),
    "p_r": (float, lambda v: 0.0 <= v <= 1.0, "must lie in [0, 1]"),
    "p_sr": (float, lambda v: 0.0 <= v <= 1.0, "must lie in [0, 1]"),
    "p": (float, lambda v: 0.0 < v < 1.0, "must lie in (0, 1)"),
    "theta": (float, lambda v: 0.0 < v < 1.0, "must lie in (0, 1)"),
    "trials": (int, lambda v: v >= 1, "must be a positive integer"),
    "seed": (int, lambda v: 0 <= v < 2**64, "must be an unsigned 64-bit integer"),
    "out": (str, None, ""),
    "threads": (int, lambda v: v >= 1, "must be a positive integer"),
    "tol": (float, lambda v: v > 0, "must be positive"),
    "max_iters": (int, lambda v: v >= 1, "must be a positive integer"),
    "c1": (float, lambda v: v > 8, "must exceed 8"),
    "c2": (float, lambda v: v > 8, "must exceed 8"),
    "x0": (str, None, ""),
    "psi_file": (str, None, ""),
    "n_grid": (_parse_int_list, lambda v: all(x >= 1 for x in v), "entries must be positive"),
    "k_grid": (_parse_float_list, None, ""),
    "theta_grid": (
        _parse_float_list,
        lambda v: all(0.0 < x < 1.0 for x in v),
        "entries must lie in (0, 1)",
    ),
    "p_grid": (
        _parse_float_list,
        lambda v: all(0.0 < x < 1.0 for x in v),
        "entries must lie in (0, 1)",
    ),
    "preset": (str, lambda v: v in ("paper-fig1", "paper-fig2", "paper-fig3"),
               "must be one of paper-fig1, paper-fig2, paper-fig3"),
    "paper_scale": (_parse_bool, None, ""),
}

_DEFAULTS: dict[str, Any] = {
    "seed": 42,
    "out": "fjlab-out",
    "tol": 1e-9,
    "max_iters": 10**6,
    "c1": 9.6,
    "c2": 9.6,
    "x0": "stubborn-ones",
    "paper_scale": False,
}


def _preset_values(name: str, paper_scale: bool) -> dict[str, Any]:
    if name == "paper-fig1":
        if paper_scale:
            k_grid = tuple(4.0 + 0.05 * i for i in range(81))
            trials = 50
        else:
            k_grid = tuple(4.0 + 0.25 * i for i in range(11))
            trials = 20
        return {
            "r_s": 0.1, "p_s": 0.3, "p_r": 0.3, "p_sr": 0.5, "theta": 0.5,
            "k_grid": k_grid, "trials": trials,
        }
    if name == "paper-fig2":
        if paper_scale:
            p_grid = tuple(round(0.1 * i, 10) for i in range(1, 10))
            n, trials = 500, 50
        else:
            p_grid = (0.2, 0.5, 0.8)
            n, trials = 200, 10
        return {"r_s": 0.5, "theta": 0.5, "n": n, "p_grid": p_grid, "trials": trials}
    if name == "paper-fig3":
        if paper_scale:
            theta_grid = tuple(round(0.05 + 0.01 * i, 10) for i in range(91))
            n, trials = 1000, 50
        else:
            theta_grid = tuple(round(0.05 + 0.1 * i, 10) for i in range(10))
            n, trials = 300, 10
        return {"r_s": 1.0, "p": 0.2, "n": n, "theta_grid": theta_grid, "trials": trials}
    raise ConfigError(f"unknown preset {name!r}")


@dataclass(frozen=True)
class RunConfig:
    """Fully materialized configuration for one run."""

    subcommand: str
    experiment_kind: str | None
    n: int | None
    r_s: float | None
    p_s: float | None
    p_r: float | None
    p_sr: float | None
    p: float | None
    theta: float | None
    trials: int | None
    seed: int
    out: Path
    threads: int
    tol: float
    max_iters: int
    c1: float
    c2: float
    x0: str
    psi_file: Path | None
    n_grid: tuple[int, ...] | None
    theta_grid: tuple[float, ...] | None
    p_grid: tuple[float, ...] | None
    paper_scale: bool
    preset: str | None


def _read_config_file(path: Path) -> dict[str, Any]:
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values: dict[str, Any] = {}
    for lineno, raw_line in enumerate(path.read_text().splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw_line!r}")
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in _KEY_SCHEMA:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        parser, check, hint = _KEY_SCHEMA[key]
        try:
            value = parser(raw_value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
        if check is not None and not check(value):
            raise ConfigError(f"{path}:{lineno}: {key} {hint} (got {raw_value})")
        values[key] = value
    return values


def _check_flag_value(key: str, value: Any):
    parser, check, hint = _KEY_SCHEMA[key]
    if check is not None and not check(value):
        raise ConfigError(f"{key} {hint} (got {value})")


def parse_config(args: argparse.Namespace) -> tuple[RunConfig, dict[str, Any]]:
    """Merge defaults, preset, config file, environment, and flags.

    Returns the materialized :class:`RunConfig` together with a provenance
    map recording, per key, the value contributed by each layer and the
    effective one, which goes into the run manifest verbatim.
    """
    layers: dict[str, dict[str, Any]] = {key: {} for key in _KEY_SCHEMA}

    def put(layer: str, key: str, value: Any):
        layers[key][layer] = value

    for key, value in _DEFAULTS.items():
        put("default", key, value)
    put("default", "threads", os.cpu_count() or 1)

    file_values: dict[str, Any] = {}
    if args.config is not None:
        file_values = _read_config_file(Path(args.config))

    paper_scale = _DEFAULTS["paper_scale"]
    if "paper_scale" in file_values:
        paper_scale = file_values["paper_scale"]
    if getattr(args, "paper_scale", None) is not None:
        paper_scale = args.paper_scale

    preset = file_values.get("preset")
    if getattr(args, "preset", None) is not None:
        preset = args.preset
    if preset is not None:
        for key, value in _preset_values(preset, paper_scale).items():
            put("preset", key, value)

    for key, value in file_values.items():
        put("file", key, value)

    env_threads = os.environ.get("FJLAB_THREADS")
    if env_threads is not None:
        try:
            threads = int(env_threads)
        except ValueError as exc:
            raise ConfigError(f"FJLAB_THREADS must be an integer, got {env_threads!r}") from exc
        _check_flag_value("threads", threads)
        put("env", "threads", threads)

    for key in _KEY_SCHEMA:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            _check_flag_value(key, flag_value)
            put("flag", key, flag_value)

    def effective(key: str, default: Any = None) -> Any:
        for layer in ("flag", "env", "file", "preset", "default"):
            if layer in layers[key]:
                return layers[key][layer]
        return default

    provenance = {
        key: {**sources, "effective": effective(key)}
        for key, sources in layers.items()
        if sources
    }

    n_grid = effective("n_grid")
    if n_grid is None and effective("k_grid") is not None:
        n_grid = tuple(_nearest_int(math.exp(k)) for k in effective("k_grid"))

    kind = getattr(args, "kind", None)
    cfg = RunConfig(
        subcommand=args.subcommand,
        experiment_kind=kind,
        n=effective("n"),
        r_s=effective("r_s"),
        p_s=effective("p_s"),
        p_r=effective("p_r"),
        p_sr=effective("p_sr"),
        p=effective("p"),
        theta=effective("theta"),
        trials=effective("trials"),
        seed=effective("seed"),
        out=Path(effective("out")),
        threads=effective("threads"),
        tol=effective("tol"),
        max_iters=effective("max_iters"),
        c1=effective("c1"),
        c2=effective("c2"),
        x0=effective("x0"),
        psi_file=Path(effective("psi_file")) if effective("psi_file") else None,
        n_grid=n_grid,
        theta_grid=effective("theta_grid"),
        p_grid=effective("p_grid"),
        paper_scale=paper_scale,
        preset=preset,
    )
    _require_keys(cfg)
    return cfg, provenance


def _require_keys(cfg: RunConfig):
    def need(*keys: str):
        for key in keys:
            if getattr(cfg, key) is None:
                raise ConfigError(f"missing required key: {key}")

    if cfg.subcommand == "simulate":
        need("theta", "r_s")
        if cfg.psi_file is None:
            need("n", "p_s", "p_r", "p_sr")
    elif cfg.subcommand == "bounds":
        need("n", "r_s", "theta", "p_s", "p_r", "p_sr")
    elif cfg.subcommand == "experiment":
        need("trials")
        if cfg.experiment_kind == "scaling":
            need("r_s", "p_s", "p_r", "p_sr", "theta")
            if cfg.n_grid is None:
                raise ConfigError("missing required key: n_grid (or k_grid)")
        elif cfg.experiment_kind == "degree-sweep":
            need("n", "r_s", "theta")
            if cfg.p_grid is None:
                raise ConfigError("missing required key: p_grid")
        elif cfg.experiment_kind == "stubbornness-sweep":
            need("n", "p")
            if cfg.theta_grid is None:
                raise ConfigError("missing required key: theta_grid")


# ---------------------------------------------------------------------------
# Output helpers

def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list[Any]]):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_manifest(cfg: RunConfig, provenance: dict, started: float, out_dir: Path,
                    extra: dict | None = None):
    manifest = {
        "subcommand": cfg.subcommand,
        "experiment_kind": cfg.experiment_kind,
        "config": provenance,
        "seed": cfg.seed,
        "versions": {
            "fjlab": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": sys.version.split()[0],
        },
        "started_utc": datetime.now(timezone.utc).isoformat(),
        "wall_time_s": time.perf_counter() - started,
    }
    if extra:
        manifest.update(extra)
    with (out_dir / "manifest.json").open("w") as fh:
        json.dump(manifest, fh, indent=2, default=str)
        fh.write("\n")


def _ensure_out_dir(cfg: RunConfig) -> Path:
    out = cfg.out
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"out directory {out} is not writable: {exc}") from exc
    if not os.access(out, os.W_OK):
        raise ConfigError(f"out directory {out} is not writable")
    return out


def _load_psi_file(path: Path) -> ProbabilityMatrix:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"psi_file {path} cannot be read: {exc}") from exc
    delimiter = "," if "," in text else None
    try:
        matrix = np.loadtxt(path, delimiter=delimiter, ndmin=2)
        return ProbabilityMatrix(matrix)
    except ValueError as exc:
        raise ConfigError(f"psi_file {path} is not a valid probability matrix: {exc}") from exc


def _build_network(cfg: RunConfig) -> tuple[ProbabilityMatrix, CommunityPartition, SbmSpec | None]:
    if cfg.psi_file is not None:
        psi = _load_psi_file(cfg.psi_file)
        n_s = min(psi.n, max(1, _nearest_int(cfg.r_s * psi.n)))
        return psi, CommunityPartition(n_s, psi.n - n_s), None
    spec = SbmSpec(n=cfg.n, r_s=cfg.r_s, p_s=cfg.p_s, p_r=cfg.p_r, p_sr=cfg.p_sr)
    psi, part = sbm_probability_matrix(spec)
    return psi, part, spec


def _initial_opinions(cfg: RunConfig, part: CommunityPartition) -> np.ndarray:
    if cfg.x0 == "ones":
        return np.ones(part.n)
    if cfg.x0 == "stubborn-ones":
        x0 = np.zeros(part.n)
        x0[: part.n_s] = 1.0
        return x0
    try:
        values = np.array([float(tok) for tok in cfg.x0.split(",") if tok.strip()])
    except ValueError as exc:
        raise ConfigError(f"x0 must be 'ones', 'stubborn-ones' or a comma list: {exc}") from exc
    if values.size != part.n:
        raise ConfigError(f"x0 has {values.size} entries for {part.n} agents")
    return values


# ---------------------------------------------------------------------------
# Subcommands

def _cmd_simulate(cfg: RunConfig, provenance: dict) -> int:
    started = time.perf_counter()
    out_dir = _ensure_out_dir(cfg)
    psi, part, _ = _build_network(cfg)
    prof = StubbornnessProfile(part, cfg.theta)
    graph = sample_graph(psi, cfg.seed)
    verdict = convergence_condition(graph, prof)
    print(f"n: {part.n} (stubborn {part.n_s}, non-stubborn {part.n_r})")
    print(f"convergence: {verdict.value}")

    stats = realized_degree_stats(graph, part)
    if part.n_r == 0 and stats.min_stubborn_degree > 0:
        b1 = all_stubborn_eigenvalue_bound(stats.min_stubborn_degree, cfg.theta)
    elif (verdict is ConvergenceVerdict.STRICT_PASS
          and stats.min_stubborn_degree > 0 and stats.min_cross_degree > 0):
        b1 = min_eigenvalue_lower_bound(
            stats.min_stubborn_degree, stats.min_cross_degree, cfg.theta
        )
    else:
        b1 = math.nan  # eigenvalue bound needs positive community degrees
    system = system_matrix(graph, prof)
    lambda_min = min_eigenvalue_symmetric(system.m)
    print(f"lambda_min(M): {_fmt(lambda_min)}")
    print(f"b1: {_fmt(b1)}")

    x0 = _initial_opinions(cfg, part)
    x_direct = final_opinions_direct(system, prof, x0)
    x_iterative, iterations = final_opinions_iterative(
        graph, prof, x0, tol=cfg.tol, max_iters=cfg.max_iters
    )
    print("x_inf_direct: " + " ".join(_fmt(v) for v in x_direct))
    print(f"x_inf_iterative ({iterations} iterations): "
          + " ".join(_fmt(v) for v in x_iterative))
    print(f"direct_vs_iterative_max_gap: {_fmt(float(np.max(np.abs(x_direct - x_iterative))))}")
    _write_manifest(cfg, provenance, started, out_dir)
    return EXIT_OK


def _cmd_bounds(cfg: RunConfig, provenance: dict) -> int:
    started = time.perf_counter()
    out_dir = _ensure_out_dir(cfg)
    spec = SbmSpec(n=cfg.n, r_s=cfg.r_s, p_s=cfg.p_s, p_r=cfg.p_r, p_sr=cfg.p_sr)
    report = evaluate_bound_report(spec, cfg.theta, cfg.c1, cfg.c2)
    header = ["n", "theta", "b1", "sigma1", "eps_n", "eta_n", "eps_prime_n",
              "eps_bar_n", "q", "vacuous_eta"]
    row = [report.n, report.theta, report.b1, report.sigma1, report.eps_n,
           report.eta_n, report.eps_prime_n, report.eps_bar_n, report.q,
           report.vacuous_eta]
    _write_csv(out_dir / "bounds.csv", header, [row])
    for name, value in zip(header, row):
        print(f"{name}: {_fmt(value)}")
    _write_manifest(cfg, provenance, started, out_dir)
    return EXIT_OK


def _cmd_experiment(cfg: RunConfig, provenance: dict) -> int:
    started = time.perf_counter()
    out_dir = _ensure_out_dir(cfg)
    extra: dict[str, Any] = {}
    if cfg.experiment_kind == "scaling":
        result = experiment_scaling(
            cfg.n_grid, cfg.trials, cfg.seed,
            cfg.r_s, cfg.p_s, cfg.p_r, cfg.p_sr, cfg.theta, threads=cfg.threads,
        )
        _write_csv(
            out_dir / "scaling.csv",
            ["n", "trial", "seed", "dist", "failed"],
            [[r.n, r.trial, r.seed, r.dist, r.failed] for r in result.records],
        )
        _write_csv(
            out_dir / "scaling_agg.csv",
            ["n", "count", "median", "q95", "min", "max", "eps_bar_n"],
            [
                [int(row.key[0]), row.count, row.median, row.q95, row.dist_min,
                 row.dist_max, result.eps_bar_by_n[int(row.key[0])]]
                for row in result.aggregates
            ],
        )
        if result.slope_defined:
            print(f"loglog_slope: {_fmt(result.slope)}")
            print(f"loglog_intercept: {_fmt(result.intercept)}")
            extra["loglog_slope"] = result.slope
        else:
            print("loglog_slope: undefined (need >= 3 sizes with positive medians)")
        failed = sum(1 for r in result.records if r.failed)
        print(f"trials: {len(result.records)} total, {failed} failed")
    elif cfg.experiment_kind == "degree-sweep":
        triplets = [(a, b, c) for a in cfg.p_grid for b in cfg.p_grid for c in cfg.p_grid]
        result = experiment_degree_sweep(
            triplets, cfg.trials, cfg.seed, cfg.n, cfg.r_s, cfg.theta, threads=cfg.threads
        )
        _write_csv(
            out_dir / "degree_sweep_agg.csv",
            ["p_s", "p_r", "p_sr", "count", "median"],
            [[*row.key, row.count, row.median] for row in result.aggregates],
        )
        print(f"triplets: {len(result.aggregates)}, trials per triplet: {cfg.trials}")
    elif cfg.experiment_kind == "stubbornness-sweep":
        result = experiment_stubbornness_sweep(
            cfg.theta_grid, cfg.trials, cfg.seed, cfg.n, cfg.p, threads=cfg.threads
        )
        _write_csv(
            out_dir / "stub_sweep_agg.csv",
            ["theta", "count", "median", "q95", "min", "max"],
            [
                [row.key[0], row.count, row.median, row.q95, row.dist_min, row.dist_max]
                for row in result.aggregates
            ],
        )
        print(f"theta grid: {len(result.aggregates)} values, trials per value: {cfg.trials}")
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown experiment kind {cfg.experiment_kind!r}")
    _write_manifest(cfg, provenance, started, out_dir, extra)
    return EXIT_OK


def _cmd_validate(cfg: RunConfig, provenance: dict) -> int:
    started = time.perf_counter()
    out_dir = _ensure_out_dir(cfg)
    failures = 0

    def report(name: str, ok: bool, detail: str):
        nonlocal failures
        failures += 0 if ok else 1
        print(f"{name}: {'PASS' if ok else 'FAIL'} ({detail})")

    rng = np.random.default_rng(cfg.seed)

    # Deterministic eigenvalue bound on random strict-pass instances.
    worst = math.inf
    checked = 0
    while checked < 100:
        n = int(rng.integers(20, 201))
        spec = SbmSpec(
            n=n,
            r_s=float(rng.uniform(0.2, 0.8)),
            p_s=float(rng.uniform(0.2, 0.9)),
            p_r=float(rng.uniform(0.2, 0.9)),
            p_sr=float(rng.uniform(0.3, 0.9)),
        )
        theta = float(rng.uniform(0.1, 0.9))
        psi, part = sbm_probability_matrix(spec)
        prof = StubbornnessProfile(part, theta)
        graph = sample_graph(psi, int(rng.integers(0, 2**63)))
        if convergence_condition(graph, prof) is not ConvergenceVerdict.STRICT_PASS:
            continue
        checked += 1
        stats = realized_degree_stats(graph, part)
        b1 = min_eigenvalue_lower_bound(stats.min_stubborn_degree, stats.min_cross_degree, theta)
        worst = min(worst, min_eigenvalue_symmetric(system_matrix(graph, prof).m) - b1)
    report("eigenvalue-bound-certification", worst >= -1e-8,
           f"min margin {worst:.3e} over {checked} instances")

    # Degree-tail bounds, Monte-Carlo.
    spec = SbmSpec(n=200, r_s=0.5, p_s=0.4, p_r=0.4, p_sr=0.4)
    psi, part = sbm_probability_matrix(spec)
    stats = expected_degree_stats(psi, part)
    tails = degree_tail_bounds(part.n_s, part.n_r, stats.min_stubborn_degree, stats.min_cross_degree)
    samples = 2000
    hits_s = hits_rs = 0
    for trial in range(samples):
        graph = sample_graph(psi, stable_trial_seed(cfg.seed, "validate:degree-tails", trial))
        realized = realized_degree_stats(graph, part)
        hits_s += realized.min_stubborn_degree <= stats.min_stubborn_degree / 2
        hits_rs += realized.min_cross_degree <= stats.min_cross_degree / 2
    freq_s, freq_rs = hits_s / samples, hits_rs / samples
    report("degree-tail-bound", freq_s <= tails.p_s_tail and freq_rs <= tails.p_rs_tail,
           f"freq ({freq_s:.4f}, {freq_rs:.4f}) vs bound "
           f"({tails.p_s_tail:.4f}, {tails.p_rs_tail:.4f})")

    # Probabilistic eigenvalue threshold, Monte-Carlo.
    spec = SbmSpec(n=300, r_s=0.5, p_s=0.3, p_r=0.3, p_sr=0.3)
    psi, part = sbm_probability_matrix(spec)
    stats = expected_degree_stats(psi, part)
    threshold, sigma1 = eigenvalue_threshold_bound(stats, part.n_s, part.n_r, 0.5)
    prof = StubbornnessProfile(part, 0.5)
    samples = 500
    violations = 0
    for trial in range(samples):
        graph = sample_graph(psi, stable_trial_seed(cfg.seed, "validate:eigenvalue-threshold", trial))
        lam = min_eigenvalue_symmetric(system_matrix(graph, prof).m)
        violations += lam < threshold
    report("eigenvalue-threshold-bound", violations / samples <= max(sigma1, 0.0),
           f"{violations}/{samples} below threshold, failure bound {sigma1:.4f}")

    # Opinion-distance bound coverage at the scaling-sweep configuration.
    spec = SbmSpec(n=400, r_s=0.1, p_s=0.3, p_r=0.3, p_sr=0.5)
    psi, part = sbm_probability_matrix(spec)
    stats = expected_degree_stats(psi, part)
    t1 = mixed_population_distance_bound(stats, part.n_s, part.n_r, 0.5, cfg.c1, cfg.c2)
    p_bar = expected_influence_matrix(psi, part, 0.5)
    x0_norm = math.sqrt(part.n)
    trials = 200
    violations = 0
    observed = 0
    for trial in range(trials):
        record = run_trial(
            psi, part, 0.5,
            stable_trial_seed(cfg.seed, "validate:coverage", trial),
            p_bar=p_bar, config_id="validate:coverage", trial=trial,
        )
        if record.failed:
            continue
        observed += 1
        violations += record.dist > t1.eps_n * x0_norm
    report("distance-bound-coverage", violations == 0,
           f"{violations}/{observed} violations of eps_n * ||x0||")

    _write_manifest(cfg, provenance, started, out_dir,
                    {"failures": failures})
    return EXIT_OK if failures == 0 else EXIT_NUMERICAL


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fjlab",
        description="Friedkin-Johnsen opinion dynamics over Bernoulli random graphs",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p: argparse.ArgumentParser):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--out", help="output directory (default fjlab-out)")
        p.add_argument("--seed", type=int, help="base seed, unsigned 64-bit")
        p.add_argument("--threads", type=int,
                       help="parallel trial workers (fallback: FJLAB_THREADS, then all cores)")
        scale = p.add_mutually_exclusive_group()
        scale.add_argument("--desk", dest="paper_scale", action="store_const", const=False,
                           help="desk-scale preset grids and trial counts (default)")
        scale.add_argument("--paper-scale", dest="paper_scale", action="store_const", const=True,
                           help="full paper-scale preset grids and trial counts")
        p.set_defaults(paper_scale=None)
        p.add_argument("--preset", choices=["paper-fig1", "paper-fig2", "paper-fig3"])
        p.add_argument("--n", type=int)
        p.add_argument("--r-s", dest="r_s", type=float)
        p.add_argument("--p-s", dest="p_s", type=float)
        p.add_argument("--p-r", dest="p_r", type=float)
        p.add_argument("--p-sr", dest="p_sr", type=float)
        p.add_argument("--p", type=float)
        p.add_argument("--theta", type=float)
        p.add_argument("--trials", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--max-iters", dest="max_iters", type=int)
        p.add_argument("--c1", type=float)
        p.add_argument("--c2", type=float)
        p.add_argument("--x0")
        p.add_argument("--psi-file", dest="psi_file")
        p.add_argument("--n-grid", dest="n_grid", type=_parse_int_list)
        p.add_argument("--k-grid", dest="k_grid", type=_parse_float_list)
        p.add_argument("--theta-grid", dest="theta_grid", type=_parse_float_list)
        p.add_argument("--p-grid", dest="p_grid", type=_parse_float_list)

    add_common(sub.add_parser("simulate", help="one graph: final opinions and diagnostics"))
    add_common(sub.add_parser("bounds", help="evaluate the theoretical bounds"))
    exp = sub.add_parser("experiment", help="Monte-Carlo sweeps")
    exp.add_argument("kind", choices=["scaling", "degree-sweep", "stubbornness-sweep"])
    add_common(exp)
    add_common(sub.add_parser("validate", help="Monte-Carlo certification of the bounds"))
    return parser


_DISPATCH = {
    "simulate": _cmd_simulate,
    "bounds": _cmd_bounds,
    "experiment": _cmd_experiment,
    "validate": _cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg, provenance = parse_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _DISPATCH[cfg.subcommand](cfg, provenance)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HypothesisError as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # model preconditions hit at run time (zero degrees, shape mismatches)
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
