"""Monte-Carlo experiments on the distance between sampled and expected systems.

The experiment metric per trial is ``dist = ||P - P_bar||_2``: the operator
norm between the influence matrix of one sampled graph and that of the
expected graph, computed once per configuration and reused across trials.
Three sweeps are provided: network size (with a log-log slope fit against
the expected ~ n^{-1/2} decay), the block-probability triplet of a
two-community SBM, and the stubbornness level of an all-stubborn
population.

Per-trial seeds are derived as ``base_seed XOR sha256(group_key | trial)``,
so every record is reproducible in isolation and results do not depend on
execution order or thread count. Trials whose sampled graph misses the
strict convergence condition (or whose system matrix turns out singular)
are recorded as failed and excluded from aggregates; their count is data,
not noise, since the theory bounds exactly that failure probability.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .bounds import sbm_distance_bound
from .fj_core import (
    ConvergenceVerdict,
    SingularSystemError,
    StubbornnessProfile,
    convergence_condition,
    influence_matrix,
    system_matrix,
)
from .graph_model import (
    CommunityPartition,
    ProbabilityMatrix,
    SbmSpec,
    sample_graph,
    sbm_probability_matrix,
)
from .linalg_kernels import operator_two_norm

__all__ = [
    "TrialRecord",
    "AggregateRow",
    "SummaryStats",
    "ScalingResult",
    "SweepResult",
    "stable_trial_seed",
    "aggregate",
    "expected_influence_matrix",
    "run_trial",
    "experiment_scaling",
    "experiment_degree_sweep",
    "experiment_stubbornness_sweep",
    "fit_loglog_slope",
]

DIST_REL_TOL = 1e-6


@dataclass(frozen=True)
class TrialRecord:
    """One sampled graph: its seed, its distance, and whether it counted."""

    config_id: str
    trial: int
    seed: int
    n: int
    theta: float
    r_s: float
    p_s: float
    p_r: float
    p_sr: float
    dist: float
    strict_pass: bool
    failed: bool


@dataclass(frozen=True)
class AggregateRow:
    """Distance statistics for one group of trials (one n, triplet, or theta)."""

    key: tuple[float, ...]
    count: int
    median: float
    q95: float
    dist_min: float
    dist_max: float
    failed: int


class SummaryStats(NamedTuple):
    count: int
    median: float
    q95: float
    s_min: float
    s_max: float


@dataclass(frozen=True)
class ScalingResult:
    records: list[TrialRecord]
    aggregates: list[AggregateRow]
    eps_bar_by_n: dict[int, float]
    slope: float | None
    intercept: float | None

    @property
    def slope_defined(self) -> bool:
        return self.slope is not None


@dataclass(frozen=True)
class SweepResult:
    records: list[TrialRecord]
    aggregates: list[AggregateRow]


def stable_trial_seed(base_seed: int, group_key: str, trial: int) -> int:
    """Schedule-independent 64-bit seed for one (group, trial) pair."""
    digest = hashlib.sha256(f"{group_key}|{trial}".encode()).digest()
    return (int(base_seed) ^ int.from_bytes(digest[:8], "little")) & (2**64 - 1)


def aggregate(samples: Sequence[float]) -> SummaryStats:
    """Median (midpoint convention), nearest-rank 0.95-quantile, min, max."""
    if len(samples) == 0:
        raise ValueError("cannot aggregate an empty sample list")
    ordered = np.sort(np.asarray(samples, dtype=float))
    rank = max(1, math.ceil(0.95 * ordered.size))  # nearest-rank quantile
    return SummaryStats(
        count=int(ordered.size),
        median=float(np.median(ordered)),
        q95=float(ordered[rank - 1]),
        s_min=float(ordered[0]),
        s_max=float(ordered[-1]),
    )


def expected_influence_matrix(
    psi: ProbabilityMatrix, part: CommunityPartition, theta: float
) -> np.ndarray:
    """Influence matrix of the expected graph (shared across a configuration)."""
    prof = StubbornnessProfile(part, theta)
    return influence_matrix(system_matrix(psi, prof), prof).p


def run_trial(
    psi: ProbabilityMatrix,
    part: CommunityPartition,
    theta: float,
    seed: int,
    p_bar: np.ndarray | None = None,
    config_id: str = "",
    trial: int = 0,
    sbm: SbmSpec | None = None,
) -> TrialRecord:
    """Sample one graph and measure its distance to the expected system.

    ``p_bar`` is the cached expected influence matrix; it is computed on
    the fly when omitted. Trials that miss the strict convergence
    condition, or whose system matrix is singular, come back with
    ``failed=True`` and a NaN distance instead of raising.
    """
    if p_bar is None:
        p_bar = expected_influence_matrix(psi, part, theta)
    if sbm is not None:
        r_s, p_s, p_r, p_sr = sbm.r_s, sbm.p_s, sbm.p_r, sbm.p_sr
    else:
        r_s, p_s, p_r, p_sr = part.n_s / part.n, math.nan, math.nan, math.nan
    prof = StubbornnessProfile(part, theta)
    graph = sample_graph(psi, seed)
    verdict = convergence_condition(graph, prof)
    strict = verdict is ConvergenceVerdict.STRICT_PASS
    dist = math.nan
    failed = not strict
    if strict:
        try:
            p = influence_matrix(system_matrix(graph, prof), prof).p
            dist = operator_two_norm(p - p_bar, DIST_REL_TOL)
        except SingularSystemError:
            failed = True
            dist = math.nan
    return TrialRecord(
        config_id=config_id,
        trial=trial,
        seed=seed,
        n=part.n,
        theta=theta,
        r_s=r_s,
        p_s=p_s,
        p_r=p_r,
        p_sr=p_sr,
        dist=dist,
        strict_pass=strict,
        failed=failed,
    )


def _run_group(
    spec: SbmSpec,
    theta: float,
    trials: int,
    base_seed: int,
    config_id: str,
    threads: int,
) -> list[TrialRecord]:
    psi, part = sbm_probability_matrix(spec)
    p_bar = expected_influence_matrix(psi, part, theta)

    def one(trial: int) -> TrialRecord:
        seed = stable_trial_seed(base_seed, config_id, trial)
        return run_trial(
            psi, part, theta, seed, p_bar=p_bar, config_id=config_id, trial=trial, sbm=spec
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, range(trials)))
    return [one(trial) for trial in range(trials)]


def _aggregate_records(records: Iterable[TrialRecord], key: tuple[float, ...]) -> AggregateRow:
    dists = [r.dist for r in records if not r.failed]
    failed = sum(1 for r in records if r.failed)
    if not dists:
        return AggregateRow(key, 0, math.nan, math.nan, math.nan, math.nan, failed)
    stats = aggregate(dists)
    return AggregateRow(
        key, stats.count, stats.median, stats.q95, stats.s_min, stats.s_max, failed
    )


def experiment_scaling(
    ns: Sequence[int],
    trials: int,
    base_seed: int,
    r_s: float,
    p_s: float,
    p_r: float,
    p_sr: float,
    theta: float,
    threads: int = 1,
) -> ScalingResult:
    """Distance-vs-network-size sweep with the SBM distance bound overlaid.

    Runs ``trials`` sampled graphs per network size, aggregates the
    distances per size, attaches the theoretical eps_bar for comparison,
    and fits the log-log slope of the medians (left undefined when fewer
    than three sizes have positive medians).
    """
    if len(ns) == 0:
        raise ValueError("the network-size grid must be nonempty")
    records: list[TrialRecord] = []
    aggregates: list[AggregateRow] = []
    eps_bar_by_n: dict[int, float] = {}
    for n in ns:
        spec = SbmSpec(n=int(n), r_s=r_s, p_s=p_s, p_r=p_r, p_sr=p_sr)
        config_id = f"scaling:n={int(n)}"
        group = _run_group(spec, theta, trials, base_seed, config_id, threads)
        records.extend(group)
        aggregates.append(_aggregate_records(group, (float(n),)))
        eps_bar_by_n[int(n)] = sbm_distance_bound(spec, theta, int(n)).eps_bar_n
    slope = intercept = None
    medians = {row.key[0]: row.median for row in aggregates if row.count > 0}
    if len(medians) >= 3 and all(m > 0 for m in medians.values()):
        slope, intercept = fit_loglog_slope(medians)
    return ScalingResult(records, aggregates, eps_bar_by_n, slope, intercept)


def experiment_degree_sweep(
    triplets: Sequence[tuple[float, float, float]],
    trials: int,
    base_seed: int,
    n: int,
    r_s: float,
    theta: float,
    threads: int = 1,
) -> SweepResult:
    """Distance sweep over (p_s, p_r, p_sr) block-probability triplets."""
    records: list[TrialRecord] = []
    aggregates: list[AggregateRow] = []
    for p_s, p_r, p_sr in triplets:
        for name, p in (("p_s", p_s), ("p_r", p_r), ("p_sr", p_sr)):
            if not 0.0 < p < 1.0:
                raise ValueError(
                    f"{name}={p} outside (0, 1); p_sr = 0 in particular leaves "
                    "non-stubborn agents with no stubborn link probability"
                )
        spec = SbmSpec(n=n, r_s=r_s, p_s=p_s, p_r=p_r, p_sr=p_sr)
        config_id = f"degree:ps={p_s}:pr={p_r}:psr={p_sr}"
        group = _run_group(spec, theta, trials, base_seed, config_id, threads)
        records.extend(group)
        aggregates.append(_aggregate_records(group, (p_s, p_r, p_sr)))
    return SweepResult(records, aggregates)


def experiment_stubbornness_sweep(
    thetas: Sequence[float],
    trials: int,
    base_seed: int,
    n: int,
    p: float,
    r_s: float = 1.0,
    threads: int = 1,
) -> SweepResult:
    """Distance sweep over stubbornness levels for an all-stubborn population."""
    if r_s != 1.0:
        raise ValueError(f"the stubbornness sweep requires r_s = 1, got {r_s}")
    records: list[TrialRecord] = []
    aggregates: list[AggregateRow] = []
    for theta in thetas:
        spec = SbmSpec(n=n, r_s=1.0, p_s=p, p_r=p, p_sr=p)
        config_id = f"stub:theta={theta}"
        group = _run_group(spec, theta, trials, base_seed, config_id, threads)
        records.extend(group)
        aggregates.append(_aggregate_records(group, (theta,)))
    return SweepResult(records, aggregates)


def fit_loglog_slope(medians_by_n: dict[float, float]) -> tuple[float, float]:
    """Least-squares line through (log n, log median)."""
    if len(medians_by_n) < 3:
        raise ValueError(f"need at least 3 distinct sizes, got {len(medians_by_n)}")
    ns = np.array(sorted(medians_by_n))
    medians = np.array([medians_by_n[n] for n in ns])
    if np.any(medians <= 0) or np.any(np.isnan(medians)):
        raise ValueError("all medians must be positive for a log-log fit")
    slope, intercept = np.polyfit(np.log(ns), np.log(medians), deg=1)
    return float(slope), float(intercept)
