"""Bernoulli random graphs over a symmetric link-probability matrix.

A network of ``n`` agents is described by a symmetric probability matrix
``psi`` with zero diagonal: each unordered pair {i, j} is linked
independently with probability ``psi[i, j]``. Agents are split into a
stubborn community (indices ``0 .. n_s-1``) and a non-stubborn community
(the rest); the degree statistics of both the expected graph and sampled
realizations, taken per community, drive every bound evaluator in
:mod:`fjlab.bounds`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ProbabilityMatrix",
    "SbmSpec",
    "CommunityPartition",
    "RealizedGraph",
    "ExpectedDegreeStats",
    "RealizedDegreeStats",
    "AssumptionReport",
    "sbm_probability_matrix",
    "sample_graph",
    "expected_degree_stats",
    "realized_degree_stats",
    "check_assumptions",
]


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ProbabilityMatrix:
    """Symmetric link-probability matrix with zero diagonal."""

    psi: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=float)
        if psi.ndim != 2 or psi.shape[0] != psi.shape[1]:
            raise ValueError(f"psi must be square, got shape {psi.shape}")
        if not np.array_equal(psi, psi.T):
            raise ValueError("psi must be symmetric")
        if np.any(np.diagonal(psi) != 0.0):
            raise ValueError("psi must have a zero diagonal (no self-loops)")
        if psi.min(initial=0.0) < 0.0 or psi.max(initial=0.0) > 1.0:
            raise ValueError("psi entries must lie in [0, 1]")
        object.__setattr__(self, "psi", _freeze(psi.copy()))

    @property
    def n(self) -> int:
        return self.psi.shape[0]


@dataclass(frozen=True)
class CommunityPartition:
    """Stubborn agents are indices 0..n_s-1, non-stubborn are n_s..n-1."""

    n_s: int
    n_r: int

    def __post_init__(self):
        if self.n_s < 0 or self.n_r < 0 or self.n_s + self.n_r < 1:
            raise ValueError(f"invalid partition sizes ({self.n_s}, {self.n_r})")

    @property
    def n(self) -> int:
        return self.n_s + self.n_r


@dataclass(frozen=True)
class SbmSpec:
    """Two-community stochastic block model: stubborn block first.

    ``r_s`` is the stubborn ratio; the stubborn count is ``r_s * n``
    rounded half-up, at least 1. Block probabilities may sit on the
    [0, 1] boundary (a unit probability gives a deterministic edge);
    the SBM concentration bound additionally needs them strictly inside
    (0, 1) and checks that itself.
    """

    n: int
    r_s: float
    p_s: float
    p_r: float
    p_sr: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0.0 < self.r_s <= 1.0:
            raise ValueError(f"r_s must lie in (0, 1], got {self.r_s}")
        for name in ("p_s", "p_r", "p_sr"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")

    @property
    def n_s(self) -> int:
        return min(self.n, max(1, math.floor(self.r_s * self.n + 0.5)))

    @property
    def n_r(self) -> int:
        return self.n - self.n_s

    def partition(self) -> CommunityPartition:
        return CommunityPartition(self.n_s, self.n_r)


@dataclass(frozen=True)
class RealizedGraph:
    """A sampled 0/1 adjacency matrix with its degree vector."""

    adj: np.ndarray
    degrees: np.ndarray = field(init=False)

    def __post_init__(self):
        adj = np.asarray(self.adj, dtype=float)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {adj.shape}")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diagonal(adj) != 0.0):
            raise ValueError("adjacency must have a zero diagonal")
        if not np.all((adj == 0.0) | (adj == 1.0)):
            raise ValueError("adjacency entries must be 0 or 1")
        object.__setattr__(self, "adj", _freeze(adj.copy()))
        object.__setattr__(self, "degrees", _freeze(adj.sum(axis=1)))

    @property
    def n(self) -> int:
        return self.adj.shape[0]


@dataclass(frozen=True)
class ExpectedDegreeStats:
    """Community-wise extremes of expected degrees.

    When there are no non-stubborn agents the cross-community fields are
    empty-set sentinels (min over the empty set is +inf, max is -inf) and
    ``has_nonstubborn`` is False; callers must then use the all-stubborn
    bound path instead of these fields.
    """

    min_stubborn_degree: float
    min_cross_degree: float
    max_stubborn_degree: float
    max_cross_degree: float
    max_nonstubborn_degree: float
    max_degree: float
    has_nonstubborn: bool


@dataclass(frozen=True)
class RealizedDegreeStats:
    """Realized-degree extremes plus the per-agent stubborn/non-stubborn split.

    ``stubborn_degrees[i]`` counts agent i's stubborn neighbors and
    ``nonstubborn_degrees[i]`` the rest, so the two always sum to
    ``degrees``. ``min_stubborn_degree`` is the minimum total degree over
    stubborn agents; ``min_cross_degree`` the minimum stubborn-neighbor
    count over non-stubborn agents (+inf when there are none).
    """

    min_stubborn_degree: float
    min_cross_degree: float
    stubborn_degrees: np.ndarray
    nonstubborn_degrees: np.ndarray
    degrees: np.ndarray
    has_nonstubborn: bool


@dataclass(frozen=True)
class AssumptionReport:
    """Outcome of the well-connectedness and coverage checks.

    ``stubborn_degree_ok``: min expected stubborn-community degree is at
    least ``c2 * log n``. ``cross_degree_ok``: min expected stubborn degree
    of non-stubborn agents is at least ``c1 * log n`` (vacuously true with
    no non-stubborn agents). ``coverage_ok``: every non-stubborn agent has
    positive link probability to some stubborn agent; violators are listed
    in ``coverage_offenders``.
    """

    stubborn_degree_ok: bool
    cross_degree_ok: bool
    coverage_ok: bool
    coverage_offenders: tuple[int, ...]
    min_stubborn_degree: float
    min_cross_degree: float
    stubborn_threshold: float
    cross_threshold: float

    @property
    def all_ok(self) -> bool:
        return self.stubborn_degree_ok and self.cross_degree_ok and self.coverage_ok


def sbm_probability_matrix(spec: SbmSpec) -> tuple[ProbabilityMatrix, CommunityPartition]:
    """Build the block-constant probability matrix for a two-community SBM."""
    part = spec.partition()
    psi = np.empty((spec.n, spec.n))
    s = slice(0, part.n_s)
    r = slice(part.n_s, spec.n)
    psi[s, s] = spec.p_s
    psi[r, r] = spec.p_r
    psi[s, r] = spec.p_sr
    psi[r, s] = spec.p_sr
    np.fill_diagonal(psi, 0.0)
    return ProbabilityMatrix(psi), part


def sample_graph(psi: ProbabilityMatrix, seed: int) -> RealizedGraph:
    """Sample one realization of the Bernoulli random graph.

    Each unordered pair {i, j} with i < j consumes the variate at its fixed
    row-major upper-triangle position of a Philox stream keyed by ``seed``,
    so the draw for a pair is a pure function of (seed, n, i, j) and two
    calls with the same seed and matrix are bit-identical.
    """
    n = psi.n
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    iu = np.triu_indices(n, k=1)
    draws = rng.random(iu[0].size)
    adj = np.zeros((n, n))
    adj[iu] = (draws < psi.psi[iu]).astype(float)
    return RealizedGraph(adj + adj.T)


def expected_degree_stats(psi: ProbabilityMatrix, part: CommunityPartition) -> ExpectedDegreeStats:
    """Community-wise expected-degree extremes of the expected graph."""
    if part.n != psi.n:
        raise ValueError(f"partition covers {part.n} agents but psi has {psi.n}")
    if part.n_s < 1:
        raise ValueError("at least one stubborn agent is required")
    row_sums = psi.psi.sum(axis=1)
    stubborn = row_sums[: part.n_s]
    min_stubborn_degree = float(stubborn.min())
    max_stubborn_degree = float(stubborn.max())
    if part.n_r > 0:
        cross = psi.psi[part.n_s :, : part.n_s].sum(axis=1)
        min_cross_degree = float(cross.min())
        max_cross_degree = float(cross.max())
        max_nonstubborn_degree = float(row_sums[part.n_s :].max())
        return ExpectedDegreeStats(
            min_stubborn_degree=min_stubborn_degree,
            min_cross_degree=min_cross_degree,
            max_stubborn_degree=max_stubborn_degree,
            max_cross_degree=max_cross_degree,
            max_nonstubborn_degree=max_nonstubborn_degree,
            max_degree=max(max_nonstubborn_degree, max_stubborn_degree),
            has_nonstubborn=True,
        )
    return ExpectedDegreeStats(
        min_stubborn_degree=min_stubborn_degree,
        min_cross_degree=math.inf,
        max_stubborn_degree=max_stubborn_degree,
        max_cross_degree=-math.inf,
        max_nonstubborn_degree=-math.inf,
        max_degree=max_stubborn_degree,
        has_nonstubborn=False,
    )


def realized_degree_stats(g: RealizedGraph, part: CommunityPartition) -> RealizedDegreeStats:
    """Realized-degree extremes for a sampled graph under a partition."""
    if part.n != g.n:
        raise ValueError(f"partition covers {part.n} agents but graph has {g.n}")
    if part.n_s < 1:
        raise ValueError("at least one stubborn agent is required")
    stubborn_degrees = g.adj[:, : part.n_s].sum(axis=1)
    nonstubborn_degrees = g.degrees - stubborn_degrees
    min_stubborn_degree = float(g.degrees[: part.n_s].min())
    min_cross_degree = float(stubborn_degrees[part.n_s :].min()) if part.n_r > 0 else math.inf
    return RealizedDegreeStats(
        min_stubborn_degree=min_stubborn_degree,
        min_cross_degree=min_cross_degree,
        stubborn_degrees=_freeze(stubborn_degrees),
        nonstubborn_degrees=_freeze(nonstubborn_degrees),
        degrees=g.degrees,
        has_nonstubborn=part.n_r > 0,
    )


def check_assumptions(
    psi: ProbabilityMatrix, part: CommunityPartition, c1: float, c2: float
) -> AssumptionReport:
    """Check the expected-degree growth and stubborn-coverage hypotheses.

    The degree hypotheses compare the community-wise minimum expected
    degrees against ``c1 * log n`` and ``c2 * log n`` (natural log); both
    constants must exceed 8 for the tail probabilities behind them to decay.
    """
    if c1 <= 8 or c2 <= 8:
        raise ValueError(f"constants must exceed 8, got c1={c1}, c2={c2}")
    stats = expected_degree_stats(psi, part)
    log_n = math.log(part.n)
    cross_threshold = c1 * log_n
    stubborn_threshold = c2 * log_n
    if part.n_r > 0:
        offenders = tuple(
            int(i)
            for i in range(part.n_s, part.n)
            if not np.any(psi.psi[i, : part.n_s] > 0.0)
        )
        cross_ok = stats.min_cross_degree >= cross_threshold
    else:
        offenders = ()
        cross_ok = True
    return AssumptionReport(
        stubborn_degree_ok=stats.min_stubborn_degree >= stubborn_threshold,
        cross_degree_ok=cross_ok,
        coverage_ok=not offenders,
        coverage_offenders=offenders,
        min_stubborn_degree=stats.min_stubborn_degree,
        min_cross_degree=stats.min_cross_degree,
        stubborn_threshold=stubborn_threshold,
        cross_threshold=cross_threshold,
    )
