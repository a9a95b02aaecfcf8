"""Evaluators for the concentration bounds of the random-graph opinion system.

Everything here is a pure closed-form function of degree statistics and
the stubbornness level: the deterministic lower bound on the minimum
eigenvalue of the system matrix, the degree tail probabilities, the
probabilistic eigenvalue threshold, the opinion-distance bounds for the
mixed and all-stubborn populations, the SBM specialization, and the
generic Bernstein / Chernoff tails they are built from.

Natural logarithms throughout. Probability bounds are *not* clamped to
[0, 1]: values at or above one are reported as-is together with a vacuous
flag, because at desk-scale network sizes several of them genuinely carry
no information and hiding that would misrepresent the theory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .graph_model import (
    ExpectedDegreeStats,
    SbmSpec,
    expected_degree_stats,
    sbm_probability_matrix,
)

__all__ = [
    "HypothesisError",
    "DegreeTails",
    "MixedPopulationBound",
    "AllStubbornBound",
    "SbmDistanceBound",
    "BoundReport",
    "min_eigenvalue_lower_bound",
    "all_stubborn_eigenvalue_bound",
    "degree_tail_bounds",
    "eigenvalue_threshold_bound",
    "mixed_population_distance_bound",
    "all_stubborn_distance_bound",
    "sbm_distance_bound",
    "bernstein_tail",
    "chernoff_tail",
    "evaluate_bound_report",
]

# Stubbornness guard for the evaluators: (1-theta)^{-2} terms overflow the
# useful range outside this window. The dynamics itself only needs (0, 1).
THETA_BOUND_MIN = 1e-6
THETA_BOUND_MAX = 1.0 - 1e-6


class HypothesisError(ValueError):
    """A bound was requested outside the hypotheses it was proved under."""


def _check_theta(theta: float) -> float:
    if not THETA_BOUND_MIN <= theta <= THETA_BOUND_MAX:
        raise ValueError(
            f"theta={theta} outside [{THETA_BOUND_MIN}, {THETA_BOUND_MAX}]; "
            "bound evaluators reject near-boundary stubbornness"
        )
    return float(theta)


def min_eigenvalue_lower_bound(
    min_stubborn_degree: float, min_cross_degree: float, theta: float
) -> float:
    """Deterministic lower bound on the minimum eigenvalue of M.

    Takes the minimum degree of stubborn agents and the minimum stubborn
    degree of non-stubborn agents (realized or expected, the formula is the
    same); both must be positive, i.e. every non-stubborn agent touches the
    stubborn community.
    """
    theta = _check_theta(theta)
    if min_stubborn_degree <= 0 or min_cross_degree <= 0:
        raise ValueError(
            f"degrees must be positive (got {min_stubborn_degree}, {min_cross_degree}); "
            "the bound needs every non-stubborn agent adjacent to a stubborn one"
        )
    return (
        theta * min_stubborn_degree * min_cross_degree
        / (min_stubborn_degree + (1.0 - theta) * min_cross_degree)
    )


def all_stubborn_eigenvalue_bound(d_min: float, theta: float) -> float:
    """Gershgorin lower bound theta * d_min / (1 - theta) when everyone is stubborn."""
    theta = _check_theta(theta)
    if d_min <= 0:
        raise ValueError(f"d_min must be positive, got {d_min}")
    return theta * d_min / (1.0 - theta)


class DegreeTails(NamedTuple):
    """Union-bound tails for the two community-wise minimum degrees."""

    p_s_tail: float
    p_rs_tail: float

    @property
    def vacuous_s(self) -> bool:
        return self.p_s_tail >= 1.0

    @property
    def vacuous_rs(self) -> bool:
        return self.p_rs_tail >= 1.0


def degree_tail_bounds(
    n_s: int, n_r: int, min_stubborn_degree: float, min_cross_degree: float
) -> DegreeTails:
    """Probability that either realized minimum degree falls to half its expectation.

    Inputs are the *expected* minimum degrees of the two communities; the
    returned tails bound the probability of the realized stubborn minimum
    degree (resp. the realized minimum stubborn degree of non-stubborn
    agents) dropping to half that value. Chernoff plus a union bound:
    ``n_s * exp(-d/8)`` per community. Values >= 1 are returned as-is
    (check the ``vacuous_*`` flags).
    """
    if n_s < 0 or n_r < 0 or min_stubborn_degree < 0 or min_cross_degree < 0:
        raise ValueError("counts and expected degrees must be nonnegative")
    return DegreeTails(
        p_s_tail=n_s * math.exp(-min_stubborn_degree / 8.0),
        p_rs_tail=n_r * math.exp(-min_cross_degree / 8.0),
    )


def eigenvalue_threshold_bound(
    stats: ExpectedDegreeStats, n_s: int, n_r: int, theta: float
) -> tuple[float, float]:
    """Probabilistic eigenvalue threshold for M and its failure probability.

    Returns ``(threshold, sigma1)``: with ``ds, dc`` the minimum expected
    stubborn/cross degrees, the minimum eigenvalue of M is at least
    ``threshold = theta * (ds * dc / 2) / (ds + (1-theta) * dc)`` with
    probability above ``1 - sigma1``, where ``sigma1`` is the sum of the
    two degree tails. The threshold equals the deterministic bound
    evaluated at the halved expected degrees.
    """
    theta = _check_theta(theta)
    if not stats.has_nonstubborn or n_r < 1:
        raise ValueError("threshold needs a non-stubborn community; use the all-stubborn path")
    if stats.min_stubborn_degree <= 0 or stats.min_cross_degree <= 0:
        raise ValueError("expected degrees must be positive")
    threshold = (
        theta
        * (stats.min_stubborn_degree * stats.min_cross_degree / 2.0)
        / (stats.min_stubborn_degree + (1.0 - theta) * stats.min_cross_degree)
    )
    tails = degree_tail_bounds(n_s, n_r, stats.min_stubborn_degree, stats.min_cross_degree)
    return threshold, tails.p_s_tail + tails.p_rs_tail


class MixedPopulationBound(NamedTuple):
    """Opinion-distance bound for a mixed stubborn/non-stubborn population."""

    eps_n: float
    eta_n: float
    q: float

    @property
    def vacuous_eta(self) -> bool:
        return self.eta_n >= 1.0


def mixed_population_distance_bound(
    stats: ExpectedDegreeStats,
    n_s: int,
    n_r: int,
    theta: float,
    c1: float,
    c2: float,
) -> MixedPopulationBound:
    """Distance bound eps_n, failure probability eta_n and decay exponent q.

    The final-opinion distance between the sampled and expected systems is
    below ``eps_n * ||x(0)||`` with probability above ``1 - eta_n``. With
    ``ds, dc`` the minimum expected stubborn/cross degrees and ``Ds, D``
    the maximum expected stubborn/overall degrees:

        eps_n = 6/(1-theta) * K * sqrt(Ds log n)
              + 4(2-theta)/(theta (1-theta)^2) * K^2 * sqrt(D log n) * Ds,
        K = 1/dc + (1-theta)/ds,
        eta_n = n_s e^{-ds/8} + n_r e^{-dc/8} + 2 n_s n^{-3/2} + 2 n^{-1/5},
        q = min{min(c1, c2)/8 - 1, 1/5}.

    Requires the maximum expected stubborn degree to be at least log n;
    eta_n above one is returned as-is with the vacuous flag set.
    """
    theta = _check_theta(theta)
    if c1 <= 8 or c2 <= 8:
        raise ValueError(f"constants must exceed 8, got c1={c1}, c2={c2}")
    if not stats.has_nonstubborn or n_r < 1:
        raise ValueError("mixed-population bound needs non-stubborn agents; "
                         "use the all-stubborn bound instead")
    if stats.min_stubborn_degree <= 0 or stats.min_cross_degree <= 0:
        raise ValueError("expected degrees must be positive")
    n = n_s + n_r
    log_n = math.log(n)
    if stats.max_stubborn_degree < log_n:
        raise HypothesisError(
            f"max expected stubborn degree {stats.max_stubborn_degree:.4g} is below "
            f"log n = {log_n:.4g}; the distance bound is proved only above it"
        )
    coupling = 1.0 / stats.min_cross_degree + (1.0 - theta) / stats.min_stubborn_degree
    eps_n = (
        6.0 / (1.0 - theta) * coupling * math.sqrt(stats.max_stubborn_degree * log_n)
        + 4.0
        * (2.0 - theta)
        / (theta * (1.0 - theta) ** 2)
        * coupling**2
        * math.sqrt(stats.max_degree * log_n)
        * stats.max_stubborn_degree
    )
    tails = degree_tail_bounds(n_s, n_r, stats.min_stubborn_degree, stats.min_cross_degree)
    eta_n = (
        tails.p_s_tail
        + tails.p_rs_tail
        + 2.0 * n_s * n ** (-1.5)
        + 2.0 * n ** (-0.2)
    )
    q = min(min(c1, c2) / 8.0 - 1.0, 0.2)
    return MixedPopulationBound(eps_n=eps_n, eta_n=eta_n, q=q)


class AllStubbornBound(NamedTuple):
    """Opinion-distance bound for an all-stubborn population."""

    eps_prime_n: float
    q: float


def all_stubborn_distance_bound(
    delta: float, max_degree: float, theta: float, n: float, c2: float
) -> AllStubbornBound:
    """All-stubborn distance bound and decay exponent.

        eps'_n = 6 sqrt(Delta log n) / delta
               + 4 (2-theta) sqrt(Delta log n) Delta / (theta delta^2),
        q = min{c2/8 - 1, 1/5}.

    Monotonically decreasing in theta; the theta -> 1 limit is the first
    term plus 4 sqrt(Delta log n) Delta / delta^2, not zero.
    """
    theta = _check_theta(theta)
    if c2 <= 8:
        raise ValueError(f"c2 must exceed 8, got {c2}")
    if delta <= 0 or max_degree <= 0:
        raise ValueError("expected degrees must be positive")
    if n < 1:
        raise ValueError("n must be at least 1")
    root = math.sqrt(max_degree * math.log(n))
    eps_prime = 6.0 * root / delta + 4.0 * (2.0 - theta) * root * max_degree / (theta * delta**2)
    return AllStubbornBound(eps_prime_n=eps_prime, q=min(c2 / 8.0 - 1.0, 0.2))


class SbmDistanceBound(NamedTuple):
    """SBM specialization of the mixed-population distance bound.

    The density coefficients are the per-agent limits of the expected
    degrees: ``cross_density`` is the expected stubborn-degree share of a
    non-stubborn agent, ``stubborn_density`` the expected-degree share of a
    stubborn agent, ``nonstubborn_density`` that of a non-stubborn agent.
    """

    eps_bar_n: float
    cross_density: float
    stubborn_density: float
    nonstubborn_density: float


def sbm_distance_bound(spec: SbmSpec, theta: float, n: int) -> SbmDistanceBound:
    """Distance bound for the two-community SBM, of order sqrt(log n / n).

    With c = r_s p_sr, s = r_s p_s + (1-r_s) p_sr and
    r = r_s p_sr + (1-r_s) p_r:

        eps_bar_n = [ 6/(1-theta) * B
                    + 4(2-theta)/(theta (1-theta)^2) * B^2 * sqrt(max{s, r}) ]
                    * sqrt(log n / n),
        B = sqrt(s)/c + (1-theta)/sqrt(s).

    Requires both communities present (0 < r_s < 1) and block probabilities
    strictly inside (0, 1).
    """
    theta = _check_theta(theta)
    if not 0.0 < spec.r_s < 1.0:
        raise ValueError(
            f"the SBM bound assumes both communities present, got r_s={spec.r_s}"
        )
    for name in ("p_s", "p_r", "p_sr"):
        p = getattr(spec, name)
        if not 0.0 < p < 1.0:
            raise ValueError(f"the SBM bound needs {name} strictly inside (0, 1), got {p}")
    if n < 2:
        raise ValueError("n must be at least 2")
    cross = spec.r_s * spec.p_sr
    stubborn = spec.r_s * spec.p_s + (1.0 - spec.r_s) * spec.p_sr
    nonstubborn = spec.r_s * spec.p_sr + (1.0 - spec.r_s) * spec.p_r
    coupling = math.sqrt(stubborn) / cross + (1.0 - theta) / math.sqrt(stubborn)
    scale = math.sqrt(math.log(n) / n)
    eps_bar = (
        6.0 / (1.0 - theta) * coupling
        + 4.0 * (2.0 - theta) / (theta * (1.0 - theta) ** 2)
        * coupling**2
        * math.sqrt(max(stubborn, nonstubborn))
    ) * scale
    return SbmDistanceBound(
        eps_bar_n=eps_bar,
        cross_density=cross,
        stubborn_density=stubborn,
        nonstubborn_density=nonstubborn,
    )


def bernstein_tail(sigma_sq: float, u: float, dim_n: int, a: float) -> float:
    """Matrix Bernstein tail 2 n exp(-(a^2/2) / (sigma^2 + U a / 3)).

    Bounds the probability that the norm of a sum of independent zero-mean
    matrices (each of norm at most U, variance parameter sigma^2, dimension
    n) exceeds ``a``. The a -> 0 limit 2n is returned at a = 0.
    """
    if sigma_sq < 0 or u < 0 or dim_n < 0 or a < 0:
        raise ValueError("all arguments must be nonnegative")
    denominator = sigma_sq + u * a / 3.0
    if denominator == 0.0:
        return 0.0 if a > 0 else 2.0 * dim_n
    return 2.0 * dim_n * math.exp(-(a * a / 2.0) / denominator)


def chernoff_tail(mu: float, delta_frac: float) -> float:
    """Chernoff lower-tail bound exp(-mu delta^2 / 2) on P(X <= (1-delta) mu)."""
    if mu < 0:
        raise ValueError(f"mu must be nonnegative, got {mu}")
    if not 0.0 < delta_frac < 1.0:
        raise ValueError(f"delta_frac must lie in (0, 1), got {delta_frac}")
    return math.exp(-mu * delta_frac * delta_frac / 2.0)


@dataclass(frozen=True)
class BoundReport:
    """Every theoretical quantity evaluated for one SBM configuration.

    Fields that do not apply to the configuration are NaN: the mixed-
    population quantities (eps_n, eta_n, eps_bar_n) need non-stubborn
    agents, the all-stubborn bound (eps_prime_n) needs r_s = 1. ``b1`` is
    the deterministic eigenvalue bound of the *expected* system matrix
    (the Gershgorin variant when everyone is stubborn);
    ``lambda_threshold`` is its probabilistic counterpart holding with
    probability above 1 - sigma1.
    """

    n: int
    theta: float
    b1: float
    lambda_threshold: float
    sigma1: float
    eps_n: float
    eta_n: float
    eps_prime_n: float
    eps_bar_n: float
    q: float

    @property
    def vacuous_eta(self) -> bool:
        return bool(self.eta_n >= 1.0)

    @property
    def vacuous_sigma1(self) -> bool:
        return bool(self.sigma1 >= 1.0)


def evaluate_bound_report(spec: SbmSpec, theta: float, c1: float, c2: float) -> BoundReport:
    """Assemble the full bound report for an SBM configuration.

    Routes automatically between the mixed-population bounds (both
    communities present) and the all-stubborn ones (r_s = 1). Raises
    :class:`HypothesisError` if the mixed bound is requested where its
    degree hypothesis fails.
    """
    psi, part = sbm_probability_matrix(spec)
    stats = expected_degree_stats(psi, part)
    if part.n_r > 0:
        b1 = min_eigenvalue_lower_bound(
            stats.min_stubborn_degree, stats.min_cross_degree, theta
        )
        threshold, sigma1 = eigenvalue_threshold_bound(stats, part.n_s, part.n_r, theta)
        t1 = mixed_population_distance_bound(stats, part.n_s, part.n_r, theta, c1, c2)
        eps_bar = sbm_distance_bound(spec, theta, spec.n).eps_bar_n
        return BoundReport(
            n=spec.n,
            theta=theta,
            b1=b1,
            lambda_threshold=threshold,
            sigma1=sigma1,
            eps_n=t1.eps_n,
            eta_n=t1.eta_n,
            eps_prime_n=math.nan,
            eps_bar_n=eps_bar,
            q=t1.q,
        )
    b1 = all_stubborn_eigenvalue_bound(stats.min_stubborn_degree, theta)
    tails = degree_tail_bounds(part.n_s, 0, stats.min_stubborn_degree, math.inf)
    t2 = all_stubborn_distance_bound(
        stats.min_stubborn_degree, stats.max_degree, theta, spec.n, c2
    )
    return BoundReport(
        n=spec.n,
        theta=theta,
        b1=b1,
        lambda_threshold=b1 / 2.0,
        sigma1=tails.p_s_tail,
        eps_n=math.nan,
        eta_n=math.nan,
        eps_prime_n=t2.eps_prime_n,
        eps_bar_n=math.nan,
        q=t2.q,
    )
