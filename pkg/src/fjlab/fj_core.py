"""Friedkin-Johnsen dynamics with a partially stubborn community.

Each agent repeatedly averages its neighbors' opinions with its own
initial opinion, weighted by a stubbornness level that is a constant
``theta`` on the stubborn community and zero elsewhere:

    x(t+1) = (I - Theta) D^{-1} A x(t) + Theta x(0)

Whenever every non-stubborn agent can reach a stubborn one, the iteration
converges to ``x(inf) = P x(0)`` with the influence matrix

    P = M^{-1} (I - Theta)^{-1} Theta D,
    M = (I - Theta)^{-1} Theta D + D - A.

M is symmetric positive definite there, so P comes out of a Cholesky
solve. The same closed form with A replaced by the probability matrix
(and D by expected degrees) gives the expected-graph system.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .graph_model import CommunityPartition, ProbabilityMatrix, RealizedGraph
from .linalg_kernels import (
    IterationLimitError,
    NotPositiveDefiniteError,
    NumericalError,
    min_eigenvalue_symmetric,
    solve_spd,
)

__all__ = [
    "StubbornnessProfile",
    "InfluenceSystem",
    "ConvergenceVerdict",
    "SingularSystemError",
    "fj_step",
    "system_matrix",
    "influence_matrix",
    "final_opinions_direct",
    "final_opinions_iterative",
    "convergence_condition",
]


class SingularSystemError(NumericalError):
    """The opinion system matrix is singular or indefinite.

    Carries the computed minimum-eigenvalue estimate of M.
    """

    def __init__(self, lambda_min: float):
        self.lambda_min = lambda_min
        super().__init__(
            f"system matrix M is not positive definite (lambda_min ~ {lambda_min:.3e}); "
            "some non-stubborn agent cannot reach a stubborn one"
        )


class ConvergenceVerdict(enum.Enum):
    """How the non-stubborn agents are tied to the stubborn community.

    STRICT_PASS: every non-stubborn agent is adjacent to a stubborn one
    (the hypothesis behind the eigenvalue lower bound). PATH_PASS: every
    non-stubborn agent merely has a path to a stubborn one, which still
    guarantees convergence of the iteration. FAIL: some non-stubborn agent
    is cut off entirely.
    """

    STRICT_PASS = "strict_pass"
    PATH_PASS = "path_pass"
    FAIL = "fail"


@dataclass(frozen=True)
class StubbornnessProfile:
    """Homogeneous stubbornness ``theta`` on the stubborn block, zero elsewhere."""

    partition: CommunityPartition
    theta: float

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(
                f"theta must lie strictly inside (0, 1), got {self.theta}; "
                "the closed form divides by 1 - theta"
            )

    def theta_vector(self) -> np.ndarray:
        v = np.zeros(self.partition.n)
        v[: self.partition.n_s] = self.theta
        return v


@dataclass(frozen=True)
class InfluenceSystem:
    """The matrices of one opinion system: M always, P once computed.

    ``source`` records whether degrees/adjacency came from a sampled graph
    ("realized") or from the probability matrix ("expected").
    """

    m: np.ndarray
    degrees: np.ndarray
    source: str
    p: np.ndarray | None = None


def _degrees_and_adjacency(graph_or_psi) -> tuple[np.ndarray, np.ndarray, str]:
    if isinstance(graph_or_psi, RealizedGraph):
        return graph_or_psi.degrees, graph_or_psi.adj, "realized"
    if isinstance(graph_or_psi, ProbabilityMatrix):
        psi = graph_or_psi.psi
        return psi.sum(axis=1), psi, "expected"
    raise TypeError(f"expected RealizedGraph or ProbabilityMatrix, got {type(graph_or_psi)!r}")


def _require_positive_degrees(degrees: np.ndarray, source: str):
    dead = np.flatnonzero(degrees <= 0.0)
    if dead.size:
        raise ValueError(
            f"agent {int(dead[0])} has zero {source} degree; "
            "the dynamics divides by agent degrees"
        )


def fj_step(
    x: np.ndarray,
    g: RealizedGraph,
    prof: StubbornnessProfile,
    x0: np.ndarray,
) -> np.ndarray:
    """One update of the opinion vector: (I - Theta) D^{-1} A x + Theta x0."""
    _require_positive_degrees(g.degrees, "realized")
    theta = prof.theta_vector()
    mixed = (g.adj @ np.asarray(x, dtype=float)) / g.degrees
    return (1.0 - theta) * mixed + theta * np.asarray(x0, dtype=float)


def system_matrix(graph_or_psi, prof: StubbornnessProfile) -> InfluenceSystem:
    """Assemble M = (I - Theta)^{-1} Theta D + D - A for one graph.

    Pass a :class:`RealizedGraph` for the sampled system or a
    :class:`ProbabilityMatrix` for the expected one (adjacency and degrees
    are then the probability row sums). M is symmetric by construction.
    """
    degrees, adjacency, source = _degrees_and_adjacency(graph_or_psi)
    if degrees.shape[0] != prof.partition.n:
        raise ValueError(
            f"profile covers {prof.partition.n} agents but graph has {degrees.shape[0]}"
        )
    _require_positive_degrees(degrees, source)
    theta = prof.theta_vector()
    m = -np.asarray(adjacency, dtype=float).copy()
    np.fill_diagonal(m, degrees * (theta / (1.0 - theta)) + degrees)
    return InfluenceSystem(m=m, degrees=degrees, source=source)


def _stubborn_drive(sys: InfluenceSystem, prof: StubbornnessProfile) -> np.ndarray:
    # Diagonal of (I - Theta)^{-1} Theta D: the weight pulling each agent
    # back to its initial opinion, scaled by its degree.
    theta = prof.theta_vector()
    return sys.degrees * (theta / (1.0 - theta))


def influence_matrix(sys: InfluenceSystem, prof: StubbornnessProfile) -> InfluenceSystem:
    """Compute the influence matrix P = M^{-1} (I - Theta)^{-1} Theta D.

    Returns a copy of the system with ``p`` filled. Rows of P sum to one
    and P is entrywise nonnegative whenever the convergence condition
    holds. Raises :class:`SingularSystemError` (with a minimum-eigenvalue
    estimate) if M is not positive definite.
    """
    drive = _stubborn_drive(sys, prof)
    try:
        p = solve_spd(sys.m, np.diag(drive))
    except NotPositiveDefiniteError as exc:
        raise SingularSystemError(min_eigenvalue_symmetric(sys.m)) from exc
    return replace(sys, p=p)


def final_opinions_direct(
    sys: InfluenceSystem, prof: StubbornnessProfile, x0: np.ndarray
) -> np.ndarray:
    """Final opinions P x0 via a single linear solve (no explicit inverse)."""
    x0 = np.asarray(x0, dtype=float)
    if x0.shape[0] != prof.partition.n:
        raise ValueError(f"x0 has {x0.shape[0]} entries for {prof.partition.n} agents")
    drive = _stubborn_drive(sys, prof)
    try:
        return solve_spd(sys.m, drive * x0)
    except NotPositiveDefiniteError as exc:
        raise SingularSystemError(min_eigenvalue_symmetric(sys.m)) from exc


def final_opinions_iterative(
    g: RealizedGraph,
    prof: StubbornnessProfile,
    x0: np.ndarray,
    tol: float = 1e-9,
    max_iters: int = 10**6,
) -> tuple[np.ndarray, int]:
    """Iterate the dynamics until the sup-norm step change drops below tol.

    Returns the converged opinion vector and the number of iterations used.
    Raises :class:`IterationLimitError` carrying the last residual if
    ``max_iters`` is hit first.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    _require_positive_degrees(g.degrees, "realized")
    theta = prof.theta_vector()
    mixing = ((1.0 - theta)[:, None] / g.degrees[:, None]) * g.adj
    anchor = theta * np.asarray(x0, dtype=float)
    x = np.asarray(x0, dtype=float)
    for iteration in range(1, max_iters + 1):
        x_next = mixing @ x + anchor
        residual = float(np.max(np.abs(x_next - x)))
        x = x_next
        if residual <= tol:
            return x, iteration
    raise IterationLimitError(
        f"opinion iteration did not reach tol={tol} within {max_iters} iterations",
        residual=residual,
    )


def convergence_condition(g: RealizedGraph, prof: StubbornnessProfile) -> ConvergenceVerdict:
    """Classify how non-stubborn agents are connected to the stubborn block."""
    n_s = prof.partition.n_s
    if prof.partition.n_r == 0:
        return ConvergenceVerdict.STRICT_PASS
    cross = g.adj[n_s:, :n_s]
    if np.all(cross.sum(axis=1) > 0):
        return ConvergenceVerdict.STRICT_PASS
    _, labels = connected_components(csr_matrix(g.adj), directed=False)
    stubborn_components = set(labels[:n_s])
    if all(label in stubborn_components for label in labels[n_s:]):
        return ConvergenceVerdict.PATH_PASS
    return ConvergenceVerdict.FAIL
