"""Dense numeric kernels: SPD solves, operator 2-norm, extreme eigenvalues.

Matrices are plain ``numpy.ndarray`` in row-major (C) order. All routines
are pure and use deterministic iteration starts, so repeated calls with the
same inputs are bit-identical.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import lapack

__all__ = [
    "NumericalError",
    "NotPositiveDefiniteError",
    "IterationLimitError",
    "solve_spd",
    "operator_two_norm",
    "min_eigenvalue_symmetric",
]

# Hard cap for the power iteration; hitting it raises IterationLimitError.
POWER_ITERATION_CAP = 10_000


class NumericalError(RuntimeError):
    """A numeric kernel could not complete (singular system, stalled iteration)."""


class NotPositiveDefiniteError(NumericalError):
    """Cholesky factorization hit a non-positive pivot.

    ``pivot`` is the 1-based index of the leading minor that failed,
    as reported by LAPACK.
    """

    def __init__(self, pivot: int):
        self.pivot = pivot
        super().__init__(
            f"matrix is not positive definite: leading minor of order {pivot} "
            "is singular or indefinite"
        )


class IterationLimitError(NumericalError):
    """An iterative kernel exceeded its iteration cap.

    Carries the last two estimates (or the last residual) so callers can
    judge how far from convergence the iteration stalled.
    """

    def __init__(self, message: str, estimates: tuple[float, float] | None = None,
                 residual: float | None = None):
        self.estimates = estimates
        self.residual = residual
        super().__init__(message)


def _as_square(a: np.ndarray, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square 2-d array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def solve_spd(m: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve M X = B for symmetric positive definite M via Cholesky.

    Returns X with the same trailing shape as B (vector or matrix of
    right-hand sides). Raises :class:`NotPositiveDefiniteError` with the
    failing pivot index if the factorization breaks down.
    """
    m = _as_square(m, "m")
    b_arr = np.asarray(b, dtype=float)
    vector_rhs = b_arr.ndim == 1
    if vector_rhs:
        b_arr = b_arr[:, None]
    if b_arr.shape[0] != m.shape[0]:
        raise ValueError(f"shape mismatch: m is {m.shape}, b is {b_arr.shape}")

    c, info = lapack.dpotrf(m, lower=1)
    if info > 0:
        raise NotPositiveDefiniteError(int(info))
    if info < 0:
        raise ValueError(f"illegal argument {-info} passed to dpotrf")
    x, info = lapack.dpotrs(c, b_arr, lower=1)
    if info != 0:
        raise NumericalError(f"dpotrs failed with info={info}")
    return x[:, 0] if vector_rhs else x


def operator_two_norm(a: np.ndarray, rel_tol: float = 1e-9) -> float:
    """Largest singular value of ``a`` by power iteration on AᵀA.

    The start vector is the normalized all-ones vector, so the result is
    reproducible. Stops once the estimate changes by at most
    ``rel_tol`` (relatively) on two consecutive iterations; raises
    :class:`IterationLimitError` with the last two estimates if the cap
    of 10^4 iterations is exceeded.
    """
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    if a.size == 0 or not a.any():
        return 0.0

    n = a.shape[1]
    v = np.full(n, 1.0 / np.sqrt(n))
    sigma = 0.0
    sigma_prev = 0.0
    stable = 0
    for _ in range(POWER_ITERATION_CAP):
        w = a @ v
        s = a.T @ w  # s = (AᵀA) v
        norm_s = float(np.linalg.norm(s))
        if norm_s == 0.0:
            # v fell exactly into the null space; restart from the unit
            # vector of the heaviest column, which cannot be annihilated.
            j = int(np.argmax(np.sum(a * a, axis=0)))
            v = np.zeros(n)
            v[j] = 1.0
            sigma_prev = 0.0
            stable = 0
            continue
        sigma = float(np.sqrt(v @ s))  # Rayleigh quotient of AᵀA, v is unit
        v = s / norm_s
        if abs(sigma - sigma_prev) <= rel_tol * max(sigma, np.finfo(float).tiny):
            stable += 1
            if stable >= 2:
                return sigma
        else:
            stable = 0
        sigma_prev = sigma
    raise IterationLimitError(
        f"power iteration did not converge within {POWER_ITERATION_CAP} iterations",
        estimates=(sigma_prev, sigma),
    )


def min_eigenvalue_symmetric(m: np.ndarray, rel_tol: float = 1e-9) -> float:
    """Smallest eigenvalue of a symmetric matrix.

    Backed by a dense symmetric eigensolver (LAPACK), which is deterministic
    and accurate to machine precision, well inside any requested ``rel_tol``.
    The tolerance argument is kept so callers can state their accuracy
    requirement explicitly.
    """
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    m = _as_square(m, "m")
    try:
        eigenvalues = np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - eigvalsh rarely fails
        raise NumericalError(f"symmetric eigensolver failed: {exc}") from exc
    return float(eigenvalues[0])
