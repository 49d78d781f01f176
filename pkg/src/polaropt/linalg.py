"""Dense linear-algebra substrate: norms, factorizations, condition numbers.

All operations work on 2-D float64 numpy arrays ("dense matrices").  Inputs
are validated once at the boundary with :func:`as_matrix`; everything here is
a pure function safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEFAULT_RANK_TOL",
    "SigmaBounds",
    "SvdResult",
    "as_matrix",
    "cholesky",
    "cond2",
    "frobenius_norm",
    "matrix_with_spectrum",
    "nuclear_norm",
    "numeric_rank",
    "qr_householder",
    "sigma_bounds",
    "spectral_norm",
    "svd",
]

# Relative threshold (vs sigma_max) below which a singular value is treated
# as zero wherever a numerical rank is needed.
DEFAULT_RANK_TOL = 1e-12


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and convert ``a`` to a 2-D float64 array.

    Rejects empty shapes and non-finite entries so that downstream code can
    assume a well-formed operand.
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must have positive dimensions, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD ``a = u @ diag(sigma) @ v.T`` with ``k = min(m, n)``.

    ``u`` is m-by-k and ``v`` is n-by-k, both with orthonormal columns;
    ``sigma`` is non-increasing and non-negative.
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.v.T


@dataclass(frozen=True)
class SigmaBounds:
    """Bracket ``[beta, alpha]`` for the extreme singular values of a matrix."""

    alpha: float
    beta: float
    mode: str  # "exact" | "heuristic"

    def __post_init__(self):
        if not (0.0 < self.beta <= self.alpha):
            raise ValueError(f"need 0 < beta <= alpha, got beta={self.beta}, alpha={self.alpha}")


def frobenius_norm(a) -> float:
    a = as_matrix(a)
    return float(np.linalg.norm(a, "fro"))


def svd(a) -> SvdResult:
    """Thin SVD via LAPACK.  Raises ``np.linalg.LinAlgError`` on non-convergence."""
    a = as_matrix(a)
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    return SvdResult(u=u, sigma=s, v=vt.T)


def spectral_norm(a) -> float:
    a = as_matrix(a)
    return float(np.linalg.svd(a, compute_uv=False)[0])


def nuclear_norm(a) -> float:
    a = as_matrix(a)
    return float(np.linalg.svd(a, compute_uv=False).sum())


def numeric_rank(sigma: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> int:
    """Number of singular values exceeding ``rank_tol * sigma_max``."""
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > rank_tol * sigma[0]))


def cond2(a, rank_tol: float = DEFAULT_RANK_TOL) -> float:
    """2-norm condition number: ratio of the largest to the smallest positive
    singular value, where "positive" means above ``rank_tol * sigma_max``.

    Orthogonal matrices (and any nonzero scalar multiple of one) give exactly
    the ratio of equal values, i.e. 1.  A numerically zero matrix is an error.
    """
    if rank_tol < 0:
        raise ValueError("rank_tol must be >= 0")
    a = as_matrix(a)
    s = np.linalg.svd(a, compute_uv=False)
    r = numeric_rank(s, rank_tol)
    if r == 0:
        raise np.linalg.LinAlgError("condition number of a numerically zero matrix")
    return float(s[0] / s[r - 1])


def qr_householder(a) -> tuple[np.ndarray, np.ndarray]:
    """Thin Householder QR with the sign convention diag(r) >= 0."""
    a = as_matrix(a)
    q, r = np.linalg.qr(a)
    # LAPACK leaves diag(R) signs arbitrary; fix them for determinism.
    signs = np.where(np.diag(r) < 0.0, -1.0, 1.0)
    return q * signs, r * signs[:, None]


def cholesky(s) -> np.ndarray:
    """Lower-triangular Cholesky factor of a symmetric positive definite matrix.

    Symmetry is required up to 1e-12 relative; a non-PD pivot raises
    ``np.linalg.LinAlgError``.
    """
    s = as_matrix(s)
    if s.shape[0] != s.shape[1]:
        raise ValueError(f"cholesky needs a square matrix, got {s.shape}")
    denom = max(np.linalg.norm(s), 1.0)
    if np.linalg.norm(s - s.T) > 1e-12 * denom:
        raise ValueError("cholesky input is not symmetric within 1e-12")
    return np.linalg.cholesky(s)


def sigma_bounds(a, mode: str = "exact", rank_tol: float = DEFAULT_RANK_TOL) -> SigmaBounds:
    """Bracket the extreme singular values of ``a``.

    ``exact`` mode returns the true sigma_max and the smallest positive
    singular value (above ``rank_tol * sigma_max``) via an SVD.  ``heuristic``
    mode avoids the SVD: alpha = Frobenius norm (always >= sigma_max) and
    beta = min |diag(R)| / sqrt(cols) from a thin QR, a crude cheap
    underestimate.  A beta that underestimates sigma_min only costs the
    consumers (QDWH, ZOLO-PD) extra iterations.
    """
    a = as_matrix(a)
    if mode == "exact":
        s = np.linalg.svd(a, compute_uv=False)
        if s[0] == 0.0:
            raise np.linalg.LinAlgError("sigma_bounds of a zero matrix")
        if s[-1] > 0.0:
            beta = float(s[-1])  # full rank: the true sigma_min
        else:
            # exactly singular: smallest singular value the rank tolerance
            # still counts as positive
            r = numeric_rank(s, rank_tol)
            beta = float(s[r - 1])
        return SigmaBounds(alpha=float(s[0]), beta=beta, mode="exact")
    if mode == "heuristic":
        alpha = float(np.linalg.norm(a, "fro"))
        if alpha == 0.0:
            raise np.linalg.LinAlgError("sigma_bounds of a zero matrix")
        work = a if a.shape[0] >= a.shape[1] else a.T
        _, r_fac = np.linalg.qr(work)
        rmin = float(np.min(np.abs(np.diag(r_fac))))
        beta = rmin / np.sqrt(work.shape[1])
        if beta <= 0.0:  # exactly singular: fall back to a tiny positive floor
            beta = rank_tol * alpha
        beta = min(beta, alpha)
        return SigmaBounds(alpha=alpha, beta=beta, mode="heuristic")
    raise ValueError(f"unknown sigma_bounds mode: {mode!r}")


def matrix_with_spectrum(
    m: int,
    n: int,
    sigma,
    rng: np.random.Generator,
) -> np.ndarray:
    """Random matrix with the prescribed singular values.

    Draws Haar-distributed orthonormal factors via QR of Gaussian matrices,
    so the returned matrix is "random" in every respect except its spectrum.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    k = min(m, n)
    if sigma.size != k:
        raise ValueError(f"need {k} singular values, got {sigma.size}")
    q1, _ = np.linalg.qr(rng.standard_normal((m, k)))
    q2, _ = np.linalg.qr(rng.standard_normal((n, k)))
    return (q1 * sigma) @ q2.T
