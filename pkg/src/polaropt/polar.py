"""Polar decomposition of rectangular matrices by five algorithms.

A matrix ``a`` (m >= n) factors as ``a = u @ h`` with ``u`` having
orthonormal columns and ``h`` symmetric positive semidefinite; for m < n the
factorization is ``a = h @ u`` with orthonormal rows.  The orthogonal factor
is the matrix sign / nearest semi-orthogonal matrix, the Hermitian factor
carries the singular values (``trace(h)`` equals the nuclear norm).

Algorithms:

* ``polar_reference`` -- exact factors from the SVD (the oracle).
* ``newton_schulz``   -- inverse-free quintic iteration with configurable
  polynomial coefficients (the classic cubic is the (1.5, -0.5, 0) case).
* ``scaled_newton``   -- Newton iteration with Frobenius scaling
  (square nonsingular matrices only).
* ``qdwh``            -- QR-based dynamically weighted Halley iteration.
* ``zolo_pd``         -- Zolotarev rational iteration of order 2r+1; at
  r = 8 it converges in two applications up to condition number 1e16.

All iterative algorithms assume m >= n internally and transpose wide inputs
in and out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .elliptic import complete_elliptic_k, jacobi_sn_cn
from .linalg import DEFAULT_RANK_TOL, SigmaBounds, as_matrix, sigma_bounds

__all__ = [
    "ITERATION_BUDGET",
    "NsCoefficients",
    "PolarFactors",
    "StabilityReport",
    "UNIT_ROUNDOFF",
    "hermitian_factor",
    "newton_schulz",
    "polar_reference",
    "qdwh",
    "scaled_newton",
    "select_zolo_order",
    "stability_check",
    "zolo_pd",
    "zolotarev_coefficients",
]

UNIT_ROUNDOFF = 2.0**-53

# Iterations needed by the order-(2r+1) Zolotarev iteration (r = 1 is QDWH)
# to map [1/kappa, 1] into [1 - O(u), 1], by condition number.
_KAPPA_GRID = (1.001, 1.01, 1.1, 1.2, 1.5, 2.0, 1e1, 1e2, 1e3, 1e5, 1e7, 1e16)
ITERATION_BUDGET: dict[int, dict[float, int]] = {
    1: dict(zip(_KAPPA_GRID, (2, 2, 2, 3, 3, 3, 4, 4, 4, 5, 5, 6))),
    2: dict(zip(_KAPPA_GRID, (1, 2, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4))),
    3: dict(zip(_KAPPA_GRID, (1, 1, 2, 2, 2, 2, 2, 2, 3, 3, 3, 3))),
    4: dict(zip(_KAPPA_GRID, (1, 1, 1, 2, 2, 2, 2, 2, 2, 3, 3, 3))),
    5: dict(zip(_KAPPA_GRID, (1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 3, 3))),
    6: dict(zip(_KAPPA_GRID, (1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 3))),
    7: dict(zip(_KAPPA_GRID, (1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 3))),
    8: dict(zip(_KAPPA_GRID, (1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2))),
}


@dataclass(frozen=True)
class NsCoefficients:
    """Coefficients of the quintic update ``x <- a*x + b*x(x'x) + c*x(x'x)^2``.

    An exactly semi-orthogonal fixed point requires a + b + c = 1 (the
    classic cubic satisfies this); the Muon-style tuned set deliberately
    violates it, trading exact convergence for rapid inflation of small
    singular values.
    """

    a: float
    b: float
    c: float

    @property
    def sum(self) -> float:
        return self.a + self.b + self.c

    @property
    def exact_fixed_point(self) -> bool:
        """True when the coefficient sum keeps semi-orthogonal matrices fixed
        (within 1e-3)."""
        return abs(self.sum - 1.0) <= 1e-3


#: Classic cubic Newton-Schulz map, converges exactly to the polar factor.
NS_CLASSIC = NsCoefficients(1.5, -0.5, 0.0)
#: Tuned quintic used by Muon-style optimizers: fast approximate
#: orthogonalization, singular values land in roughly [0.7, 1.15].
NS_TUNED = NsCoefficients(3.4445, -4.7750, 2.0315)


@dataclass
class PolarFactors:
    """Computed polar factors plus convergence diagnostics."""

    u: np.ndarray
    h: np.ndarray
    iterations: int
    converged: bool
    algorithm: str
    fallback_used: bool = field(default=False)

    @property
    def nuclear_norm(self) -> float:
        """trace(h): equals the nuclear norm of the input for converged runs."""
        return float(np.trace(self.h))


@dataclass(frozen=True)
class StabilityReport:
    """Backward-stability residuals of a computed polar decomposition.

    No thresholds are applied here; callers decide what counts as stable.
    """

    reconstruction_residual: float
    orthogonality_residual: float
    h_asymmetry: float


def hermitian_factor(a, u) -> np.ndarray:
    """Symmetrized Hermitian factor for a given orthogonal factor.

    Tall/square inputs: ``h = (u'a + (u'a)') / 2``; wide inputs use the
    row-orthonormal convention ``h = (a u' + (a u')') / 2``.
    """
    a = as_matrix(a, "a")
    u = as_matrix(u, "u")
    if a.shape != u.shape:
        raise ValueError(f"shape mismatch: a {a.shape} vs u {u.shape}")
    if a.shape[0] >= a.shape[1]:
        p = u.T @ a
    else:
        p = a @ u.T
    return 0.5 * (p + p.T)


def stability_check(a, factors: PolarFactors) -> StabilityReport:
    """Measure the three backward-stability residuals of ``factors``."""
    a = as_matrix(a)
    u, h = factors.u, factors.h
    m, n = a.shape
    recon = u @ h if m >= n else h @ u
    na = np.linalg.norm(a)
    recon_res = float(np.linalg.norm(a - recon) / na) if na > 0 else float(np.linalg.norm(recon))
    k = min(m, n)
    gram = u.T @ u if m >= n else u @ u.T
    orth_res = float(np.linalg.norm(gram - np.eye(k)) / math.sqrt(k))
    nh = np.linalg.norm(h)
    asym = float(np.linalg.norm(h - h.T) / nh) if nh > 0 else 0.0
    return StabilityReport(recon_res, orth_res, asym)


def polar_reference(a, rank_tol: float = DEFAULT_RANK_TOL) -> PolarFactors:
    """Exact polar factors built from the SVD.

    For rank-deficient input the null directions of the orthogonal factor
    are zeroed (truncated SVD), so ``norm(u, 'fro')**2`` equals the numeric
    rank and updates built from ``u`` vanish on the null space.
    """
    a = as_matrix(a)
    m, n = a.shape
    if m < n:
        inner = polar_reference(a.T, rank_tol)
        return PolarFactors(
            u=inner.u.T,
            h=inner.h,
            iterations=0,
            converged=True,
            algorithm="svd_reference",
        )
    uu, s, vt = np.linalg.svd(a, full_matrices=False)
    keep = s > (rank_tol * s[0] if s[0] > 0 else 0.0)
    u = uu[:, keep] @ vt[keep]
    h = (vt.T * s) @ vt
    h = 0.5 * (h + h.T)
    return PolarFactors(u=u, h=h, iterations=0, converged=True, algorithm="svd_reference")


def _finish(a, x, iterations, converged, algorithm, transposed, fallback=False) -> PolarFactors:
    if transposed:
        u = x.T
        h = hermitian_factor(a, u)
    else:
        u = x
        h = hermitian_factor(a, u)
    return PolarFactors(
        u=u,
        h=h,
        iterations=iterations,
        converged=converged,
        algorithm=algorithm,
        fallback_used=fallback,
    )


def newton_schulz(
    a,
    steps: int = 5,
    coeffs: NsCoefficients = NS_CLASSIC,
    delta: float = 0.01,
    orth_tol: float = 1e-8,
) -> PolarFactors:
    """Fixed-budget quintic Newton-Schulz iteration.

    Exact coefficient sets start from ``x0 = (sqrt(3) - delta) * a /
    norm(a, 'fro')``, which keeps the spectral norm safely inside the cubic
    map's basin of attraction.  Approximate sets (coefficient sum away from
    1, like the tuned Muon quintic) have a much smaller basin, so they use
    the plain normalization ``a / norm(a, 'fro')`` with spectral norm at
    most 1.  ``converged`` reports whether the final orthogonality residual
    is below ``orth_tol``; with the tuned set it typically is not, by
    design.  A zero matrix returns u = 0 with ``converged = False``.
    """
    a = as_matrix(a)
    na = np.linalg.norm(a)
    if na == 0.0:
        hdim = a.shape[1] if a.shape[0] >= a.shape[1] else a.shape[0]
        return PolarFactors(
            u=np.zeros_like(a),
            h=np.zeros((hdim, hdim)),
            iterations=0,
            converged=False,
            algorithm="newton_schulz",
        )
    m, n = a.shape
    transposed = m < n
    work = a.T if transposed else a
    scale = (math.sqrt(3.0) - delta) if coeffs.exact_fixed_point else 1.0
    x = scale * work / na
    for _ in range(steps):
        xtx = x.T @ x
        x = coeffs.a * x + coeffs.b * (x @ xtx) + coeffs.c * (x @ xtx @ xtx)
    k = x.shape[1]
    orth = np.linalg.norm(x.T @ x - np.eye(k)) / math.sqrt(k)
    return _finish(a, x, steps, bool(orth <= orth_tol), "newton_schulz", transposed)


def scaled_newton(
    a,
    max_steps: int = 30,
    scaling: str = "frobenius",
    tol: float = 1e-13,
) -> PolarFactors:
    """Newton iteration ``x <- (mu*x + x^{-T}/mu) / 2`` for square input.

    Frobenius scaling uses ``mu = sqrt(norm(inv(x)) / norm(x))`` which makes
    the iteration condition-number-insensitive; ``scaling="none"`` gives the
    unscaled map.  A singular iterate raises ``np.linalg.LinAlgError``.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"scaled_newton needs a square matrix, got {a.shape}")
    if scaling not in ("frobenius", "none"):
        raise ValueError(f"unknown scaling: {scaling!r}")
    x = a.copy()
    converged = False
    its = 0
    for _ in range(max_steps):
        xinv = np.linalg.inv(x)  # raises LinAlgError on a singular iterate
        if scaling == "frobenius":
            mu = math.sqrt(np.linalg.norm(xinv) / np.linalg.norm(x))
        else:
            mu = 1.0
        xn = 0.5 * (mu * x + xinv.T / mu)
        its += 1
        if np.linalg.norm(xn - x) <= tol * np.linalg.norm(xn):
            x = xn
            converged = True
            break
        x = xn
    return _finish(a, x, its, converged, "scaled_newton", transposed=False)


def _halley_coefficients(ell: float) -> tuple[float, float, float]:
    """Dynamically weighted Halley coefficients for the lower bound ``ell``.

    Maps [ell, 1] onto [ell', 1] with the largest possible ell'; at ell = 1
    degenerates to the classic Halley triple (3, 1, 3).
    """
    l2 = ell * ell
    dd = np.cbrt(4.0 * (1.0 - l2) / (l2 * l2))
    sqd = math.sqrt(1.0 + dd)
    ak = sqd + 0.5 * math.sqrt(8.0 - 4.0 * dd + 8.0 * (2.0 - l2) / (l2 * sqd))
    bk = (ak - 1.0) ** 2 / 4.0
    ck = ak + bk - 1.0
    return ak, bk, ck


def qdwh(
    a,
    bounds: SigmaBounds | None = None,
    tol: float = 1e-12,
    max_steps: int = 8,
) -> PolarFactors:
    """QR-based dynamically weighted Halley iteration.

    Each step computes the thin QR of ``[sqrt(c)*x; I]`` and applies
    ``x <- (b/c)*x + (a - b/c)/sqrt(c) * q1 @ q2.T`` with coefficients from
    the current lower bound ``ell``; ``ell`` follows the scalar recursion
    ``ell <- ell*(a + b*ell^2)/(1 + c*ell^2)``.  Terminates when the iterate
    stalls (relative change <= tol) or ``|1 - ell| <= tol``.  With exact
    bounds at most 6 iterations are needed up to condition number 1e16.
    """
    a = as_matrix(a)
    if bounds is None:
        bounds = sigma_bounds(a, "exact")
    m, n = a.shape
    transposed = m < n
    work = a.T if transposed else a
    wm, wn = work.shape
    x = work / bounds.alpha
    # the coefficient formulas need ell**4 to stay representable
    ell = min(max(bounds.beta / bounds.alpha, 1e-60), 1.0)
    eye = np.eye(wn)
    its = 0
    converged = False
    for _ in range(max_steps):
        ak, bk, ck = _halley_coefficients(ell)
        stacked = np.vstack([math.sqrt(ck) * x, eye])
        q, _ = np.linalg.qr(stacked)
        q1, q2 = q[:wm], q[wm:]
        xn = (bk / ck) * x + (ak - bk / ck) / math.sqrt(ck) * (q1 @ q2.T)
        ell = min(ell * (ak + bk * ell * ell) / (1.0 + ck * ell * ell), 1.0)
        its += 1
        diff = np.linalg.norm(xn - x) / np.linalg.norm(xn)
        x = xn
        if diff <= tol or abs(1.0 - ell) <= tol:
            converged = True
            break
    return _finish(a, x, its, converged, "qdwh", transposed)


def zolotarev_coefficients(ell: float, r: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Coefficients of the order-(2r+1) Zolotarev sign iteration on [ell, 1].

    Returns ``(c, w, mhat)`` where ``c[0..2r-1]`` are the elliptic-function
    coefficients, ``w[0..r-1]`` the partial-fraction weights attached to the
    odd-indexed ``c``, and ``mhat`` the normalization making 1 a fixed point.
    The scalar map is ``f(x) = mhat * x * (1 + sum_j w[j]/(x^2 + c[2j]))``.
    """
    if not 1 <= r <= 8:
        raise ValueError(f"zolotarev order r must be in [1, 8], got {r}")
    if not 0.0 < ell <= 1.0:
        raise ValueError(f"lower bound ell must be in (0, 1], got {ell}")
    kp = complete_elliptic_k(ell)  # K' at modulus sqrt(1 - ell^2)
    c = np.empty(2 * r)
    for i in range(1, 2 * r + 1):
        sn, cn = jacobi_sn_cn(i * kp / (2 * r + 1), ell)
        c[i - 1] = (ell * sn / cn) ** 2
    codd, ceven = c[0::2], c[1::2]
    w = np.empty(r)
    for j in range(r):
        num = np.prod(codd[j] - ceven)
        den = np.prod(np.delete(codd[j] - codd, j))
        w[j] = -num / den
    mhat = float(np.prod((1.0 + codd) / (1.0 + ceven)))
    return c, w, mhat


def _zolo_ell_next(ell: float, c: np.ndarray, mhat: float) -> float:
    codd, ceven = c[0::2], c[1::2]
    l2 = ell * ell
    return min(float(mhat * ell * np.prod((l2 + ceven) / (l2 + codd))), 1.0)


def select_zolo_order(kappa: float) -> int:
    """Smallest Zolotarev order whose budget at this condition number is
    at most two iterations (capped at 8)."""
    grid_kappa = next((g for g in _KAPPA_GRID if g >= kappa), _KAPPA_GRID[-1])
    for r in range(1, 9):
        if ITERATION_BUDGET[r][grid_kappa] <= 2:
            return r
    return 8


def zolo_pd(
    a,
    bounds: SigmaBounds | None = None,
    r: int | str = "auto",
    tol: float | None = None,
    max_steps: int = 6,
) -> PolarFactors:
    """Zolotarev-based polar decomposition.

    Applies the order-(2r+1) rational map; the first application (skipped
    when the estimated condition number is below 2) uses ``r`` stacked QR
    factorizations, subsequent ones use Cholesky solves of the then
    well-conditioned normal equations, falling back to the QR form if a
    Cholesky factorization fails.  Convergence is declared when the tracked
    lower bound satisfies ``1 - ell <= 100u`` or when successive iterates
    differ by less than ``tol`` (default ``u**(1/(2r+1))``, the natural
    threshold for a map of order 2r+1).
    """
    a = as_matrix(a)
    if bounds is None:
        bounds = sigma_bounds(a, "exact")
    m, n = a.shape
    transposed = m < n
    work = a.T if transposed else a
    wm, wn = work.shape
    x = work / bounds.alpha
    # the elliptic coefficients need ell**2 to stay representable
    ell = min(max(bounds.beta / bounds.alpha, 1e-60), 1.0)
    kappa = 1.0 / ell
    order = select_zolo_order(kappa) if r == "auto" else int(r)
    if not 1 <= order <= 8:
        raise ValueError(f"zolotarev order r must be in [1, 8], got {order}")
    pair_tol = UNIT_ROUNDOFF ** (1.0 / (2 * order + 1)) if tol is None else tol

    eye = np.eye(wn)
    its = 0
    converged = False
    fallback = False
    use_qr = kappa >= 2.0  # the well-conditioned case skips the QR stage
    while its < max_steps:
        c, w, mhat = zolotarev_coefficients(ell, order)
        codd = c[0::2]
        x_prev = x
        if use_qr and its == 0:
            acc = x.copy()
            for j in range(order):
                stacked = np.vstack([x, math.sqrt(codd[j]) * eye])
                q, _ = np.linalg.qr(stacked)
                acc += (w[j] / math.sqrt(codd[j])) * (q[:wm] @ q[wm:].T)
            x = mhat * acc
        else:
            xtx = x.T @ x
            acc = x.copy()
            for j in range(order):
                z = xtx + codd[j] * eye
                try:
                    chol = np.linalg.cholesky(z)
                except np.linalg.LinAlgError:
                    fallback = True
                    stacked = np.vstack([x, math.sqrt(codd[j]) * eye])
                    q, _ = np.linalg.qr(stacked)
                    acc += (w[j] / math.sqrt(codd[j])) * (q[:wm] @ q[wm:].T)
                    continue
                t = np.linalg.solve(chol, x.T)
                t = np.linalg.solve(chol.T, t)
                acc += w[j] * t.T
            x = mhat * acc
        ell = _zolo_ell_next(ell, c, mhat)
        its += 1
        diff = np.linalg.norm(x - x_prev) / np.linalg.norm(x)
        if (1.0 - ell) <= 100.0 * UNIT_ROUNDOFF or (its >= 2 and diff <= pair_tol):
            converged = True
            break
    return _finish(a, x, its, converged, "zolo_pd", transposed, fallback)
