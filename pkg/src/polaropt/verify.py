"""Quick in-process verification suites for the CLI (`polaropt verify`).

These are fast spot-checks of the central mathematical claims; the full
test suite under tests/ is the authoritative gate.
"""

from __future__ import annotations

import math

import numpy as np

from .linalg import matrix_with_spectrum, sigma_bounds
from .optim import MatrixSignSGD, PolarBackend, PolarGrad
from .polar import ITERATION_BUDGET, polar_reference, qdwh, zolo_pd
from .problems import completion_make, logistic_make, quad_make

__all__ = ["verify_gradients", "verify_polar", "verify_theorems"]


def _report(name: str, ok: bool, detail: str = "") -> bool:
    tag = "PASS" if ok else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    print(f"[{tag}] {name}{suffix}")
    return ok


def verify_polar() -> bool:
    """QDWH and ZOLO-PD match the SVD reference and honor iteration budgets."""
    rng = np.random.default_rng(20240901)
    ok = True
    for kappa, qdwh_budget in ((1e3, 4), (1e5, 5)):
        a = matrix_with_spectrum(60, 40, np.logspace(0, -math.log10(kappa), 40), rng)
        bounds = sigma_bounds(a, "exact")
        ref = polar_reference(a)
        fq = qdwh(a, bounds)
        fz = zolo_pd(a, bounds, r=8)
        du_q = np.linalg.norm(fq.u - ref.u) / math.sqrt(40)
        du_z = np.linalg.norm(fz.u - ref.u) / math.sqrt(40)
        ok &= _report(
            f"qdwh matches reference (kappa={kappa:g})",
            fq.converged and du_q < 1e-8,
            f"dU={du_q:.2e}, iters={fq.iterations}<= {qdwh_budget}",
        )
        ok &= _report(
            f"qdwh iteration budget (kappa={kappa:g})",
            fq.iterations <= qdwh_budget,
            f"{fq.iterations} <= {qdwh_budget}",
        )
        ok &= _report(
            f"zolo-pd matches reference (kappa={kappa:g})",
            fz.converged and du_z < 1e-8 and fz.iterations <= 2,
            f"dU={du_z:.2e}, iters={fz.iterations}",
        )
    budget = ITERATION_BUDGET[8][1e16]
    a = matrix_with_spectrum(60, 40, np.logspace(0, -16, 40), rng)
    fz = zolo_pd(a, sigma_bounds(a, "exact"), r=8)
    ok &= _report("zolo-pd r=8 kappa=1e16 in two iterations", fz.iterations <= budget, f"iters={fz.iterations}")
    return ok


def verify_theorems() -> bool:
    """Per-step descent contraction and the sign-descent floor."""
    ok = True
    prob = quad_make(20, 10, 40, 15, seed=0)
    backend = PolarBackend(algorithm="svd")
    opt = PolarGrad(lr_mode="theory_rank", lipschitz=prob.lipschitz, backend=backend)
    x = prob.x0.copy()
    kappa_h = prob.lipschitz / prob.strong_convexity
    holds = True
    for _ in range(200):
        gap_before = prob.gap(x)
        sig = np.linalg.svd(prob.grad(x), compute_uv=False)
        rk = max(int(np.count_nonzero(sig > 1e-12 * sig[0])), 1)
        x = opt.step(x, prob.grad(x))
        bound = (1.0 - 1.0 / (rk * rk * kappa_h)) * gap_before
        if prob.gap(x) > bound + 1e-10 * abs(prob.loss(x)):
            holds = False
            break
    ok &= _report("descent contraction holds for 200 steps", holds)

    desk = quad_make(100, 20, 200, 50, seed=0)
    pg = PolarGrad(lr_mode="theory_rank_max", lipschitz=desk.lipschitz, lr_scale=5.0, backend=backend)
    msd = MatrixSignSGD(lr=0.05, backend=backend)
    xa, xb = desk.x0.copy(), desk.x0.copy()
    for _ in range(400):
        xa = pg.step(xa, desk.grad(xa))
        xb = msd.step(xb, desk.grad(xb))
    ratio = desk.gap(xb) / max(desk.gap(xa), 1e-300)
    ok &= _report("sign-descent floor above polar-gradient gap", ratio > 1e3, f"ratio={ratio:.2e}")
    return ok


def _fd_check(loss, grad, x, rng, h=1e-5, rel_tol=1e-6, directions=5) -> float:
    g = grad(x)
    worst = 0.0
    for _ in range(directions):
        d = rng.standard_normal(x.shape)
        d /= np.linalg.norm(d)
        fd = (loss(x + h * d) - loss(x - h * d)) / (2 * h)
        an = float(np.sum(g * d))
        worst = max(worst, abs(fd - an) / max(abs(fd), abs(an), 1e-30))
    return worst


def verify_gradients() -> bool:
    """Central finite differences agree with the analytic gradients."""
    rng = np.random.default_rng(7)
    ok = True
    qp = quad_make(12, 7, 20, 9, seed=1)
    x = rng.standard_normal((12, 7))
    worst = _fd_check(qp.loss, qp.grad, x, rng)
    ok &= _report("quadratic gradient", worst < 1e-6, f"rel err {worst:.2e}")

    lp = logistic_make(10, 6, 40, 8, seed=1)
    x = 0.1 * rng.standard_normal((10, 6))
    worst = _fd_check(lp.loss, lp.grad, x, rng)
    ok &= _report("logistic gradient", worst < 1e-6, f"rel err {worst:.2e}")

    cp = completion_make(14, 9, 3, seed=1)
    y = rng.standard_normal((9, 3))
    worst = _fd_check(
        lambda x_: cp.loss(x_, y), lambda x_: cp.grads(x_, y)[0], rng.standard_normal((14, 3)), rng
    )
    ok &= _report("completion gradient (x factor)", worst < 1e-6, f"rel err {worst:.2e}")
    return ok
