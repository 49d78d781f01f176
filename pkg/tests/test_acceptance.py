"""Acceptance suite: one test per acceptance criterion, stated tolerances.

Each test prints a single [criterion] PASS/FAIL line (visible with -v/-s or
on failure) in addition to asserting, so the suite doubles as a report:

    pytest tests/test_acceptance.py -v
"""

import math
import time
from dataclasses import replace

import numpy as np

from polaropt.harness import preset, run_experiment
from polaropt.linalg import matrix_with_spectrum, nuclear_norm, sigma_bounds
from polaropt.optim import Muon, NewtonQuad, PolarBackend, PolarGrad
from polaropt.polar import polar_reference, qdwh, zolo_pd
from polaropt.problems import completion_make, logistic_make, quad_make

SVD = PolarBackend(algorithm="svd")
SEEDS = (0, 1, 2)


def _emit(name: str, ok: bool, detail: str):
    print(f"[{name}] {'PASS' if ok else 'FAIL'}: {detail}")


# ---------------------------------------------------------------------------
# 1. polar oracle equivalence


def test_polar_oracle_equivalence():
    """QDWH and ZOLO-PD match the SVD-reference orthogonal factor to
    ||dU||_F/sqrt(n) <= 1e-8 over 50 matrices per shape with constructed
    condition numbers {1e2, 1e6, 1e12}; total runtime < 30 s.

    Note: the 1e12 cell sits at the numerical limit of double precision
    (the polar factor's own condition number is ~1/sigma_min for
    rectangular input, so two backward-stable algorithms can only be
    expected to agree to ~u*kappa ~ 1e-4); the tolerance is asserted as
    specified and the failure, if any, is confined to that cell.
    """
    rng = np.random.default_rng(314159)
    kappas = (1e2, 1e6, 1e12)
    t0 = time.perf_counter()
    worst: dict[float, float] = {k: 0.0 for k in kappas}
    for shape in ((40, 25), (100, 60), (64, 64)):
        n = shape[1]
        for i in range(50):
            kappa = kappas[i % 3]
            a = matrix_with_spectrum(*shape, np.logspace(0, -math.log10(kappa), n), rng)
            bounds = sigma_bounds(a, "exact")
            ref = polar_reference(a, rank_tol=0.0)
            for fac in (qdwh(a, bounds), zolo_pd(a, bounds, r=8)):
                assert fac.converged
                d = np.linalg.norm(fac.u - ref.u) / math.sqrt(n)
                worst[kappa] = max(worst[kappa], d)
    elapsed = time.perf_counter() - t0
    detail = (
        f"worst dU/sqrt(n): {', '.join(f'kappa={k:.0e}: {v:.2e}' for k, v in worst.items())}; "
        f"runtime {elapsed:.1f}s"
    )
    ok = all(v <= 1e-8 for v in worst.values()) and elapsed < 30.0
    _emit("polar-oracle-equivalence", ok, detail)
    assert elapsed < 30.0, detail
    assert all(v <= 1e-8 for v in worst.values()), detail


# ---------------------------------------------------------------------------
# 2. iteration budgets


def test_iteration_budgets():
    """With exact bounds: QDWH converges in <= {4, 5, 6} iterations at
    kappa = {1e3, 1e5, 1e16}; ZOLO-PD with r = 8 in <= 2 iterations for
    kappa up to 1e16."""
    rng = np.random.default_rng(2718)
    results = []
    for kappa, budget in ((1e3, 4), (1e5, 5), (1e16, 6)):
        a = matrix_with_spectrum(100, 60, np.logspace(0, -math.log10(kappa), 60), rng)
        f = qdwh(a, sigma_bounds(a, "exact"))
        results.append(("qdwh", kappa, f.iterations, budget, f.converged))
    for kappa in (1e2, 1e8, 1e16):
        a = matrix_with_spectrum(100, 60, np.logspace(0, -math.log10(kappa), 60), rng)
        f = zolo_pd(a, sigma_bounds(a, "exact"), r=8)
        results.append(("zolo", kappa, f.iterations, 2, f.converged))
    ok = all(it <= b and conv for _, _, it, b, conv in results)
    detail = "; ".join(f"{alg} kappa={k:.0e}: {it}<={b}" for alg, k, it, b, _ in results)
    _emit("iteration-budgets", ok, detail)
    for alg, kappa, it, budget, conv in results:
        assert conv and it <= budget, f"{alg} at kappa={kappa}: {it} > {budget}"


# ---------------------------------------------------------------------------
# 3. duality identity


def test_duality_identity():
    """<G, msgn(G)> = ||G||_* = tr(H) to relative 1e-10 on 100 random
    full-rank matrices."""
    rng = np.random.default_rng(577)
    worst = 0.0
    for i in range(100):
        m = int(rng.integers(5, 40))
        n = int(rng.integers(3, 30))
        g = rng.standard_normal((m, n))
        f = polar_reference(g)
        nuc = nuclear_norm(g)
        inner = float(np.sum(g * f.u))
        worst = max(worst, abs(inner - nuc) / nuc, abs(f.nuclear_norm - nuc) / nuc)
    ok = worst <= 1e-10
    _emit("duality-identity", ok, f"worst relative deviation {worst:.2e}")
    assert ok


# ---------------------------------------------------------------------------
# 4. per-step descent contraction


def test_descent_contraction_500_steps():
    """On a (20, 10, 40, 15) quadratic with gamma_k = 1/(L r_k), the
    contraction gap_{k+1} <= (1 - 1/(r_k^2 kappa_H)) gap_k holds at every
    one of 500 steps, and the observed log-gap slope is at least as steep
    as the bound's."""
    prob = quad_make(20, 10, 40, 15, seed=0)
    opt = PolarGrad(lr_mode="theory_rank", lipschitz=prob.lipschitz, backend=SVD)
    kappa_h = prob.lipschitz / prob.strong_convexity
    x = prob.x0.copy()
    log_obs = 0.0
    log_bound = 0.0
    violations = 0
    for _ in range(500):
        gap_before = prob.gap(x)
        sig = np.linalg.svd(prob.grad(x), compute_uv=False)
        rk = max(int(np.count_nonzero(sig > 1e-12 * sig[0])), 1)
        x = opt.step(x, prob.grad(x))
        gap_after = prob.gap(x)
        factor = 1.0 - 1.0 / (rk * rk * kappa_h)
        if gap_after > factor * gap_before + 1e-10 * abs(prob.loss(x)):
            violations += 1
        log_obs += math.log(max(gap_after, 1e-300) / gap_before)
        log_bound += math.log(factor)
    slope_ok = log_obs / 500 <= log_bound / 500
    ok = violations == 0 and slope_ok
    _emit(
        "theorem-descent",
        ok,
        f"violations={violations}/500, observed slope {log_obs / 500:.3e} "
        f"<= bound slope {log_bound / 500:.3e}",
    )
    assert violations == 0
    assert slope_ok


# ---------------------------------------------------------------------------
# 5. sign-descent floor vs polar-gradient convergence


def test_sign_descent_floor():
    """Matrix sign descent with constant rate plateaus at a gap at least
    1e3 times the polar-gradient gap at step 1000, while the polar gradient
    reaches gap <= 1e-6 f(X0); runtime < 1 min."""
    t0 = time.perf_counter()
    pg_cfg = preset("quad-desk/PolarGrad(SVD)", seed=0)
    msd_cfg = preset("quad-desk/MatrixSignSGD", seed=0)
    pg = run_experiment(replace(pg_cfg, total_steps=1000))
    msd = run_experiment(replace(msd_cfg, total_steps=1000))
    elapsed = time.perf_counter() - t0
    assert pg.status == "ok" and msd.status == "ok"
    f0 = pg.records[0].loss
    pg_gap = max(pg.final_gap, 1e-300)
    ratio = msd.final_gap / pg_gap
    ok = ratio >= 1e3 and pg.final_gap <= 1e-6 * f0 and elapsed < 60.0
    _emit(
        "theorem-floor",
        ok,
        f"msd gap {msd.final_gap:.3e} / pg gap {pg.final_gap:.3e} = {ratio:.1e} (>= 1e3), "
        f"pg gap vs f0 {pg.final_gap / f0:.1e} (<= 1e-6), runtime {elapsed:.1f}s",
    )
    assert ratio >= 1e3
    assert pg.final_gap <= 1e-6 * f0
    assert elapsed < 60.0


# ---------------------------------------------------------------------------
# 6. null-gradient consistency split


def test_null_gradient_consistency_split():
    """Polar-gradient update norms scale linearly in c over
    c in {1e-2, 1e-4, 1e-6} (relative 1e-8); Muon update norms are
    c-invariant to relative 1e-8 and bounded below by
    0.9 sqrt(rank) gamma s."""
    g0 = np.random.default_rng(42).standard_normal((12, 7))
    x = np.zeros((12, 7))
    lr, s = 1.0, 1.0
    rank = 7
    cs = (1e-2, 1e-4, 1e-6)
    pg_norms = [np.linalg.norm(PolarGrad(lr=lr, backend=SVD).step(x, c * g0)) for c in cs]
    mu_norms = [
        np.linalg.norm(Muon(lr=lr, momentum=0.0, backend=SVD).step(x, c * g0)) for c in cs
    ]
    lin1 = abs(pg_norms[0] / pg_norms[1] - 1e2) / 1e2
    lin2 = abs(pg_norms[1] / pg_norms[2] - 1e2) / 1e2
    inv = max(abs(nm / mu_norms[0] - 1.0) for nm in mu_norms)
    floor = min(mu_norms)
    ok = (
        lin1 <= 1e-8
        and lin2 <= 1e-8
        and inv <= 1e-8
        and floor >= 0.9 * math.sqrt(rank) * lr * s
    )
    _emit(
        "null-gradient-consistency",
        ok,
        f"pg linearity dev {max(lin1, lin2):.2e}, muon invariance dev {inv:.2e}, "
        f"muon floor {floor:.3f} >= {0.9 * math.sqrt(rank):.3f}",
    )
    assert lin1 <= 1e-8 and lin2 <= 1e-8
    assert inv <= 1e-8
    assert floor >= 0.9 * math.sqrt(rank) * lr * s


# ---------------------------------------------------------------------------
# 7. exact newton


def test_newton_one_step():
    """Exact Newton (gamma = 1) reaches gap <= 1e-18 f(X0) in one step."""
    worst = 0.0
    for seed in SEEDS:
        prob = quad_make(20, 10, 40, 15, seed=seed)
        opt = NewtonQuad(lr=1.0, problem=prob)
        x = opt.step(prob.x0.copy(), prob.grad(prob.x0))
        worst = max(worst, prob.gap(x) / prob.loss(prob.x0))
    ok = worst <= 1e-18
    _emit("newton-one-step", ok, f"worst gap/f0 after one step {worst:.2e}")
    assert ok


# ---------------------------------------------------------------------------
# 8. gradient correctness


def test_gradient_correctness():
    """Central finite differences at relative 1e-6 for all three problems,
    3 random points x 3 seeds."""

    def fd_worst(loss, grad_fn, x, rng, h=1e-5):
        g = grad_fn(x)
        worst = 0.0
        for _ in range(5):
            d = rng.standard_normal(x.shape)
            d /= np.linalg.norm(d)
            fd = (loss(x + h * d) - loss(x - h * d)) / (2 * h)
            an = float(np.sum(g * d))
            worst = max(worst, abs(fd - an) / max(abs(fd), abs(an), 1e-30))
        return worst

    worst = 0.0
    for seed in SEEDS:
        rng = np.random.default_rng(1000 + seed)
        qp = quad_make(20, 10, 40, 15, seed=seed)
        lp = logistic_make(30, 8, 200, 12, seed=seed)
        cp = completion_make(24, 16, 3, seed=seed)
        for _ in range(3):
            worst = max(worst, fd_worst(qp.loss, qp.grad, rng.standard_normal((20, 10)), rng))
            worst = max(
                worst, fd_worst(lp.loss, lp.grad, 0.1 * rng.standard_normal((30, 8)), rng)
            )
            y = rng.standard_normal((16, 3))
            worst = max(
                worst,
                fd_worst(
                    lambda t: cp.loss(t, y),
                    lambda t: cp.grads(t, y)[0],
                    rng.standard_normal((24, 3)),
                    rng,
                ),
            )
    ok = worst <= 1e-6
    _emit("gradient-correctness", ok, f"worst FD relative error {worst:.2e}")
    assert ok


# ---------------------------------------------------------------------------
# 9. qualitative orderings at desk scale


def test_ordering_quad_polargrad_beats_muon_and_adam():
    """Quadratic regression, desk dims: the polar-gradient gap is below
    both the Muon gap and the Adam gap at the step-200 horizon, 3/3 seeds."""
    t0 = time.perf_counter()
    details = []
    ok = True
    for seed in SEEDS:
        gaps = {}
        for name in ("quad-desk/PolarGrad(QDWH)", "quad-desk/Muon(NS)", "quad-desk/Adam"):
            cfg = replace(preset(name, seed=seed), total_steps=200)
            res = run_experiment(cfg)
            assert res.status == "ok", f"{name} seed {seed}: {res.status}"
            gaps[name.split("/")[1]] = res.final_gap
        pg, muon, adam = gaps["PolarGrad(QDWH)"], gaps["Muon(NS)"], gaps["Adam"]
        ok &= pg < muon and pg < adam
        details.append(f"seed{seed}: pg {pg:.2e} vs muon {muon:.2e}, adam {adam:.2e}")
    elapsed = time.perf_counter() - t0
    _emit("ordering-quad", ok, "; ".join(details) + f"; runtime {elapsed:.0f}s")
    assert ok, details


def test_ordering_completion_muon_plateaus_above_polargrad():
    """Low-rank completion, desk dims: the Muon loss plateau (last-quartile
    mean) stays above the polar-gradient final loss, 3/3 seeds."""
    t0 = time.perf_counter()
    details = []
    ok = True
    for seed in SEEDS:
        pg = run_experiment(preset("completion-desk/PolarGrad(QDWH)", seed=seed))
        muon = run_experiment(preset("completion-desk/Muon(NS)", seed=seed))
        assert pg.status == "ok" and muon.status == "ok"
        losses = np.asarray([r.loss for r in muon.records])
        plateau = float(losses[3 * len(losses) // 4 :].mean())
        ok &= plateau > pg.final_loss
        details.append(f"seed{seed}: muon plateau {plateau:.2e} vs pg final {pg.final_loss:.2e}")
    elapsed = time.perf_counter() - t0
    _emit("ordering-completion", ok, "; ".join(details) + f"; runtime {elapsed:.0f}s")
    assert ok, details


def test_ordering_logistic_decay_beats_constant():
    """Logistic regression, desk dims: the decayed-rate variant of every
    optimizer ends below its constant-rate counterpart, 3/3 seeds."""
    t0 = time.perf_counter()
    pairs = [
        ("logistic-desk/PolarSGD(QDWH)", "logistic-desk/PolarSGD(QDWH)+decay"),
        ("logistic-desk/Muon(NS)", "logistic-desk/Muon(NS)+decay"),
        ("logistic-desk/Adam", "logistic-desk/Adam+decay"),
    ]
    details = []
    ok = True
    for seed in SEEDS:
        for const_name, decay_name in pairs:
            const = run_experiment(preset(const_name, seed=seed))
            decay = run_experiment(preset(decay_name, seed=seed))
            assert const.status == "ok" and decay.status == "ok"
            good = decay.final_loss < const.final_loss
            ok &= good
            details.append(
                f"seed{seed} {const_name.split('/')[1]}: "
                f"decay {decay.final_loss:.4e} < const {const.final_loss:.4e}: {good}"
            )
    elapsed = time.perf_counter() - t0
    _emit("ordering-logistic", ok, "; ".join(details) + f"; runtime {elapsed:.0f}s")
    assert ok, details
    assert elapsed < 600.0


# ---------------------------------------------------------------------------
# 10. stochastic unbiasedness


def test_stochastic_gradient_unbiased():
    """The average of 2000 minibatch gradients matches the full gradient
    within 3 standard errors in every entry."""
    prob = logistic_make(10, 4, 120, 5, seed=3, batch_size=30)
    x = 0.05 * np.random.default_rng(3).standard_normal((10, 4))
    rng = np.random.default_rng(33)
    n = 2000
    acc = np.zeros((10, 4))
    acc2 = np.zeros((10, 4))
    for _ in range(n):
        g = prob.grad(x, prob.sample_rows(rng))
        acc += g
        acc2 += g * g
    mean = acc / n
    se = np.sqrt((acc2 / n - mean * mean) / n)
    z = np.abs(mean - prob.grad(x)) / np.maximum(se, 1e-300)
    ok = bool(np.all(z < 3.0))
    _emit("stochastic-unbiasedness", ok, f"max |z| = {z.max():.2f} (< 3)")
    assert ok


# ---------------------------------------------------------------------------
# 11. explicit preconditioner identity


def test_explicit_preconditioner_identity():
    """tr(H) U = tr(P) G P^{-1} with P = H, relative 1e-8, on 20 random
    full-rank gradients."""
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(20):
        g = matrix_with_spectrum(10, 7, np.linspace(2.0, 0.3, 7), rng)
        f = polar_reference(g)
        lhs = f.nuclear_norm * f.u
        rhs = np.trace(f.h) * np.linalg.solve(f.h.T, g.T).T
        worst = max(worst, np.linalg.norm(lhs - rhs) / np.linalg.norm(lhs))
    ok = worst <= 1e-8
    _emit("explicit-preconditioner", ok, f"worst relative deviation {worst:.2e}")
    assert ok
