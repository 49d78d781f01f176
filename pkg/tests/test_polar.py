"""Polar decomposition algorithms: examples, invariants, iteration budgets."""

import math

import numpy as np
import pytest

from polaropt.linalg import matrix_with_spectrum, nuclear_norm, sigma_bounds
from polaropt.polar import (
    ITERATION_BUDGET,
    NS_CLASSIC,
    NS_TUNED,
    NsCoefficients,
    hermitian_factor,
    newton_schulz,
    polar_reference,
    qdwh,
    scaled_newton,
    select_zolo_order,
    stability_check,
    zolo_pd,
    zolotarev_coefficients,
)

ALL_ALGORITHMS = ["reference", "scaled_newton", "qdwh", "zolo"]


def rng_for(seed):
    return np.random.default_rng(seed)


def factor(name, a):
    if name == "reference":
        return polar_reference(a)
    if name == "scaled_newton":
        return scaled_newton(a)
    if name == "qdwh":
        return qdwh(a)
    if name == "zolo":
        return zolo_pd(a)
    raise AssertionError(name)


# ---------------------------------------------------------------------------
# polar_reference


def test_reference_identity():
    f = polar_reference(np.eye(3))
    assert np.allclose(f.u, np.eye(3)) and np.allclose(f.h, np.eye(3))


def test_reference_scaled_identity_trace():
    f = polar_reference(2.0 * np.eye(3))
    assert np.allclose(f.u, np.eye(3))
    assert np.allclose(f.h, 2.0 * np.eye(3))
    assert f.nuclear_norm == pytest.approx(6.0, rel=1e-14)


def test_reference_rank_deficient_zeroes_null_directions():
    f = polar_reference(np.diag([3.0, 0.0]), rank_tol=1e-12)
    assert np.allclose(f.u, np.diag([1.0, 0.0]))
    assert np.linalg.norm(f.u) ** 2 == pytest.approx(1.0, abs=1e-10)


def test_reference_matches_svd_construction():
    a = rng_for(0).standard_normal((40, 25))
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    f = polar_reference(a)
    assert np.linalg.norm(f.u - u @ vt) <= 1e-10
    assert np.linalg.norm(f.u @ f.h - a) <= 1e-12 * np.linalg.norm(a)


@pytest.mark.parametrize("rank", [2, 5])
def test_reference_u_norm_squared_is_rank(rank):
    sig = np.concatenate([np.linspace(2.0, 1.0, rank), np.zeros(8 - rank)])
    a = matrix_with_spectrum(12, 8, sig, rng_for(rank))
    f = polar_reference(a)
    assert np.linalg.norm(f.u) ** 2 == pytest.approx(rank, abs=1e-10)


# ---------------------------------------------------------------------------
# hermitian_factor


def test_hermitian_factor_semi_orthogonal_gives_identity():
    q, _ = np.linalg.qr(rng_for(1).standard_normal((7, 4)))
    assert np.allclose(hermitian_factor(q, q), np.eye(4))


def test_hermitian_factor_scaled_identity():
    assert np.allclose(hermitian_factor(2.0 * np.eye(3), np.eye(3)), 2.0 * np.eye(3))


def test_hermitian_factor_matches_svd_construction():
    a = rng_for(2).standard_normal((15, 9))
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    h_svd = (vt.T * s) @ vt
    f = polar_reference(a)
    assert np.linalg.norm(hermitian_factor(a, f.u) - h_svd) <= 1e-10 * np.linalg.norm(h_svd)


# ---------------------------------------------------------------------------
# newton_schulz


def test_ns_classic_converges_on_near_orthogonal():
    q, _ = np.linalg.qr(rng_for(3).standard_normal((20, 20)))
    f = newton_schulz(q, steps=10, coeffs=NS_CLASSIC)
    assert f.converged
    assert stability_check(q, f).orthogonality_residual <= 1e-8
    assert np.linalg.norm(f.u - q) <= 1e-8


def test_ns_classic_monotone_orthogonality_from_scaled_start():
    # from x0 = c*q with c < 1 the cubic map increases singular values
    # monotonically toward 1
    q, _ = np.linalg.qr(rng_for(4).standard_normal((12, 12)))
    x = 0.4 * q
    prev_err = abs(0.4 - 1.0)
    for _ in range(8):
        x = 1.5 * x - 0.5 * (x @ (x.T @ x))
        sig = np.linalg.svd(x, compute_uv=False)
        err = np.max(np.abs(sig - 1.0))
        assert err <= prev_err + 1e-14
        prev_err = err
    assert prev_err <= 1e-8


def test_ns_tuned_five_steps_approximate():
    # the tuned set orthogonalizes approximately: measured deviation from
    # the exact polar factor stays in a ~0.3 band, not at machine precision
    worst = 0.0
    rng = rng_for(5)
    for _ in range(5):
        a = matrix_with_spectrum(64, 64, np.logspace(0, -2, 64), rng)
        f = newton_schulz(a, steps=5, coeffs=NS_TUNED)
        ref = polar_reference(a)
        worst = max(worst, np.linalg.norm(f.u - ref.u) / 8.0)
    assert 1e-3 < worst <= 0.35


def test_ns_zero_matrix_convention():
    f = newton_schulz(np.zeros((4, 3)), steps=5)
    assert not f.converged
    assert np.all(f.u == 0.0)


def test_ns_coefficient_fixed_point_property():
    assert NS_CLASSIC.exact_fixed_point
    assert not NS_TUNED.exact_fixed_point
    assert NsCoefficients(1.2, -0.1, -0.1).exact_fixed_point


def test_ns_wide_input_transposes():
    a = rng_for(6).standard_normal((5, 9))
    f = newton_schulz(a, steps=25, coeffs=NS_CLASSIC)
    assert f.u.shape == (5, 9)
    assert np.linalg.norm(f.u @ f.u.T - np.eye(5)) <= 1e-8


# ---------------------------------------------------------------------------
# scaled_newton


def test_scaled_newton_orthogonal_fixed_point():
    q, _ = np.linalg.qr(rng_for(7).standard_normal((10, 10)))
    f = scaled_newton(q, scaling="none")
    assert f.converged
    assert f.iterations <= 2
    assert np.linalg.norm(f.u - q) <= 1e-12


def test_scaled_newton_matches_scalar_recursion_on_diagonal():
    # diag(4, 1/4) without scaling follows x -> (x + 1/x)/2 exactly
    a = np.diag([4.0, 0.25])
    x_scalar = [4.0, 0.25]
    x = a.copy()
    for _ in range(3):
        x = 0.5 * (x + np.linalg.inv(x).T)
        x_scalar = [0.5 * (v + 1.0 / v) for v in x_scalar]
        assert np.allclose(np.diag(x), x_scalar, rtol=1e-15)


def test_scaled_newton_ill_conditioned():
    a = matrix_with_spectrum(30, 30, np.logspace(0, -6, 30), rng_for(8))
    f = scaled_newton(a, scaling="frobenius")
    ref = polar_reference(a)
    assert f.converged
    assert f.iterations <= 9
    assert np.linalg.norm(f.u - ref.u) <= 1e-10 * math.sqrt(30)


def test_scaled_newton_rejects_rectangular():
    with pytest.raises(ValueError):
        scaled_newton(np.ones((3, 2)))


def test_scaled_newton_singular_raises():
    with pytest.raises(np.linalg.LinAlgError):
        scaled_newton(np.diag([1.0, 0.0]))


# ---------------------------------------------------------------------------
# qdwh


def test_qdwh_orthogonal_input_two_iterations():
    q, _ = np.linalg.qr(rng_for(9).standard_normal((12, 8)))
    f = qdwh(q, sigma_bounds(q, "exact"))
    assert f.converged and f.iterations <= 2
    assert np.linalg.norm(f.u - q) <= 1e-12


@pytest.mark.parametrize("kappa,budget", [(1e5, 5), (1e16, 6)])
def test_qdwh_iteration_budget(kappa, budget):
    a = matrix_with_spectrum(100, 60, np.logspace(0, -math.log10(kappa), 60), rng_for(10))
    f = qdwh(a, sigma_bounds(a, "exact"))
    assert f.converged
    assert f.iterations <= budget


def test_qdwh_unconverged_flag_on_tiny_budget():
    a = matrix_with_spectrum(20, 12, np.logspace(0, -8, 12), rng_for(11))
    f = qdwh(a, max_steps=1)
    assert not f.converged
    assert f.iterations == 1


def test_qdwh_halley_coefficients_map_interval_up():
    # scalar property: the (a, b, c) triple maps [l, 1] into [l', 1] with
    # l' >= l; checked by sampling the rational map
    from polaropt.polar import _halley_coefficients

    for ell in (1e-8, 1e-4, 0.1, 0.9):
        ak, bk, ck = _halley_coefficients(ell)
        xs = np.linspace(ell, 1.0, 201)
        fx = xs * (ak + bk * xs**2) / (1.0 + ck * xs**2)
        ell_next = ell * (ak + bk * ell * ell) / (1.0 + ck * ell * ell)
        assert fx.min() >= ell_next * (1 - 1e-12)
        assert fx.max() <= 1.0 + 1e-8
        assert ell_next >= ell


# ---------------------------------------------------------------------------
# zolo_pd


def test_zolo_orthogonal_shortcut_single_iteration():
    q, _ = np.linalg.qr(rng_for(12).standard_normal((10, 6)))
    f = zolo_pd(q, sigma_bounds(q, "exact"))
    assert f.converged and f.iterations == 1
    assert np.linalg.norm(f.u - q) <= 1e-12


def test_zolo_kappa_1e7_r5_three_iterations():
    a = matrix_with_spectrum(60, 40, np.logspace(0, -7, 40), rng_for(13))
    f = zolo_pd(a, sigma_bounds(a, "exact"), r=5)
    assert f.converged and f.iterations <= 3


def test_zolo_orthogonality_after_convergence():
    for kappa in (1e2, 1e8, 1e12):
        a = matrix_with_spectrum(50, 30, np.logspace(0, -math.log10(kappa), 30), rng_for(14))
        f = zolo_pd(a)
        assert f.converged
        assert stability_check(a, f).orthogonality_residual <= 1e-12


def test_zolo_r8_two_iterations_up_to_1e16():
    a = matrix_with_spectrum(40, 25, np.logspace(0, -16, 25), rng_for(15))
    f = zolo_pd(a, r=8)
    assert f.converged and f.iterations <= 2


def test_zolo_auto_order_selection():
    assert select_zolo_order(1.5) <= 5
    assert select_zolo_order(1e5) <= 8
    assert select_zolo_order(1e16) == 8
    assert select_zolo_order(1e30) == 8


def test_zolotarev_coefficients_are_increasing_positive():
    c, w, mhat = zolotarev_coefficients(1e-6, 8)
    assert np.all(c > 0)
    assert np.all(np.diff(c) > 0)
    assert mhat > 0


def test_zolotarev_scalar_map_contracts_interval():
    # f maps [l, 1] into [f(l), 1] and f(1) = 1 by normalization
    for ell, r in ((1e-4, 4), (1e-10, 8), (0.3, 2)):
        c, w, mhat = zolotarev_coefficients(ell, r)
        codd = c[0::2]
        xs = np.linspace(ell, 1.0, 301)
        fx = mhat * xs * (1.0 + np.sum(w[:, None] / (xs[None, :] ** 2 + codd[:, None]), axis=0))
        assert fx[-1] == pytest.approx(1.0, rel=1e-10)
        assert fx.min() >= mhat * ell * np.prod((ell**2 + c[1::2]) / (ell**2 + codd)) * (1 - 1e-10)
        assert fx.max() <= 1.0 + 1e-9


# ---------------------------------------------------------------------------
# table budgets across the grid (exact bounds)


@pytest.mark.parametrize("r", [1, 2, 5, 8])
@pytest.mark.parametrize("kappa", [1.2, 2.0, 1e2, 1e5, 1e16])
def test_iteration_counts_never_exceed_table(r, kappa):
    budget = ITERATION_BUDGET[r][kappa]
    k = 20
    a = matrix_with_spectrum(30, k, np.logspace(0, -math.log10(kappa), k), rng_for(17))
    bounds = sigma_bounds(a, "exact")
    if r == 1:
        f = qdwh(a, bounds)
    else:
        f = zolo_pd(a, bounds, r=r)
    assert f.converged
    assert f.iterations <= budget, f"r={r} kappa={kappa}: {f.iterations} > {budget}"


# ---------------------------------------------------------------------------
# stability_check


def test_stability_exact_reference():
    a = rng_for(18).standard_normal((20, 12))
    rep = stability_check(a, polar_reference(a))
    assert rep.reconstruction_residual <= 1e-13
    assert rep.orthogonality_residual <= 1e-13
    assert rep.h_asymmetry <= 1e-13


def test_stability_ns_tuned_reports_approximation_band():
    a = matrix_with_spectrum(64, 64, np.logspace(0, -2, 64), rng_for(19))
    rep = stability_check(a, newton_schulz(a, steps=5, coeffs=NS_TUNED))
    assert 1e-3 <= rep.orthogonality_residual <= 0.5


def test_stability_qdwh_high_condition():
    a = matrix_with_spectrum(40, 25, np.logspace(0, -12, 25), rng_for(20))
    rep = stability_check(a, qdwh(a))
    assert rep.reconstruction_residual <= 1e-11
    assert rep.orthogonality_residual <= 1e-11
    assert rep.h_asymmetry <= 1e-11


# ---------------------------------------------------------------------------
# cross-algorithm invariants


@pytest.mark.parametrize("alg", ALL_ALGORITHMS)
def test_scale_equivariance(alg):
    shape = (16, 16) if alg == "scaled_newton" else (16, 10)
    a = matrix_with_spectrum(*shape, np.logspace(0, -3, shape[1]), rng_for(21))
    f1 = factor(alg, a)
    f2 = factor(alg, 7.0 * a)
    assert f1.converged and f2.converged
    assert np.linalg.norm(f2.u - f1.u) <= 1e-8 * math.sqrt(shape[1])
    assert np.linalg.norm(f2.h - 7.0 * f1.h) <= 1e-8 * np.linalg.norm(f1.h)


@pytest.mark.parametrize("alg", ["reference", "qdwh", "zolo"])
def test_wide_matrix_transpose_roundtrip(alg):
    a = rng_for(22).standard_normal((6, 13))
    f_wide = factor(alg, a)
    f_tall = factor(alg, a.T)
    assert f_wide.u.shape == (6, 13)
    assert np.linalg.norm(f_wide.u - f_tall.u.T) <= 1e-10
    assert np.linalg.norm(f_wide.h - f_tall.h) <= 1e-10 * np.linalg.norm(f_tall.h)
    # reconstruction in the wide convention: a = h @ u
    assert np.linalg.norm(f_wide.h @ f_wide.u - a) <= 1e-10 * np.linalg.norm(a)


@pytest.mark.parametrize("alg", ALL_ALGORITHMS)
def test_trace_h_equals_nuclear_norm_and_inner_product(alg):
    shape = (14, 14) if alg == "scaled_newton" else (18, 11)
    a = matrix_with_spectrum(*shape, np.logspace(0, -2, shape[1]), rng_for(23))
    f = factor(alg, a)
    nuc = nuclear_norm(a)
    assert f.nuclear_norm == pytest.approx(nuc, rel=1e-8)
    assert float(np.sum(a * f.u)) == pytest.approx(nuc, rel=1e-8)


def test_fan_best_approximation():
    # the orthogonal polar factor is the nearest semi-orthogonal matrix
    rng = rng_for(24)
    a = matrix_with_spectrum(10, 6, np.linspace(2.0, 0.5, 6), rng)
    u_best = polar_reference(a).u
    d_best = np.linalg.norm(a - u_best)
    worse = 0
    for _ in range(100):
        q, _ = np.linalg.qr(rng.standard_normal((10, 6)))
        assert np.linalg.norm(a - q) >= d_best - 1e-10
        if np.linalg.norm(a - q) > d_best + 1e-6:
            worse += 1
    assert worse >= 95  # strict on average


def test_h_factor_is_psd():
    for alg in ALL_ALGORITHMS:
        shape = (12, 12) if alg == "scaled_newton" else (12, 7)
        a = rng_for(25).standard_normal(shape)
        f = factor(alg, a)
        assert np.linalg.norm(f.h - f.h.T) <= 1e-12 * max(np.linalg.norm(f.h), 1.0)
        np.linalg.cholesky(f.h + 1e-10 * np.linalg.norm(f.h) * np.eye(f.h.shape[0]))


def test_zolo_cholesky_failure_falls_back_to_qr(monkeypatch):
    # force one stage-two Cholesky failure; the QR form of the same update
    # must take over and the factors must still be flagged + correct
    import polaropt.polar as polar_mod

    real_cholesky = np.linalg.cholesky
    calls = {"n": 0}

    def flaky(x):
        calls["n"] += 1
        if calls["n"] == 1:
            raise np.linalg.LinAlgError("forced failure")
        return real_cholesky(x)

    monkeypatch.setattr(polar_mod.np.linalg, "cholesky", flaky)
    try:
        a = matrix_with_spectrum(20, 12, np.logspace(0, -4, 12), rng_for(30))
        f = zolo_pd(a, r=4)
    finally:
        monkeypatch.setattr(polar_mod.np.linalg, "cholesky", real_cholesky)
    assert f.fallback_used
    assert f.converged
    ref = polar_reference(a)
    assert np.linalg.norm(f.u - ref.u) <= 1e-8
