"""Jacobi elliptic functions: degenerate cases, series oracle, identities."""

import math

import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from polaropt.elliptic import complete_elliptic_k, jacobi_sn_cn


def sn_power_series(u, m, terms=40):
    """Independent oracle: Maclaurin series of sn built from the recurrence
    for the coefficients of the defining ODE, summed to `terms` terms.

    sn satisfies y'' = -(1 + m) y + 2 m y^3 with y(0) = 0, y'(0) = 1; the
    cubic nonlinearity is handled by Cauchy products on the coefficient
    arrays, which is an entirely different computation path from the AGM.
    """
    c = [0.0] * terms
    c[1] = 1.0
    for n in range(2, terms):
        # coefficient of u^n in y'' equals (n)(n-1) c[n] shifted: build rhs
        # rhs_n = -(1+m) c[n-2] + 2 m (y^3)_{n-2}
        cube = 0.0
        for i in range(n - 1):
            for j in range(n - 1 - i):
                k = (n - 2) - i - j
                if 0 <= k < terms:
                    cube += c[i] * c[j] * c[k]
        rhs = -(1.0 + m) * c[n - 2] + 2.0 * m * cube
        c[n] = rhs / (n * (n - 1))
    return sum(c[n] * u**n for n in range(terms))


def test_u_zero():
    sn, cn = jacobi_sn_cn(0.0, 0.3)
    assert sn == 0.0
    assert cn == 1.0


def test_degenerate_modulus_zero_is_circular():
    # modulus 0 (complement exactly 1): sn = sin, cn = cos, exactly
    for u in (0.3, 1.0, 2.5):
        sn, cn = jacobi_sn_cn(u, 1.0)
        assert sn == math.sin(u)
        assert cn == math.cos(u)


def test_modulus_half_matches_series_oracle():
    # modulus 0.5 -> complement sqrt(3)/2; u = 1 is inside the series radius
    m = 0.25
    mc = math.sqrt(1.0 - m)
    sn, cn = jacobi_sn_cn(1.0, mc)
    sn_oracle = sn_power_series(1.0, m)
    assert sn == pytest.approx(sn_oracle, abs=1e-12)
    assert cn == pytest.approx(math.sqrt(1.0 - sn_oracle**2), abs=1e-12)


@pytest.mark.parametrize("mc", [0.9, 0.5, 0.1, 1e-3])
@pytest.mark.parametrize("u", [0.2, 0.9, 1.7])
def test_matches_scipy(mc, u):
    sn, cn = jacobi_sn_cn(u, mc)
    sn_ref, cn_ref, _, _ = scipy.special.ellipj(u, 1.0 - mc * mc)
    assert sn == pytest.approx(sn_ref, abs=1e-13)
    assert cn == pytest.approx(cn_ref, abs=1e-13)


@pytest.mark.parametrize("mc", [0.7, 1e-2, 1e-5, 1e-8, 1e-12, 1e-16])
def test_half_quarter_period_closed_form(mc):
    # exact special values: sn(K/2) = 1/sqrt(1+mc), cn(K/2) = sqrt(mc/(1+mc))
    kk = complete_elliptic_k(mc)
    sn, cn = jacobi_sn_cn(0.5 * kk, mc)
    assert sn == pytest.approx(1.0 / math.sqrt(1.0 + mc), rel=1e-10)
    assert cn == pytest.approx(math.sqrt(mc / (1.0 + mc)), rel=1e-7)


@pytest.mark.parametrize("mc", [0.3, 1e-4, 1e-10])
def test_quarter_period_endpoint(mc):
    # sn(K) = 1, cn(K) = 0 for every modulus
    kk = complete_elliptic_k(mc)
    sn, cn = jacobi_sn_cn(kk, mc)
    assert sn == pytest.approx(1.0, rel=1e-10)
    assert abs(cn) < 1e-7


def test_complete_elliptic_k_degenerate():
    assert complete_elliptic_k(1.0) == pytest.approx(math.pi / 2, rel=1e-15)


def test_complete_elliptic_k_matches_scipy():
    for mc in (0.9, 0.5, 0.1, 1e-4):
        ours = complete_elliptic_k(mc)
        ref = scipy.special.ellipkm1(mc * mc)  # K at parameter 1 - mc^2
        assert ours == pytest.approx(ref, rel=1e-14)


def test_complete_elliptic_k_log_growth():
    # K(k -> 1) ~ log(4/mc): check the asymptotic is tracked for tiny mc
    for mc in (1e-6, 1e-12, 1e-16):
        assert complete_elliptic_k(mc) == pytest.approx(math.log(4.0 / mc), rel=1e-6)


@settings(max_examples=60, deadline=None)
@given(
    u=st.floats(min_value=0.0, max_value=1.5),
    mc=st.floats(min_value=1e-12, max_value=1.0),
)
def test_pythagorean_identity(u, mc):
    sn, cn = jacobi_sn_cn(u, mc)
    assert sn * sn + cn * cn == pytest.approx(1.0, abs=1e-10)


def test_rejects_bad_modulus():
    with pytest.raises(ValueError):
        jacobi_sn_cn(1.0, -0.1)
    with pytest.raises(ValueError):
        jacobi_sn_cn(1.0, 1.1)
    with pytest.raises(ValueError):
        complete_elliptic_k(0.0)
