"""Jacobi elliptic functions sn, cn and the complete elliptic integral K.

Everything is parameterized by the *complementary* modulus ``mc`` (the
functions are evaluated at modulus ``k = sqrt(1 - mc**2)``), because the
Zolotarev coefficients need sn/cn at a modulus extremely close to 1, where
``k`` itself would round to 1.0 in double precision while ``mc`` stays
perfectly representable.

The workhorse is the descending Landen / arithmetic-geometric-mean
transformation.  For very small complements the AGM phase recursion loses
relative accuracy near the quarter period, so such arguments are first
lifted through exact descending-Landen steps -- each maps the complement
``mc -> 2*sqrt(mc)/(1 + mc)``, so a handful of steps reach well-conditioned
territory -- and the function values are transformed back exactly.
"""

from __future__ import annotations

import math

__all__ = ["complete_elliptic_k", "jacobi_sn_cn"]

_AGM_EPS = 1e-18
# complements below this are lifted by exact Landen steps before the AGM
_LADDER_THRESHOLD = 0.01


def complete_elliptic_k(mc: float) -> float:
    """Complete elliptic integral K(k) with k = sqrt(1 - mc**2).

    Computed as pi / (2 * AGM(1, mc)); accurate for the whole range
    0 < mc <= 1, including mc near 0 where K diverges like log(4/mc).
    """
    if not 0.0 < mc <= 1.0:
        raise ValueError(f"complementary modulus must be in (0, 1], got {mc}")
    a, b = 1.0, mc
    for _ in range(64):  # AGM converges quadratically; 64 is far beyond need
        if abs(a - b) <= _AGM_EPS * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def _sn_cn_dn_agm(u: float, mc: float) -> tuple[float, float, float]:
    """AGM/Landen phase recursion; adequate for mc away from 0."""
    m = (1.0 - mc) * (1.0 + mc)
    if m <= 0.0:
        return math.sin(u), math.cos(u), 1.0
    a_seq = [1.0]
    c_seq = [math.sqrt(m)]
    b = mc
    n = 0
    while abs(c_seq[n]) > _AGM_EPS * abs(a_seq[n]):
        if n > 24:
            break
        a, c = 0.5 * (a_seq[n] + b), 0.5 * (a_seq[n] - b)
        b = math.sqrt(a_seq[n] * b)
        a_seq.append(a)
        c_seq.append(c)
        n += 1
    phi = (2.0**n) * a_seq[n] * u
    for i in range(n, 0, -1):
        t = c_seq[i] * math.sin(phi) / a_seq[i]
        t = max(-1.0, min(1.0, t))
        phi = 0.5 * (math.asin(t) + phi)
    sn, cn = math.sin(phi), math.cos(phi)
    dn = math.sqrt(max(cn * cn + (mc * sn) * (mc * sn), 0.0))
    return sn, cn, dn


def _sn_cn_dn(u: float, mc: float) -> tuple[float, float, float]:
    if mc >= _LADDER_THRESHOLD:
        return _sn_cn_dn_agm(u, mc)
    # exact descending-Landen step: modulus k -> k1 = (1 - mc)/(1 + mc),
    # complement mc -> 2*sqrt(mc)/(1 + mc), argument u -> u/(1 + k1); then
    #   sn(u; k) = (1 + k1) sn1 / (1 + k1 sn1^2)
    #   cn(u; k) = cn1 dn1 / (1 + k1 sn1^2)
    #   dn(u; k) = (1 - k1 sn1^2) / (1 + k1 sn1^2)
    k1 = (1.0 - mc) / (1.0 + mc)
    mc1 = 2.0 * math.sqrt(mc) / (1.0 + mc)
    sn1, cn1, dn1 = _sn_cn_dn(u / (1.0 + k1), min(mc1, 1.0))
    den = 1.0 + k1 * sn1 * sn1
    return (
        (1.0 + k1) * sn1 / den,
        cn1 * dn1 / den,
        (1.0 - k1 * sn1 * sn1) / den,
    )


def jacobi_sn_cn(u: float, mc: float) -> tuple[float, float]:
    """sn(u; k) and cn(u; k) where k = sqrt(1 - mc**2).

    ``mc = 1`` degenerates exactly to (sin u, cos u); ``mc -> 0`` approaches
    (tanh u, sech u).  Arguments in [0, K(k)] are fully supported; the
    implementation remains accurate arbitrarily close to the quarter period.
    """
    if not 0.0 <= mc <= 1.0:
        raise ValueError(f"complementary modulus must be in [0, 1], got {mc}")
    if mc == 1.0:  # modulus 0: circular functions, exactly
        return math.sin(u), math.cos(u)
    if mc == 0.0:  # modulus 1: hyperbolic limit
        return math.tanh(u), 1.0 / math.cosh(u)
    sn, cn, _ = _sn_cn_dn(u, mc)
    return sn, cn
