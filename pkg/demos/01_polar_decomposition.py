#!/usr/bin/env python3
"""Tour of the polar decomposition algorithms.

Factors one ill-conditioned matrix with all five algorithms and prints
iteration counts, residuals, and the nuclear-norm identity, then shows how
QDWH and ZOLO-PD iteration counts scale with the condition number.
"""

import numpy as np

from polaropt import (
    NS_CLASSIC,
    NS_TUNED,
    matrix_with_spectrum,
    newton_schulz,
    nuclear_norm,
    polar_reference,
    qdwh,
    scaled_newton,
    sigma_bounds,
    stability_check,
    zolo_pd,
)

rng = np.random.default_rng(0)

# a 60x40 matrix with singular values spread over six decades
a = matrix_with_spectrum(60, 40, np.logspace(0, -6, 40), rng)
print(f"input: 60x40, condition number 1e6, ||a||_* = {nuclear_norm(a):.6f}\n")

results = {
    "svd reference": polar_reference(a),
    "newton-schulz (classic, 40 steps)": newton_schulz(a, steps=40, coeffs=NS_CLASSIC),
    "newton-schulz (tuned, 5 steps)": newton_schulz(a, steps=5, coeffs=NS_TUNED),
    "qdwh": qdwh(a),
    "zolo-pd (r auto)": zolo_pd(a),
}
square = matrix_with_spectrum(40, 40, np.logspace(0, -6, 40), rng)
results["scaled newton (square input)"] = scaled_newton(square)

print(f"{'algorithm':36s} {'iters':>5s} {'recon':>9s} {'orth':>9s} {'trace(h)':>10s}")
for name, fac in results.items():
    src = square if name.startswith("scaled") else a
    rep = stability_check(src, fac)
    print(
        f"{name:36s} {fac.iterations:5d} {rep.reconstruction_residual:9.1e} "
        f"{rep.orthogonality_residual:9.1e} {fac.nuclear_norm:10.4f}"
    )

print("\nthe tuned 5-step map trades orthogonality (~1e-1) for speed;")
print("every converged algorithm reproduces trace(h) = nuclear norm.\n")

# iteration counts against the condition number, exact bounds
print("iterations to converge (exact spectral bounds):")
print(f"{'kappa':>8s} {'qdwh':>6s} {'zolo r=8':>9s}")
for kappa in (1e2, 1e5, 1e8, 1e12, 1e16):
    b = matrix_with_spectrum(60, 40, np.logspace(0, -np.log10(kappa), 40), rng)
    bounds = sigma_bounds(b, "exact")
    fq = qdwh(b, bounds)
    fz = zolo_pd(b, bounds, r=8)
    print(f"{kappa:8.0e} {fq.iterations:6d} {fz.iterations:9d}")
print("\nqdwh needs at most 6 iterations up to kappa 1e16; zolo-pd at r=8 needs 2.")
