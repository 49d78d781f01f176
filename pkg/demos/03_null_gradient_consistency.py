#!/usr/bin/env python3
"""Why nuclear-norm scaling matters: null-gradient consistency.

Shrinks a fixed gradient toward zero and compares the update magnitudes of
the polar-gradient rule (scaled by the nuclear norm) and Muon (pure matrix
sign).  The former vanishes with the gradient; the latter keeps stepping at
full size, which is what produces Muon's optimality-gap floor.
"""

import numpy as np

from polaropt import Muon, PolarBackend, PolarGrad

rng = np.random.default_rng(7)
g0 = rng.standard_normal((12, 8))
x = np.zeros((12, 8))
backend = PolarBackend(algorithm="svd")

print(f"{'gradient scale c':>16s} {'polar-grad step':>16s} {'muon step':>12s}")
for c in (1.0, 1e-2, 1e-4, 1e-6, 1e-8):
    pg = PolarGrad(lr=1.0, backend=backend).step(x, c * g0)
    mu = Muon(lr=1.0, momentum=0.0, backend=backend).step(x, c * g0)
    print(f"{c:16.0e} {np.linalg.norm(pg):16.3e} {np.linalg.norm(mu):12.3f}")

print("\npolar-gradient updates scale linearly with the gradient; muon's")
print("stay at sqrt(rank) regardless, so it oscillates near an optimum")
print("unless the learning rate is decayed.")

# the momentum variants inherit the property through the nu factor
print("\nzero gradient with a warm momentum buffer:")
opt = PolarGrad(lr=0.5, momentum=0.9, momentum_mode="polar_first", backend=backend)
x1 = opt.step(x, g0)
x2 = opt.step(x1, np.zeros_like(g0))
print(f"  polar-first parameter change on zero gradient: {np.linalg.norm(x2 - x1):.1e}")
print("  (the current gradient's nuclear norm multiplies the whole update)")
