#!/usr/bin/env python3
"""Optimizers on the matrix quadratic regression objective.

Runs polar gradient, Muon, Adam, Newton, and matrix sign descent on one
desk-scale instance and prints the optimality-gap trajectory, illustrating
the nuclear-norm scaling's effect (linear convergence vs Muon's plateau)
and Newton's one-step solve.
"""

from polaropt import (
    Adam,
    MatrixSignSGD,
    Muon,
    NewtonQuad,
    PolarBackend,
    PolarGrad,
    quad_make,
)

prob = quad_make(100, 20, 200, 50, seed=0)
f0 = prob.loss(prob.x0)
print(f"quadratic instance (100, 20, 200, 50): f(x0) = {f0:.4e}, f* = {prob.f_star:.4e}")
print(f"L = {prob.lipschitz:.3e}, mu = {prob.strong_convexity:.3e}, "
      f"kappa_H = {prob.hessian_cond:.1f}\n")

backend = PolarBackend(algorithm="qdwh", inner_steps=2)
optimizers = {
    # the published rate corresponds to ~7.8/(L n); 5/(L n) is the desk-stable choice
    "polar gradient": PolarGrad(lr_mode="theory_rank_max", lr_scale=5.0,
                                lipschitz=prob.lipschitz, backend=backend),
    "muon (0.1)": Muon(lr=0.1, momentum=0.95, backend=backend),
    "adam (0.05)": Adam(lr=0.05),
    "newton (1.0)": NewtonQuad(lr=1.0, problem=prob),
    "sign descent (0.05)": MatrixSignSGD(lr=0.05, backend=backend),
}

checkpoints = (1, 10, 50, 200, 500)
print(f"{'step':>6s}" + "".join(f" {name:>20s}" for name in optimizers))
trajectories = {name: [] for name in optimizers}
xs = {name: prob.x0.copy() for name in optimizers}
for k in range(1, max(checkpoints) + 1):
    for name, opt in optimizers.items():
        xs[name] = opt.step(xs[name], prob.grad(xs[name]))
        trajectories[name].append(prob.gap(xs[name]))
    if k in checkpoints:
        row = "".join(f" {trajectories[name][-1]:20.3e}" for name in optimizers)
        print(f"{k:6d}{row}")

print("\nnewton solves the quadratic in one step (exact preconditioning);")
print("polar gradient converges linearly; sign descent stalls at a floor")
print("because its update magnitude ignores the gradient's nuclear norm.")
