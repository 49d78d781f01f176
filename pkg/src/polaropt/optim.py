"""Step rules for polar-gradient optimizers and baselines.

Each optimizer owns its mutable state (momentum buffer, step counter) and
exposes ``step(x, grad) -> x_new``; distinct optimizer instances never share
state, so separate parameter groups may step concurrently.

The polar-gradient family scales the orthogonalized gradient by the nuclear
norm ``nu = <g, msgn(g)>`` (the dual-norm identity, cheaper than an extra
trace of the Hermitian factor).  Muon in its original form omits that
scaling, which is exactly what the null-gradient-consistency tests probe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_RANK_TOL, as_matrix, numeric_rank
from .polar import (
    NS_TUNED,
    NsCoefficients,
    PolarFactors,
    newton_schulz,
    polar_reference,
    qdwh,
    scaled_newton,
    zolo_pd,
)

__all__ = [
    "Adam",
    "AltGD",
    "MatrixSignSGD",
    "Muon",
    "NewtonQuad",
    "PolarBackend",
    "PolarGrad",
    "PolarStepError",
    "Schedule",
    "schedule_value",
]


class PolarStepError(RuntimeError):
    """Raised when the polar backend fails to converge; the step is aborted
    and parameters are left untouched."""


# ---------------------------------------------------------------------------
# learning-rate schedules


@dataclass(frozen=True)
class Schedule:
    """Learning-rate schedule; ``value(k)`` is the rate used at step k (0-based).

    Variants:
      constant        -- gamma0 forever.
      step_decay      -- gamma0 * factor**(k // every).
      linear_to_zero  -- gamma0 until (1 - decay_ratio) * total_steps, then
                         linear decay to 0 at total_steps (the decay occupies
                         the last decay_ratio fraction of training).
      warmup_cosine   -- linear ramp over warmup_steps, then cosine to 0.
    """

    kind: str = "constant"
    gamma0: float = 1.0
    factor: float = 0.99
    every: int = 25
    total_steps: int = 0
    decay_ratio: float = 0.4
    warmup_steps: int = 0

    @staticmethod
    def constant(gamma0: float) -> "Schedule":
        return Schedule(kind="constant", gamma0=gamma0)

    @staticmethod
    def step_decay(gamma0: float, factor: float, every: int) -> "Schedule":
        return Schedule(kind="step_decay", gamma0=gamma0, factor=factor, every=every)

    @staticmethod
    def linear_to_zero(gamma0: float, total_steps: int, decay_ratio: float = 0.4) -> "Schedule":
        return Schedule(
            kind="linear_to_zero", gamma0=gamma0, total_steps=total_steps, decay_ratio=decay_ratio
        )

    @staticmethod
    def warmup_cosine(gamma0: float, warmup_steps: int, total_steps: int) -> "Schedule":
        return Schedule(
            kind="warmup_cosine",
            gamma0=gamma0,
            total_steps=total_steps,
            warmup_steps=warmup_steps,
        )

    def value(self, k: int) -> float:
        if k < 0:
            raise ValueError("step index must be >= 0")
        if self.kind == "constant":
            return self.gamma0
        if self.kind == "step_decay":
            return self.gamma0 * self.factor ** (k // self.every)
        if self.kind == "linear_to_zero":
            start = (1.0 - self.decay_ratio) * self.total_steps
            if k <= start:
                return self.gamma0
            if k >= self.total_steps:
                return 0.0
            return self.gamma0 * (self.total_steps - k) / (self.total_steps - start)
        if self.kind == "warmup_cosine":
            if self.warmup_steps > 0 and k < self.warmup_steps:
                return self.gamma0 * (k + 1) / self.warmup_steps
            if k >= self.total_steps:
                return 0.0
            span = max(self.total_steps - self.warmup_steps, 1)
            frac = (k - self.warmup_steps) / span
            return self.gamma0 * 0.5 * (1.0 + math.cos(math.pi * frac))
        raise ValueError(f"unknown schedule kind: {self.kind!r}")


def schedule_value(schedule: Schedule, k: int) -> float:
    return schedule.value(k)


def _as_schedule(lr) -> Schedule:
    return lr if isinstance(lr, Schedule) else Schedule.constant(float(lr))


# ---------------------------------------------------------------------------
# polar backend


@dataclass(frozen=True)
class PolarBackend:
    """Resolves an algorithm name plus inner settings to polar factors.

    ``inner_steps`` is the inner iteration budget (Newton-Schulz steps or
    the QDWH iteration cap).  Small budgets yield deliberately approximate
    orthogonal factors, which is how these optimizers are run in practice
    ("inner steps 2"); with ``strict=True`` an unconverged factorization
    raises :class:`PolarStepError` instead, aborting the optimizer step
    with parameters untouched.
    """

    algorithm: str = "svd"  # svd | newton_schulz | scaled_newton | qdwh | zolo_pd
    inner_steps: int = 2
    ns_coeffs: NsCoefficients = NS_TUNED
    zolo_order: int | str = "auto"
    strict: bool = False

    def factors(self, g: np.ndarray) -> PolarFactors:
        if self.algorithm == "svd":
            return polar_reference(g)
        if self.algorithm == "newton_schulz":
            return newton_schulz(g, steps=self.inner_steps, coeffs=self.ns_coeffs)
        if self.algorithm == "scaled_newton":
            return scaled_newton(g, max_steps=max(self.inner_steps, 12))
        if self.algorithm == "qdwh":
            return qdwh(g, max_steps=self.inner_steps)
        if self.algorithm == "zolo_pd":
            return zolo_pd(g, r=self.zolo_order)
        raise ValueError(f"unknown polar algorithm: {self.algorithm!r}")

    def orthogonalize(self, g: np.ndarray) -> tuple[np.ndarray, float]:
        """Orthogonal factor and nuclear norm ``<g, u>`` of ``g``.

        A zero matrix maps to (0, 0): zero gradients never move parameters.
        """
        if not np.any(g):
            return np.zeros_like(g), 0.0
        fac = self.factors(g)
        if self.strict and not fac.converged:
            raise PolarStepError(
                f"{self.algorithm} did not converge in {fac.iterations} iterations"
            )
        nu = float(np.sum(g * fac.u))
        return fac.u, nu


# ---------------------------------------------------------------------------
# optimizers


class PolarGrad:
    """Polar-gradient step rules with optional momentum and decoupled decay.

    ``momentum_mode``:
      "none"           x <- (1 - lam*g)x - g * nu * msgn(G)
      "momentum_first" EMA momentum, polar of the momentum buffer
      "polar_first"    polar of the gradient, EMA momentum of orthogonal
                       factors, scaled by the *current* gradient's nu
      "heavy_ball"     M <- beta*M + G (no 1-beta), then polar of M
    """

    MODES = ("none", "momentum_first", "polar_first", "heavy_ball")

    LR_MODES = ("schedule", "theory_rank", "theory_rank_max")

    def __init__(
        self,
        lr=1.0,
        weight_decay: float = 0.0,
        momentum: float = 0.0,
        momentum_mode: str = "none",
        backend: PolarBackend | None = None,
        lr_mode: str = "schedule",
        lipschitz: float | None = None,
        lr_scale: float = 1.0,
        rank_tol: float = DEFAULT_RANK_TOL,
    ):
        if momentum_mode not in self.MODES:
            raise ValueError(f"momentum_mode must be one of {self.MODES}")
        if lr_mode not in self.LR_MODES:
            raise ValueError(f"lr_mode must be one of {self.LR_MODES}")
        if lr_mode != "schedule" and (lipschitz is None or lipschitz <= 0):
            raise ValueError("theory lr modes need a positive Lipschitz constant")
        if not 0.0 <= momentum < 1.0:
            raise ValueError("momentum must be in [0, 1)")
        if weight_decay < 0.0:
            raise ValueError("weight_decay must be >= 0")
        self.schedule = _as_schedule(lr)
        self.weight_decay = float(weight_decay)
        self.momentum = float(momentum)
        self.momentum_mode = momentum_mode
        self.backend = backend or PolarBackend()
        self.lr_mode = lr_mode
        self.lipschitz = lipschitz
        self.lr_scale = float(lr_scale)
        self.rank_tol = rank_tol
        self.step_count = 0
        self.last_lr: float | None = None
        self.momentum_buffer: np.ndarray | None = None

    def _buffer(self, like: np.ndarray) -> np.ndarray:
        if self.momentum_buffer is None:
            self.momentum_buffer = np.zeros_like(like)
        return self.momentum_buffer

    def _learning_rate(self, grad: np.ndarray) -> float:
        if self.lr_mode == "schedule":
            return self.schedule.value(self.step_count)
        # theory modes: gamma = scale / (L * r) with r the gradient rank
        # (recomputed each step) or its cheap upper bound min(m, n).
        if self.lr_mode == "theory_rank":
            sigma = np.linalg.svd(grad, compute_uv=False)
            r = max(numeric_rank(sigma, self.rank_tol), 1)
        else:
            r = min(grad.shape)
        return self.lr_scale / (self.lipschitz * r)

    def step(self, x, grad) -> np.ndarray:
        x = as_matrix(x, "x")
        grad = as_matrix(grad, "grad")
        if x.shape != grad.shape:
            raise ValueError(f"shape mismatch: x {x.shape} vs grad {grad.shape}")
        lr = self._learning_rate(grad)
        self.last_lr = lr
        beta = self.momentum
        mode = self.momentum_mode

        if mode == "none":
            u, nu = self.backend.orthogonalize(grad)
            direction = nu * u
        elif mode == "momentum_first":
            m = self._buffer(grad)
            m *= beta
            m += (1.0 - beta) * grad
            u, nu = self.backend.orthogonalize(m)
            direction = nu * u
        elif mode == "polar_first":
            u, nu = self.backend.orthogonalize(grad)
            m = self._buffer(grad)
            m *= beta
            m += (1.0 - beta) * u
            direction = nu * m
        else:  # heavy_ball
            m = self._buffer(grad)
            m *= beta
            m += grad
            u, nu = self.backend.orthogonalize(m)
            direction = nu * u

        new_x = (1.0 - self.weight_decay * lr) * x - lr * direction
        self.step_count += 1
        return new_x


class Muon:
    """Muon: EMA momentum followed by plain orthogonalization.

    The update is ``x <- (1 - lam*g)x - g * s * msgn(M)`` where the scale s
    is 1 ("one"), sqrt(max(1, m/n)) ("shape"), sqrt(max(m, n)) ("max_dim"),
    or the momentum's nuclear norm ("nuclear", which makes Muon coincide
    with momentum-first PolarGrad on the same backend).
    """

    SCALE_MODES = ("one", "shape", "max_dim", "nuclear")

    def __init__(
        self,
        lr,
        momentum: float = 0.95,
        weight_decay: float = 0.0,
        scale_mode: str = "one",
        backend: PolarBackend | None = None,
    ):
        if scale_mode not in self.SCALE_MODES:
            raise ValueError(f"scale_mode must be one of {self.SCALE_MODES}")
        if not 0.0 <= momentum < 1.0:
            raise ValueError("momentum must be in [0, 1)")
        self.schedule = _as_schedule(lr)
        self.momentum = float(momentum)
        self.weight_decay = float(weight_decay)
        self.scale_mode = scale_mode
        self.backend = backend or PolarBackend()
        self.step_count = 0
        self.last_lr: float | None = None
        self.momentum_buffer: np.ndarray | None = None

    def step(self, x, grad) -> np.ndarray:
        x = as_matrix(x, "x")
        grad = as_matrix(grad, "grad")
        lr = self.schedule.value(self.step_count)
        self.last_lr = lr
        if self.momentum_buffer is None:
            self.momentum_buffer = np.zeros_like(grad)
        m = self.momentum_buffer
        m *= self.momentum
        m += (1.0 - self.momentum) * grad
        u, nu = self.backend.orthogonalize(m)
        if self.scale_mode == "one":
            s = 1.0
        elif self.scale_mode == "shape":
            s = math.sqrt(max(1.0, x.shape[0] / x.shape[1]))
        elif self.scale_mode == "max_dim":
            s = math.sqrt(max(x.shape))
        else:
            s = nu
        # grouped as lr * (s * u) so the "nuclear" mode reproduces
        # momentum-first polar-gradient steps bit for bit
        new_x = (1.0 - self.weight_decay * lr) * x - lr * (s * u)
        self.step_count += 1
        return new_x


class MatrixSignSGD:
    """Matrix sign descent: ``x <- x - g * msgn(grad)``, no momentum, no
    nuclear scaling.  Scale-invariant in the gradient, hence plateaus at a
    learning-rate-dependent floor on strongly convex problems."""

    def __init__(self, lr, backend: PolarBackend | None = None):
        self.schedule = _as_schedule(lr)
        self.backend = backend or PolarBackend()
        self.step_count = 0
        self.last_lr: float | None = None

    def step(self, x, grad) -> np.ndarray:
        x = as_matrix(x, "x")
        grad = as_matrix(grad, "grad")
        lr = self.schedule.value(self.step_count)
        self.last_lr = lr
        u, _ = self.backend.orthogonalize(grad)
        new_x = x - lr * u
        self.step_count += 1
        return new_x


class Adam:
    """Elementwise Adam with bias correction and decoupled weight decay."""

    def __init__(
        self,
        lr,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
        weight_decay: float = 0.0,
    ):
        b1, b2 = betas
        if not (0.0 <= b1 < 1.0 and 0.0 <= b2 < 1.0):
            raise ValueError("betas must be in [0, 1)")
        if eps <= 0.0:
            raise ValueError("eps must be > 0")
        self.schedule = _as_schedule(lr)
        self.beta1, self.beta2 = float(b1), float(b2)
        self.eps = float(eps)
        self.weight_decay = float(weight_decay)
        self.step_count = 0
        self.last_lr: float | None = None
        self.m: np.ndarray | None = None
        self.v: np.ndarray | None = None

    def step(self, x, grad) -> np.ndarray:
        x = as_matrix(x, "x")
        grad = as_matrix(grad, "grad")
        lr = self.schedule.value(self.step_count)
        self.last_lr = lr
        if self.m is None:
            self.m = np.zeros_like(grad)
            self.v = np.zeros_like(grad)
        self.m *= self.beta1
        self.m += (1.0 - self.beta1) * grad
        self.v *= self.beta2
        self.v += (1.0 - self.beta2) * grad * grad
        k = self.step_count + 1
        mhat = self.m / (1.0 - self.beta1**k)
        vhat = self.v / (1.0 - self.beta2**k)
        new_x = (1.0 - self.weight_decay * lr) * x - lr * mhat / (np.sqrt(vhat) + self.eps)
        self.step_count += 1
        return new_x


class NewtonQuad:
    """Exact Newton step for the quadratic regression problem, using the
    cached Gram inverses: ``x <- x - g * inv(A'A) grad inv(BB')``.

    With g = 1 this reaches the minimizer in a single step.
    """

    def __init__(self, lr, problem):
        self.schedule = _as_schedule(lr)
        self.problem = problem
        self.step_count = 0
        self.last_lr: float | None = None

    def step(self, x, grad) -> np.ndarray:
        x = as_matrix(x, "x")
        grad = as_matrix(grad, "grad")
        lr = self.schedule.value(self.step_count)
        self.last_lr = lr
        g_pre = self.problem.gram_inv_left @ grad @ self.problem.gram_inv_right
        self.step_count += 1
        return x - lr * g_pre


class AltGD:
    """Alternating gradient descent for the two-factor completion problem:
    a gradient step in x with the current y, then a step in y with the
    *updated* x."""

    def __init__(self, lr, problem):
        self.schedule = _as_schedule(lr)
        self.problem = problem
        self.step_count = 0
        self.last_lr: float | None = None

    def step(self, x, y) -> tuple[np.ndarray, np.ndarray]:
        lr = self.schedule.value(self.step_count)
        self.last_lr = lr
        gx, _ = self.problem.grads(x, y)
        x = x - lr * gx
        _, gy = self.problem.grads(x, y)
        y = y - lr * gy
        self.step_count += 1
        return x, y
