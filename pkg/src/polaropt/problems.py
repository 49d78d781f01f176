"""The three benchmark objectives: matrix quadratic regression, matrix
logistic regression, and low-rank matrix completion.

Instances are generated from an explicit seed with the Philox counter-based
generator ("philox4x64"), are immutable after construction, and can be
serialized to a small JSON recipe (dims + seed + generator) from which the
identical instance is re-created.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from .linalg import cond2

__all__ = [
    "CompletionProblem",
    "GENERATOR_NAME",
    "LogisticProblem",
    "QuadRegProblem",
    "completion_make",
    "logistic_make",
    "problem_from_recipe",
    "quad_make",
]

GENERATOR_NAME = "philox4x64"

logger = logging.getLogger(__name__)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


# ---------------------------------------------------------------------------
# matrix quadratic regression: f(x) = 0.5 * ||a x b - c||_F^2


@dataclass(frozen=True)
class QuadRegProblem:
    """Strongly convex quadratic with closed-form minimizer and constants.

    The Hessian is (b b') kron (a'a), so L = smax(a)^2 smax(b)^2 and
    mu = smin(a)^2 smin(b)^2; the cached Gram inverses feed the exact
    Newton step.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    x0: np.ndarray
    gram_inv_left: np.ndarray
    gram_inv_right: np.ndarray
    x_star: np.ndarray
    f_star: float
    lipschitz: float
    strong_convexity: float
    kappa_a: float
    kappa_b: float
    seed: int

    kind = "quad"

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return (self.a.shape[1], self.b.shape[0], self.a.shape[0], self.b.shape[1])

    @property
    def hessian_cond(self) -> float:
        return self.kappa_a**2 * self.kappa_b**2

    def residual(self, x: np.ndarray) -> np.ndarray:
        return self.a @ x @ self.b - self.c

    def loss(self, x: np.ndarray) -> float:
        return 0.5 * float(np.linalg.norm(self.residual(x)) ** 2)

    def grad(self, x: np.ndarray) -> np.ndarray:
        return self.a.T @ self.residual(x) @ self.b.T

    def gap(self, x: np.ndarray) -> float:
        """Optimality gap f(x) - f_star via the exact quadratic identity
        0.5 * ||a (x - x_star) b||_F^2, which is free of the catastrophic
        cancellation a direct subtraction would suffer near the optimum."""
        return 0.5 * float(np.linalg.norm(self.a @ (x - self.x_star) @ self.b) ** 2)

    def kappas(self, x: np.ndarray) -> tuple[float, float, float]:
        """(hessian cond, gradient cond, residual cond); the latter two are
        NaN when the corresponding matrix is numerically zero."""
        try:
            kg = cond2(self.grad(x))
        except np.linalg.LinAlgError:
            kg = math.nan
        try:
            ke = cond2(self.residual(x))
        except np.linalg.LinAlgError:
            ke = math.nan
        return self.hessian_cond, kg, ke

    def recipe(self) -> dict:
        m, n, p, q = self.dims
        return {
            "kind": self.kind,
            "dims": {"m": m, "n": n, "p": p, "q": q},
            "seed": self.seed,
            "generator": GENERATOR_NAME,
        }


def quad_make(m: int, n: int, p: int, q: int, seed: int) -> QuadRegProblem:
    """Gaussian data matrices, Unif(-1, 1) initialization, cached oracles.

    A numerically singular Gram matrix (measure zero for Gaussian data) is
    handled by regenerating with the next seed, with a log record.
    """
    if min(m, n, p, q) < 1:
        raise ValueError("dimensions must be positive")
    attempt_seed = seed
    for _ in range(8):
        rng = _rng(attempt_seed)
        a = rng.standard_normal((p, m))
        b = rng.standard_normal((n, q))
        c = rng.standard_normal((p, q))
        x0 = rng.uniform(-1.0, 1.0, (m, n))
        sa = np.linalg.svd(a, compute_uv=False)
        sb = np.linalg.svd(b, compute_uv=False)
        if sa[-1] <= 1e-10 * sa[0] or sb[-1] <= 1e-10 * sb[0]:
            logger.warning(
                "singular Gram matrix for seed %d; regenerating with seed %d",
                attempt_seed,
                attempt_seed + 1,
            )
            attempt_seed += 1
            continue
        gram_left = np.linalg.inv(a.T @ a)
        gram_right = np.linalg.inv(b @ b.T)
        x_star = gram_left @ (a.T @ c @ b.T) @ gram_right
        prob = QuadRegProblem(
            a=a,
            b=b,
            c=c,
            x0=x0,
            gram_inv_left=gram_left,
            gram_inv_right=gram_right,
            x_star=x_star,
            f_star=0.5 * float(np.linalg.norm(a @ x_star @ b - c) ** 2),
            lipschitz=float(sa[0] ** 2 * sb[0] ** 2),
            strong_convexity=float(sa[-1] ** 2 * sb[-1] ** 2),
            kappa_a=float(sa[0] / sa[-1]),
            kappa_b=float(sb[0] / sb[-1]),
            seed=attempt_seed,
        )
        return prob
    raise np.linalg.LinAlgError("could not build a nonsingular quadratic instance")


# ---------------------------------------------------------------------------
# matrix logistic regression: sum_ij log(1 + exp(-c_ij * (a x b)_ij))


@dataclass(frozen=True)
class LogisticProblem:
    """Entrywise logistic loss with 0/1 labels as generated.

    Label entries equal to 0 contribute a constant log 2 and zero gradient,
    exactly as the generating recipe implies; set ``remap_labels=True`` at
    construction for a conventional +/-1 margin loss instead.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    x0: np.ndarray
    batch_size: int
    seed: int
    remap_labels: bool = False

    kind = "logistic"

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return (self.a.shape[1], self.b.shape[0], self.a.shape[0], self.b.shape[1])

    @property
    def n_samples(self) -> int:
        return self.a.shape[0]

    def _labels(self, rows) -> np.ndarray:
        c = self.c if rows is None else self.c[rows]
        return 2.0 * c - 1.0 if self.remap_labels else c

    def loss(self, x: np.ndarray, rows=None) -> float:
        a = self.a if rows is None else self.a[rows]
        z = a @ x @ self.b
        return float(np.logaddexp(0.0, -self._labels(rows) * z).sum())

    def grad(self, x: np.ndarray, rows=None, estimate_full: bool = True) -> np.ndarray:
        """Gradient of the entrywise loss.

        With ``rows`` given (a minibatch) and ``estimate_full=True`` the
        batch gradient is scaled by N/batch so it is an unbiased estimator
        of the full-objective gradient.
        """
        a = self.a if rows is None else self.a[rows]
        labels = self._labels(rows)
        z = a @ x @ self.b
        g = a.T @ (-labels * _sigmoid(-labels * z)) @ self.b.T
        if rows is not None and estimate_full:
            g *= self.n_samples / len(rows)
        return g

    def sample_rows(self, rng: np.random.Generator) -> np.ndarray:
        """Minibatch row indices, uniform with replacement."""
        return rng.integers(0, self.n_samples, self.batch_size)

    def recipe(self) -> dict:
        m, n, nn, q = self.dims
        return {
            "kind": self.kind,
            "dims": {"m": m, "n": n, "N": nn, "q": q},
            "seed": self.seed,
            "generator": GENERATOR_NAME,
            "batch_size": self.batch_size,
            "remap_labels": self.remap_labels,
        }


def logistic_make(
    m: int,
    n: int,
    n_samples: int,
    q: int,
    seed: int,
    batch_size: int | None = None,
    remap_labels: bool = False,
) -> LogisticProblem:
    """Gaussian features; labels are 1 where a Gaussian draw exceeds 0.5."""
    if min(m, n, n_samples, q) < 1:
        raise ValueError("dimensions must be positive")
    rng = _rng(seed)
    a = rng.standard_normal((n_samples, m))
    b = rng.standard_normal((n, q))
    c = (rng.standard_normal((n_samples, q)) > 0.5).astype(np.float64)
    x0 = rng.uniform(-1.0, 1.0, (m, n))
    bs = batch_size if batch_size is not None else n_samples
    if not 1 <= bs <= n_samples:
        raise ValueError(f"batch_size must be in [1, {n_samples}], got {bs}")
    return LogisticProblem(
        a=a, b=b, c=c, x0=x0, batch_size=bs, seed=seed, remap_labels=remap_labels
    )


# ---------------------------------------------------------------------------
# low-rank matrix completion: ||mask o (x y' - m_star)||_F^2 / ||mask||_F^2


@dataclass(frozen=True)
class CompletionProblem:
    """Masked two-factor completion of a rank-r target."""

    mask: np.ndarray
    m_star: np.ndarray
    u_star: np.ndarray
    v_star: np.ndarray
    x0: np.ndarray
    y0: np.ndarray
    seed: int
    density: float

    kind = "completion"

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.mask.shape[0], self.mask.shape[1], self.u_star.shape[1])

    @property
    def n_observed(self) -> float:
        return float((self.mask * self.mask).sum())

    def loss(self, x: np.ndarray, y: np.ndarray) -> float:
        e = self.mask * (x @ y.T - self.m_star)
        return float(np.linalg.norm(e) ** 2 / self.n_observed)

    def grads(self, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        e = self.mask * (x @ y.T - self.m_star)
        s = self.n_observed
        return 2.0 * e @ y / s, 2.0 * e.T @ x / s

    def recipe(self) -> dict:
        m, n, r = self.dims
        return {
            "kind": self.kind,
            "dims": {"m": m, "n": n, "r": r},
            "seed": self.seed,
            "generator": GENERATOR_NAME,
            "density": self.density,
        }


def completion_make(
    m: int, n: int, r: int, seed: int, density: float = 0.3
) -> CompletionProblem:
    """Bernoulli(density) mask, Gaussian rank-r target, Unif(-1,1) start."""
    if min(m, n, r) < 1:
        raise ValueError("dimensions must be positive")
    if not 0.0 < density <= 1.0:
        raise ValueError("density must be in (0, 1]")
    rng = _rng(seed)
    mask = (rng.uniform(0.0, 1.0, (m, n)) < density).astype(np.float64)
    if mask.sum() == 0:  # degenerate draw on tiny instances
        mask[0, 0] = 1.0
    u_star = rng.standard_normal((m, r))
    v_star = rng.standard_normal((n, r))
    x0 = rng.uniform(-1.0, 1.0, (m, r))
    y0 = rng.uniform(-1.0, 1.0, (n, r))
    return CompletionProblem(
        mask=mask,
        m_star=u_star @ v_star.T,
        u_star=u_star,
        v_star=v_star,
        x0=x0,
        y0=y0,
        seed=seed,
        density=density,
    )


# ---------------------------------------------------------------------------
# serialization


def problem_from_recipe(recipe: dict | str):
    """Re-create a problem instance from its JSON recipe (dict or string)."""
    if isinstance(recipe, str):
        recipe = json.loads(recipe)
    kind = recipe["kind"]
    dims = recipe["dims"]
    seed = int(recipe["seed"])
    gen = recipe.get("generator", GENERATOR_NAME)
    if gen != GENERATOR_NAME:
        raise ValueError(f"unsupported generator {gen!r}; this build uses {GENERATOR_NAME}")
    if kind == "quad":
        return quad_make(dims["m"], dims["n"], dims["p"], dims["q"], seed)
    if kind == "logistic":
        return logistic_make(
            dims["m"],
            dims["n"],
            dims["N"],
            dims["q"],
            seed,
            batch_size=recipe.get("batch_size"),
            remap_labels=bool(recipe.get("remap_labels", False)),
        )
    if kind == "completion":
        return completion_make(
            dims["m"], dims["n"], dims["r"], seed, density=float(recipe.get("density", 0.3))
        )
    raise ValueError(f"unknown problem kind: {kind!r}")
