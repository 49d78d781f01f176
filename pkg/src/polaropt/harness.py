"""Experiment runner: config grammar, presets, training loop, CSV traces.

A run is described by a :class:`RunConfig` (parseable from a flat key-value
text file), executes deterministically given its config, and produces two
files: a CSV trace with the fixed column order

    step,loss,gap,grad_cond,residual_cond,grad_nuclear,lr,wall_ms

and a key-value manifest recording the config hash, problem recipe, final
metrics and completion status.  Identical configs yield byte-identical CSVs
except for the wall_ms column.

Condition numbers and nuclear norms are always measured on the *full*
gradient (even for minibatch runs) at a sparser cadence than the loss,
since they cost an SVD.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .linalg import cond2, nuclear_norm
from .optim import (
    Adam,
    AltGD,
    MatrixSignSGD,
    Muon,
    NewtonQuad,
    PolarBackend,
    PolarGrad,
    PolarStepError,
    Schedule,
)
from .problems import problem_from_recipe

__all__ = [
    "RunConfig",
    "RunResult",
    "TraceRecord",
    "TRACE_COLUMNS",
    "TRACE_SCHEMA",
    "compare_runs",
    "export_config",
    "list_presets",
    "parse_config",
    "preset",
    "read_manifest",
    "read_trace",
    "run_experiment",
]

TRACE_SCHEMA = "polaropt-trace v1"
TRACE_COLUMNS = ("step", "loss", "gap", "grad_cond", "residual_cond", "grad_nuclear", "lr", "wall_ms")

#: Offset mixed into the problem seed to derive the run's minibatch RNG
#: stream; fixed so that identical configs replay identical batches.
_BATCH_STREAM_OFFSET = 0x5DEECE66D


@dataclass(frozen=True)
class RunConfig:
    """Complete description of one experiment run."""

    label: str
    problem: dict
    optimizer: dict
    schedule: dict
    total_steps: int
    loss_every: int = 1
    cond_every: int = 10

    def __post_init__(self):
        if self.total_steps < 1:
            raise ValueError("total_steps must be >= 1")
        if self.loss_every < 1 or self.cond_every < 1:
            raise ValueError("metric cadences must be >= 1")


@dataclass
class TraceRecord:
    step: int
    loss: float
    gap: float | None = None
    grad_cond: float | None = None
    residual_cond: float | None = None
    grad_nuclear: float | None = None
    lr: float | None = None
    wall_ms: float | None = None


@dataclass
class RunResult:
    config: RunConfig
    records: list[TraceRecord]
    status: str  # "ok" | "diverged" | "aborted"
    final_loss: float | None
    final_gap: float | None
    trace_path: Path | None = None
    manifest_path: Path | None = None
    divergence_step: int | None = None
    detail: str = ""


# ---------------------------------------------------------------------------
# flat key-value config grammar


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _flatten(prefix: str, obj, out: dict):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], out)
    else:
        out[prefix] = obj


def export_config(cfg: RunConfig) -> str:
    """Render a config as deterministic flat ``key = value`` text.

    Grammar: one ``key = value`` pair per line; dotted keys nest; ``#``
    starts a comment; values are JSON scalars (bare strings allowed).
    """
    flat: dict = {}
    _flatten("label", cfg.label, flat)
    _flatten("problem", cfg.problem, flat)
    _flatten("optimizer", cfg.optimizer, flat)
    _flatten("schedule", cfg.schedule, flat)
    flat["total_steps"] = cfg.total_steps
    flat["loss_every"] = cfg.loss_every
    flat["cond_every"] = cfg.cond_every
    lines = [f"{k} = {_format_value(flat[k])}" for k in sorted(flat)]
    return "\n".join(lines) + "\n"


def _parse_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw  # bare string


def parse_config(text: str) -> RunConfig:
    """Parse the flat key-value grammar produced by :func:`export_config`."""
    tree: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        node = tree
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ValueError(f"config line {lineno}: key collision at {key!r}")
        node[parts[-1]] = _parse_value(raw)
    for section in ("problem", "optimizer", "schedule"):
        if section not in tree:
            raise ValueError(f"config is missing the {section!r} section")
    if "total_steps" not in tree:
        raise ValueError("config is missing total_steps")
    return RunConfig(
        label=str(tree.get("label", "run")),
        problem=tree["problem"],
        optimizer=tree["optimizer"],
        schedule=tree["schedule"],
        total_steps=int(tree["total_steps"]),
        loss_every=int(tree.get("loss_every", 1)),
        cond_every=int(tree.get("cond_every", 10)),
    )


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(export_config(cfg).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# optimizer construction


def _build_schedule(spec: dict) -> Schedule:
    kind = spec.get("kind", "constant")
    return Schedule(
        kind=kind,
        gamma0=float(spec.get("gamma0", 1.0)),
        factor=float(spec.get("factor", 0.99)),
        every=int(spec.get("every", 25)),
        total_steps=int(spec.get("total_steps", 0)),
        decay_ratio=float(spec.get("decay_ratio", 0.4)),
        warmup_steps=int(spec.get("warmup_steps", 0)),
    )


def _build_backend(spec: dict) -> PolarBackend:
    return PolarBackend(
        algorithm=spec.get("backend", "svd"),
        inner_steps=int(spec.get("inner_steps", 2)),
        zolo_order=spec.get("zolo_order", "auto"),
    )


def _build_optimizer(opt_spec: dict, schedule: Schedule, problem):
    name = opt_spec["name"]
    wd = float(opt_spec.get("weight_decay", 0.0))
    if name in ("polar_grad", "polar_gradm", "polar_gradm_polar_first", "polar_hb"):
        mode = {
            "polar_grad": "none",
            "polar_gradm": "momentum_first",
            "polar_gradm_polar_first": "polar_first",
            "polar_hb": "heavy_ball",
        }[name]
        lr_mode = opt_spec.get("lr_mode", "schedule")
        lipschitz = None
        if lr_mode != "schedule":
            if not hasattr(problem, "lipschitz"):
                raise ValueError(f"lr_mode {lr_mode!r} needs a problem with a known Lipschitz constant")
            lipschitz = problem.lipschitz
        return PolarGrad(
            lr=schedule,
            weight_decay=wd,
            momentum=float(opt_spec.get("momentum", 0.0)),
            momentum_mode=mode,
            backend=_build_backend(opt_spec),
            lr_mode=lr_mode,
            lipschitz=lipschitz,
            lr_scale=float(opt_spec.get("lr_scale", 1.0)),
        )
    if name == "muon":
        return Muon(
            lr=schedule,
            momentum=float(opt_spec.get("momentum", 0.95)),
            weight_decay=wd,
            scale_mode=opt_spec.get("scale_mode", "one"),
            backend=_build_backend(opt_spec),
        )
    if name == "matrix_signsgd":
        return MatrixSignSGD(lr=schedule, backend=_build_backend(opt_spec))
    if name == "adam":
        return Adam(
            lr=schedule,
            betas=(float(opt_spec.get("beta1", 0.9)), float(opt_spec.get("beta2", 0.999))),
            eps=float(opt_spec.get("eps", 1e-8)),
            weight_decay=wd,
        )
    if name == "newton":
        if not hasattr(problem, "gram_inv_left"):
            raise ValueError("newton is only defined for the quadratic regression problem")
        return NewtonQuad(lr=schedule, problem=problem)
    if name == "altgd":
        if problem.kind != "completion":
            raise ValueError("altgd is only defined for the completion problem")
        return AltGD(lr=schedule, problem=problem)
    raise ValueError(f"unknown optimizer name: {name!r}")


# ---------------------------------------------------------------------------
# the training loop


def _fmt_field(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float) and math.isnan(v):
        return ""
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _write_trace(path: Path, records: list[TraceRecord]):
    lines = [f"# {TRACE_SCHEMA}", ",".join(TRACE_COLUMNS)]
    for r in records:
        lines.append(
            ",".join(
                _fmt_field(v)
                for v in (
                    r.step,
                    r.loss,
                    r.gap,
                    r.grad_cond,
                    r.residual_cond,
                    r.grad_nuclear,
                    r.lr,
                    r.wall_ms,
                )
            )
        )
    path.write_text("\n".join(lines) + "\n")


def _write_manifest(path: Path, cfg: RunConfig, result: RunResult):
    from . import __version__

    kv = {
        "schema": TRACE_SCHEMA,
        "version": f"polaropt {__version__}",
        "label": cfg.label,
        "config_hash": config_hash(cfg),
        "problem": json.dumps(cfg.problem, sort_keys=True),
        "optimizer": json.dumps(cfg.optimizer, sort_keys=True),
        "schedule": json.dumps(cfg.schedule, sort_keys=True),
        "total_steps": cfg.total_steps,
        "status": result.status,
        "final_loss": _fmt_field(result.final_loss) or "nan",
        "final_gap": _fmt_field(result.final_gap) or "",
        "divergence_step": "" if result.divergence_step is None else result.divergence_step,
        "detail": result.detail,
    }
    path.write_text("\n".join(f"{k} = {v}" for k, v in kv.items()) + "\n")


def read_trace(path) -> dict[str, np.ndarray]:
    """Load a trace CSV into column arrays (missing fields become NaN)."""
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    if tuple(header) != TRACE_COLUMNS:
        raise ValueError(f"{path}: unexpected trace columns {header}")
    cols: dict[str, list[float]] = {c: [] for c in header}
    for ln in lines[1:]:
        for c, fieldval in zip(header, ln.split(",")):
            cols[c].append(float(fieldval) if fieldval else math.nan)
    return {c: np.asarray(v) for c, v in cols.items()}


def read_manifest(path) -> dict[str, str]:
    out = {}
    for ln in Path(path).read_text().splitlines():
        if not ln.strip() or ln.startswith("#"):
            continue
        k, v = ln.split("=", 1)
        out[k.strip()] = v.strip()
    return out


class _Runner:
    """Per-problem-kind glue: parameters, gradients, metrics."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.problem = problem_from_recipe(cfg.problem)
        self.schedule = _build_schedule(cfg.schedule)
        kind = self.problem.kind
        self.two_params = kind == "completion"
        self.opt = _build_optimizer(cfg.optimizer, self.schedule, self.problem)
        if self.two_params and not isinstance(self.opt, AltGD):
            # joint mode: each factor gets its own optimizer state
            self.opt2 = _build_optimizer(cfg.optimizer, self.schedule, self.problem)
        else:
            self.opt2 = None
        self.batched = (
            kind == "logistic" and self.problem.batch_size < self.problem.n_samples
        )
        self.batch_rng = np.random.Generator(
            np.random.Philox(int(cfg.problem.get("seed", 0)) + _BATCH_STREAM_OFFSET)
        )
        if kind == "completion":
            self.x, self.y = self.problem.x0.copy(), self.problem.y0.copy()
        else:
            self.x, self.y = self.problem.x0.copy(), None

    # -- metrics ----------------------------------------------------------

    def loss(self) -> float:
        if self.two_params:
            return self.problem.loss(self.x, self.y)
        return self.problem.loss(self.x)

    def gap(self, loss: float) -> float | None:
        if self.problem.kind == "quad":
            return loss - self.problem.f_star
        if self.problem.kind == "completion":
            return loss  # exact completion reaches zero loss
        return None

    def full_grad(self) -> np.ndarray:
        if self.two_params:
            gx, _ = self.problem.grads(self.x, self.y)
            return gx  # condition metrics track the first factor's gradient
        return self.problem.grad(self.x)

    def cond_metrics(self) -> tuple[float | None, float | None, float | None]:
        g = self.full_grad()
        try:
            gc = cond2(g)
        except np.linalg.LinAlgError:
            gc = None
        rc = None
        if self.problem.kind == "quad":
            try:
                rc = cond2(self.problem.residual(self.x))
            except np.linalg.LinAlgError:
                rc = None
        gn = nuclear_norm(g) if np.any(g) else 0.0
        return gc, rc, gn

    # -- stepping ---------------------------------------------------------

    def step(self):
        if self.two_params:
            if isinstance(self.opt, AltGD):
                self.x, self.y = self.opt.step(self.x, self.y)
            else:
                gx, gy = self.problem.grads(self.x, self.y)
                new_x = self.opt.step(self.x, gx)
                new_y = self.opt2.step(self.y, gy)
                self.x, self.y = new_x, new_y
            return
        if self.batched:
            rows = self.problem.sample_rows(self.batch_rng)
            grad = self.problem.grad(self.x, rows)
        else:
            grad = self.problem.grad(self.x)
        self.x = self.opt.step(self.x, grad)

    @property
    def last_lr(self) -> float | None:
        return self.opt.last_lr


def run_experiment(cfg: RunConfig, out_dir=None) -> RunResult:
    """Execute one run; optionally write trace CSV + manifest into out_dir.

    A non-finite loss terminates the run with status "diverged" (a structured
    record, not a crash); a polar backend that fails to converge terminates
    with status "aborted".  Both leave the trace written up to the event.
    """
    runner = _Runner(cfg)
    records: list[TraceRecord] = []
    status = "ok"
    divergence_step = None
    detail = ""
    t0 = time.perf_counter()

    def record(k: int) -> TraceRecord | None:
        want_loss = k % cfg.loss_every == 0 or k == cfg.total_steps
        if not want_loss:
            return None
        loss = runner.loss()
        rec = TraceRecord(step=k, loss=loss, gap=runner.gap(loss))
        if k % cfg.cond_every == 0 or k == cfg.total_steps:
            rec.grad_cond, rec.residual_cond, rec.grad_nuclear = runner.cond_metrics()
        rec.wall_ms = (time.perf_counter() - t0) * 1e3
        return rec

    rec = record(0)
    if rec is not None:
        records.append(rec)  # pre-step snapshot; no learning rate yet
    for k in range(cfg.total_steps):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                runner.step()
        except PolarStepError as exc:
            status = "aborted"
            divergence_step = k
            detail = str(exc)
            break
        except (ValueError, np.linalg.LinAlgError) as exc:
            # non-finite iterates surface as validation/factorization errors
            status = "diverged"
            divergence_step = k
            detail = f"{type(exc).__name__}: {exc}"
            break
        rec = record(k + 1)
        if rec is not None:
            rec.lr = runner.last_lr
            if not math.isfinite(rec.loss):
                status = "diverged"
                divergence_step = k + 1
                detail = f"non-finite loss at step {k + 1}"
                records.append(rec)
                break
            records.append(rec)

    finite = [r for r in records if math.isfinite(r.loss)]
    final_loss = finite[-1].loss if finite else None
    final_gap = finite[-1].gap if finite else None
    result = RunResult(
        config=cfg,
        records=records,
        status=status,
        final_loss=final_loss,
        final_gap=final_gap,
        divergence_step=divergence_step,
        detail=detail,
    )
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = cfg.label.replace("/", "_").replace("(", "_").replace(")", "").replace(" ", "")
        result.trace_path = out_dir / f"{stem}.csv"
        result.manifest_path = out_dir / f"{stem}.manifest"
        _write_trace(result.trace_path, records)
        _write_manifest(result.manifest_path, cfg, result)
    return result


# ---------------------------------------------------------------------------
# run comparison


def compare_runs(trace_a, trace_b, metric: str = "gap", horizon: int | None = None) -> dict:
    """Compare two traces on a metric at a horizon step.

    Requires the two runs to share a problem recipe (same kind, dims and
    seed), which is checked from the manifests next to the traces.  Reports
    which run is lower at the horizon and the geometric-mean ratio of the
    metric over all logged steps up to the horizon (area under the log
    curve).
    """
    trace_a, trace_b = Path(trace_a), Path(trace_b)
    man_a = read_manifest(trace_a.with_suffix(".manifest"))
    man_b = read_manifest(trace_b.with_suffix(".manifest"))
    if man_a.get("problem") != man_b.get("problem"):
        raise ValueError("compare_runs: traces come from different problems")
    cols_a, cols_b = read_trace(trace_a), read_trace(trace_b)
    if metric not in cols_a:
        raise ValueError(f"unknown metric {metric!r}")

    def at_horizon(cols):
        steps = cols["step"]
        hz = steps[-1] if horizon is None else horizon
        if hz > steps[-1]:
            raise ValueError(f"horizon {hz} beyond trace end {int(steps[-1])}")
        idx = np.searchsorted(steps, hz, side="right") - 1
        return float(cols[metric][idx]), int(steps[idx])

    va, ha = at_horizon(cols_a)
    vb, hb = at_horizon(cols_b)
    scale = max(abs(va), abs(vb), 1e-300)
    if abs(va - vb) <= 1e-12 * scale:
        lower = "tie"
    else:
        lower = "a" if va < vb else "b"

    def log_area(cols, hz):
        mask = cols["step"] <= hz
        vals = np.clip(np.abs(cols[metric][mask]), 1e-300, None)
        vals = vals[np.isfinite(vals)]
        return float(np.mean(np.log(vals)))

    hz = min(ha, hb)
    ratio = math.exp(log_area(cols_a, hz) - log_area(cols_b, hz))
    return {
        "metric": metric,
        "horizon": hz,
        "value_a": va,
        "value_b": vb,
        "lower": lower,
        "log_area_ratio": ratio,
    }


# ---------------------------------------------------------------------------
# presets: the published hyperparameter tables plus desk-scale variants

_QUAD_PAPER_DIMS = {"m": 500, "n": 100, "p": 1000, "q": 250}
_QUAD_DESK_DIMS = {"m": 100, "n": 20, "p": 200, "q": 50}
_LOGI_PAPER_DIMS = {"m": 1000, "n": 100, "N": 10000, "q": 400}
_LOGI_DESK_DIMS = {"m": 200, "n": 20, "N": 2000, "q": 80}
_COMP_PAPER_DIMS = {"m": 500, "n": 250, "r": 5}
_COMP_DESK_DIMS = {"m": 100, "n": 50, "r": 5}

#: Seeds used by the replicated experiment sweeps.
PRESET_SEEDS = (0, 1, 2)


def _cfg(label, problem, optimizer, schedule, steps, cond_every=10, loss_every=1) -> RunConfig:
    return RunConfig(
        label=label,
        problem=problem,
        optimizer=optimizer,
        schedule=schedule,
        total_steps=steps,
        loss_every=loss_every,
        cond_every=cond_every,
    )


def _const(g0):
    return {"kind": "constant", "gamma0": g0}


def _decay(g0, factor, every=25):
    return {"kind": "step_decay", "gamma0": g0, "factor": factor, "every": every}


def _build_presets() -> dict:
    presets: dict[str, RunConfig] = {}

    def add(name, problem, optimizer, schedule, steps, cond_every=10, loss_every=1):
        presets[name] = _cfg(name, problem, optimizer, schedule, steps, cond_every, loss_every)

    def quad_problem(desk, seed=0):
        dims = _QUAD_DESK_DIMS if desk else _QUAD_PAPER_DIMS
        return {"kind": "quad", "dims": dict(dims), "seed": seed, "generator": "philox4x64"}

    def logi_problem(desk, seed=0):
        dims = _LOGI_DESK_DIMS if desk else _LOGI_PAPER_DIMS
        batch = 200 if desk else 1000
        return {
            "kind": "logistic",
            "dims": dict(dims),
            "seed": seed,
            "generator": "philox4x64",
            "batch_size": batch,
        }

    def comp_problem(desk, seed=0):
        dims = _COMP_DESK_DIMS if desk else _COMP_PAPER_DIMS
        return {
            "kind": "completion",
            "dims": dict(dims),
            "seed": seed,
            "generator": "philox4x64",
            "density": 0.3,
        }

    # -- matrix quadratic regression, published scale (1000 steps) --------
    q = quad_problem(desk=False)
    add("quad/PolarGrad(QDWH)", q, {"name": "polar_grad", "backend": "qdwh", "inner_steps": 2}, _const(4e-8), 1000)
    add("quad/PolarGrad(ZOLO-PD)", q, {"name": "polar_grad", "backend": "zolo_pd"}, _const(3e-8), 1000)
    add("quad/PolarGrad(QDWH)+decay", q, {"name": "polar_grad", "backend": "qdwh", "inner_steps": 2}, _decay(4.75e-8, 0.99), 1000)
    add("quad/Muon(NS)", q, {"name": "muon", "momentum": 0.95, "backend": "newton_schulz", "inner_steps": 5}, _const(0.1), 1000)
    add("quad/Muon(QDWH)", q, {"name": "muon", "momentum": 0.95, "backend": "qdwh", "inner_steps": 2}, _const(0.1), 1000)
    add("quad/Muon(ZOLO-PD)", q, {"name": "muon", "momentum": 0.95, "backend": "zolo_pd"}, _const(0.1), 1000)
    add("quad/Muon(QDWH)+decay", q, {"name": "muon", "momentum": 0.95, "backend": "qdwh", "inner_steps": 2}, _decay(0.05, 0.99), 1000)
    add("quad/Newton", q, {"name": "newton"}, _const(0.25), 1000)
    add("quad/Adam", q, {"name": "adam", "beta1": 0.9, "beta2": 0.999}, _const(0.05), 1000)
    add("quad/Adam+decay", q, {"name": "adam", "beta1": 0.9, "beta2": 0.999}, _decay(0.05, 0.99), 1000)
    add("quad/PolarGradM(polar-first)", q, {"name": "polar_gradm_polar_first", "momentum": 0.95, "backend": "qdwh", "inner_steps": 2}, _const(4e-7), 1000)
    add("quad/PolarGradM(polar-first)+decay", q, {"name": "polar_gradm_polar_first", "momentum": 0.95, "backend": "qdwh", "inner_steps": 2}, _decay(5e-7, 0.99), 1000)
    add("quad/PolarGradM(momentum-first)", q, {"name": "polar_gradm", "momentum": 0.9, "backend": "qdwh", "inner_steps": 2}, _const(2e-7), 1000)
    add("quad/PolarGradM(momentum-first)+decay", q, {"name": "polar_gradm", "momentum": 0.9, "backend": "qdwh", "inner_steps": 2}, _decay(2.5e-7, 0.99), 1000)

    # -- matrix logistic regression, published scale (1000 steps) ---------
    lg = logi_problem(desk=False)
    add("logistic/PolarSGD(QDWH)", lg, {"name": "polar_grad", "backend": "qdwh", "inner_steps": 2}, _const(2.5e-7), 1000, loss_every=10)
    add("logistic/PolarSGD(QDWH)+decay", lg, {"name": "polar_grad", "backend": "qdwh", "inner_steps": 2}, _decay(5e-7, 0.95), 1000, loss_every=10)
    add("logistic/Muon(NS)", lg, {"name": "muon", "momentum": 0.95, "backend": "newton_schulz", "inner_steps": 5}, _const(0.075), 1000, loss_every=10)
    add("logistic/Muon(QDWH)", lg, {"name": "muon", "momentum": 0.95, "backend": "qdwh", "inner_steps": 2}, _const(0.075), 1000, loss_every=10)
    add("logistic/Muon(QDWH)+decay", lg, {"name": "muon", "momentum": 0.95, "backend": "qdwh", "inner_steps": 2}, _decay(0.15, 0.95), 1000, loss_every=10)
    add("logistic/Adam", lg, {"name": "adam"}, _const(0.005), 1000, loss_every=10)
    add("logistic/Adam+decay", lg, {"name": "adam"}, _decay(0.01, 0.95), 1000, loss_every=10)
    add("logistic/PolarSGDM(polar-first)", lg, {"name": "polar_gradm_polar_first", "momentum": 0.95, "backend": "qdwh", "inner_steps": 2}, _const(5e-7), 1000, loss_every=10)
    add("logistic/PolarSGDM(polar-first)+decay", lg, {"name": "polar_gradm_polar_first", "momentum": 0.95, "backend": "qdwh", "inner_steps": 2}, _decay(5e-7, 0.95), 1000, loss_every=10)
    add("logistic/PolarSGDM(momentum-first)", lg, {"name": "polar_gradm", "momentum": 0.9, "backend": "qdwh", "inner_steps": 2}, _const(5e-7), 1000, loss_every=10)
    add("logistic/PolarSGDM(momentum-first)+decay", lg, {"name": "polar_gradm", "momentum": 0.9, "backend": "qdwh", "inner_steps": 2}, _decay(5e-7, 0.95), 1000, loss_every=10)

    # -- low-rank completion, published scale (800 steps) ------------------
    cp = comp_problem(desk=False)
    add("completion/PolarGrad(QDWH)", cp, {"name": "polar_grad", "backend": "qdwh", "inner_steps": 2}, _const(15.0), 800)
    add("completion/PolarGrad(QDWH)+decay", cp, {"name": "polar_grad", "backend": "qdwh", "inner_steps": 2}, _decay(15.0, 0.95), 800)
    add("completion/Muon(NS)", cp, {"name": "muon", "momentum": 0.95, "backend": "newton_schulz", "inner_steps": 5}, _const(0.25), 800)
    add("completion/Muon(QDWH)", cp, {"name": "muon", "momentum": 0.95, "backend": "qdwh", "inner_steps": 2}, _const(0.25), 800)
    add("completion/Muon(QDWH)+decay", cp, {"name": "muon", "momentum": 0.95, "backend": "qdwh", "inner_steps": 2}, _decay(0.25, 0.95), 800)
    add("completion/Adam", cp, {"name": "adam"}, _const(0.05), 800)
    add("completion/Adam+decay", cp, {"name": "adam"}, _decay(0.05, 0.95), 800)
    add("completion/AltGD", cp, {"name": "altgd"}, _const(50.0), 800)

    # -- desk-scale variants ------------------------------------------------
    # Dimensions shrunk ~25x with aspect ratios preserved.  Learning rates
    # are re-expressed in problem-intrinsic units (see README): the
    # polar-gradient family uses gamma = scale / (L * n) on the quadratic
    # (the published rate corresponds to scale ~ 7.8, backed off to 5.0 for
    # small-size stability); logistic rates scale with the smoothness-rank
    # product (x125); completion rates scale with the gradient magnitude
    # ratio, and Muon with the parameter-distance ratio.
    qd = quad_problem(desk=True)
    theory = {"name": "polar_grad", "backend": "qdwh", "inner_steps": 2, "lr_mode": "theory_rank_max", "lr_scale": 5.0}
    add("quad-desk/PolarGrad(QDWH)", qd, dict(theory), _const(1.0), 1000)
    add("quad-desk/PolarGrad(SVD)", qd, {**theory, "backend": "svd"}, _const(1.0), 1000)
    add("quad-desk/PolarGrad(ZOLO-PD)", qd, {**theory, "backend": "zolo_pd"}, _const(1.0), 1000)
    add("quad-desk/Muon(NS)", qd, {"name": "muon", "momentum": 0.95, "backend": "newton_schulz", "inner_steps": 5}, _const(0.1), 1000)
    add("quad-desk/Muon(QDWH)", qd, {"name": "muon", "momentum": 0.95, "backend": "qdwh", "inner_steps": 2}, _const(0.1), 1000)
    add("quad-desk/Newton", qd, {"name": "newton"}, _const(0.25), 1000)
    add("quad-desk/Adam", qd, {"name": "adam"}, _const(0.05), 1000)
    add("quad-desk/MatrixSignSGD", qd, {"name": "matrix_signsgd", "backend": "svd"}, _const(0.05), 1000)
    add("quad-desk/PolarGrad(theorem)", qd, {"name": "polar_grad", "backend": "svd", "lr_mode": "theory_rank"}, _const(1.0), 500)

    ld = logi_problem(desk=True)
    add("logistic-desk/PolarSGD(QDWH)", ld, {"name": "polar_grad", "backend": "qdwh", "inner_steps": 2}, _const(3.1e-5), 1000, loss_every=10)
    add("logistic-desk/PolarSGD(QDWH)+decay", ld, {"name": "polar_grad", "backend": "qdwh", "inner_steps": 2}, _decay(6.2e-5, 0.95), 1000, loss_every=10)
    add("logistic-desk/Muon(NS)", ld, {"name": "muon", "momentum": 0.95, "backend": "newton_schulz", "inner_steps": 5}, _const(0.075), 1000, loss_every=10)
    add("logistic-desk/Muon(NS)+decay", ld, {"name": "muon", "momentum": 0.95, "backend": "newton_schulz", "inner_steps": 5}, _decay(0.15, 0.95), 1000, loss_every=10)
    add("logistic-desk/Adam", ld, {"name": "adam"}, _const(0.005), 1000, loss_every=10)
    add("logistic-desk/Adam+decay", ld, {"name": "adam"}, _decay(0.01, 0.95), 1000, loss_every=10)

    cd = comp_problem(desk=True)
    add("completion-desk/PolarGrad(QDWH)", cd, {"name": "polar_grad", "backend": "qdwh", "inner_steps": 2}, _const(2.0), 800)
    add("completion-desk/PolarGrad(SVD)", cd, {"name": "polar_grad", "backend": "svd"}, _const(2.0), 800)
    add("completion-desk/Muon(NS)", cd, {"name": "muon", "momentum": 0.95, "backend": "newton_schulz", "inner_steps": 5}, _const(0.11), 800)
    add("completion-desk/Muon(QDWH)", cd, {"name": "muon", "momentum": 0.95, "backend": "qdwh", "inner_steps": 2}, _const(0.11), 800)
    add("completion-desk/Adam", cd, {"name": "adam"}, _const(0.05), 800)
    add("completion-desk/AltGD", cd, {"name": "altgd"}, _const(25.0), 800)

    return presets


_PRESETS = _build_presets()


def list_presets() -> list[str]:
    return sorted(_PRESETS)


def preset(name: str, seed: int | None = None) -> RunConfig:
    """Resolve a named preset; optionally override the problem seed."""
    if name not in _PRESETS:
        raise KeyError(f"unknown preset {name!r}; see list_presets()")
    cfg = _PRESETS[name]
    if seed is not None:
        prob = dict(cfg.problem)
        prob["seed"] = int(seed)
        cfg = replace(cfg, problem=prob, label=f"{cfg.label}@seed{seed}")
    return cfg
