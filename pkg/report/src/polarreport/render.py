"""Figure and summary rendering.

A :class:`FigureSpec` lists panels (metric + runs + y-scale); rendering is
a pure function of the input trace files: the same traces always produce
the same markdown, and every number in the summary is a verbatim token from
some input CSV (the report layer never recomputes metrics).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .traces import RunTrace

_METRIC_TITLES = {
    "loss": "loss",
    "gap": "optimality gap",
    "grad_cond": "gradient condition number",
    "residual_cond": "residual condition number",
    "grad_nuclear": "gradient nuclear norm",
    "lr": "learning rate",
}


@dataclass(frozen=True)
class PanelSpec:
    metric: str
    runs: tuple[str, ...]  # run names (csv stems) to overlay
    yscale: str = "log"  # "log" | "linear"


@dataclass(frozen=True)
class FigureSpec:
    title: str
    output: str  # file name (png) within the output directory
    panels: tuple[PanelSpec, ...] = field(default_factory=tuple)


def _run_index(runs: list[RunTrace]) -> dict[str, RunTrace]:
    return {r.name: r for r in runs}


def render_figure(spec: FigureSpec, runs: list[RunTrace], out_dir: Path) -> Path:
    """Render one multi-panel figure; returns the written path.

    Log-scale panels drop non-positive values; the per-panel count of
    dropped points is noted in the panel caption.
    """
    if not spec.panels:
        raise ValueError(f"figure {spec.title!r} has no panels")
    index = _run_index(runs)
    for panel in spec.panels:
        if not panel.runs:
            raise ValueError(f"figure {spec.title!r}: panel {panel.metric!r} lists no runs")
        for name in panel.runs:
            if name not in index:
                raise ValueError(f"figure {spec.title!r}: unknown run {name!r}")
    n = len(spec.panels)
    fig, axes = plt.subplots(1, n, figsize=(5.2 * n, 4.0), squeeze=False)
    for ax, panel in zip(axes[0], spec.panels):
        dropped = 0
        for name in panel.runs:
            run = index[name]
            steps, vals, _ = run.metric(panel.metric)
            if panel.yscale == "log":
                kept = [(s, v) for s, v in zip(steps, vals) if v > 0.0]
                dropped += len(vals) - len(kept)
                steps = [s for s, _ in kept]
                vals = [v for _, v in kept]
            ax.plot(steps, vals, label=run.optimizer_name, linewidth=1.4)
        if panel.yscale == "log":
            ax.set_yscale("log")
        caption = _METRIC_TITLES.get(panel.metric, panel.metric)
        if dropped:
            caption += f" ({dropped} non-positive points dropped)"
        ax.set_title(caption, fontsize=10)
        ax.set_xlabel("step")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
    fig.suptitle(spec.title)
    fig.tight_layout()
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / spec.output
    fig.savefig(out_path, dpi=110)
    plt.close(fig)
    return out_path


def _median_token(pairs: list[tuple[float, str]]) -> str:
    """Lower-median by value, reported as its verbatim token (keeps every
    summary number traceable to an input file)."""
    ordered = sorted(pairs, key=lambda p: p[0])
    return ordered[(len(ordered) - 1) // 2][1]


def summary_markdown(runs: list[RunTrace], metrics: tuple[str, ...] = ("loss", "gap")) -> str:
    """Markdown table of final/min per run plus a per-group median of
    finals across seeds.  All values are verbatim CSV tokens."""
    lines = ["# Run summary", ""]
    lines.append("| run | status | " + " | ".join(f"final {m} | min {m}" for m in metrics) + " |")
    lines.append("|---|---|" + "---|" * (2 * len(metrics)))
    finals: dict[str, dict[str, list[tuple[float, str]]]] = {}
    for run in sorted(runs, key=lambda r: r.name):
        cells = [run.label, run.manifest.get("status", "?")]
        for m in metrics:
            _, vals, toks = run.metric(m)
            if not vals:
                cells.extend(["", ""])
                continue
            final_tok = toks[-1]
            min_tok = toks[min(range(len(vals)), key=vals.__getitem__)]
            cells.extend([final_tok, min_tok])
            finals.setdefault(run.group, {}).setdefault(m, []).append((vals[-1], final_tok))
        lines.append("| " + " | ".join(cells) + " |")
    lines.append("")
    multi = {g: ms for g, ms in finals.items() if any(len(v) > 1 for v in ms.values())}
    if multi:
        lines.append("## Median of final values across seeds")
        lines.append("")
        lines.append("| group | " + " | ".join(metrics) + " |")
        lines.append("|---|" + "---|" * len(metrics))
        for group in sorted(multi):
            row = [group]
            for m in metrics:
                pairs = multi[group].get(m, [])
                row.append(_median_token(pairs) if pairs else "")
            lines.append("| " + " | ".join(row) + " |")
        lines.append("")
    return "\n".join(lines)


def default_figset(runs: list[RunTrace], figset: str) -> list[FigureSpec]:
    """Built-in figure sets.

    ``paper``: a 3-panel figure (gap-or-loss, residual condition number,
    gradient condition number) plus a nuclear-norm panel, overlaying all
    runs.  ``quick``: a single loss panel.
    """
    if not runs:
        raise ValueError("no runs to render")
    names = tuple(r.name for r in sorted(runs, key=lambda r: r.name))
    has_gap = any(run.metric("gap")[1] for run in runs)
    head_metric = "gap" if has_gap else "loss"
    if figset == "quick":
        return [
            FigureSpec(
                title="losses",
                output="quick_loss.png",
                panels=(PanelSpec("loss", names, "log"),),
            )
        ]
    if figset == "paper":
        return [
            FigureSpec(
                title="convergence and conditioning",
                output="paper_main.png",
                panels=(
                    PanelSpec(head_metric, names, "log"),
                    PanelSpec("residual_cond", names, "log"),
                    PanelSpec("grad_cond", names, "log"),
                ),
            ),
            FigureSpec(
                title="gradient nuclear norms",
                output="paper_nuclear.png",
                panels=(PanelSpec("grad_nuclear", names, "log"),),
            ),
        ]
    raise ValueError(f"unknown figset {figset!r} (choose 'paper' or 'quick')")


def render_report(runs: list[RunTrace], out_dir, figset: str = "paper") -> dict:
    """Render the figure set and the markdown summary; returns a manifest
    of written files."""
    out_dir = Path(out_dir)
    specs = default_figset(runs, figset)
    images = [str(render_figure(spec, runs, out_dir)) for spec in specs]
    md = summary_markdown(runs)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_path = out_dir / "summary.md"
    summary_path.write_text(md)
    return {"images": images, "summary": str(summary_path)}
