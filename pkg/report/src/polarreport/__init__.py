"""polarreport: figures and markdown summaries from polaropt trace files."""

from .render import FigureSpec, PanelSpec, default_figset, render_figure, render_report, summary_markdown
from .traces import RunTrace, SchemaError, read_run, read_trace_dir

__version__ = "0.1.0"

__all__ = [
    "FigureSpec",
    "PanelSpec",
    "RunTrace",
    "SchemaError",
    "default_figset",
    "read_run",
    "read_trace_dir",
    "render_figure",
    "render_report",
    "summary_markdown",
]
