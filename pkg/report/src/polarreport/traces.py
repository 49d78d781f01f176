"""Reading the harness trace format.

The contract with the experiment runner is purely file-based: a CSV whose
first line is the schema comment ``# polaropt-trace v1``, a fixed column
order, empty fields for metrics that were not logged at a step, and a
key-value ``.manifest`` file alongside.  Values are kept as the verbatim
CSV tokens so that everything the report prints can be traced byte-for-byte
to an input file.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

TRACE_SCHEMA = "polaropt-trace v1"
TRACE_COLUMNS = ("step", "loss", "gap", "grad_cond", "residual_cond", "grad_nuclear", "lr", "wall_ms")


class SchemaError(ValueError):
    """Raised when a trace file does not match the versioned schema."""


@dataclass
class RunTrace:
    """One run: verbatim column tokens plus parsed floats and manifest."""

    name: str
    path: Path
    raw: dict[str, list[str]]  # column -> verbatim tokens ('' when absent)
    values: dict[str, list[float]]  # column -> floats (NaN when absent)
    manifest: dict[str, str]

    @property
    def label(self) -> str:
        return self.manifest.get("label", self.name)

    @property
    def optimizer_name(self) -> str:
        try:
            return json.loads(self.manifest["optimizer"])["name"]
        except (KeyError, ValueError):
            return self.label

    @property
    def group(self) -> str:
        """Label with any seed suffix stripped: runs of one preset across
        seeds share a group."""
        return self.label.split("@seed")[0]

    def metric(self, name: str) -> tuple[list[int], list[float], list[str]]:
        """(steps, values, verbatim tokens) for the rows where the metric
        was logged."""
        if name not in self.values:
            raise SchemaError(f"{self.path}: unknown metric column {name!r}")
        steps, vals, toks = [], [], []
        for step, v, tok in zip(self.values["step"], self.values[name], self.raw[name]):
            if tok != "" and not math.isnan(v):
                steps.append(int(step))
                vals.append(v)
                toks.append(tok)
        return steps, vals, toks


def read_run(csv_path) -> RunTrace:
    """Parse one trace CSV plus its manifest, strictly against the schema."""
    csv_path = Path(csv_path)
    lines = csv_path.read_text().splitlines()
    if not lines or lines[0].lstrip("# ").strip() != TRACE_SCHEMA:
        raise SchemaError(f"{csv_path}: missing schema line '# {TRACE_SCHEMA}'")
    body = [ln for ln in lines[1:] if ln.strip()]
    if not body:
        raise SchemaError(f"{csv_path}: no header row")
    header = tuple(body[0].split(","))
    if header != TRACE_COLUMNS:
        bad = set(header).symmetric_difference(TRACE_COLUMNS)
        raise SchemaError(f"{csv_path}: unexpected columns {sorted(bad)}")
    raw: dict[str, list[str]] = {c: [] for c in TRACE_COLUMNS}
    values: dict[str, list[float]] = {c: [] for c in TRACE_COLUMNS}
    for ln in body[1:]:
        fields = ln.split(",")
        if len(fields) != len(TRACE_COLUMNS):
            raise SchemaError(f"{csv_path}: row with {len(fields)} fields: {ln!r}")
        for col, tok in zip(TRACE_COLUMNS, fields):
            raw[col].append(tok)
            try:
                values[col].append(float(tok) if tok else math.nan)
            except ValueError as exc:
                raise SchemaError(f"{csv_path}: column {col!r}: bad value {tok!r}") from exc
    manifest = {}
    man_path = csv_path.with_suffix(".manifest")
    if man_path.exists():
        for ln in man_path.read_text().splitlines():
            if ln.strip() and not ln.startswith("#") and "=" in ln:
                k, v = ln.split("=", 1)
                manifest[k.strip()] = v.strip()
    return RunTrace(name=csv_path.stem, path=csv_path, raw=raw, values=values, manifest=manifest)


def read_trace_dir(trace_dir) -> list[RunTrace]:
    """All runs in a directory, sorted by name for deterministic output."""
    trace_dir = Path(trace_dir)
    paths = sorted(trace_dir.glob("*.csv"))
    if not paths:
        raise FileNotFoundError(f"no trace CSVs in {trace_dir}")
    return [read_run(p) for p in paths]
