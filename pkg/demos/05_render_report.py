#!/usr/bin/env python3
"""Rendering a report from harness traces (needs the report/ companion
package installed: `pip install -e report/`).

Generates a few short runs, then renders the 'paper' figure set and the
markdown summary whose every number is a verbatim CSV token.
"""

import tempfile
from dataclasses import replace
from pathlib import Path

from polaropt import preset, run_experiment

try:
    from polarreport import read_trace_dir, render_report
except ImportError:
    raise SystemExit("install the companion package first: pip install -e report/")

traces = Path(tempfile.mkdtemp(prefix="polaropt-traces-"))
for name in ("quad-desk/PolarGrad(SVD)", "quad-desk/Adam", "quad-desk/Muon(NS)"):
    cfg = replace(preset(name, seed=0), total_steps=120)
    res = run_experiment(cfg, out_dir=traces)
    print(f"ran {name}: final gap {res.final_gap:.3e}")

out = traces / "report"
written = render_report(read_trace_dir(traces), out, figset="paper")
print("\nwrote:")
for img in written["images"]:
    print(f"  {img}")
print(f"  {written['summary']}")
print("\nsummary head:")
print("\n".join(Path(written["summary"]).read_text().splitlines()[:6]))
