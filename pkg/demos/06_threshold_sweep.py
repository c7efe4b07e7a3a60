#!/usr/bin/env python3
"""Sensitivity of the foreground threshold.

Foreground pixel volume grows monotonically with tau_fore; at 1.0 the
selector waves every confident detection through, so precision collapses
on a scene full of static objects.
"""

from ibgs import Config
from ibgs.cli import sweep_grid
from ibgs.synth import build_scenario, generate, write_scenario_output
import tempfile
from pathlib import Path

with tempfile.TemporaryDirectory() as tmp:
    result = generate(build_scenario("jitter", Config()))
    paths = write_scenario_output(result, Path(tmp))
    rows = sweep_grid(
        result.stream_bytes(),
        Config(),
        conf_values=[0.6],
        move_values=[0.5],
        fore_values=[0.2, 0.4, 0.6, 0.8, 0.9, 1.0],
        gt_dir=paths["gt"],
    )

print(f"{'tau_fore':>8} {'fg_pixels':>10} {'fg_inst':>8} {'precision':>10}")
for row in rows:
    precision = "-" if row.get("precision") is None else f"{row['precision']:.4f}"
    print(f"{row['tau_fore']:>8} {row['fg_pixels']:>10} {row['fg_instances']:>8} {precision:>10}")
