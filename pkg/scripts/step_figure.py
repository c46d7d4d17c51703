#!/usr/bin/env python3
"""Tabulate T, M, V+ and V- for the mass-step model and, if matplotlib is
available, plot them.  Writes step_figure.csv (and step_figure.png)."""
import argparse
from pathlib import Path

from whquant import stepmodel as sm

ap = argparse.ArgumentParser()
ap.add_argument("--m-l", type=float, default=1.0)
ap.add_argument("--m-r", type=float, default=2.0)
ap.add_argument("--V0", type=float, default=1.0)
ap.add_argument("--sigma-l", type=float, default=1.0)
ap.add_argument("--sigma-p", type=float, default=1.0)
ap.add_argument("--out", default=".")
args = ap.parse_args()

P = sm.StepModelParams(args.m_l, args.m_r, args.V0, args.sigma_l, args.sigma_p)
table = sm.figure_data(P)
out = Path(args.out)
out.mkdir(parents=True, exist_ok=True)
sm.write_figure_csv(table, out / "step_figure.csv")
print(f"wrote {out / 'step_figure.csv'} ({len(table)} rows)")

for key, row in sm.asymptote_report(P).items():
    print(f"{key:10s} value {row['value']:.6f}  table {row['table']:.6f}  implied {row['implied']:.6f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; skipping the plot")
else:
    x = table[:, 0]
    fig, ax = plt.subplots(figsize=(6, 4))
    for j, name in enumerate(sm.FIGURE_COLUMNS[1:], start=1):
        ax.plot(x, table[:, j], label=name)
    ax.set_xlabel("x")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "step_figure.png", dpi=120)
    print(f"wrote {out / 'step_figure.png'}")
