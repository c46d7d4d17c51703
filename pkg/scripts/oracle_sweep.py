#!/usr/bin/env python3
"""Closed-form operators against the kernel oracle over several weights,
symbols and grid sizes.  Prints the probe deviation for each combination."""
import argparse
import itertools

from whquant import PolySymbol, assemble, fft_grid, kernel_oracle, make_weight, quantize_symbol
from whquant.gridop import action_deviation

WEIGHTS = {
    "weyl_wigner": dict(kind="weyl_wigner"),
    "coherent": dict(kind="coherent_state"),
    "gaussian(1,1.5)": dict(kind="gaussian", sigma_l=1.0, sigma_p=1.5),
    "shifted": dict(kind="separable", lam="exp(-(q-0.5)^2/2)", mu="exp(-p^2/2)"),
}
SYMBOLS = ("q*p", "p^2/2 + q^2/2", "exp(-q^2/4)*p^2", "sin(q)*p + cos(q)")

ap = argparse.ArgumentParser()
ap.add_argument("--n", type=int, nargs="+", default=[256, 512])
ap.add_argument("--spacing", type=float, default=0.125)
args = ap.parse_args()

print(f"{'weight':18s} {'symbol':20s} {'n':>5s} {'deviation':>10s}")
for (wname, wspec), src, n in itertools.product(WEIGHTS.items(), SYMBOLS, args.n):
    w = make_weight(**wspec)
    f = PolySymbol.from_expr(src)
    grid = fft_grid(n, args.spacing)
    sym = quantize_symbol(f, w)
    pres = "symmetrized" if "symmetrized" in sym.presentations else "left"
    dev = action_deviation(assemble(sym, grid, "spectral", pres), kernel_oracle(f, w, grid))
    print(f"{wname:18s} {src:20s} {n:5d} {dev:10.2e}")
