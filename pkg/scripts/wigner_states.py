#!/usr/bin/env python3
"""Wigner functions of the first few oscillator eigenstates: origin value,
normalization and the minimum (negative for odd states)."""
import math

import numpy as np
from scipy.special import eval_hermite

from whquant import StateVector, fft_grid, wigner_of_state

grid = fft_grid(256, 0.0625)
print(f"{'n':>2s} {'W(0,0)':>10s} {'(-1)^n*2':>9s} {'mass':>8s} {'min W':>9s}")
for n in range(5):
    norm = 1.0 / math.sqrt(2.0**n * math.factorial(n) * math.sqrt(math.pi))
    psi = StateVector.from_function(grid, lambda x, n=n: norm * eval_hermite(n, x) * np.exp(-x * x / 2))
    W = wigner_of_state(psi)
    i0 = int(np.argmin(np.abs(grid.points)))
    j0 = int(np.argmin(np.abs(W.grid.p_grid.points)))
    print(f"{n:2d} {W.values[i0, j0].real:10.6f} {2 * (-1) ** n:9d} {W.integral().real:8.5f} {W.values.real.min():9.5f}")
