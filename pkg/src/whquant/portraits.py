"""Phase-space portraits (lower symbols) and Wigner functions."""

from __future__ import annotations

import math
import warnings

import numpy as np

from .coeffs import CoeffFunction, PolySymbol
from .gridop import StateVector
from .transforms import (
    TWO_PI,
    GaussianKernel,
    Grid1D,
    Grid2D,
    NumericKernel,
    PhaseField,
    PolyDeltaKernel,
    convolve2d,
    smooth,
    symplectic_fourier,
)
from .weights import WeightSpec, autocorr_kernel, evaluate

METHODS = ("fourier", "direct")


def portrait(f, w: WeightSpec, grid: Grid2D | None = None, method: str = "fourier") -> PhaseField:
    """Lower symbol of A_f.

    For a sampled field the portrait is Fs[Pi(r) Pi(-r) / Pi(0)^2 . Fs[f]]
    ("fourier"), or equivalently the autocorrelation kernel convolved with f
    ("direct").  A PolySymbol (possibly non-decaying, e.g. a Hamiltonian) is
    smoothed analytically in each variable; that route needs a separable
    weight and a ``grid``.
    """
    if isinstance(f, PolySymbol):
        if grid is None:
            raise ValueError("a grid is required to tabulate the portrait of a symbol")
        return _portrait_symbol(f, w, grid)
    if not isinstance(f, PhaseField):
        raise TypeError("portrait takes a PhaseField or a PolySymbol")
    if method == "fourier":
        F = symplectic_fourier(f)
        q, p = F.grid.mesh()
        mult = evaluate(w, q, p) * evaluate(w, -q, -p) / w.pi_zero**2
        out = symplectic_fourier(PhaseField(F.grid, F.values * mult), out_grid=f.grid)
        warn = tuple(f.warnings)
        if f.boundary_mass() > 1e-9:
            warn += ("input field not negligible at the grid boundary",)
        return PhaseField(f.grid, out.values, warn)
    if method == "direct":
        kernel = autocorr_kernel(w, f.grid)
        out = convolve2d(kernel, f)
        return PhaseField(f.grid, out.values, tuple(kernel.warnings) + tuple(out.warnings))
    raise ValueError(f"method must be one of {METHODS}")


def _autocorr_kernels(w: WeightSpec):
    """1-D kernels of mu(p)mu(-p) (acting on q) and lambda(q)lambda(-q) (acting on p)."""
    if w.kind == "weyl_wigner":
        return PolyDeltaKernel(1.0, 0, +1), PolyDeltaKernel(1.0, 0, -1)
    if w.kind == "gaussian":
        return GaussianKernel(math.sqrt(2) / w.sigma_p), GaussianKernel(math.sqrt(2) / w.sigma_l)
    if w.kind == "separable":
        mu, lam = w.mu, w.lam
        return (
            NumericKernel(lambda p: mu(p) * mu(-p), sign=+1),
            NumericKernel(lambda q: lam(q) * lam(-q), sign=-1),
        )
    raise ValueError(f"symbol portraits need a separable weight, got {w.kind}; tabulate f instead")


def _portrait_symbol(f: PolySymbol, w: WeightSpec, grid: Grid2D) -> PhaseField:
    kq, kp = _autocorr_kernels(w)
    q = grid.q_grid.points
    p = grid.p_grid.points
    out = np.zeros(grid.shape, dtype=complex)
    for n, L in f.terms.items():
        mono = CoeffFunction.polynomial([0.0] * n + [1.0])
        out += np.outer(smooth(L, kq, q), smooth(mono, kp, p))
    out /= w.pi_zero**2
    return PhaseField(grid, out)


def wigner_of_state(psi: StateVector, p_grid: Grid1D | None = None) -> PhaseField:
    """W(q, p) = int psi(q + u/2) conj(psi(q - u/2)) e^{-ipu} du on the q grid of psi.

    The u integral is sampled at u = 2kh.  The default momentum grid has
    spacing pi / (n h), which makes the discrete normalisation exact.
    """
    g = psi.grid
    n, h = g.n, g.spacing
    if not g.is_power_of_two:
        raise ValueError("wigner_of_state needs a power-of-two grid")
    if p_grid is None:
        dp = math.pi / (n * h)
        p_grid = Grid1D(-(n // 2) * dp, (n // 2 - 1) * dp, n)
    v = np.asarray(psi.values, dtype=complex)
    ks = np.arange(-(n // 2), n // 2)
    j = np.arange(n)
    plus, minus = j[:, None] + ks[None, :], j[:, None] - ks[None, :]
    ok = (plus >= 0) & (plus < n) & (minus >= 0) & (minus < n)
    corr = np.where(ok, v[np.clip(plus, 0, n - 1)] * np.conj(v[np.clip(minus, 0, n - 1)]), 0.0)
    phase = np.exp(-2j * h * np.outer(ks, p_grid.points))
    W = 2 * h * (corr @ phase)
    return PhaseField(Grid2D(g, p_grid), W)


def classical_trace(f: PhaseField) -> float:
    """int f d^2r / (2 pi); warns when f is not negligible at the boundary."""
    if f.boundary_mass() > 1e-9:
        warnings.warn("field not negligible at the boundary; trace is truncated", RuntimeWarning, stacklevel=2)
    return float(np.real(f.integral()))


def portrait_kernel_gaussian(w: WeightSpec, grid: Grid2D) -> PhaseField:
    """Closed form of the autocorrelation kernel for a Gaussian weight (density for d^2r / 2pi)."""
    q, p = grid.mesh()
    vq, vp = 2.0 / w.sigma_p**2, 2.0 / w.sigma_l**2
    dens = np.exp(-q * q / (2 * vq) - p * p / (2 * vp)) / math.sqrt(vq * vp)
    return PhaseField(grid, dens.astype(complex))


__all__ = ["portrait", "wigner_of_state", "classical_trace", "portrait_kernel_gaussian", "TWO_PI"]
