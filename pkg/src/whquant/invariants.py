"""Per-module invariant suites run by ``whquant selftest`` after the criteria.

Invariants already measured by an acceptance criterion are not repeated;
each suite lists the criteria that cover the rest of its module in
``COVERED_BY``.
"""

from __future__ import annotations

import time

import numpy as np

from . import gridop as go
from .acceptance import Check, CriterionResult
from .coeffs import PolySymbol
from .portraits import portrait, portrait_kernel_gaussian
from .stepmodel import StepModelParams, step_hamiltonian, step_T, step_Vpm
from .symquant import quantize_hp, quantize_Lq, quantize_Lq_p, quantize_Lq_p2, quantize_monomial, quantize_symbol
from .transforms import (
    Grid2D,
    PhaseField,
    convolve2d,
    convolve_gaussian,
    fft_grid,
    fourier1d,
    grid_norm,
)
from .weights import autocorr_kernel, evaluate, fs_probability, make_weight

X = np.linspace(-4.0, 4.0, 81)


def _diff(a, b, x=X) -> float:
    return float(np.max(np.abs(np.asarray(a(x)) - np.asarray(b(x)))))


def _weights():
    return {
        "weyl_wigner": make_weight("weyl_wigner"),
        "born_jordan": make_weight("born_jordan"),
        "gaussian(1,1.5)": make_weight("gaussian", sigma_l=1.0, sigma_p=1.5),
        "coherent_state": make_weight("coherent_state"),
        "separable even": make_weight("separable", lam="exp(-q^4)", mu="exp(-p^4/2)"),
        "shifted gaussian": make_weight("separable", lam="exp(-(q-0.5)^2/2)", mu="exp(-p^2/2)"),
    }


def transforms_suite() -> list[Check]:
    out = []
    g = fft_grid(128, 0.2)
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(8):
        v = rng.normal(size=g.n) + 1j * rng.normal(size=g.n)
        k, fv = fourier1d(v, g)
        worst = max(worst, abs(grid_norm(fv, k) - grid_norm(v, g)))
    out.append(Check.below("unitarity on random samples", worst, 1e-10))
    x = g.points
    f = np.exp(-((x - 0.7) ** 2)) * (1 + 0.3 * np.sin(2 * x))
    conv = convolve_gaussian(f, g, 0.6, extension="decay")
    out.append(Check.below("1-D convolution preserves the integral", abs(conv.sum() - f.sum()) * g.spacing, 1e-8))
    g2 = Grid2D(fft_grid(128, 0.125), fft_grid(128, 0.125))
    a = PhaseField.from_function(g2, lambda q, p: np.exp(-((q - 0.3) ** 2) - 2 * p * p))
    ker = portrait_kernel_gaussian(make_weight("gaussian", sigma_l=1.5, sigma_p=1.5), g2)
    c = convolve2d(ker, a)
    out.append(Check.below("2-D convolution preserves the integral", abs(c.integral() - a.integral()), 1e-8))
    return out


def weights_suite() -> list[Check]:
    out = []
    g = Grid2D(fft_grid(64, 0.25), fft_grid(64, 0.25))
    t = np.linspace(-3, 3, 13)
    q, p = np.meshgrid(t, t, indexing="ij")
    for name, w in _weights().items():
        at0 = complex(evaluate(w, 0.0, 0.0))
        out.append(Check.flag(f"{name}: Pi(0) = pi_zero exactly", at0 == w.pi_zero))
        sampled = float(np.max(np.abs(np.conj(evaluate(w, -q, -p)) - evaluate(w, q, p)))) <= 1e-10
        out.append(Check.flag(f"{name}: symmetric flag matches samples", sampled == w.symmetric))
    for sl, sp in ((1.0, 1.0), (0.6, 2.5), (2.0, 0.7)):
        w = make_weight("gaussian", sigma_l=sl, sigma_p=sp)
        out.append(Check.flag(f"gaussian({sl},{sp}): lambda'(0) = 0 exactly", w.lambda_prime_zero == 0))
        # the preimage grid must reach ~8 widths of Pi, here +-pi / 0.125
        gg = Grid2D(fft_grid(256, 0.125), fft_grid(256, 0.125))
        _, rep = fs_probability(w, gg)
        out.append(Check.below(f"gaussian({sl},{sp}): Fs[Pi] mass - 1", abs(rep.total_mass - 1), 1e-6))
        out.append(Check.flag(f"gaussian({sl},{sp}): Fs[Pi] nonnegative", rep.nonnegative))
    _, rep = fs_probability(make_weight("born_jordan"), g)
    out.append(Check.flag("born_jordan: Fs[Pi] computed (sign reported only)", True, note=f"nonnegative={rep.nonnegative}"))
    return out


def symquant_suite() -> list[Check]:
    out = []
    ws = _weights()
    for name in ("weyl_wigner", "gaussian(1,1.5)", "coherent_state", "separable even"):
        w = ws[name]
        (c0,) = quantize_Lq("q", w).coeffs
        out.append(Check.below(f"{name}: A_q = Q (c0 = 0)", _diff(c0, lambda x: x), 1e-10))
        d = quantize_hp("p", w).coeffs
        out.append(Check.below(f"{name}: A_p = P (d0 = 0)", abs(complex(d[0](0.0))) + abs(complex(d[1](0.0)) - 1), 1e-10))
    L = "exp(-q^2/4)"
    for name in ("gaussian(1,1.5)", "shifted gaussian"):
        w = ws[name]
        for n, closed in ((0, quantize_Lq), (1, quantize_Lq_p), (2, quantize_Lq_p2)):
            a, b = quantize_monomial(L, n, w), closed(L, w)
            worst = max(_diff(x, y) for x, y in zip(a.coeffs, b.coeffs))
            out.append(Check.below(f"{name}: monomial n={n} vs closed form", worst, 1e-12))
    for name, w in ws.items():
        if not w.separable:
            continue
        even = w.lambda_prime_zero == 0
        for src in ("exp(-q^2)*p", "exp(-q^2)*p^2"):
            sym = quantize_symbol(PolySymbol.from_expr(src), w)
            out.append(Check.flag(f"{name}: {src} symmetric iff lambda'(0) = 0", sym.symmetric == even))
    w = ws["gaussian(1,1.5)"]
    sym = quantize_Lq_p2(L, w)
    T = sym.terms("symmetrized")[0][2]
    gap = lambda x: sym.terms("symmetrized")[-1][2](x) - sym.terms("ptp")[-1][2](x)  # noqa: E731
    out.append(Check.below("PTP minus anticommutator = T''/2", _diff(gap, lambda x: T.derivative(2)(x) / 2), 1e-12))
    big = make_weight("gaussian", sigma_l=64.0, sigma_p=64.0)
    ww = ws["weyl_wigner"]
    f = PolySymbol.from_expr("exp(-q^2/4)*p^2 + sin(q)*p + q^2")
    a, b = quantize_symbol(f, big), quantize_symbol(f, ww)
    out.append(Check.below("sigma = 64 symbols vs Weyl-Wigner", max(_diff(x, y) for x, y in zip(a.coeffs, b.coeffs)), 1e-3))
    return out


def gridop_suite() -> list[Check]:
    out = []
    grid = fft_grid(256, 0.125)
    f = PolySymbol.from_expr("exp(-q^2/4)*p^2 + q^2/2")
    for name, w in _weights().items():
        if not w.symmetric:
            continue
        O = go.kernel_oracle(f, w, grid)
        out.append(Check.below(f"{name}: real f, symmetric weight -> Hermitian oracle", O.interior_hermitian_defect(), 1e-8))
    return out


def portraits_suite() -> list[Check]:
    out = []
    g2 = Grid2D(fft_grid(128, 0.125), fft_grid(128, 0.125))
    f = PhaseField.from_function(g2, lambda q, p: np.exp(-((q - 0.5) ** 2 + 2 * p * p)) * (1 + np.cos(3 * q) ** 2))
    for sl, sp in ((1.0, 1.0), (0.8, 2.0)):
        w = make_weight("gaussian", sigma_l=sl, sigma_p=sp)
        pf = portrait(f, w)
        out.append(Check.below(f"gaussian({sl},{sp}): f >= 0 => portrait >= -1e-9", max(0.0, -float(pf.values.real.min())), 1e-9))
        out.append(Check.below(f"gaussian({sl},{sp}): portrait mass", abs(pf.integral() - f.integral()), 1e-6))
        kd = autocorr_kernel(w, g2)
        out.append(Check.below(f"gaussian({sl},{sp}): kernel = doubled-variance Gaussian", float(np.max(np.abs(kd.values - portrait_kernel_gaussian(w, g2).values))), 1e-8))
    return out


def stepmodel_suite() -> list[Check]:
    out = []
    P = StepModelParams(sigma_l=64.0, sigma_p=64.0)
    x = np.concatenate([np.linspace(-4, -0.2, 40), np.linspace(0.2, 4, 40)])
    inv_mass = np.where(x < 0, 1 / (2 * P.m_l), 1 / (2 * P.m_r))
    V = np.where(x < 0, 0.0, P.V0)
    out.append(Check.below("sigma = 64: T -> 1/(2m) for |x| > 0.2", float(np.max(np.abs(step_T(x, P) - inv_mass))), 1e-3))
    for b in ("plus", "minus"):
        out.append(Check.below(f"sigma = 64: V{b} -> V for |x| > 0.2", float(np.max(np.abs(step_Vpm(x, P, b) - V))), 1e-2))
    sym = step_hamiltonian(StepModelParams())
    A = go.assemble(sym, fft_grid(256, 0.125), "spectral", "symmetrized")
    out.append(Check.below("assembled H_step Hermitian", A.hermitian_defect, 1e-12))
    return out


SUITES = {
    "transforms": ("transform invariants", transforms_suite),
    "weights": ("weight invariants", weights_suite),
    "symquant": ("symbol invariants", symquant_suite),
    "gridop": ("operator invariants", gridop_suite),
    "portraits": ("portrait invariants", portraits_suite),
    "stepmodel": ("step-model invariants", stepmodel_suite),
}

COVERED_BY = {
    "transforms": (7,),
    "weights": (5,),
    "symquant": (4, 5, 9),
    "gridop": (3, 4, 5, 10),
    "portraits": (6, 8),
    "stepmodel": (1, 2, 6),
}


def run_suites(names=None) -> list[CriterionResult]:
    results = []
    for name in names or SUITES:
        title, fn = SUITES[name]
        t0 = time.perf_counter()
        checks = fn()
        results.append(CriterionResult(name, title, checks, time.perf_counter() - t0, kind="invariants"))
    return results
