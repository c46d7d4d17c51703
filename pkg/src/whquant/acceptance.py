"""The ten acceptance checks, runnable from tests and from ``whquant selftest``.

Each criterion returns a ``CriterionResult`` made of named sub-checks with the
measured value, the tolerance and a pass flag.  Nothing here adjusts a
tolerance after the fact: a red sub-check stays red.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import gridop as go
from .coeffs import PolySymbol
from .portraits import classical_trace, portrait, wigner_of_state
from .stepmodel import (
    StepModelParams,
    asymptote_report,
    step_hamiltonian,
    step_portrait,
    step_portrait_autocorrelated,
    step_spec,
    step_symbol,
    step_T,
    step_Tpp,
    step_Vpm,
)
from .symquant import quantize_hamiltonian, quantize_hp, quantize_Lq, quantize_potential, quantize_symbol
from .transforms import Grid2D, PhaseField, delta_weight, fft_grid, make_grid, symplectic_fourier
from .weights import make_weight


@dataclass
class Check:
    name: str
    value: float
    tol: float
    passed: bool
    note: str = ""

    @classmethod
    def below(cls, name, value, tol, note=""):
        value = float(value)
        return cls(name, value, tol, bool(value <= tol), note)

    @classmethod
    def flag(cls, name, ok, note=""):
        return cls(name, 0.0 if ok else 1.0, 0.0, bool(ok), note)


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0
    kind: str = "criterion"

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def line(self) -> str:
        worst = [c for c in self.checks if not c.passed]
        tag = "PASS" if self.passed else "FAIL"
        detail = f"{len(self.checks)} checks"
        if worst:
            detail += "; failing: " + ", ".join(f"{c.name} ({c.value:.3g} > {c.tol:.0e})" for c in worst)
        return f"{tag} {self.kind} {self.number}: {self.title} [{detail}; {self.seconds:.1f}s]"


PARAM_SETS = (
    StepModelParams(),
    StepModelParams(m_l=2.0, m_r=1.0, V0=-0.5, sigma_l=0.7, sigma_p=1.6),
    StepModelParams(m_l=1.0, m_r=3.0, V0=2.0, sigma_l=2.0, sigma_p=0.5),
)


def _gauss(sl, sp=None):
    return make_weight("gaussian", sigma_l=sl, sigma_p=sl if sp is None else sp)


SHIFTED = dict(lam="exp(-(q-0.5)^2/2)", mu="exp(-p^2/2)")


# ---------------------------------------------------------------- criteria


def criterion_1() -> list[Check]:
    out = []
    for i, P in enumerate(PARAM_SETS):
        rep = asymptote_report(P)
        for key, r in rep.items():
            out.append(Check.below(f"set{i}: {key} vs table", r["error"], 1e-6, note=f"implied limit error {r['implied_error']:.1e}"))
    P = PARAM_SETS[0]
    out.append(Check.below("T(0) = 0.375", abs(step_T(0.0, P) - 0.375), 1e-12))
    return out


def criterion_2() -> list[Check]:
    out = []
    x = np.linspace(-6, 6, 601)
    for i, P in enumerate(PARAM_SETS):
        w = _gauss(P.sigma_l, P.sigma_p)
        S = quantize_hamiltonian(step_spec(P), w)
        C = step_hamiltonian(P)
        left = max(np.max(np.abs(a(x) - b(x))) for a, b in zip(S.coeffs, C.coeffs))
        sym, ptp = S.terms("symmetrized"), S.terms("ptp")
        T = sym[0][2]
        out.append(Check.below(f"set{i}: left-ordered coefficients", left, 1e-8))
        out.append(Check.below(f"set{i}: T", np.max(np.abs(T(x) - step_T(x, P))), 1e-8))
        out.append(Check.below(f"set{i}: T''", np.max(np.abs(T.derivative(2)(x) - step_Tpp(x, P))), 1e-8))
        out.append(Check.below(f"set{i}: V+", np.max(np.abs(sym[-1][2](x) - step_Vpm(x, P, "plus"))), 1e-8))
        out.append(Check.below(f"set{i}: V-", np.max(np.abs(ptp[-1][2](x) - step_Vpm(x, P, "minus"))), 1e-8))
    return out


def criterion_3(n: int = 256) -> list[Check]:
    grid = fft_grid(n, 32.0 / n)
    probes = go.probe_bank(grid)
    s = grid.interior()
    out = []
    t0 = time.perf_counter()
    for sigma in (1.0, math.sqrt(2), 2.0):
        w = _gauss(sigma)
        P = StepModelParams(sigma_l=sigma, sigma_p=sigma)
        cases = {
            "q": PolySymbol.from_expr("q"),
            "p": PolySymbol.from_expr("p"),
            "qp": PolySymbol.from_expr("q*p"),
            "p^2": PolySymbol.from_expr("p^2"),
            "V0 step": PolySymbol.from_expr("1*step(q)"),
            "H_step": step_symbol(P),
        }
        for name, f in cases.items():
            sym = quantize_symbol(f, w)
            pres = "symmetrized" if "symmetrized" in sym.presentations else "left"
            A = go.assemble(sym, grid, presentation=pres)
            B = go.kernel_oracle(f, w, grid)
            dev = go.action_deviation(A, B, probes)
            entry = float(np.max(np.abs(A.matrix[s, s] - B.matrix[s, s])))
            out.append(
                Check.below(f"sigma={sigma:.3g} {name}", dev, 1e-6, note=f"raw interior entry difference {entry:.2e}")
            )
    out.append(Check.below("runtime seconds", time.perf_counter() - t0, 60.0))
    return out


def _all_weights():
    G = Grid2D(fft_grid(128, 0.125), fft_grid(128, 0.125))
    table = PhaseField.from_function(G, lambda q, p: np.exp(-q * q / 2 - p * p / 3))
    return {
        "weyl_wigner": make_weight("weyl_wigner"),
        "born_jordan": make_weight("born_jordan"),
        "gaussian(1,1)": _gauss(1.0),
        "coherent_state": make_weight("coherent_state"),
        "gaussian(2,0.5)": _gauss(2.0, 0.5),
        "separable even": make_weight("separable", lam="1/(1+q^2)", mu="exp(-p^2/2)"),
        "shifted gaussian": make_weight("separable", **SHIFTED),
        "tabulated gaussian": make_weight("tabulated", table=table),
    }


def criterion_4() -> list[Check]:
    grid = fft_grid(256, 0.125)
    probes = go.probe_bank(grid)
    ws = _all_weights()
    out = []
    for name in ("weyl_wigner", "born_jordan", "gaussian(1,1)", "coherent_state", "gaussian(2,0.5)"):
        w = ws[name]
        Aq = go.assemble(quantize_Lq("q", w), grid)
        Ap = go.assemble(quantize_hp("p", w), grid)
        out.append(Check.below(f"{name}: [A_q, A_p] - i", go.action_deviation(go.commutator(Aq, Ap), 1j, probes), 1e-8))
        Oq = go.kernel_oracle(PolySymbol.from_expr("q"), w, grid)
        Op = go.kernel_oracle(PolySymbol.from_expr("p"), w, grid)
        out.append(
            Check.below(f"{name}: oracle [A_q, A_p] - i", go.action_deviation(go.commutator(Oq, Op), 1j, probes), 1e-8)
        )
    eye = np.eye(grid.n)
    one = PolySymbol.from_expr("1")
    for name, w in ws.items():
        A1 = go.assemble(quantize_Lq("1", w), grid)
        O1 = go.kernel_oracle(one, w, grid)
        out.append(Check.below(f"{name}: A_1 - I", np.max(np.abs(A1.matrix - eye)), 1e-8))
        out.append(Check.below(f"{name}: oracle A_1 - I", np.max(np.abs(O1.matrix - eye)), 1e-8))
    return out


def criterion_5() -> list[Check]:
    grid = fft_grid(256, 0.125)
    ws = _all_weights()
    family = ["weyl_wigner", "gaussian(1,1)", "coherent_state", "gaussian(2,0.5)", "separable even", "shifted gaussian"]
    symbols = {
        "qp": PolySymbol.from_expr("q*p"),
        "exp(-q^2) p^2": PolySymbol.from_expr("exp(-q^2)*p^2"),
        "H_step": step_symbol(StepModelParams()),
    }
    out = []
    for name in family:
        w = ws[name]
        even = abs(w.lambda_prime_zero) == 0.0
        for sname, f in symbols.items():
            sym = quantize_symbol(f, w)
            A = go.assemble(sym, grid, presentation="symmetrized")
            O = go.kernel_oracle(f, w, grid)
            for label, op in (("assembled", A), ("oracle", O)):
                d = op.hermitian_defect
                ok = (d < 1e-8) == even
                out.append(Check.flag(f"{name} {sname} {label}", ok, note=f"defect {d:.2e}, lambda'(0)={w.lambda_prime_zero:.3g}"))
            out.append(Check.flag(f"{name} {sname} symmetric flag", sym.symmetric == even))
    return out


def _test_field(grid):
    return PhaseField.from_function(grid, lambda q, p: np.exp(-((q - 1) ** 2) / 2 - p * p / 1.5) * (1 + q * p))


def criterion_6() -> list[Check]:
    G = Grid2D(fft_grid(256, 0.125), fft_grid(256, 0.125))
    out = []
    f = _test_field(G)
    ww = make_weight("weyl_wigner")
    out.append(Check.below("WW portrait identity (fourier)", np.max(np.abs(portrait(f, ww).values - f.values)), 1e-9))
    out.append(
        Check.below("WW portrait identity (direct)", np.max(np.abs(portrait(f, ww, method="direct").values - f.values)), 1e-9)
    )
    Gs = Grid2D(fft_grid(128, 0.125), fft_grid(128, 0.0625))
    q, p = Gs.mesh()
    for i, P in enumerate(PARAM_SETS[:2]):
        w = _gauss(P.sigma_l, P.sigma_p)
        H = portrait(step_symbol(P), w, Gs).values
        out.append(Check.below(f"set{i}: H_step portrait vs semiclassical formula", np.max(np.abs(H - step_portrait(q, p, P))), 1e-6))
        out.append(
            Check.below(
                f"set{i}: H_step portrait vs doubled-variance closed form",
                np.max(np.abs(H - step_portrait_autocorrelated(q, p, P))),
                1e-6,
            )
        )
        # coefficient of T in the p-independent part, read off far left where T = 1/(2 m_l)
        q_far = -12.0 * math.sqrt(2) / P.sigma_p
        tiny = Grid2D(make_grid(q_far, q_far + 7.0, 8), make_grid(-4.0, 4.0, 9))
        coef = portrait(step_symbol(P), w, tiny).values[0, 4].real * (2 * P.m_l)
        out.append(Check.below(f"set{i}: 2/sigma_l^2 coefficient", abs(coef - 2 / P.sigma_l**2), 1e-6))
        P2 = portrait(PolySymbol.from_expr("p^2"), w, Gs).values
        out.append(Check.below(f"set{i}: portrait of p^2", np.max(np.abs(P2 - (p * p + 2 / P.sigma_l**2))), 1e-8))
    return out


def criterion_7() -> list[Check]:
    G = Grid2D(fft_grid(256, 0.125), fft_grid(256, 0.125))
    f = _test_field(G)
    back = symplectic_fourier(symplectic_fourier(f), out_grid=G)
    g = PhaseField.from_function(G, lambda q, p: np.exp(-(q * q + p * p) / 2))
    fixed = symplectic_fourier(g, out_grid=G)
    one = PhaseField.from_function(G, lambda q, p: np.ones_like(q))
    spike = symplectic_fourier(one)
    return [
        Check.below("involution", np.max(np.abs(back.values - f.values)), 1e-8),
        Check.below("unit Gaussian fixed point", np.max(np.abs(fixed.values - g.values)), 1e-8),
        Check.below("Fs[1] origin-cell weight - 2 pi", abs(delta_weight(spike) - 2 * math.pi), 1e-6),
    ]


def criterion_8() -> list[Check]:
    grid = fft_grid(256, 0.0625)
    g0 = go.StateVector.from_function(grid, lambda x: np.exp(-x * x / 2))
    g1 = go.StateVector.from_function(grid, lambda x: x * np.exp(-x * x / 2))
    W0, W1 = wigner_of_state(g0), wigner_of_state(g1)
    o = grid.origin_index()
    return [
        Check.below("ground state origin value - 2", abs(W0.values[o, o] - 2), 1e-6),
        Check.below("ground state mass - 1", abs(W0.integral() - 1), 1e-6),
        Check.flag("first excited state negative at origin", W1.values[o, o].real < 0, note=f"{W1.values[o, o].real:.6g}"),
        Check.below("realness", max(np.abs(W0.values.imag).max(), np.abs(W1.values.imag).max()), 1e-10),
    ]


def criterion_9() -> list[Check]:
    w = _gauss(64.0)
    x = np.linspace(-4, 4, 801)
    away = np.abs(x) > 0.2
    out = []
    V = "step(q) + q^2/4"
    Vq = quantize_potential(V, w).coeffs[0](x)
    exact = (x > 0) + x * x / 4
    out.append(Check.below("V(q) = step + q^2/4", np.max(np.abs(Vq - exact)[away]), 1e-3))
    for h, fn in (("step(p)", lambda k: (k > 0) * 1.0), ("sqrt(1+p^2)", lambda k: np.sqrt(1 + k * k)), ("exp(-p^2)", lambda k: np.exp(-k * k))):
        g = quantize_hp(h, w).p_function(x)
        out.append(Check.below(f"h(p) = {h}", np.max(np.abs(g - fn(x))[away]), 1e-3))
    sym = quantize_hp("p^2", w)
    dev = max(abs(sym.coeffs[0](0.0) - 0), abs(sym.coeffs[1](0.0)), abs(sym.coeffs[2](0.0) - 1))
    out.append(Check.below("h(p) = p^2 coefficients", dev, 1e-3))
    P = StepModelParams(sigma_l=64.0, sigma_p=64.0)
    C = quantize_hamiltonian(step_spec(P), w)
    L2 = np.where(x > 0, 1 / (2 * P.m_r), 1 / (2 * P.m_l))
    Vs = np.where(x > 0, P.V0, 0.0)
    sym = C.terms("symmetrized")
    ptp = C.terms("ptp")
    out.append(Check.below("step model T -> 1/(2m)", np.max(np.abs(sym[0][2](x) - L2)[away]), 1e-3))
    out.append(Check.below("step model V+ -> V", np.max(np.abs(sym[-1][2](x) - Vs)[away]), 1e-3))
    out.append(Check.below("step model V- -> V", np.max(np.abs(ptp[-1][2](x) - Vs)[away]), 1e-3))
    return out


def criterion_10() -> list[Check]:
    G = Grid2D(fft_grid(256, 0.125), fft_grid(256, 0.125))
    grid = fft_grid(256, 0.125)
    fields = {
        "unit gaussian": (lambda q, p: np.exp(-(q * q + p * p) / 2), 1.0),
        "tilted bump": (lambda q, p: np.exp(-((q - 1) ** 2) / 2 - p * p / 3) * (1 + q * p), math.sqrt(6) / 2),
        "anisotropic": (lambda q, p: np.exp(-q * q - p * p / 4) * np.cos(q), math.exp(-0.25)),
    }
    weights = {"gaussian(1,1)": _gauss(1.0), "gaussian(2,0.5)": _gauss(2.0, 0.5), "born_jordan": make_weight("born_jordan"), "weyl_wigner": make_weight("weyl_wigner")}
    out = []
    for fname, (fn, exact) in fields.items():
        f = PhaseField.from_function(G, fn)
        ct = classical_trace(f)
        out.append(Check.below(f"{fname}: grid integral vs exact", abs(ct - exact), 1e-5))
        for wname, w in weights.items():
            tr = go.kernel_oracle(f, w, grid).trace()
            out.append(Check.below(f"{fname} / {wname}: Tr A_f", abs(tr - ct), 1e-5))
    return out


CRITERIA = {
    1: ("step-model closed forms and asymptotes", criterion_1),
    2: ("pipeline equals closed form", criterion_2),
    3: ("oracle equivalence", criterion_3),
    4: ("canonical commutator and A_1 = I", criterion_4),
    5: ("symmetry iff lambda'(0) = 0", criterion_5),
    6: ("portrait identities", criterion_6),
    7: ("transform suite", criterion_7),
    8: ("Wigner checks", criterion_8),
    9: ("canonical limit", criterion_9),
    10: ("trace formula", criterion_10),
}


def run(number: int) -> CriterionResult:
    title, fn = CRITERIA[number]
    t0 = time.perf_counter()
    checks = fn()
    return CriterionResult(number, title, checks, time.perf_counter() - t0)


def run_all(numbers=None) -> list[CriterionResult]:
    return [run(k) for k in (numbers or sorted(CRITERIA))]
