"""Step barrier with a position-dependent mass, quantized with a Gaussian weight.

Classical model: m(q) = m_l for q < 0, m_r for q > 0, V(q) = V0 theta(q), so
H = p^2 / (2 m(q)) + V(q).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .coeffs import CoeffFunction, PolySymbol
from .symquant import DiffOpSymbol, HamiltonianSpec

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class StepModelParams:
    m_l: float = 1.0
    m_r: float = 2.0
    V0: float = 1.0
    sigma_l: float = 1.0
    sigma_p: float = 1.0

    def __post_init__(self):
        for name in ("m_l", "m_r", "sigma_l", "sigma_p"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def jump(self) -> float:
        return 1.0 / self.m_r - 1.0 / self.m_l


def erfc(x):
    return special.erfc(x)


def step_T(x, P: StepModelParams):
    x = np.asarray(x, dtype=float)
    return 0.25 * P.jump * erfc(-P.sigma_p * x / SQRT2) + 1.0 / (2 * P.m_l)


def step_Tp(x, P: StepModelParams):
    x = np.asarray(x, dtype=float)
    s = P.sigma_p
    return P.jump * s / (2 * math.sqrt(2 * math.pi)) * np.exp(-0.5 * s * s * x * x)


def step_Tpp(x, P: StepModelParams):
    x = np.asarray(x, dtype=float)
    s = P.sigma_p
    return -(s**3) / (2 * math.sqrt(2 * math.pi)) * P.jump * x * np.exp(-0.5 * s * s * x * x)


def step_Vpm(x, P: StepModelParams, branch: str = "plus"):
    sign = {"plus": 1.0, "minus": -1.0}.get(branch)
    if sign is None:
        raise ValueError("branch must be 'plus' or 'minus'")
    x = np.asarray(x, dtype=float)
    return step_T(x, P) / P.sigma_l**2 + sign * step_Tpp(x, P) / 4 + 0.5 * P.V0 * erfc(-P.sigma_p * x / SQRT2)


def _coeff(fn, *derivs) -> CoeffFunction:
    return CoeffFunction(fn, derivs=tuple(derivs))


def step_hamiltonian(P: StepModelParams) -> DiffOpSymbol:
    """(T P^2 + P^2 T)/2 + V+(Q), equivalently P T P + V-(Q)."""
    T = _coeff(lambda x: step_T(x, P), lambda x: step_Tp(x, P), lambda x: step_Tpp(x, P))
    vp = _coeff(lambda x: step_Vpm(x, P, "plus"))
    vm = _coeff(lambda x: step_Vpm(x, P, "minus"))
    # left-ordered: T P^2 - i T' P + (V+ - T''/2)
    c2 = T
    c1 = _coeff(lambda x: -1j * step_Tp(x, P))
    c0 = _coeff(lambda x: step_Vpm(x, P, "plus") - 0.5 * step_Tpp(x, P))
    return DiffOpSymbol(
        (c0, c1, c2),
        {"symmetrized": (("anti", 2, T), ("left", 0, vp)), "ptp": (("ptp", 1, T), ("left", 0, vm))},
        label="step model",
    )


def step_spec(P: StepModelParams) -> HamiltonianSpec:
    """Classical step model as expression-built coefficients (jumps located exactly)."""
    L2 = f"1/(2*{P.m_l!r}) + step(q)*(1/(2*{P.m_r!r}) - 1/(2*{P.m_l!r}))"
    return HamiltonianSpec.from_coefficients(L2, 0.0, f"{P.V0!r}*step(q)")


def step_symbol(P: StepModelParams) -> PolySymbol:
    spec = step_spec(P)
    return PolySymbol({0: spec.L0, 2: spec.L2}, label="H_step")


def step_portrait(q, p, P: StepModelParams):
    """Semiclassical portrait in the form T(q) p^2 + (2/sigma_l^2) T(q) + (V0/2) Erfc(-sigma_p q / sqrt 2)."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    T = step_T(q, P)
    return T * p * p + 2.0 / P.sigma_l**2 * T + 0.5 * P.V0 * erfc(-P.sigma_p * q / SQRT2)


def step_portrait_autocorrelated(q, p, P: StepModelParams):
    """Portrait with both smoothings carried out: variance 2/sigma_p^2 in q, 2/sigma_l^2 in p.

    Fs[Pi] * Fs[Pi~] doubles the variance on each axis, so the q-profile is
    Erfc(-sigma_p q / 2) rather than Erfc(-sigma_p q / sqrt 2).
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    e = erfc(-P.sigma_p * q / 2.0)
    T2 = 0.25 * P.jump * e + 1.0 / (2 * P.m_l)
    return T2 * (p * p + 2.0 / P.sigma_l**2) + 0.5 * P.V0 * e


def table_asymptotes(P: StepModelParams) -> dict[str, float]:
    """Reference limit table for this model, entry by entry."""
    a = 1.0 / (2 * P.m_l)
    b = 1.0 / (2 * P.m_r)
    s2 = P.sigma_l**2
    return {
        "T(-inf)": a,
        "T(0)": 0.25 * (1.0 / P.m_l + 1.0 / P.m_r),
        "T(+inf)": b,
        "V(-inf)": a / s2,
        "V(0)": 0.5 * P.V0 + (a + b) / (4 * s2),
        "V(+inf)": P.V0 + b / s2,
    }


def limits(P: StepModelParams) -> dict[str, float]:
    """Limits implied by step_T / step_Vpm themselves (T'' vanishes at all three points).

    Differs from table_asymptotes only at V(0): T(0)/sigma_l^2 + V0/2.
    """
    out = table_asymptotes(P)
    out["V(0)"] = 0.5 * P.V0 + out["T(0)"] / P.sigma_l**2
    return out


def asymptote_report(P: StepModelParams) -> dict[str, dict[str, float]]:
    """Closed forms at x = -8/sigma_p, 0, 8/sigma_p against the table and the implied limits."""
    far = 8.0 / P.sigma_p
    where = {"-inf": -far, "0": 0.0, "+inf": far}
    table, lim = table_asymptotes(P), limits(P)
    out = {}
    for key, x in where.items():
        vals = {"T": float(step_T(x, P)), "V+": float(step_Vpm(x, P, "plus")), "V-": float(step_Vpm(x, P, "minus"))}
        for name, v in vals.items():
            k = f"{name[0]}({key})"
            out[f"{name}({key})"] = {
                "x": x,
                "value": v,
                "table": table[k],
                "error": abs(v - table[k]),
                "implied": lim[k],
                "implied_error": abs(v - lim[k]),
            }
    return out


FIGURE_COLUMNS = ("x", "T", "M", "Vplus", "Vminus")


def figure_data(P: StepModelParams, x_range=None, n: int = 241) -> np.ndarray:
    """Columns x, T, M = 1/(2T), V+, V-; the default range ends at +-8/sigma_p."""
    if x_range is None:
        x_range = (-8.0 / P.sigma_p, 8.0 / P.sigma_p)
    if n < 2:
        raise ValueError("n must be at least 2")
    x = np.linspace(x_range[0], x_range[1], n)
    T = step_T(x, P)
    return np.column_stack([x, T, 1.0 / (2 * T), step_Vpm(x, P, "plus"), step_Vpm(x, P, "minus")])


def write_figure_csv(table: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(FIGURE_COLUMNS)
        for row in table:
            w.writerow([f"{v:.17g}" for v in row])


def read_figure_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if tuple(header) != FIGURE_COLUMNS:
            raise ValueError(f"unexpected header {header}")
        return np.array([[float(v) for v in row] for row in r])
