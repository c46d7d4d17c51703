"""Closed-form quantization of L(q) p^n, V(q), h(p) and Galilean Hamiltonians.

Operators are kept as differential-operator symbols ``A = sum_t C_t(Q) P^t``
(left ordering).  Symmetrised presentations are stored as lists of terms:

* ``("left", k, C)``  ->  C(Q) P^k
* ``("anti", k, C)``  ->  (C(Q) P^k + P^k C(Q)) / 2
* ``("ptp", 1, C)``   ->  P C(Q) P

Every quantizer divides by Pi(0) so that the constant 1 maps to the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coeffs import CoeffFunction, PolySymbol, as_coeff, binom
from .transforms import Kernel1D, smooth
from .weights import NotSeparableError, WeightSpec

PRESENTATIONS = ("left", "symmetrized", "ptp")
_PROBE = np.linspace(-8.0, 8.0, 41)


@dataclass(frozen=True, eq=False)
class DiffOpSymbol:
    coeffs: tuple[CoeffFunction, ...]
    presentations: dict = field(default_factory=dict)
    p_function: CoeffFunction | None = None
    label: str = ""

    @property
    def max_power(self) -> int:
        return len(self.coeffs) - 1

    @property
    def symmetric(self) -> bool:
        terms = self.presentations.get("symmetrized")
        if terms is None:
            return False
        ok = all(_term_is_symmetric(t) for t in terms)
        if self.p_function is not None:
            ok = ok and not np.any(np.abs(np.imag(self.p_function(_PROBE))) > 1e-12)
        return ok

    def terms(self, presentation: str = "left"):
        if presentation == "left":
            return tuple(("left", t, c) for t, c in enumerate(self.coeffs))
        try:
            return self.presentations[presentation]
        except KeyError:
            raise ValueError(f"symbol has no {presentation!r} presentation") from None

    def __add__(self, other: "DiffOpSymbol") -> "DiffOpSymbol":
        n = max(len(self.coeffs), len(other.coeffs))
        zero = CoeffFunction.constant(0.0)
        a = list(self.coeffs) + [zero] * (n - len(self.coeffs))
        b = list(other.coeffs) + [zero] * (n - len(other.coeffs))
        pres = {}
        for key in set(self.presentations) & set(other.presentations):
            pres[key] = tuple(self.presentations[key]) + tuple(other.presentations[key])
        for key in set(self.presentations) ^ set(other.presentations):
            # fall back to the other operand's symmetrised view when one side lacks a ptp view
            mine = self.presentations.get(key, self.presentations.get("symmetrized"))
            theirs = other.presentations.get(key, other.presentations.get("symmetrized"))
            if mine is not None and theirs is not None:
                pres[key] = tuple(mine) + tuple(theirs)
        pres = {key: _merge_left(terms) for key, terms in pres.items()}
        pf = self.p_function
        if other.p_function is not None:
            pf = other.p_function if pf is None else pf + other.p_function
        return DiffOpSymbol(tuple(x + y for x, y in zip(a, b)), pres, pf)

    def left_from(self, presentation: str) -> tuple[CoeffFunction, ...]:
        """Left-ordered coefficients recomputed from a symmetrised presentation."""
        return left_ordered(self.terms(presentation), len(self.coeffs))


def _merge_left(terms) -> tuple:
    """Collapse repeated ``("left", k, .)`` terms into one per power, keeping first-seen order."""
    out, where = [], {}
    for kind, k, c in terms:
        if kind == "left" and k in where:
            i = where[k]
            out[i] = ("left", k, out[i][2] + c)
            continue
        if kind == "left":
            where[k] = len(out)
        out.append((kind, k, c))
    return tuple(out)


def _term_is_symmetric(term) -> bool:
    kind, k, c = term
    imag = np.max(np.abs(np.imag(c(_PROBE))))
    if kind == "left" and k > 0 and not _is_constant(c):
        return bool(np.max(np.abs(c(_PROBE))) == 0.0)
    return bool(imag <= 1e-12)


def _is_constant(c: CoeffFunction) -> bool:
    return c.poly is not None and (len(c.poly) == 1 or not np.any(c.poly[1:]))


def left_ordered(terms, length: int = 3) -> tuple[CoeffFunction, ...]:
    """Convert presentation terms to left-ordered coefficients (k <= 2)."""
    zero = CoeffFunction.constant(0.0)
    out = [zero] * max(length, 1 + max(k for _, k, _ in terms))
    for kind, k, c in terms:
        if kind == "left" or (kind == "anti" and _is_constant(c)):
            out[k] = out[k] + c
        elif kind == "anti" and k == 0:
            out[0] = out[0] + c
        elif kind == "anti" and k == 1:
            # (CP + PC)/2 = C P - (i/2) C'
            out[1] = out[1] + c
            out[0] = out[0] + (-0.5j) * c.derivative(1)
        elif kind == "anti" and k == 2:
            # (CP^2 + P^2 C)/2 = C P^2 - i C' P - C''/2
            out[2] = out[2] + c
            out[1] = out[1] + (-1j) * c.derivative(1)
            out[0] = out[0] + (-0.5) * c.derivative(2)
        elif kind == "ptp":
            # P C P = C P^2 - i C' P
            out[2] = out[2] + c
            out[1] = out[1] + (-1j) * c.derivative(1)
        else:
            raise ValueError(f"cannot reorder term {kind} P^{k}")
    return tuple(out)


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """H(q, p) = L2(q) p^2 + L1(q) p + L0(q) at a fixed time."""

    L2: CoeffFunction
    L1: CoeffFunction
    L0: CoeffFunction
    mass: CoeffFunction | None = None
    gauge: CoeffFunction | None = None
    potential: CoeffFunction | None = None

    @classmethod
    def from_coefficients(cls, L2, L1=0.0, L0=0.0) -> "HamiltonianSpec":
        return cls(as_coeff(L2, "q"), as_coeff(L1, "q"), as_coeff(L0, "q"))

    @classmethod
    def from_mass(cls, mass, gauge=0.0, potential=0.0, probe=np.linspace(-20, 20, 4001)) -> "HamiltonianSpec":
        """(p - A)^2 / (2m) + U expanded into L2, L1, L0."""
        m, A, U = as_coeff(mass, "q"), as_coeff(gauge, "q"), as_coeff(potential, "q")
        if np.any(np.real(m(probe)) <= 0):
            raise ValueError("mass must be positive everywhere")
        L2 = m.map(lambda v: 0.5 / v)
        L1 = CoeffFunction(lambda x: -A(x) / m(x), jumps=tuple(sorted(set(A.jumps) | set(m.jumps))))
        L0 = CoeffFunction(
            lambda x: A(x) ** 2 / (2 * m(x)) + U(x),
            jumps=tuple(sorted(set(A.jumps) | set(m.jumps) | set(U.jumps))),
        )
        return cls(L2, L1, L0, m, A, U)

    def symbol(self) -> PolySymbol:
        return PolySymbol({0: self.L0, 1: self.L1, 2: self.L2})


# ---------------------------------------------------------------- smoothing


def _smoothed(L: CoeffFunction, kernel: Kernel1D, max_order: int = 4) -> CoeffFunction:
    """CoeffFunction for x -> smooth(L, kernel)(x) with derivatives attached."""
    L = as_coeff(L, "q")
    if L.poly is not None and hasattr(kernel, "moment"):
        # polynomial: sum_r C(n, r) (-1)^r m_r x^{n-r}, exact
        out = np.zeros(len(L.poly), dtype=complex)
        for n, a in enumerate(L.poly):
            for r in range(n + 1):
                out[n - r] += a * binom(n, r) * (-1) ** r * kernel.moment(r)
        out = out.real if not np.any(out.imag) else out
        return CoeffFunction.polynomial(out)
    derivs = tuple((lambda x, k=k: smooth(L, kernel, x, k)) for k in range(1, max_order + 1))
    return CoeffFunction(lambda x: smooth(L, kernel, x, 0), derivs=derivs)


def smoothed_coeff(L, w: WeightSpec) -> CoeffFunction:
    """T = (2 pi)^-1/2 Fbar[mu] * L for a separable weight Pi = lambda(q) mu(p)."""
    if not w.separable:
        raise NotSeparableError(
            f"{w.kind} weight is not separable; quantize through gridop.kernel_oracle instead"
        )
    return _smoothed(L, w.mu_kernel())


def _norms(w: WeightSpec, upto: int):
    return [w.lambda_derivs[r] / w.pi_zero for r in range(upto + 1)]


def quantize_Lq(L, w: WeightSpec) -> DiffOpSymbol:
    if not w.separable:
        # a function of q alone only sees the section Pi(0, .)
        return quantize_potential(L, w)
    T = smoothed_coeff(L, w)
    (l0,) = _norms(w, 0)
    c0 = l0 * T
    return DiffOpSymbol((c0,), {"symmetrized": (("left", 0, c0),), "ptp": (("left", 0, c0),)})


def quantize_Lq_p(L, w: WeightSpec) -> DiffOpSymbol:
    T = smoothed_coeff(L, w)
    l0, l1 = _norms(w, 1)
    dT = T.derivative(1)
    c1 = l0 * T
    c0 = (1j * l1) * T + (-0.5j * l0) * dT
    sym = (("anti", 1, l0 * T),)
    if l1 != 0:
        sym = sym + (("left", 0, (1j * l1) * T),)
    return DiffOpSymbol((c0, c1), {"symmetrized": sym, "ptp": sym})


def quantize_Lq_p2(L, w: WeightSpec) -> DiffOpSymbol:
    T = smoothed_coeff(L, w)
    l0, l1, l2 = _norms(w, 2)
    d1, d2 = T.derivative(1), T.derivative(2)
    c2 = l0 * T
    c1 = (2j * l1) * T + (-1j * l0) * d1
    c0 = (-l2) * T + l1 * d1 + (-0.25 * l0) * d2
    sym = [("anti", 2, l0 * T)]
    ptp = [("ptp", 1, l0 * T)]
    if l1 != 0:
        sym.append(("left", 1, (2j * l1) * T))
        ptp.append(("left", 1, (2j * l1) * T))
    sym.append(("left", 0, (-l2) * T + l1 * d1 + (0.25 * l0) * d2))
    ptp.append(("left", 0, (-l2) * T + l1 * d1 + (-0.25 * l0) * d2))
    return DiffOpSymbol((c0, c1, c2), {"symmetrized": tuple(sym), "ptp": tuple(ptp)})


def quantize_monomial(L, n: int, w: WeightSpec) -> DiffOpSymbol:
    """L(q) p^n through the general multinomial expansion (n <= 4)."""
    if not 0 <= n <= 4:
        raise ValueError("quantize_monomial supports 0 <= n <= 4")
    T = smoothed_coeff(L, w)
    lam = _norms(w, n)
    dT = [T] + [T.derivative(s) for s in range(1, n + 1)]
    zero = CoeffFunction.constant(0.0)
    coeffs = [zero] * (n + 1)
    for r in range(n + 1):
        for s in range(n + 1 - r):
            t = n - r - s
            mult = binom(n, r) * binom(n - r, s)
            factor = 2.0**-s * mult * (1j**r) * lam[r] * ((-1j) ** s)
            if factor == 0:
                continue
            coeffs[t] = coeffs[t] + factor * dT[s]
    return DiffOpSymbol(tuple(coeffs))


def quantize_potential(V, w: WeightSpec) -> DiffOpSymbol:
    """V(q) -> multiplication by (2 pi)^-1/2 V * Fbar[Pi(0, .)] / Pi(0)."""
    V = as_coeff(V, "q")
    c = _smoothed(V, w.position_kernel(0)) * (1.0 / w.pi_zero)
    return DiffOpSymbol((c,), {"symmetrized": (("left", 0, c),), "ptp": (("left", 0, c),)})


def quantize_hp(h, w: WeightSpec) -> DiffOpSymbol:
    """h(p) -> g(P) with g the smoothing of h by the kernel of Pi(., 0).

    Polynomial ``h`` give constant left-ordered coefficients; anything else is
    carried as ``p_function``.
    """
    h = as_coeff(h, "p")
    kernel = w.momentum_kernel()
    g = _smoothed(h, kernel) * (1.0 / w.pi_zero)
    if g.poly is not None:
        coeffs = tuple(CoeffFunction.constant(c) for c in g.poly)
        sym = tuple(("left", t, c) for t, c in enumerate(coeffs) if t == 0 or c.poly[0] != 0)
        return DiffOpSymbol(coeffs, {"symmetrized": sym, "ptp": sym})
    zero = CoeffFunction.constant(0.0)
    return DiffOpSymbol((zero,), {"symmetrized": (("left", 0, zero),), "ptp": (("left", 0, zero),)}, p_function=g)


def _is_zero(c: CoeffFunction) -> bool:
    if c.poly is not None:
        return not np.any(c.poly)
    return bool(np.all(c(np.linspace(-30, 30, 601)) == 0))


def quantize_hamiltonian(H: HamiltonianSpec, w: WeightSpec) -> DiffOpSymbol:
    out = quantize_Lq_p2(H.L2, w)
    if not _is_zero(H.L1):
        out = out + quantize_Lq_p(H.L1, w)
    if not _is_zero(H.L0):
        out = out + quantize_Lq(H.L0, w)
    return out


def quantize_symbol(f: PolySymbol, w: WeightSpec) -> DiffOpSymbol:
    """Quantize sum_n L_n(q) p^n term by term.

    Separable weights use the closed forms; other weights are accepted for
    pure functions of q or p (through the Pi(0, .) / Pi(., 0) sections).
    """
    out = None
    for n, L in sorted(f.terms.items()):
        if _is_zero(L):
            continue
        if w.separable:
            part = {0: quantize_Lq, 1: quantize_Lq_p, 2: quantize_Lq_p2}.get(n)
            part = part(L, w) if part else quantize_monomial(L, n, w)
        elif n == 0:
            part = quantize_potential(L, w)
        elif L.poly is not None and len(L.poly) == 1:
            part = quantize_hp(CoeffFunction.polynomial([0.0] * n + [L.poly[0]]), w)
        else:
            raise NotSeparableError(f"{w.kind} weight: use gridop.kernel_oracle for L(q) p^{n}")
        out = part if out is None else out + part
    if out is None:
        out = DiffOpSymbol((CoeffFunction.constant(0.0),), {"symmetrized": (), "ptp": ()})
    return out
