"""Real (or complex) functions of one variable, and classical symbols built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from . import expr as ex

EXTENSIONS = ("closed", "decay", "constant", "periodic")


def fornberg_weights(x0: float, nodes: np.ndarray, order: int) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at ``x0`` (Fornberg 1988)."""
    nodes = np.asarray(nodes, dtype=float)
    n = len(nodes)
    c = np.zeros((n, order + 1))
    c1 = 1.0
    c4 = nodes[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = nodes[i] - x0
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


def central_derivative(f: Callable, x0, order: int, step: float, half_width: int = 4):
    """Central-difference derivative of ``f`` at ``x0`` on a ``2*half_width+1`` stencil."""
    offsets = np.arange(-half_width, half_width + 1) * step
    w = fornberg_weights(0.0, offsets, order)
    x0 = np.asarray(x0, dtype=float)
    return sum(wk * f(x0 + dk) for wk, dk in zip(w, offsets))


@dataclass(frozen=True, eq=False)
class CoeffFunction:
    """A function of one variable used as a coefficient L(q), V(q), h(p), lambda, mu.

    ``func`` must be vectorised.  ``jumps`` lists discontinuity locations so
    quadratures can split there.  ``derivs[k]`` is the (k+1)-th derivative when
    known in closed form.
    """

    func: Callable[[np.ndarray], np.ndarray]
    jumps: tuple[float, ...] = ()
    extension: str = "closed"
    derivatives_at_zero: tuple[float, ...] | None = None
    node: ex.Node | None = None
    var: str = "x"
    poly: np.ndarray | None = None
    derivs: tuple[Callable, ...] = ()
    label: str = ""
    fd_step: float = 1e-2
    grid: object = None
    samples: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.extension not in EXTENSIONS:
            raise ValueError(f"extension must be one of {EXTENSIONS}")

    # -- constructors -------------------------------------------------
    @classmethod
    def from_expr(cls, src: str | ex.Node, var: str = "x") -> "CoeffFunction":
        node = ex.parse_expr(src, var) if isinstance(src, str) else src
        extra = ex.free_variables(node) - {var}
        if extra:
            raise ex.ExprError(f"coefficient in {var} uses other variables {sorted(extra)}")
        poly = ex.polynomial_coefficients(node, var)

        def f(x, node=node):
            x = np.asarray(x, dtype=float)
            return np.broadcast_to(ex.evaluate(node, {var: x}), x.shape) * 1.0

        return cls(
            f,
            jumps=ex.step_roots(node, var),
            node=node,
            var=var,
            poly=poly,
            label=ex.to_string(node),
        )

    @classmethod
    def constant(cls, c: complex) -> "CoeffFunction":
        c = complex(c) if np.iscomplexobj(c) else float(c)

        def f(x, c=c):
            return np.full(np.shape(x), c, dtype=complex if isinstance(c, complex) else float)

        return cls(f, poly=np.array([c]), label=repr(c))

    @classmethod
    def polynomial(cls, coeffs: Sequence[float]) -> "CoeffFunction":
        coeffs = np.asarray(coeffs)
        return cls(lambda x, c=coeffs: np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), c), poly=coeffs)

    @classmethod
    def tabulated(cls, grid, samples, extension: str) -> "CoeffFunction":
        """Cubic-spline interpolant of samples on a Grid1D.

        Outside the table: 'decay' gives 0, 'constant' holds the edge values,
        'periodic' wraps with the grid length.
        """
        if extension not in ("decay", "constant", "periodic"):
            raise ValueError("tabulated coefficients need extension decay|constant|periodic")
        samples = np.asarray(samples)
        if not np.all(np.isfinite(samples)):
            raise ValueError("tabulated samples must be finite")
        xs = grid.points
        spline = CubicSpline(xs, samples)
        lo, hi = xs[0], xs[-1]
        period = grid.n * grid.spacing

        def f(x):
            x = np.asarray(x, dtype=float)
            if extension == "periodic":
                return spline(lo + np.mod(x - lo, period).clip(0, hi - lo))
            out = spline(np.clip(x, lo, hi))
            if extension == "decay":
                out = np.where((x < lo) | (x > hi), 0.0, out)
            return out

        derivs = tuple(
            (lambda x, k=k: spline(np.clip(np.asarray(x, dtype=float), lo, hi), k)) for k in (1, 2, 3)
        )
        return cls(f, extension=extension, derivs=derivs, fd_step=grid.spacing, grid=grid, samples=samples)

    # -- evaluation ---------------------------------------------------
    def __call__(self, x):
        return self.func(x)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.func(np.array([0.0, 0.5])))

    def derivative(self, order: int = 1) -> "CoeffFunction":
        if order == 0:
            return self
        if self.poly is not None:
            return CoeffFunction.polynomial(np.polynomial.polynomial.polyder(self.poly, order) if len(self.poly) > order else [0.0])
        if self.node is not None:
            node = self.node
            for _ in range(order):
                node = ex.diff(node, self.var)
            return CoeffFunction.from_expr(node, self.var)
        if len(self.derivs) >= order:
            rest = self.derivs[order:]
            return CoeffFunction(self.derivs[order - 1], jumps=self.jumps, derivs=rest, fd_step=self.fd_step)
        step = self.fd_step
        f = self.func
        return CoeffFunction(lambda x: central_derivative(f, x, order, step), jumps=self.jumps, fd_step=step)

    def derivative_at_zero(self, order: int) -> float:
        if self.derivatives_at_zero is not None and len(self.derivatives_at_zero) > order:
            return self.derivatives_at_zero[order]
        val = self.derivative(order)(np.array([0.0]))[0]
        return complex(val) if np.iscomplexobj(val) else float(val)

    # -- arithmetic ---------------------------------------------------
    def _combine(self, other, op) -> "CoeffFunction":
        if isinstance(other, CoeffFunction):
            f, g = self.func, other.func
            jumps = tuple(sorted(set(self.jumps) | set(other.jumps)))
            return CoeffFunction(lambda x: op(f(x), g(x)), jumps=jumps)
        f = self.func
        return CoeffFunction(lambda x: op(f(x), other), jumps=self.jumps)

    def __add__(self, other):
        if self.derivs and isinstance(other, CoeffFunction) and other.derivs:
            out = self._combine(other, np.add)
            n = min(len(self.derivs), len(other.derivs))
            d = tuple((lambda x, a=a, b=b: a(x) + b(x)) for a, b in zip(self.derivs[:n], other.derivs[:n]))
            return CoeffFunction(out.func, jumps=out.jumps, derivs=d)
        if self.poly is not None and isinstance(other, CoeffFunction) and other.poly is not None:
            return CoeffFunction.polynomial(np.polynomial.polynomial.polyadd(self.poly, other.poly))
        return self._combine(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rsub__(self, other):
        return (-1.0) * self + other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        if np.isscalar(other):
            if self.poly is not None:
                return CoeffFunction.polynomial(self.poly * other)
            f = self.func
            d = tuple((lambda x, g=g: other * g(x)) for g in self.derivs)
            return CoeffFunction(lambda x: other * f(x), jumps=self.jumps, derivs=d, node=None)
        return self._combine(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return self * (1.0 / other)
        return self._combine(other, np.divide)

    def map(self, fn: Callable) -> "CoeffFunction":
        """Pointwise ``fn(self(x))``; jump locations are kept."""
        f = self.func
        return CoeffFunction(lambda x: fn(f(x)), jumps=self.jumps)


def as_coeff(value, var: str = "x") -> CoeffFunction:
    if isinstance(value, CoeffFunction):
        return value
    if isinstance(value, str):
        return CoeffFunction.from_expr(value, var)
    if callable(value):
        return CoeffFunction(value)
    return CoeffFunction.constant(value)


@dataclass(frozen=True, eq=False)
class PolySymbol:
    """Classical symbol f(q, p) = sum_n L_n(q) p**n."""

    terms: dict[int, CoeffFunction]
    label: str = ""

    @classmethod
    def from_expr(cls, src: str) -> "PolySymbol":
        node = ex.parse_expr(src, ("q", "p"))
        parts = ex.split_powers(node, "p", max_degree=4)
        return cls({n: CoeffFunction.from_expr(c, "q") for n, c in sorted(parts.items())}, label=src)

    @property
    def degree(self) -> int:
        return max(self.terms)

    def __call__(self, q, p):
        q, p = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(p, dtype=float))
        out = np.zeros(q.shape, dtype=complex)
        for n, L in self.terms.items():
            out = out + L(q) * p**n
        return out.real if not np.any(out.imag) else out

    def __add__(self, other: "PolySymbol") -> "PolySymbol":
        terms = dict(self.terms)
        for n, L in other.terms.items():
            terms[n] = terms[n] + L if n in terms else L
        return PolySymbol(terms)


def binom(n: int, k: int) -> int:
    return math.comb(n, k)
