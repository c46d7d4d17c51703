"""Weight (apodization) functions Pi(q, p) that select a covariant quantization."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .coeffs import CoeffFunction, as_coeff
from .transforms import (
    TWO_PI,
    GaussianKernel,
    Grid2D,
    Kernel1D,
    NumericKernel,
    PhaseField,
    PolyDeltaKernel,
    convolve2d,
    preimage_grid,
    symplectic_fourier,
)

KINDS = ("weyl_wigner", "born_jordan", "gaussian", "separable", "tabulated")
MAX_DERIVATIVE = 4


class NotSeparableError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class WeightSpec:
    kind: str
    sigma_l: float | None = None
    sigma_p: float | None = None
    lam: CoeffFunction | None = None
    mu: CoeffFunction | None = None
    table: PhaseField | None = None
    pi_zero: complex = 1.0
    symmetric: bool = True
    lambda_derivs: tuple[complex, ...] = ()
    _interp: object = field(default=None, repr=False)
    _kernels: dict = field(default_factory=dict, repr=False)

    @property
    def separable(self) -> bool:
        return self.kind in ("weyl_wigner", "gaussian", "separable")

    @property
    def lambda_prime_zero(self) -> complex | None:
        return self.lambda_derivs[1] if self.separable else None

    def __call__(self, q, p):
        return evaluate(self, q, p)

    def describe(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "gaussian":
            d.update(sigma_l=self.sigma_l, sigma_p=self.sigma_p)
        if self.kind == "separable":
            d.update(**{"lambda": self.lam.label, "mu": self.mu.label})
        return d

    # -- one-dimensional sections used by the closed-form quantizers ------
    def lam_value(self, q):
        if self.kind == "weyl_wigner":
            return np.ones_like(np.asarray(q, dtype=float))
        if self.kind == "gaussian":
            q = np.asarray(q, dtype=float)
            return np.exp(-q * q / (2 * self.sigma_l**2))
        if self.kind == "separable":
            return self.lam(q)
        raise NotSeparableError(f"{self.kind} weight is not separable")

    def mu_value(self, p):
        if self.kind == "weyl_wigner":
            return np.ones_like(np.asarray(p, dtype=float))
        if self.kind == "gaussian":
            p = np.asarray(p, dtype=float)
            return np.exp(-p * p / (2 * self.sigma_p**2))
        if self.kind == "separable":
            return self.mu(p)
        raise NotSeparableError(f"{self.kind} weight is not separable")

    def mu_kernel(self) -> Kernel1D:
        """Kernel (2 pi)^-1 int mu(p) e^{ips} dp of the momentum factor."""
        if "mu" not in self._kernels:
            self._kernels["mu"] = self._mu_kernel()
        return self._kernels["mu"]

    def _mu_kernel(self) -> Kernel1D:
        if self.kind == "weyl_wigner":
            return PolyDeltaKernel(1.0, 0, +1)
        if self.kind == "gaussian":
            return GaussianKernel(1.0 / self.sigma_p, 1.0)
        if self.kind == "separable":
            return NumericKernel(self.mu, sign=+1)
        raise NotSeparableError(
            f"{self.kind} weight is not separable; use gridop.kernel_oracle for L(q) p^n symbols"
        )

    def position_kernel(self, r: int = 0) -> Kernel1D:
        """Kernel of the profile p -> d^r/dq^r Pi(q, p) at q = 0 (sign +)."""
        key = ("position", r)
        if key not in self._kernels:
            self._kernels[key] = self._position_kernel(r)
        return self._kernels[key]

    def _position_kernel(self, r: int) -> Kernel1D:
        if self.separable:
            lr = self.lambda_derivs[r]
            base = self.mu_kernel()
            return _scaled(base, lr)
        if self.kind == "born_jordan":
            # sinc(qp) = sum_k (-1)^k (qp)^{2k} / (2k+1)!
            if r % 2:
                return PolyDeltaKernel(0.0, 0, +1)
            k = r // 2
            return PolyDeltaKernel((-1) ** k / (2 * k + 1), r, +1)
        h = self.table.grid.q_grid.spacing
        from .coeffs import central_derivative

        prof = lambda p: central_derivative(lambda q: self(q, p), 0.0, r, h) if r else self(0.0, p)  # noqa: E731
        return NumericKernel(prof, sign=+1)

    def momentum_kernel(self) -> Kernel1D:
        """Kernel (2 pi)^-1 int Pi(q, 0) e^{-iqs} dq used for functions of p."""
        if "momentum" not in self._kernels:
            self._kernels["momentum"] = self._momentum_kernel()
        return self._kernels["momentum"]

    def _momentum_kernel(self) -> Kernel1D:
        if self.kind in ("weyl_wigner", "born_jordan"):
            return PolyDeltaKernel(1.0, 0, -1)
        if self.kind == "gaussian":
            return GaussianKernel(1.0 / self.sigma_l, 1.0)
        return NumericKernel(lambda q: self(q, 0.0), sign=-1)


def _scaled(kernel: Kernel1D, factor) -> Kernel1D:
    if isinstance(kernel, PolyDeltaKernel):
        return PolyDeltaKernel(kernel.coeff * factor, kernel.power, kernel.sign)
    if isinstance(kernel, GaussianKernel) and np.isreal(factor):
        return GaussianKernel(kernel.std, kernel.mass * float(np.real(factor)))
    return _ScaledKernel(kernel, factor)


class _ScaledKernel(Kernel1D):
    def __init__(self, base: Kernel1D, factor):
        self.base, self.factor = base, factor
        self.radius = base.radius
        self.mass = base.mass * factor

    def values(self, s, order=0):
        return self.factor * self.base.values(s, order)

    def moment(self, r):
        return self.factor * self.base.moment(r)


# ----------------------------------------------------------------- builders


def _gaussian_lambda_derivs(sigma: float) -> tuple[float, ...]:
    # d^r/dq^r exp(-q^2 / 2 s^2) at 0: (-1)^{r/2} (r-1)!! / s^r for even r
    out = []
    for r in range(MAX_DERIVATIVE + 1):
        if r % 2:
            out.append(0.0)
        else:
            dfact = math.prod(range(r - 1, 0, -2)) if r else 1
            out.append((-1) ** (r // 2) * dfact / sigma**r)
    return tuple(out)


def make_weight(kind: str, **params) -> WeightSpec:
    """Build a weight.

    kinds: ``weyl_wigner``; ``born_jordan``; ``gaussian`` (sigma_l, sigma_p);
    ``separable`` (lam, mu as CoeffFunction/expression strings); ``tabulated``
    (table: PhaseField of Pi values).
    """
    kind = kind.lower().replace("-", "_")
    if kind == "coherent_state":
        kind, params = "gaussian", {"sigma_l": math.sqrt(2), "sigma_p": math.sqrt(2)}
    if kind not in KINDS:
        raise ValueError(f"unknown weight kind {kind!r}; expected one of {KINDS}")
    if kind == "weyl_wigner":
        w = WeightSpec(kind, lambda_derivs=(1.0,) + (0.0,) * MAX_DERIVATIVE)
    elif kind == "born_jordan":
        w = WeightSpec(kind)
    elif kind == "gaussian":
        sl, sp = float(params["sigma_l"]), float(params["sigma_p"])
        if not (sl > 0 and sp > 0):
            raise ValueError("gaussian widths must be positive")
        w = WeightSpec(kind, sigma_l=sl, sigma_p=sp, lambda_derivs=_gaussian_lambda_derivs(sl))
    elif kind == "separable":
        lam = as_coeff(params["lam"], "q")
        mu = as_coeff(params["mu"], "p")
        derivs = tuple(lam.derivative_at_zero(r) for r in range(MAX_DERIVATIVE + 1))
        w = WeightSpec(kind, lam=lam, mu=mu, lambda_derivs=derivs)
    else:
        table = params["table"]
        g = table.grid
        qs, ps = g.q_grid.points, g.p_grid.points
        vals = np.asarray(table.values)
        parts = [RectBivariateSpline(qs, ps, vals.real, kx=3, ky=3, s=0)]
        if np.any(vals.imag):
            parts.append(RectBivariateSpline(qs, ps, vals.imag, kx=3, ky=3, s=0))
        w = WeightSpec(kind, table=table, _interp=(parts, (qs[0], qs[-1], ps[0], ps[-1])))
    pi0 = complex(evaluate(w, 0.0, 0.0))
    if abs(pi0) == 0.0:
        raise ValueError("weight must not vanish at the origin")
    pi0 = pi0.real if pi0.imag == 0 else pi0
    object.__setattr__(w, "pi_zero", pi0)
    object.__setattr__(w, "symmetric", _symmetry_probe(w))
    return w


def _symmetry_probe(w: WeightSpec, tol: float = 1e-10) -> bool:
    extent = 4.0
    if w.kind == "tabulated":
        g = w.table.grid
        extent = 0.8 * min(abs(g.q_grid.x_min), g.q_grid.x_max, abs(g.p_grid.x_min), g.p_grid.x_max)
    t = np.linspace(-extent, extent, 17)
    q, p = np.meshgrid(t, t, indexing="ij")
    a = np.asarray(evaluate(w, q, p), dtype=complex)
    b = np.conj(np.asarray(evaluate(w, -q, -p), dtype=complex))
    return bool(np.max(np.abs(a - b)) <= tol)


def evaluate(w: WeightSpec, q, p):
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if w.kind == "weyl_wigner":
        return np.ones(np.broadcast(q, p).shape)
    if w.kind == "born_jordan":
        t = q * p
        small = np.abs(t) < 1e-4
        ts = np.where(small, 1.0, t)
        return np.where(small, 1.0 - t * t / 6.0 + t**4 / 120.0, np.sin(ts) / ts)
    if w.kind == "tabulated":
        return _table_value(w, q, p)
    return w.lam_value(q) * w.mu_value(p)


def _table_value(w: WeightSpec, q, p):
    # interpolating bicubic spline inside the table, zero outside
    parts, (q0, q1, p0, p1) = w._interp
    q, p = np.broadcast_arrays(q, p)
    qf, pf = q.ravel(), p.ravel()
    out = parts[0].ev(qf, pf).astype(complex if len(parts) > 1 else float)
    if len(parts) > 1:
        out = out + 1j * parts[1].ev(qf, pf)
    out = np.where((qf < q0) | (qf > q1) | (pf < p0) | (pf > p1), 0.0, out)
    return out.reshape(q.shape)


# ------------------------------------------------------ probabilistic content


@dataclass(frozen=True)
class ProbabilityReport:
    nonnegative: bool
    total_mass: float
    warnings: tuple[str, ...] = ()


def fs_probability(w: WeightSpec, grid: Grid2D, *, reflected: bool = False) -> tuple[PhaseField, ProbabilityReport]:
    """Fs[Pi / Pi(0)] on ``grid`` together with a positivity / mass report.

    With ``reflected`` the transform of Pi(-r) / Pi(0) is returned instead.
    """
    src = preimage_grid(grid)
    q, p = src.mesh()
    sign = -1.0 if reflected else 1.0
    vals = np.asarray(evaluate(w, sign * q, sign * p), dtype=complex) / w.pi_zero
    field_ = symplectic_fourier(PhaseField(src, vals), out_grid=grid)
    warnings = []
    edge_mass = _edge_mass(field_)
    if edge_mass > 1e-6:
        warnings.append(f"truncation mass at boundary {edge_mass:.2e}")
    re = field_.values.real
    report = ProbabilityReport(
        nonnegative=bool(re.min() >= -1e-9 and np.abs(field_.values.imag).max() <= 1e-9),
        total_mass=float(field_.integral().real),
        warnings=tuple(warnings),
    )
    return PhaseField(grid, field_.values, tuple(warnings)), report


def _edge_mass(f: PhaseField, width: int = 2) -> float:
    v = np.abs(f.values)
    inner = v[width:-width, width:-width].sum()
    return float((v.sum() - inner) * f.grid.cell_area / TWO_PI)


def autocorr_kernel(w: WeightSpec, grid: Grid2D) -> PhaseField:
    """Fs[Pi/Pi(0)] * Fs[Pi~/Pi(0)] with Pi~(r) = Pi(-r), convolved with measure d^2r/(2 pi).

    The result is the density (w.r.t. d^2r / 2 pi) that smooths a classical
    function into its phase-space portrait.
    """
    a, _ = fs_probability(w, grid)
    b, _ = fs_probability(w, grid, reflected=True)
    return convolve2d(a, b, boundary_tol=1e-10)
