"""Uniform grids, unitary Fourier transforms, the symplectic Fourier transform, convolutions.

Conventions (hbar = 1):

* forward 1-D transform  ``F[f](k) = (2 pi)^(-1/2) int e^{-ixk} f(x) dx``
* inverse 1-D transform  ``Fbar[g](x) = (2 pi)^(-1/2) int e^{+ixk} g(k) dk``
* symplectic transform   ``Fs[f](q, p) = (2 pi)^-1 int e^{-i(q p' - q' p)} f(q', p') dq' dp'``
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal, special
from scipy.interpolate import CubicSpline

TWO_PI = 2.0 * math.pi
SQRT_2PI = math.sqrt(TWO_PI)


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)) or self.x_min >= self.x_max:
            raise ValueError(f"need finite x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if int(self.n) != self.n or self.n < 8:
            raise ValueError(f"need an integer n >= 8, got {self.n}")

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        return self.x_min + self.spacing * np.arange(self.n)

    @property
    def offset(self) -> float:
        """x_min in units of the spacing."""
        return self.x_min / self.spacing

    @property
    def is_power_of_two(self) -> bool:
        return self.n & (self.n - 1) == 0

    def origin_index(self) -> int | None:
        c = -self.offset
        k = int(round(c))
        if abs(c - k) < 1e-9 and 0 <= k < self.n:
            return k
        return None

    def dual(self) -> "Grid1D":
        """Frequency grid with spacing 2 pi / (n h), same index offset as this grid."""
        dk = TWO_PI / (self.n * self.spacing)
        k_min = self.offset * dk
        return Grid1D(k_min, k_min + (self.n - 1) * dk, self.n)

    def interior(self, fraction: float = 0.6) -> slice:
        cut = int(round(self.n * (1.0 - fraction) / 2))
        return slice(cut, self.n - cut)

    def same_as(self, other: "Grid1D", rtol: float = 1e-9) -> bool:
        scale = max(abs(self.x_min), abs(self.x_max), self.spacing)
        return (
            self.n == other.n
            and abs(self.x_min - other.x_min) <= rtol * scale
            and abs(self.x_max - other.x_max) <= rtol * scale
        )


def make_grid(x_min: float, x_max: float, n: int) -> Grid1D:
    return Grid1D(float(x_min), float(x_max), int(n))


def fft_grid(n: int, spacing: float) -> Grid1D:
    """Grid ``(k - n/2) * spacing``, k = 0..n-1; it contains the origin."""
    return Grid1D(-(n // 2) * spacing, (n - 1 - n // 2) * spacing, n)


def self_dual_grid(n: int) -> Grid1D:
    """FFT-style grid equal to its own dual (spacing sqrt(2 pi / n))."""
    return fft_grid(n, math.sqrt(TWO_PI / n))


@dataclass(frozen=True)
class Grid2D:
    q_grid: Grid1D
    p_grid: Grid1D

    @property
    def shape(self) -> tuple[int, int]:
        return (self.q_grid.n, self.p_grid.n)

    @property
    def cell_area(self) -> float:
        return self.q_grid.spacing * self.p_grid.spacing

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.q_grid.points, self.p_grid.points, indexing="ij")

    def same_as(self, other: "Grid2D") -> bool:
        return self.q_grid.same_as(other.q_grid) and self.p_grid.same_as(other.p_grid)


def square_grid(x_min: float = -16.0, x_max: float = 16.0, n: int = 512) -> Grid2D:
    g = make_grid(x_min, x_max, n)
    return Grid2D(g, g)


@dataclass(frozen=True, eq=False)
class PhaseField:
    """Values of a phase-space function on a Grid2D, indexed ``[q, p]``."""

    grid: Grid2D
    values: np.ndarray
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("phase field has non-finite entries")

    @classmethod
    def from_function(cls, grid: Grid2D, f) -> "PhaseField":
        q, p = grid.mesh()
        return cls(grid, np.asarray(f(q, p), dtype=complex))

    def boundary_mass(self) -> float:
        v = np.abs(self.values)
        edge = np.concatenate([v[0], v[-1], v[:, 0], v[:, -1]])
        return float(edge.max() / max(v.max(), 1e-300))

    def integral(self) -> complex:
        """int f d^2r / (2 pi)"""
        return complex(self.values.sum() * self.grid.cell_area / TWO_PI)


# ---------------------------------------------------------------- 1-D DFTs


def _dft(values: np.ndarray, x_in: Grid1D, y_out: Grid1D, sign: int, axis: int = -1) -> np.ndarray:
    """sum_k values[k] exp(sign * i * x_k * y_m) along ``axis`` (no quadrature weight)."""
    v = np.moveaxis(np.asarray(values, dtype=complex), axis, -1)
    n = x_in.n
    h, d = x_in.spacing, y_out.spacing
    if y_out.n == n and abs(h * d * n / TWO_PI - 1.0) < 1e-12:
        c_out = y_out.offset
        k = np.arange(n)
        pre = np.exp(sign * 1j * c_out * k * h * d)
        post = np.exp(sign * 1j * (x_in.x_min * y_out.x_min + x_in.x_min * k * d))
        if sign < 0:
            s = np.fft.fft(v * pre, axis=-1)
        else:
            s = np.fft.ifft(v * pre, axis=-1) * n
        out = s * post
    else:
        kernel = np.exp(sign * 1j * np.outer(x_in.points, y_out.points))
        out = v @ kernel
    return np.moveaxis(out, -1, axis)


def fourier1d(values, grid: Grid1D, direction: str = "forward") -> tuple[Grid1D, np.ndarray]:
    """Unitary transform of samples on ``grid``; returns the dual grid and the result.

    ``inverse`` expects ``grid`` to be the frequency grid and returns to its dual.
    """
    if not grid.is_power_of_two:
        raise ValueError(f"fourier1d needs a power-of-two length, got {grid.n}")
    values = np.asarray(values)
    if values.shape[-1] != grid.n:
        raise ValueError("sample count does not match grid")
    out_grid = grid.dual()
    sign = {"forward": -1, "inverse": +1}.get(direction)
    if sign is None:
        raise ValueError("direction must be 'forward' or 'inverse'")
    return out_grid, _dft(values, grid, out_grid, sign) * grid.spacing / SQRT_2PI


def grid_norm(values, grid: Grid1D) -> float:
    return float(np.sqrt(np.sum(np.abs(values) ** 2) * grid.spacing))


# ------------------------------------------------------- symplectic transform


def symplectic_fourier(f: PhaseField, dual: bool = False, out_grid: Grid2D | None = None) -> PhaseField:
    """Fs[f] (or Fs[f](-r) when ``dual``), sampled on ``out_grid``.

    The default output grid is (dual of the p axis, dual of the q axis); on
    such grids the transform runs as two FFTs, otherwise as dense quadrature.
    """
    if f.values.shape != f.grid.shape:
        raise ValueError("field shape does not match its grid")
    g = f.grid
    if out_grid is None:
        out_grid = Grid2D(g.p_grid.dual(), g.q_grid.dual())
    s = 1 if dual else -1
    # e^{s i q p'} along p' (axis 1) onto output q; e^{-s i q' p} along q' (axis 0) onto output p
    step1 = _dft(f.values, g.p_grid, out_grid.q_grid, s, axis=1)
    step2 = _dft(step1, g.q_grid, out_grid.p_grid, -s, axis=0)
    values = step2.T * (g.cell_area / TWO_PI)
    return PhaseField(out_grid, values)


def preimage_grid(grid: Grid2D) -> Grid2D:
    """Grid that symplectic_fourier maps onto ``grid``."""
    return Grid2D(grid.p_grid.dual(), grid.q_grid.dual())


def delta_weight(field: PhaseField) -> complex:
    """Integral weight carried by the origin cell: value * cell area."""
    iq = field.grid.q_grid.origin_index()
    ip = field.grid.p_grid.origin_index()
    if iq is None or ip is None:
        raise ValueError("grid does not contain the origin")
    return complex(field.values[iq, ip] * field.grid.cell_area)


# ------------------------------------------------------------------ kernels


class Kernel1D:
    """Density k(s) with smooth(L)(x) = int k(s) L(x - s) ds."""

    radius: float = 0.0
    mass: complex = 1.0

    def values(self, s: np.ndarray, order: int = 0) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    def moment(self, r: int) -> complex:  # pragma: no cover - interface
        raise NotImplementedError


@dataclass(frozen=True)
class GaussianKernel(Kernel1D):
    """``mass`` times the normal density of standard deviation ``std``."""

    std: float
    mass: float = 1.0

    def __post_init__(self):
        if not self.std > 0:
            raise ValueError("kernel width must be positive")

    @property
    def radius(self) -> float:
        return 13.0 * self.std

    def values(self, s, order=0):
        u = np.asarray(s) / self.std
        base = self.mass * np.exp(-0.5 * u * u) / (SQRT_2PI * self.std)
        if order == 0:
            return base
        # d^r/ds^r of the density = (-1)^r He_r(u) density / std^r
        he = special.eval_hermitenorm(order, u)
        return (-1) ** order * he * base / self.std**order

    def moment(self, r):
        if r % 2:
            return 0.0
        return self.mass * self.std**r * float(special.factorial2(r - 1)) if r else self.mass


@dataclass(frozen=True)
class PolyDeltaKernel(Kernel1D):
    """Kernel of the profile ``coeff * p**power``: a derivative of a point mass.

    smooth(L)(x) = coeff * (-sign i)^power * L^{(power)}(x).
    """

    coeff: complex = 1.0
    power: int = 0
    sign: int = 1

    @property
    def mass(self):
        return self.coeff if self.power == 0 else 0.0

    def factor(self) -> complex:
        return self.coeff * (-self.sign * 1j) ** self.power

    def moment(self, r):
        return self.factor() * math.factorial(r) * (-1) ** r if r == self.power else 0.0


class NumericKernel(Kernel1D):
    """k(s) = (2 pi)^-1 int profile(p) e^{sign i p s} dp, tabulated by one FFT per order.

    The profile is sampled on |p| <= p_max with spacing p_max / 4096 and
    zero-padded to 2^18 points, which puts the kernel on an s grid of spacing
    ~0.1 / p_max; a cubic spline interpolates it inside the support radius.
    """

    N = 2**18

    def __init__(self, profile, sign: int = 1, p_max: float | None = None):
        self.profile = profile
        self.sign = sign
        if p_max is None:
            p_max = _decay_extent(profile)
        dp = p_max / 4096
        n = self.N
        self._pgrid = Grid1D(-(n // 2) * dp, (n // 2 - 1) * dp, n)
        ds = TWO_PI / (n * dp)
        self._sgrid = Grid1D(-(n // 2) * ds, (n // 2 - 1) * ds, n)
        pts = self._pgrid.points
        inside = np.abs(pts) <= p_max
        self._prof = np.zeros(n, dtype=complex)
        self._prof[inside] = np.asarray(profile(pts[inside]), dtype=complex)
        self.mass = complex(np.asarray(profile(np.array([0.0])))[0])
        probe = np.linspace(-p_max, p_max, 257)
        a = np.asarray(profile(probe), dtype=complex)
        # profile(-p) = conj(profile(p))  <=>  real kernel
        self.real = bool(np.max(np.abs(a - np.conj(a[::-1]))) <= 1e-14 * max(np.max(np.abs(a)), 1e-300))
        self._dense = {}
        k0 = np.abs(self._full(0))
        big = np.nonzero(k0 > 1e-9 * k0.max())[0]
        s_pts = self._sgrid.points
        # tol sits above the ~1e-10 structure spline-interpolated tables leave at
        # s ~ 2 pi / (table spacing); the dropped tails integrate to ~1e-9
        self.radius = float(min(1.5 * np.max(np.abs(s_pts[big])), 0.25 * n * ds))
        self._splines = {}

    def _full(self, order):
        if order not in self._dense:
            p = self._pgrid.points
            w = (self.sign * 1j * p) ** order * self._prof * (self._pgrid.spacing / TWO_PI)
            # both grids are centred FFT grids, x_k = (k - N/2) h: shift instead of phase factors
            w = np.fft.ifftshift(w)
            k = np.fft.ifft(w) * self.N if self.sign > 0 else np.fft.fft(w)
            k = np.fft.fftshift(k)
            self._dense[order] = k.real.astype(complex) if self.real else k
        return self._dense[order]

    def values(self, s, order=0):
        if order not in self._splines:
            ss = self._sgrid.points
            keep = np.abs(ss) <= self.radius + 4 * self._sgrid.spacing
            vals = self._full(order)[keep]
            self._splines[order] = (CubicSpline(ss[keep], vals.real), CubicSpline(ss[keep], vals.imag))
        re, im = self._splines[order]
        s = np.asarray(s)
        inside = np.abs(s) <= self.radius
        out = re(s) + 1j * im(s)
        return np.where(inside, out, 0.0)

    def moment(self, r):
        # int k s^r ds = (sign i)^r profile^{(r)}(0)
        from .coeffs import central_derivative

        d = central_derivative(self.profile, 0.0, r, 1e-2) if r else self.mass
        return (self.sign * 1j) ** r * complex(d)


def _decay_extent(profile, tol: float = 1e-17, start: float = 1.0, limit: float = 1e4) -> float:
    x = start
    peak = float(np.max(np.abs(profile(np.linspace(-start, start, 101)))))
    peak = max(peak, 1e-300)
    while x < limit:
        xs = np.linspace(x, 2 * x, 64)
        if np.max(np.abs(profile(xs))) < tol * peak and np.max(np.abs(profile(-xs))) < tol * peak:
            return 2 * x
        x *= 2
    raise ValueError("weight profile does not decay; cannot build a smoothing kernel")


# -------------------------------------------------------------- convolutions

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def smooth(L, kernel: Kernel1D, x, order: int = 0, panels: int = 40) -> np.ndarray:
    """(d/dx)^order of int k(s) L(x - s) ds at the points ``x``.

    Composite Gauss-Legendre over the kernel support, with panel breaks at
    every jump of ``L`` so each panel integrand is smooth.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    shape = x.shape
    x = x.ravel()
    if isinstance(kernel, PolyDeltaKernel):
        d = order + kernel.power
        return (kernel.factor() * L.derivative(d)(x)).reshape(shape)
    S = kernel.radius
    edges = np.broadcast_to(np.linspace(-S, S, panels + 1), (x.size, panels + 1))
    if L.jumps:
        cuts = np.clip(x[:, None] - np.asarray(L.jumps)[None, :], -S, S)
        edges = np.concatenate([edges, cuts], axis=1)
    bp = np.sort(edges, axis=1)
    a, b = bp[:, :-1], bp[:, 1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    s = mid[..., None] + half[..., None] * _GL_NODES
    w = half[..., None] * _GL_WEIGHTS
    vals = kernel.values(s, order) * L(x[:, None, None] - s)
    return np.sum(vals * w, axis=(1, 2)).reshape(shape)


def convolve_gaussian(f, grid: Grid1D, kernel_width: float, extension: str | None = None) -> np.ndarray:
    """(f * N(0, kernel_width^2)) at the grid points.

    ``f`` is either a CoeffFunction (accurate quadrature with jump splitting)
    or an array of samples on ``grid`` with an ``extension`` policy
    ('decay', 'constant', 'periodic') used to pad before an FFT convolution.
    """
    if not kernel_width > 0:
        raise ValueError("kernel_width must be positive")
    kernel = GaussianKernel(kernel_width)
    if callable(f) and hasattr(f, "jumps"):
        return smooth(f, kernel, grid.points)
    f = np.asarray(f)
    if f.shape != (grid.n,):
        raise ValueError("samples do not match grid")
    h = grid.spacing
    m = int(math.ceil(kernel.radius / h))
    offsets = np.arange(-m, m + 1) * h
    g = kernel.values(offsets)
    g = g / g.sum()
    if extension == "periodic":
        reps = int(math.ceil(m / grid.n)) + 1
        ext = np.tile(f, 2 * reps + 1)
        out = signal.fftconvolve(ext, g, mode="same")
        return out[reps * grid.n : (reps + 1) * grid.n]
    if extension == "decay":
        padded = np.pad(f, m, mode="constant")
    elif extension == "constant":
        padded = np.pad(f, m, mode="edge")
    else:
        raise ValueError("sampled input needs a declared extension: decay, constant or periodic")
    return signal.fftconvolve(padded, g, mode="same")[m:-m]


@dataclass(frozen=True, eq=False)
class ConvolutionResult:
    field: PhaseField
    boundary_ok: bool
    warnings: tuple[str, ...] = field(default=())


def convolve2d(f: PhaseField, g: PhaseField, boundary_tol: float = 1e-12) -> PhaseField:
    """(f * g)(r) = int f(r') g(r - r') d^2r' / (2 pi) on the common grid.

    The grid must contain the origin so that shifts stay on grid.  Linear
    (zero-padded) convolution; a warning is attached when either input is
    not negligible at the boundary.
    """
    if not f.grid.same_as(g.grid):
        raise ValueError("convolve2d needs both fields on the same grid")
    grid = f.grid
    iq, ip = grid.q_grid.origin_index(), grid.p_grid.origin_index()
    if iq is None or ip is None:
        raise ValueError("convolve2d needs a grid containing the origin")
    full = signal.fftconvolve(f.values, g.values, mode="full")
    # full index m sits at 2*x_min + m*h; target x_i = x_min + i*h
    out = full[iq : iq + grid.q_grid.n, ip : ip + grid.p_grid.n] * (grid.cell_area / TWO_PI)
    warnings = []
    for name, fld in (("f", f), ("g", g)):
        if fld.boundary_mass() > boundary_tol:
            warnings.append(f"{name} is not negligible at the grid boundary ({fld.boundary_mass():.2e})")
    return PhaseField(grid, out, tuple(warnings))


def reflect(f: PhaseField) -> PhaseField:
    """f(-r) on the same grid (needs the origin on the grid; missing mirror points -> 0)."""
    grid = f.grid
    out = np.zeros_like(f.values)
    idx = []
    for ax in (grid.q_grid, grid.p_grid):
        o = ax.origin_index()
        if o is None:
            raise ValueError("reflect needs a grid containing the origin")
        src = 2 * o - np.arange(ax.n)
        idx.append(src)
    iq, ip = idx
    okq = (iq >= 0) & (iq < grid.q_grid.n)
    okp = (ip >= 0) & (ip < grid.p_grid.n)
    out[np.ix_(okq, okp)] = f.values[np.ix_(iq[okq], ip[okp])]
    return PhaseField(grid, out, f.warnings)
