"""Operators as dense matrices on a uniform position grid.

A GridOperator's matrix acts on sample vectors: (A psi)_j = sum_l M_jl psi_l,
i.e. M = K(x_j, x_l) h for an integral kernel K.

Operator identities such as [Q, P] = i are compared through their action on
a bank of smooth wave packets localised in the grid interior: no finite
matrix reproduces a distributional kernel entry by entry (the diagonal of
[Q, P] is identically zero for diagonal Q).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coeffs import CoeffFunction, PolySymbol, binom
from .symquant import DiffOpSymbol
from .transforms import TWO_PI, Grid1D, PhaseField, _dft, smooth
from .weights import WeightSpec, evaluate

SCHEMES = ("spectral", "central2", "central4")
MAGIC = b"WHQGRIDOP1"


@dataclass(frozen=True, eq=False)
class GridOperator:
    grid: Grid1D
    matrix: np.ndarray
    hermitian_defect: float = field(init=False)

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.shape != (self.grid.n, self.grid.n):
            raise ValueError(f"matrix shape {m.shape} does not match grid of {self.grid.n} points")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator has non-finite entries")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "hermitian_defect", float(np.max(np.abs(m - m.conj().T))))

    def interior_block(self, fraction: float = 0.6) -> np.ndarray:
        s = self.grid.interior(fraction)
        return self.matrix[s, s]

    def interior_hermitian_defect(self, fraction: float = 0.6) -> float:
        b = self.interior_block(fraction)
        return float(np.max(np.abs(b - b.conj().T)))

    def __matmul__(self, other: "GridOperator") -> "GridOperator":
        _check_grid(self, other)
        return GridOperator(self.grid, self.matrix @ other.matrix)

    def __add__(self, other: "GridOperator") -> "GridOperator":
        _check_grid(self, other)
        return GridOperator(self.grid, self.matrix + other.matrix)

    def __sub__(self, other: "GridOperator") -> "GridOperator":
        _check_grid(self, other)
        return GridOperator(self.grid, self.matrix - other.matrix)

    def __mul__(self, c) -> "GridOperator":
        return GridOperator(self.grid, self.matrix * c)

    __rmul__ = __mul__

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))


def _check_grid(a, b):
    if not a.grid.same_as(b.grid):
        raise ValueError("operators live on different grids")


@dataclass(frozen=True, eq=False)
class StateVector:
    grid: Grid1D
    values: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.spacing))

    def normalize(self) -> "StateVector":
        return StateVector(self.grid, np.asarray(self.values, dtype=complex) / self.norm)

    @classmethod
    def from_function(cls, grid: Grid1D, f) -> "StateVector":
        return cls(grid, np.asarray(f(grid.points), dtype=complex)).normalize()


def identity(grid: Grid1D) -> GridOperator:
    return GridOperator(grid, np.eye(grid.n, dtype=complex))


def position_matrix(grid: Grid1D) -> GridOperator:
    return GridOperator(grid, np.diag(grid.points).astype(complex))


def momentum_matrix(grid: Grid1D, scheme: str = "spectral") -> GridOperator:
    """-i d/dx.  Spectral: periodic, Nyquist mode removed.  Central: zero extension."""
    n, h = grid.n, grid.spacing
    if scheme == "spectral":
        if not grid.is_power_of_two:
            raise ValueError("spectral momentum needs a power-of-two grid")
        k = TWO_PI * np.fft.fftfreq(n, h)
        k[n // 2] = 0.0
        eye = np.eye(n)
        m = np.fft.ifft(k[:, None] * np.fft.fft(eye, axis=0), axis=0)
        m = 0.5 * (m + m.conj().T)
    elif scheme in ("central2", "central4"):
        stencil = {"central2": [(1, 0.5)], "central4": [(1, 2.0 / 3.0), (2, -1.0 / 12.0)]}[scheme]
        d = np.zeros((n, n))
        for off, c in stencil:
            d += c * (np.eye(n, k=off) - np.eye(n, k=-off))
        m = -1j * d / h
    else:
        raise ValueError(f"scheme must be one of {SCHEMES}")
    return GridOperator(grid, m)


def _function_of_p(g: CoeffFunction, grid: Grid1D, scheme: str) -> np.ndarray:
    P = momentum_matrix(grid, scheme).matrix
    evals, vecs = np.linalg.eigh(P)
    return (vecs * g(evals)) @ vecs.conj().T


def assemble(sym: DiffOpSymbol, grid: Grid1D, scheme: str = "spectral", presentation: str = "left") -> GridOperator:
    """Matrix of a symbol; presentation terms are assembled in their written order."""
    x = grid.points
    P = momentum_matrix(grid, scheme).matrix
    powers = [np.eye(grid.n, dtype=complex)]
    m = np.zeros((grid.n, grid.n), dtype=complex)
    for kind, k, c in sym.terms(presentation):
        while len(powers) <= k:
            powers.append(powers[-1] @ P)
        cx = np.asarray(c(x))
        if kind == "left":
            m += cx[:, None] * powers[k]
        elif kind == "anti":
            m += 0.5 * (cx[:, None] * powers[k] + powers[k] * cx[None, :])
        elif kind == "ptp":
            m += P @ (cx[:, None] * P)
        else:
            raise ValueError(f"unknown term kind {kind!r}")
    if sym.p_function is not None:
        m += _function_of_p(sym.p_function, grid, scheme)
    return GridOperator(grid, m)


def commutator(a: GridOperator, b: GridOperator) -> GridOperator:
    _check_grid(a, b)
    return GridOperator(a.grid, a.matrix @ b.matrix - b.matrix @ a.matrix)


def expectation(a: GridOperator, psi: StateVector) -> complex:
    if not a.grid.same_as(psi.grid):
        raise ValueError("state and operator live on different grids")
    v = psi.values
    return complex(np.vdot(v, a.matrix @ v) * a.grid.spacing)


# ------------------------------------------------------------------- oracle


def kernel_oracle(f, w: WeightSpec, grid: Grid1D, scheme: str = "spectral") -> GridOperator:
    """A_f from the kernel of the displaced-weight integral, built independently of symquant.

    K(x, y) = (2 pi)^-1 int dp Fbar_s[f](x - y, p) Pi(x - y, p) / Pi(0) e^{ip(x+y)/2}.

    ``f`` is either a decaying PhaseField (direct quadrature over its p grid)
    or a PolySymbol sum_n L_n(q) p^n, for which Fbar_s[f] is a derivative of a
    point mass in x - y and the p integral reduces to smoothings of L_n
    evaluated at the midpoints (x + y) / 2.
    """
    if isinstance(f, PolySymbol):
        return _oracle_polynomial(f, w, grid, scheme)
    if isinstance(f, PhaseField):
        return _oracle_field(f, w, grid)
    raise TypeError("kernel_oracle takes a PhaseField or a PolySymbol")


def _midpoints(grid: Grid1D) -> tuple[np.ndarray, np.ndarray]:
    # (x_j + x_l)/2 = x_min + (j + l) h / 2 ; 2n - 1 distinct values
    idx = np.add.outer(np.arange(grid.n), np.arange(grid.n))
    vals = grid.x_min + 0.5 * grid.spacing * np.arange(2 * grid.n - 1)
    return vals, idx


def _oracle_polynomial(f: PolySymbol, w: WeightSpec, grid: Grid1D, scheme: str) -> GridOperator:
    mids, idx = _midpoints(grid)
    P = momentum_matrix(grid, scheme).matrix
    powers = [np.eye(grid.n, dtype=complex)]
    m = np.zeros((grid.n, grid.n), dtype=complex)
    for n, L in f.terms.items():
        for r in range(n + 1):
            # d^n/da^n [Pi(a, b) U(a, b)] at a = 0 with U = e^{ibQ/2} e^{-iaP} e^{ibQ/2}
            coef = (1j**n) * ((-1j) ** (n - r)) * binom(n, r)
            kernel = w.position_kernel(r)
            if getattr(kernel, "coeff", 1.0) == 0.0:
                continue
            G = np.asarray(smooth(L, kernel, mids))
            if not np.any(G):
                continue
            while len(powers) <= n - r:
                powers.append(powers[-1] @ P)
            m += coef * powers[n - r] * G[idx]
    return GridOperator(grid, m / w.pi_zero)


def _oracle_field(f: PhaseField, w: WeightSpec, grid: Grid1D) -> GridOperator:
    fg = f.grid
    n, h = grid.n, grid.spacing
    diffs = Grid1D(-(n - 1) * h, (n - 1) * h, 2 * n - 1)
    b = fg.p_grid
    # Fbar_s[f](a, b) = (2 pi)^-1 sum e^{i(a p' - q' b)} f(q', p') dq' dp'
    step = _dft(f.values, fg.p_grid, diffs, +1, axis=1)  # (q', a)
    fbar = _dft(step, fg.q_grid, b, -1, axis=0).T * (fg.cell_area / TWO_PI)  # (a, b)
    a = diffs.points
    weight = np.asarray(evaluate(w, a[:, None], b.points[None, :]), dtype=complex) / w.pi_zero
    g = fbar * weight * (b.spacing / TWO_PI)
    mids, idx = _midpoints(grid)
    phase = np.exp(1j * np.outer(b.points, mids))  # (b, mid)
    full = g @ phase  # (a, mid)
    j = np.arange(n)
    d = j[:, None] - j[None, :] + (n - 1)
    K = full[d, idx]
    return GridOperator(grid, K * h)


# ------------------------------------------------------------ comparisons


def probe_bank(grid: Grid1D, fraction: float = 0.4, width: float = 1.0, momenta=(0.0, 1.5, -1.0)) -> np.ndarray:
    """Columns: unit-norm Gaussian packets centred inside the central ``fraction`` of the grid."""
    x = grid.points
    lo, hi = np.quantile(x, [(1 - fraction) / 2, (1 + fraction) / 2])
    # keep every packet below round-off at the grid edges
    lo, hi = max(lo, x[0] + 9 * width), min(hi, x[-1] - 9 * width)
    if lo > hi:
        raise ValueError("grid too short for the probe packets")
    centres = np.linspace(lo, hi, 5)
    cols = []
    for c in centres:
        for k in momenta:
            v = np.exp(-((x - c) ** 2) / (2 * width**2) + 1j * k * x)
            cols.append(v / np.sqrt(np.sum(np.abs(v) ** 2) * grid.spacing))
    return np.stack(cols, axis=1)


def action_deviation(a: GridOperator, b, probes: np.ndarray | None = None, fraction: float = 0.6) -> float:
    """max over interior rows and probes of |(A - B) phi|; ``b`` may be a matrix or a scalar."""
    if probes is None:
        probes = probe_bank(a.grid)
    diff = a.matrix - (b.matrix if isinstance(b, GridOperator) else b * np.eye(a.grid.n))
    s = a.grid.interior(fraction)
    return float(np.max(np.abs((diff @ probes)[s])))


def interior_entry_deviation(a: GridOperator, b: GridOperator, fraction: float = 0.6) -> float:
    s = a.grid.interior(fraction)
    return float(np.max(np.abs(a.matrix[s, s] - b.matrix[s, s])))


# -------------------------------------------------------------- serialisation


def write_csv(op: GridOperator, path) -> None:
    """Row-major; each cell written as two columns ``re,im``."""
    m = op.matrix
    with open(path, "w") as fh:
        for row in m:
            fh.write(",".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
            fh.write("\n")


def read_csv(path, grid: Grid1D) -> GridOperator:
    raw = np.loadtxt(path, delimiter=",", ndmin=2)
    return GridOperator(grid, raw[:, 0::2] + 1j * raw[:, 1::2])


def write_binary(op: GridOperator, path) -> None:
    """16-byte header: magic, n (uint32 LE), 2 pad bytes; then complex128 LE row-major."""
    n = op.grid.n
    header = MAGIC + int(n).to_bytes(4, "little") + b"\x00\x00"
    assert len(header) == 16
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(op.matrix, dtype="<c16").tobytes())


def read_binary(path, grid: Grid1D | None = None) -> GridOperator:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if header[:10] != MAGIC:
            raise ValueError("not a WHQGRIDOP1 file")
        n = int.from_bytes(header[10:14], "little")
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != n * n:
        raise ValueError(f"expected {n * n} entries, found {data.size}")
    if grid is None:
        grid = Grid1D(0.0, float(n - 1), n)
    elif grid.n != n:
        raise ValueError("grid size does not match file")
    return GridOperator(grid, data.reshape(n, n).copy())


def max_abs(x) -> float:
    return float(np.max(np.abs(x)))


__all__ = [
    "GridOperator",
    "StateVector",
    "momentum_matrix",
    "position_matrix",
    "identity",
    "assemble",
    "commutator",
    "kernel_oracle",
    "expectation",
    "probe_bank",
    "action_deviation",
]

