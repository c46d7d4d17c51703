"""Weyl-Heisenberg covariant integral quantization on a uniform grid."""

__version__ = "0.1.0"

from .coeffs import CoeffFunction, PolySymbol
from .expr import ExprError, parse_expr
from .gridop import GridOperator, StateVector, assemble, kernel_oracle, momentum_matrix, position_matrix
from .portraits import classical_trace, portrait, wigner_of_state
from .stepmodel import StepModelParams, step_hamiltonian, step_portrait
from .symquant import DiffOpSymbol, HamiltonianSpec, quantize_hamiltonian, quantize_symbol
from .transforms import Grid1D, Grid2D, PhaseField, fft_grid, make_grid, symplectic_fourier
from .weights import NotSeparableError, WeightSpec, make_weight

__all__ = [
    "CoeffFunction", "DiffOpSymbol", "ExprError", "Grid1D", "Grid2D", "GridOperator",
    "HamiltonianSpec", "NotSeparableError", "PhaseField", "PolySymbol", "StateVector",
    "StepModelParams", "WeightSpec", "assemble", "classical_trace", "fft_grid",
    "kernel_oracle", "make_grid", "make_weight", "momentum_matrix", "parse_expr",
    "portrait", "position_matrix", "quantize_hamiltonian", "quantize_symbol",
    "step_hamiltonian", "step_portrait", "symplectic_fourier", "wigner_of_state",
]
