import math
import warnings

import numpy as np
import pytest
from scipy.special import eval_hermite

from whquant import Grid2D, PhaseField, PolySymbol, StateVector, fft_grid, make_weight, portrait, wigner_of_state
from whquant.portraits import classical_trace, portrait_kernel_gaussian
from whquant.weights import autocorr_kernel


@pytest.fixture(scope="module")
def g2():
    return Grid2D(fft_grid(128, 0.125), fft_grid(128, 0.125))


def bump(q, p):
    return np.exp(-((q - 0.5) ** 2 + 2 * p * p))


def test_fourier_and_direct_paths_agree():
    # the direct kernel has doubled variance, so it needs a wide grid
    g = Grid2D(fft_grid(256, 0.125), fft_grid(256, 0.125))
    w = make_weight("gaussian", sigma_l=1.0, sigma_p=1.5)
    f = PhaseField.from_function(g, bump)
    a = portrait(f, w, method="fourier")
    b = portrait(f, w, method="direct")
    assert np.max(np.abs(a.values - b.values)) < 1e-8


def test_weyl_wigner_portrait_is_identity(g2):
    f = PhaseField.from_function(g2, bump)
    out = portrait(f, make_weight("weyl_wigner"))
    assert np.max(np.abs(out.values - f.values)) < 1e-10


def test_portrait_preserves_phase_space_integral(g2):
    f = PhaseField.from_function(g2, bump)
    out = portrait(f, make_weight("coherent_state"))
    assert out.integral() == pytest.approx(f.integral(), abs=1e-9)


def test_gaussian_kernel_closed_form(g2):
    w = make_weight("gaussian", sigma_l=1.0, sigma_p=1.0)
    assert np.max(np.abs(portrait_kernel_gaussian(w, g2).values - autocorr_kernel(w, g2).values)) < 1e-8


def test_symbol_route_closed_form(g2):
    # exp(-x^2) convolved with N(0, 2/sigma_p^2), times p^2 + 2/sigma_l^2
    sl, sp = 1.0, 1.5
    w = make_weight("gaussian", sigma_l=sl, sigma_p=sp)
    out = portrait(PolySymbol.from_expr("exp(-(q-0.5)^2)*p^2"), w, g2)
    q, p = g2.mesh()
    v = 0.5 + 2 / sp**2
    exact = math.sqrt(math.pi / (2 * math.pi * v)) * np.exp(-((q - 0.5) ** 2) / (2 * v)) * (p * p + 2 / sl**2)
    assert np.max(np.abs(out.values - exact)) < 1e-10


def test_quadratic_symbol_portrait(g2):
    w = make_weight("gaussian", sigma_l=0.8, sigma_p=2.0)
    out = portrait(PolySymbol.from_expr("p^2 + q^2"), w, g2)
    q, p = g2.mesh()
    assert np.max(np.abs(out.values - (q * q + p * p + 2 / 0.8**2 + 2 / 2.0**2))) < 1e-10


def test_symbol_route_needs_grid_and_separable_weight(g2):
    with pytest.raises(ValueError):
        portrait(PolySymbol.from_expr("p^2"), make_weight("weyl_wigner"))
    with pytest.raises(ValueError):
        portrait(PolySymbol.from_expr("p^2"), make_weight("born_jordan"), g2)


def test_unknown_method(g2):
    with pytest.raises(ValueError):
        portrait(PhaseField.from_function(g2, bump), make_weight("weyl_wigner"), method="magic")


def _oscillator(grid, n):
    c = 1.0 / math.sqrt(2.0**n * math.factorial(n) * math.sqrt(math.pi))
    return StateVector.from_function(grid, lambda x: c * eval_hermite(n, x) * np.exp(-x * x / 2))


@pytest.mark.parametrize("n", [0, 1, 2])
def test_oscillator_wigner(n):
    grid = fft_grid(256, 0.0625)
    W = wigner_of_state(_oscillator(grid, n))
    q, p = W.grid.mesh()
    i, j = np.unravel_index(np.argmin(q * q + p * p), q.shape)
    assert W.values[i, j].real == pytest.approx(2 * (-1) ** n, abs=1e-10)
    assert W.integral().real == pytest.approx(1.0, abs=1e-10)
    assert np.max(np.abs(W.values.imag)) < 1e-10


def test_classical_trace_warns():
    g = Grid2D(fft_grid(32, 0.125), fft_grid(32, 0.125))
    with pytest.warns(RuntimeWarning):
        classical_trace(PhaseField.from_function(g, lambda q, p: np.ones_like(q)))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        g = Grid2D(fft_grid(128, 0.125), fft_grid(128, 0.125))
        assert classical_trace(PhaseField.from_function(g, lambda q, p: np.exp(-(q * q + p * p)))) == pytest.approx(0.5)
