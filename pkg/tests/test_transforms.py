import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from whquant.coeffs import as_coeff
from whquant.transforms import (
    GaussianKernel,
    Grid2D,
    NumericKernel,
    PhaseField,
    convolve2d,
    convolve_gaussian,
    delta_weight,
    fft_grid,
    fourier1d,
    grid_norm,
    make_grid,
    reflect,
    self_dual_grid,
    smooth,
    symplectic_fourier,
)


def test_grid_validation():
    with pytest.raises(ValueError):
        make_grid(1, 0, 16)
    with pytest.raises(ValueError):
        make_grid(0, 1, 4)
    g = fft_grid(16, 0.5)
    assert g.origin_index() == 8 and g.is_power_of_two
    assert g.dual().dual().same_as(g)


def test_gaussian_fourier_pair():
    g = fft_grid(256, 0.1)
    k, v = fourier1d(np.exp(-g.points**2 / 2), g)
    assert np.max(np.abs(v - np.exp(-k.points**2 / 2))) < 1e-12


def test_non_power_of_two_rejected():
    with pytest.raises(ValueError):
        fourier1d(np.zeros(12), make_grid(0, 1, 12))


@settings(max_examples=30, deadline=None)
@given(arrays(np.complex128, 64, elements=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)))
def test_fourier_unitarity_and_inverse(v):
    g = fft_grid(64, 0.3)
    k, fv = fourier1d(v, g)
    assert grid_norm(fv, k) == pytest.approx(grid_norm(v, g), rel=1e-10, abs=1e-10)
    back_grid, back = fourier1d(fv, k, "inverse")
    assert back_grid.same_as(g)
    assert np.allclose(back, v, atol=1e-9)


def _field(n=64, h=None, fn=None):
    g1 = self_dual_grid(n) if h is None else fft_grid(n, h)
    g = Grid2D(g1, g1)
    return PhaseField.from_function(g, fn or (lambda q, p: np.exp(-(q**2 + p**2) / 2)))


def test_symplectic_involution_and_fixed_point():
    f = _field(fn=lambda q, p: np.exp(-((q - 0.5) ** 2) - 0.7 * p * p + 0.3j * q * p))
    ff = symplectic_fourier(symplectic_fourier(f))
    assert np.max(np.abs(ff.values - f.values)) < 1e-10
    u = _field()
    assert np.max(np.abs(symplectic_fourier(u).values - u.values)) < 1e-12


def test_fs_of_one_is_delta():
    f = _field(fn=lambda q, p: np.ones_like(q))
    assert delta_weight(symplectic_fourier(f)) == pytest.approx(2 * math.pi)


def test_dense_path_matches_fft_path():
    f = _field(32, 0.4, lambda q, p: np.exp(-(q * q + 2 * p * p)))
    fast = symplectic_fourier(f)
    out = Grid2D(make_grid(-2, 2, 9), make_grid(-3, 3, 11))
    slow = symplectic_fourier(f, out_grid=out)
    exact = lambda q, p: np.exp(-(p * p) / 4 - q * q / 8) / (2 * math.sqrt(2))
    qq, pp = out.mesh()
    assert np.max(np.abs(slow.values - exact(qq, pp))) < 1e-10
    qq, pp = fast.grid.mesh()
    # the FFT output is periodic, so compare away from its edges
    core = (np.abs(qq) < 3) & (np.abs(pp) < 3)
    assert np.max(np.abs(fast.values - exact(qq, pp))[core]) < 1e-8


def test_reflect():
    f = _field(fn=lambda q, p: np.exp(-((q - 1) ** 2 + p * p)))
    r = reflect(f)
    qq, pp = f.grid.mesh()
    assert np.max(np.abs(r.values - np.exp(-((-qq - 1) ** 2) - pp * pp))) < 1e-12


def test_convolve2d_gaussians():
    g = Grid2D(fft_grid(128, 0.125), fft_grid(128, 0.125))
    a = PhaseField.from_function(g, lambda q, p: np.exp(-(q * q + p * p)))
    c = convolve2d(a, a)
    qq, pp = g.mesh()
    exact = (math.pi / 2) * np.exp(-(qq * qq + pp * pp) / 2) / (2 * math.pi)
    assert np.max(np.abs(c.values - exact)) < 1e-10
    assert not c.warnings


def test_convolve2d_boundary_warning():
    g = Grid2D(fft_grid(32, 0.125), fft_grid(32, 0.125))
    a = PhaseField.from_function(g, lambda q, p: np.ones_like(q))
    assert convolve2d(a, a).warnings


def test_gaussian_kernel_moments_and_smoothing():
    k = GaussianKernel(0.7)
    assert [k.moment(r) for r in range(5)] == pytest.approx([1, 0, 0.49, 0, 3 * 0.7**4])
    L = as_coeff("x^2", "x")
    x = np.linspace(-1, 1, 7)
    assert np.allclose(smooth(L, k, x), x * x + 0.49)


def test_smoothing_across_a_jump():
    L = as_coeff("step(x)", "x")
    x = np.linspace(-2, 2, 9)
    from scipy.special import erfc

    assert np.allclose(smooth(L, GaussianKernel(0.5), x), 0.5 * erfc(-x / (0.5 * math.sqrt(2))), atol=1e-13)
    g = make_grid(-2, 2, 9)
    assert np.allclose(convolve_gaussian(L, g, 0.5), 0.5 * erfc(-g.points / (0.5 * math.sqrt(2))), atol=1e-13)


def test_numeric_kernel_matches_gaussian():
    num = NumericKernel(lambda p: np.exp(-p * p / 2))
    ref = GaussianKernel(1.0)
    s = np.linspace(-4, 4, 33)
    for order in range(3):
        assert np.max(np.abs(num.values(s, order) - ref.values(s, order))) < 1e-8
    assert num.moment(2) == pytest.approx(1.0, abs=1e-6)
    assert num.real
