import math

import numpy as np
import pytest

from whquant import Grid2D, PhaseField, fft_grid, make_weight
from whquant.weights import NotSeparableError, autocorr_kernel, evaluate, fs_probability


def test_pointwise_values():
    assert evaluate(make_weight("weyl_wigner"), 3.0, -2.0) == 1.0
    bj = make_weight("born_jordan")
    assert bj(0.0, 0.0) == pytest.approx(1.0)
    assert bj(math.pi, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert bj(1e-6, 1.0) == pytest.approx(1.0)
    g = make_weight("gaussian", sigma_l=2.0, sigma_p=0.5)
    assert g(1.0, 1.0) == pytest.approx(math.exp(-1 / 8 - 2))


def test_born_jordan_series_is_continuous():
    bj = make_weight("born_jordan")
    t = np.array([0.99e-4, 1.01e-4])
    assert abs(bj(t, 1.0)[0] - bj(t, 1.0)[1]) < 1e-9


def test_coherent_state_is_gaussian_sqrt2():
    w = make_weight("coherent_state")
    assert w.kind == "gaussian"
    assert w.sigma_l == pytest.approx(math.sqrt(2)) and w.sigma_p == pytest.approx(math.sqrt(2))


def test_flags():
    assert make_weight("born_jordan").symmetric
    assert not make_weight("born_jordan").separable
    shifted = make_weight("separable", lam="exp(-(q-0.5)^2/2)", mu="exp(-p^2/2)")
    assert shifted.separable and not shifted.symmetric
    assert shifted.pi_zero == pytest.approx(math.exp(-0.125))
    assert shifted.lambda_prime_zero == pytest.approx(0.5 * math.exp(-0.125), rel=1e-6)


def test_invalid_weights():
    with pytest.raises(ValueError):
        make_weight("nope")
    with pytest.raises(ValueError):
        make_weight("gaussian", sigma_l=-1, sigma_p=1)
    with pytest.raises(ValueError):
        make_weight("separable", lam="q", mu="1")  # vanishes at the origin
    with pytest.raises(NotSeparableError):
        make_weight("born_jordan").mu_kernel()


def test_tabulated_weight_reproduces_gaussian():
    g = Grid2D(fft_grid(64, 0.25), fft_grid(64, 0.25))
    gauss = make_weight("gaussian", sigma_l=1.0, sigma_p=1.5)
    tab = make_weight("tabulated", table=PhaseField.from_function(g, gauss))
    assert tab.pi_zero == pytest.approx(1.0, abs=1e-12)
    assert tab.symmetric
    q = np.linspace(-2, 2, 7)
    assert np.max(np.abs(tab(q, 0.3 * q) - gauss(q, 0.3 * q))) < 1e-4
    assert tab(100.0, 0.0) == 0.0


def test_gaussian_fs_is_a_probability():
    g = Grid2D(fft_grid(64, 0.25), fft_grid(64, 0.25))
    for kind, kw in (("gaussian", dict(sigma_l=1.0, sigma_p=1.5)), ("coherent_state", {})):
        _, rep = fs_probability(make_weight(kind, **kw), g)
        assert rep.nonnegative
        assert rep.total_mass == pytest.approx(1.0, abs=1e-8)


def test_born_jordan_fs_reported_only():
    g = Grid2D(fft_grid(64, 0.25), fft_grid(64, 0.25))
    _, rep = fs_probability(make_weight("born_jordan"), g)
    assert isinstance(rep.nonnegative, bool) and rep.warnings


def test_autocorrelation_kernel_mass():
    # doubled variance: the grid must reach well past 8 standard deviations of 1
    g = Grid2D(fft_grid(128, 0.25), fft_grid(128, 0.25))
    k = autocorr_kernel(make_weight("gaussian", sigma_l=1.0, sigma_p=1.0), g)
    assert k.integral().real == pytest.approx(1.0, abs=1e-8)


def test_kernels_are_cached():
    w = make_weight("gaussian", sigma_l=1.0, sigma_p=1.5)
    assert w.mu_kernel() is w.mu_kernel()
    assert w.position_kernel(2) is w.position_kernel(2)
