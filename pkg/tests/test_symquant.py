import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whquant import HamiltonianSpec, PolySymbol, make_weight, quantize_hamiltonian, quantize_symbol
from whquant.symquant import quantize_hp, quantize_Lq_p2, quantize_monomial, quantize_potential

X = np.linspace(-3, 3, 13)


def coeffs(sym, x=X):
    return [np.asarray(c(x), dtype=complex) * np.ones_like(x) for c in sym.coeffs]


@pytest.mark.parametrize("name", ["ww", "cs", "gauss", "shifted", "bj"])
def test_one_maps_to_identity(weights, name):
    sym = quantize_symbol(PolySymbol.from_expr("1"), weights[name])
    (c0,) = coeffs(sym)
    assert np.allclose(c0, 1.0, atol=1e-10)


@pytest.mark.parametrize("name", ["ww", "cs", "gauss"])
def test_q_and_p(weights, name):
    w = weights[name]
    q = coeffs(quantize_symbol(PolySymbol.from_expr("q"), w))
    assert np.allclose(q[0], X, atol=1e-10)
    p = coeffs(quantize_symbol(PolySymbol.from_expr("p"), w))
    assert np.allclose(p[1], 1.0) and np.allclose(p[0], 0.0, atol=1e-12)


def test_qp_constant_term(weights):
    sym = quantize_symbol(PolySymbol.from_expr("q*p"), weights["cs"])
    c0, c1 = coeffs(sym)
    assert np.allclose(c1, X)
    assert np.allclose(c0 / 1j, -0.5)


def test_gaussian_squares():
    w = make_weight("gaussian", sigma_l=0.8, sigma_p=1.7)
    p2 = coeffs(quantize_symbol(PolySymbol.from_expr("p^2"), w))
    assert np.allclose(p2[0], 1 / 0.8**2) and np.allclose(p2[2], 1.0)
    q2 = coeffs(quantize_symbol(PolySymbol.from_expr("q^2"), w))
    assert np.allclose(q2[0], X * X + 1 / 1.7**2)


def test_smoothed_step_potential(weights):
    from scipy.special import erfc

    w = make_weight("gaussian", sigma_l=1.0, sigma_p=2.0)
    (c0,) = coeffs(quantize_potential("step(q)", w))
    assert np.allclose(c0, 0.5 * erfc(-2.0 * X / math.sqrt(2)), atol=1e-12)


@pytest.mark.parametrize("name", ["ww", "gauss", "shifted"])
@pytest.mark.parametrize("pres", ["symmetrized", "ptp"])
def test_presentations_agree_with_left_form(weights, name, pres):
    sym = quantize_symbol(PolySymbol.from_expr("exp(-q^2/4)*p^2 + sin(q)*p + q^2"), weights[name])
    other = sym.left_from(pres)
    for a, b in zip(coeffs(sym), [np.asarray(c(X), dtype=complex) * np.ones_like(X) for c in other]):
        assert np.max(np.abs(a - b)) < 1e-9


@pytest.mark.parametrize("name", ["ww", "gauss", "shifted"])
def test_multinomial_matches_closed_form(weights, name):
    w = weights[name]
    a = coeffs(quantize_monomial("exp(-q^2/4)", 2, w))
    b = coeffs(quantize_Lq_p2("exp(-q^2/4)", w))
    for x, y in zip(a, b):
        assert np.max(np.abs(x - y)) < 1e-10


def test_symmetric_flags(weights):
    f = PolySymbol.from_expr("exp(-q^2)*p^2 + q*p")
    assert quantize_symbol(f, weights["gauss"]).symmetric
    assert not quantize_symbol(f, weights["shifted"]).symmetric


def test_mass_gauge_expansion():
    H = HamiltonianSpec.from_mass("2", "0.5*q", "q^2")
    assert H.L2(1.0) == pytest.approx(0.25)
    assert H.L1(1.0) == pytest.approx(-0.25)
    assert H.L0(1.0) == pytest.approx(0.5**2 / (2 * 2) + 1.0)  # A^2/(2m) + U
    with pytest.raises(ValueError):
        HamiltonianSpec.from_mass("q")


def test_hamiltonian_equals_sum_of_terms(weights):
    w = weights["gauss"]
    H = HamiltonianSpec.from_coefficients("1 + 0.5*exp(-q^2)", "sin(q)", "q^2/2")
    a = coeffs(quantize_hamiltonian(H, w))
    b = coeffs(quantize_symbol(H.symbol(), w))
    for x, y in zip(a, b):
        assert np.max(np.abs(x - y)) < 1e-10


def test_function_of_p_alone(weights):
    sym = quantize_hp("exp(-p^2)", weights["gauss"])
    assert sym.p_function is not None
    # Gaussian smoothing of exp(-p^2) with std 1/sigma_l = 1
    assert sym.p_function(0.0) == pytest.approx(1 / math.sqrt(3), rel=1e-8)


def test_non_separable_weight_rejects_mixed_symbols(weights):
    from whquant import NotSeparableError

    with pytest.raises(NotSeparableError):
        quantize_symbol(PolySymbol.from_expr("q*p"), weights["bj"])


@settings(max_examples=20, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0))
def test_real_even_weights_give_symmetric_operators(sl, sp):
    w = make_weight("gaussian", sigma_l=sl, sigma_p=sp)
    sym = quantize_symbol(PolySymbol.from_expr("exp(-q^2)*p^2 + q*p + q^2"), w)
    assert sym.symmetric
