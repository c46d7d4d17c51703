import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whquant import expr as ex


def ev(src, **env):
    vars_ = tuple(env) or ("x",)
    return ex.evaluate(ex.parse_expr(src, vars_), {k: np.asarray(v, float) for k, v in env.items()})


@pytest.mark.parametrize(
    "src,val",
    [("1+2*3", 7.0), ("2^3^2", 512.0), ("-2^2", -4.0), ("(1+2)*3", 9.0), ("sqrt(4)", 2.0), ("1e-3*1000", 1.0)],
)
def test_arithmetic(src, val):
    assert ev(src) == pytest.approx(val)


def test_functions_and_step():
    x = np.array([-1.0, 0.0, 2.0])
    v = ev("step(x)", x=x)
    assert v[0] == 0.0 and v[2] == 1.0 and 0.0 <= v[1] <= 1.0
    assert ev("erfc(x)", x=0.0) == pytest.approx(1.0)
    assert ev("exp(x)*cos(x)+sin(x)", x=0.3) == pytest.approx(math.exp(0.3) * math.cos(0.3) + math.sin(0.3))


@pytest.mark.parametrize("bad", ["", "1+", "foo(x)", "x y", "(1", "y", "1..2"])
def test_parse_errors(bad):
    with pytest.raises(ex.ExprError):
        ex.parse_expr(bad, "x")


def test_wrong_variable_rejected():
    with pytest.raises(ex.ExprError):
        ex.parse_expr("q*p", "q")


def test_derivative_matches_finite_difference():
    node = ex.parse_expr("exp(-x^2/2)*sin(3*x) + x^3", "x")
    d = ex.diff(node, "x")
    x0, h = 0.37, 1e-5
    fd = (ex.evaluate(node, {"x": x0 + h}) - ex.evaluate(node, {"x": x0 - h})) / (2 * h)
    assert ex.evaluate(d, {"x": x0}) == pytest.approx(fd, rel=1e-8)


def test_step_roots():
    assert ex.step_roots(ex.parse_expr("step(x-1.5) + step(-x)", "x"), "x") == pytest.approx((0.0, 1.5))


def test_split_powers():
    parts = ex.split_powers(ex.parse_expr("exp(-q^2)*p^2 + q*p - 3", ("q", "p")), "p")
    assert sorted(parts) == [0, 1, 2]
    q = np.linspace(-2, 2, 5)
    assert np.allclose(ex.evaluate(parts[2], {"q": q}), np.exp(-q * q))
    assert np.allclose(ex.evaluate(parts[1], {"q": q}), q)


def test_polynomial_coefficients():
    c = ex.polynomial_coefficients(ex.parse_expr("(x+1)^2", "x"), "x")
    assert np.allclose(c[:3], [1, 2, 1])
    assert ex.polynomial_coefficients(ex.parse_expr("exp(x)", "x"), "x") is None


leaf = st.one_of(
    st.floats(min_value=0.1, max_value=5, allow_nan=False).map(lambda v: f"{v!r}"),
    st.just("x"),
)


def _combine(children):
    return st.one_of(
        st.tuples(children, st.sampled_from("+-*/"), children).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        st.tuples(children, st.sampled_from(["2", "3", "-1", "0.5"])).map(lambda t: f"({t[0]})^{t[1]}"),
        children.map(lambda c: f"-{c}"),
        st.tuples(st.sampled_from(["exp", "sin", "cos", "step", "erfc"]), children).map(lambda t: f"{t[0]}({t[1]})"),
    )


@pytest.mark.parametrize("src", ["-2^2", "2^-1", "x-(x-1)", "1/(2*x)", "(-x)^2", "-(x^2)", "2^3^2", "step(x)*erfc(-x/2)"])
def test_round_trip_examples(src):
    node = ex.parse_expr(src, "x")
    assert ex.parse_expr(ex.to_string(node), "x") == node


@settings(max_examples=150, deadline=None)
@given(st.recursive(leaf, _combine, max_leaves=6), st.floats(min_value=-1, max_value=1))
def test_print_parse_round_trip(src, x):
    node = ex.parse_expr(src, "x")
    again = ex.parse_expr(ex.to_string(node), "x")
    assert again == node  # printing then parsing is a fixed point
    assert ex.parse_expr(ex.to_string(again), "x") == again
    a, b = ex.evaluate(node, {"x": x}), ex.evaluate(again, {"x": x})
    if np.isfinite(a):
        assert b == pytest.approx(a, rel=1e-12, abs=1e-12)
