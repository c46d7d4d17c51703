import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whquant import fft_grid, make_weight, quantize_hamiltonian
from whquant import gridop as go
from whquant import stepmodel as sm

P0 = sm.StepModelParams()


def test_erfc_against_mpmath():
    for x in (-6.0, -1.3, 0.0, 0.2, 2.5, 9.0, 26.0):
        assert sm.erfc(x) == pytest.approx(float(mpmath.erfc(x)), rel=1e-14, abs=1e-300)


def test_derivatives_by_finite_differences():
    x, h = np.linspace(-3, 3, 13), 1e-5
    fd1 = (sm.step_T(x + h, P0) - sm.step_T(x - h, P0)) / (2 * h)
    assert np.max(np.abs(fd1 - sm.step_Tp(x, P0))) < 1e-9
    fd2 = (sm.step_Tp(x + h, P0) - sm.step_Tp(x - h, P0)) / (2 * h)
    assert np.max(np.abs(fd2 - sm.step_Tpp(x, P0))) < 1e-9


def test_sign_of_second_derivative():
    # 1/m_r - 1/m_l < 0 for m_l < m_r, so T'' > 0 for x > 0
    assert sm.step_Tpp(1.0, P0) > 0 and sm.step_Tpp(-1.0, P0) < 0


def test_params_validation():
    with pytest.raises(ValueError):
        sm.StepModelParams(m_l=0)
    with pytest.raises(ValueError):
        sm.step_Vpm(0.0, P0, "sideways")


@pytest.mark.parametrize("key", ["T(-inf)", "T(0)", "T(+inf)", "V(-inf)", "V(+inf)"])
def test_table_entries(key):
    rep = sm.asymptote_report(P0)
    for name in (("T",) if key[0] == "T" else ("V+", "V-")):
        assert rep[f"{name}{key[1:]}"]["error"] < 1e-6


def test_origin_potential_is_v0_half_plus_t0():
    # the value the closed forms give at x = 0
    P = sm.StepModelParams(1, 3, 2, 2, 0.5)
    assert sm.step_Vpm(0.0, P) == pytest.approx(P.V0 / 2 + sm.step_T(0.0, P) / P.sigma_l**2)
    assert sm.limits(P)["V(0)"] == pytest.approx(sm.step_Vpm(0.0, P))


def test_closed_form_presentations_agree():
    sym = sm.step_hamiltonian(P0)
    x = np.linspace(-5, 5, 21)
    for pres in ("symmetrized", "ptp"):
        for a, b in zip(sym.coeffs, sym.left_from(pres)):
            assert np.max(np.abs(a(x) - b(x))) < 1e-12


def test_pipeline_reproduces_closed_forms():
    w = make_weight("gaussian", sigma_l=P0.sigma_l, sigma_p=P0.sigma_p)
    got = quantize_hamiltonian(sm.step_spec(P0), w)
    ref = sm.step_hamiltonian(P0)
    x = np.linspace(-6, 6, 25)
    for a, b in zip(got.coeffs, ref.coeffs):
        assert np.max(np.abs(a(x) - b(x))) < 1e-8


def test_assembled_step_operator_is_hermitian():
    grid = fft_grid(256, 0.125)
    A = go.assemble(sm.step_hamiltonian(P0), grid, "spectral", "symmetrized")
    assert A.hermitian_defect < 1e-12
    B = go.assemble(sm.step_hamiltonian(P0), grid, "spectral", "ptp")
    assert go.action_deviation(A, B) < 1e-8


def test_autocorrelated_portrait_limits():
    q = np.array([-40.0, 40.0])
    v = sm.step_portrait_autocorrelated(q, 0.0, P0)
    assert v[0] == pytest.approx(2 / (2 * P0.m_l) / P0.sigma_l**2)
    assert v[1] == pytest.approx(2 / (2 * P0.m_r) / P0.sigma_l**2 + P0.V0)


def test_figure_table(tmp_path):
    t = sm.figure_data(P0)
    assert t.shape == (241, 5)
    assert np.allclose(t[:, 2], 1 / (2 * t[:, 1]))
    assert t[0, 0] == pytest.approx(-8.0) and t[-1, 0] == pytest.approx(8.0)
    sm.write_figure_csv(t, tmp_path / "f.csv")
    assert np.array_equal(sm.read_figure_csv(tmp_path / "f.csv"), t)
    with pytest.raises(ValueError):
        sm.figure_data(P0, n=1)


@settings(max_examples=25, deadline=None)
@given(
    st.floats(0.2, 5), st.floats(0.2, 5), st.floats(-3, 3), st.floats(0.3, 3), st.floats(0.3, 3)
)
def test_far_field_limits_hold_for_any_parameters(ml, mr, v0, sl, sp):
    P = sm.StepModelParams(ml, mr, v0, sl, sp)
    far = 8.0 / sp
    assert sm.step_T(-far, P) == pytest.approx(1 / (2 * ml), abs=1e-6)
    assert sm.step_T(far, P) == pytest.approx(1 / (2 * mr), abs=1e-6)
    for b in ("plus", "minus"):
        assert sm.step_Vpm(far, P, b) == pytest.approx(v0 + 1 / (2 * mr * sl * sl), abs=1e-6)
