import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whquant import PolySymbol, StateVector, assemble, fft_grid, kernel_oracle, make_grid, make_weight, quantize_symbol
from whquant import gridop as go
from whquant.transforms import Grid2D, PhaseField


def test_position_momentum_commutator(grid256):
    Q = go.position_matrix(grid256)
    for scheme in go.SCHEMES:
        P = go.momentum_matrix(grid256, scheme)
        tol = {"spectral": 1e-10, "central4": 2e-2, "central2": 0.2}[scheme]
        assert go.action_deviation(go.commutator(Q, P), 1j) < tol
        assert P.hermitian_defect < 1e-12


def test_spectral_momentum_on_plane_wave(grid256):
    P = go.momentum_matrix(grid256)
    x = grid256.points
    psi = np.exp(-(x**2) / 2) * np.exp(1.3j * x)
    exact = (1.3 + 1j * x) * psi
    assert np.max(np.abs(P.matrix @ psi - exact)) < 1e-10


def test_spectral_requires_power_of_two():
    with pytest.raises(ValueError):
        go.momentum_matrix(make_grid(-4, 4, 65))
    assert go.momentum_matrix(make_grid(-4, 4, 65), "central4").grid.n == 65


def test_operator_algebra_and_grid_checks(grid256):
    I = go.identity(grid256)
    assert (I + I).trace() == pytest.approx(512)
    assert (2 * I - I).trace() == pytest.approx(256)
    with pytest.raises(ValueError):
        I @ go.identity(fft_grid(64, 0.125))
    with pytest.raises(ValueError):
        go.GridOperator(grid256, np.full((256, 256), np.nan))


def test_state_vector_and_expectation(grid256):
    psi = StateVector.from_function(grid256, lambda x: np.exp(-((x - 1.0) ** 2) / 2 + 0.5j * x)).normalize()
    assert psi.norm == pytest.approx(1.0)
    assert go.expectation(go.position_matrix(grid256), psi).real == pytest.approx(1.0, abs=1e-10)
    assert go.expectation(go.momentum_matrix(grid256), psi).real == pytest.approx(0.5, abs=1e-10)


@pytest.mark.parametrize("pres", ["left", "symmetrized", "ptp"])
def test_presentations_assemble_to_same_action(grid256, weights, pres):
    sym = quantize_symbol(PolySymbol.from_expr("exp(-q^2/8)*p^2 + q^2/4"), weights["gauss"])
    ref = assemble(sym, grid256, "spectral", "left")
    A = assemble(sym, grid256, "spectral", pres)
    assert go.action_deviation(A, ref) < 1e-9
    if pres != "left":
        assert A.hermitian_defect < 1e-12


@pytest.mark.parametrize("name", ["ww", "cs", "gauss", "shifted"])
@pytest.mark.parametrize("src", ["q*p", "exp(-q^2/4)*p^2 + cos(q)"])
def test_closed_forms_match_oracle(grid256, weights, name, src):
    f = PolySymbol.from_expr(src)
    sym = quantize_symbol(f, weights[name])
    pres = "symmetrized" if "symmetrized" in sym.presentations else "left"
    A = assemble(sym, grid256, "spectral", pres)
    assert go.action_deviation(A, kernel_oracle(f, weights[name], grid256)) < 1e-6


def test_field_oracle_trace(weights):
    grid = fft_grid(128, 0.125)
    g2 = Grid2D(grid, fft_grid(128, 0.125))
    f = PhaseField.from_function(g2, lambda q, p: np.exp(-(q * q + p * p)))
    for name in ("ww", "gauss"):
        B = kernel_oracle(f, weights[name], grid)
        assert B.trace().real == pytest.approx(0.5, abs=1e-8)  # int f / 2 pi


def test_p_function_assembly(grid256):
    from whquant.symquant import quantize_hp

    sym = quantize_hp("exp(-p^2)", make_weight("weyl_wigner"))
    A = assemble(sym, grid256)
    x = grid256.points
    psi = np.exp(-(x**2) / 2)
    # exp(-P^2) on a Gaussian of width 1: exp(-x^2/6)/sqrt(3)
    assert np.max(np.abs(A.matrix @ psi - np.exp(-(x**2) / 6) / math.sqrt(3))) < 1e-8


def test_csv_and_binary_round_trip(tmp_path):
    grid = fft_grid(16, 0.5)
    rng = np.random.default_rng(1)
    A = go.GridOperator(grid, rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16)))
    go.write_csv(A, tmp_path / "a.csv")
    assert np.array_equal(go.read_csv(tmp_path / "a.csv", grid).matrix, A.matrix)
    go.write_binary(A, tmp_path / "a.bin")
    raw = (tmp_path / "a.bin").read_bytes()
    assert raw[:10] == b"WHQGRIDOP1" and int.from_bytes(raw[10:14], "little") == 16
    assert np.array_equal(go.read_binary(tmp_path / "a.bin", grid).matrix, A.matrix)
    (tmp_path / "bad.bin").write_bytes(b"x" * 32)
    with pytest.raises(ValueError):
        go.read_binary(tmp_path / "bad.bin")


def test_short_grid_probe_error():
    with pytest.raises(ValueError):
        go.probe_bank(fft_grid(32, 0.125))


@settings(max_examples=15, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_phase_space_translation_is_unitary(a, b):
    # U(a, b) = exp(i(b Q - a P)) built from the spectral P stays unitary
    from scipy.linalg import expm

    grid = fft_grid(64, 0.25)
    H = b * go.position_matrix(grid).matrix - a * go.momentum_matrix(grid).matrix
    U = expm(1j * H)
    assert np.max(np.abs(U.conj().T @ U - np.eye(64))) < 1e-9
