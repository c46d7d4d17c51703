import json

import numpy as np
import pytest

from whquant import Grid2D, PhaseField, PolySymbol, fft_grid, make_weight, quantize_symbol
from whquant import io as wio


def test_phasefield_csv_round_trip(tmp_path):
    g = Grid2D(fft_grid(8, 0.5), fft_grid(16, 0.25))
    f = PhaseField.from_function(g, lambda q, p: np.exp(-q * q) * (1 + 0.5j * p))
    wio.write_phasefield_csv(f, tmp_path / "f.csv")
    back = wio.read_phasefield_csv(tmp_path / "f.csv")
    assert back.grid.same_as(g)
    assert np.array_equal(back.values, f.values)


def test_phasefield_csv_rejects_bad_header(tmp_path):
    (tmp_path / "x.csv").write_text("a,b,c,d\n1,2,3,4\n")
    with pytest.raises(ValueError):
        wio.read_phasefield_csv(tmp_path / "x.csv")


def test_symbol_json(tmp_path):
    sym = quantize_symbol(PolySymbol.from_expr("q*p"), make_weight("coherent_state"))
    x = np.linspace(-1, 1, 5)
    doc = wio.symbol_to_dict(sym, x)
    wio.write_json(doc, tmp_path / "s.json")
    back = json.loads((tmp_path / "s.json").read_text())
    assert back["max_power"] == 1 and back["symmetric"] is True
    assert np.allclose(back["coeffs"][1]["re"], x)
    assert np.allclose(back["coeffs"][0]["im"], -0.5)
    assert set(back["presentations"]) == {"symmetrized", "ptp"}


def test_json_default_handles_numpy():
    s = json.dumps({"a": np.float64(1.5), "b": np.arange(3), "c": 1 + 2j, "d": np.bool_(True)}, default=wio._json_default)
    assert json.loads(s) == {"a": 1.5, "b": [0, 1, 2], "c": {"re": 1.0, "im": 2.0}, "d": True}
