"""Reading and writing phase fields and symbols."""

from __future__ import annotations

import csv
import json

import numpy as np

from .symquant import DiffOpSymbol
from .transforms import Grid1D, Grid2D, PhaseField

FIELD_HEADER = ("q", "p", "value_re", "value_im")


def write_phasefield_csv(f: PhaseField, path) -> None:
    """Row-major over q then p, 17 significant digits."""
    q, p = f.grid.mesh()
    v = f.values
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(FIELD_HEADER)
        for a, b, z in zip(q.ravel(), p.ravel(), v.ravel()):
            w.writerow((f"{a:.17g}", f"{b:.17g}", f"{z.real:.17g}", f"{z.imag:.17g}"))


def read_phasefield_csv(path) -> PhaseField:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = tuple(next(r))
        if header != FIELD_HEADER:
            raise ValueError(f"unexpected header {header}")
        rows = np.array([[float(x) for x in row] for row in r])
    qs = np.unique(rows[:, 0])
    ps = np.unique(rows[:, 1])
    nq, np_ = len(qs), len(ps)
    if nq * np_ != len(rows):
        raise ValueError("rows do not form a full q x p grid")
    grid = Grid2D(Grid1D(qs[0], qs[-1], nq), Grid1D(ps[0], ps[-1], np_))
    vals = (rows[:, 2] + 1j * rows[:, 3]).reshape(nq, np_)
    return PhaseField(grid, vals)


def _samples(c, x):
    v = np.asarray(c(x), dtype=complex)
    return {"re": v.real.tolist(), "im": v.imag.tolist()}


def symbol_to_dict(sym: DiffOpSymbol, x: np.ndarray) -> dict:
    """Coefficient functions sampled at ``x`` (closed-form labels kept when known)."""
    x = np.asarray(x, dtype=float)
    out = {
        "presentation": "left",
        "max_power": sym.max_power,
        "symmetric": sym.symmetric,
        "x": x.tolist(),
        "coeffs": [
            {"power": t, "label": c.label or None, **_samples(c, x)} for t, c in enumerate(sym.coeffs)
        ],
        "presentations": {},
    }
    for name, terms in sym.presentations.items():
        out["presentations"][name] = [
            {"kind": kind, "power": k, "label": c.label or None, **_samples(c, x)} for kind, k, c in terms
        ]
    if sym.p_function is not None:
        out["p_function"] = _samples(sym.p_function, x)
    return out


def write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")
