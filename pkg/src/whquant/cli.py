"""Command-line front end.

    whquant quantize|oracle-check|portrait|step-model|selftest --config job.json [--out DIR] [-v]

Exit codes: 0 success, 2 invalid configuration, 3 numerical check failed or
unsupported computation, 4 I/O error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import os
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from . import gridop as go
from . import io as wio
from .coeffs import PolySymbol
from .expr import ExprError, evaluate, parse_expr
from .symquant import HamiltonianSpec, quantize_symbol
from .transforms import Grid1D, Grid2D, PhaseField, fft_grid, make_grid
from .weights import NotSeparableError, make_weight

log = logging.getLogger("whquant")

COMMANDS = ("quantize", "oracle-check", "portrait", "step-model", "selftest")
EXIT_OK, EXIT_SCHEMA, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def load_schema() -> dict:
    return json.loads(resources.files("whquant").joinpath("config.schema.json").read_text())


def load_config(path: str | None, command: str) -> dict:
    if path is None:
        if command in ("selftest", "step-model"):
            return {"command": command}
        raise CliError(EXIT_SCHEMA, f"{command} needs --config")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read config: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_SCHEMA, f"config is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(cfg, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise CliError(EXIT_SCHEMA, f"config violates schema at {where}: {exc.message}") from exc
    if cfg["command"] != command:
        raise CliError(EXIT_SCHEMA, f"config is for {cfg['command']!r}, not {command!r}")
    return cfg


# ------------------------------------------------------------ config pieces


def build_weight(cfg: dict):
    spec = dict(cfg.get("weight", {"kind": "weyl_wigner"}))
    kind = spec.pop("kind")
    if kind == "separable":
        return make_weight(kind, lam=parse_coeff(spec["lambda"], "q"), mu=parse_coeff(spec["mu"], "p"))
    return make_weight(kind, **spec)


def parse_coeff(src: str, var: str):
    parse_expr(src, var)  # raises ExprError for other variables
    return src


def build_grid(spec: dict | None, default=(512, 1.0 / 16)) -> Grid1D:
    if spec is None:
        return fft_grid(*default)
    if "spacing" in spec:
        return fft_grid(spec["n"], spec["spacing"])
    if not spec["x_min"] < spec["x_max"]:
        raise CliError(EXIT_SCHEMA, "grid needs x_min < x_max")
    return make_grid(spec["x_min"], spec["x_max"], spec["n"])


def get_scheme(cfg: dict, grid: Grid1D) -> str:
    scheme = cfg.get("scheme", "spectral")
    if scheme == "spectral" and not grid.is_power_of_two:
        raise CliError(EXIT_SCHEMA, f"scheme 'spectral' needs a power-of-two grid (n = {grid.n}); use central2/central4")
    return scheme


def build_symbol(cfg: dict) -> PolySymbol:
    if "symbol" in cfg and "hamiltonian" in cfg:
        raise CliError(EXIT_SCHEMA, "give either 'symbol' or 'hamiltonian', not both")
    if "symbol" in cfg:
        return PolySymbol.from_expr(cfg["symbol"])
    if "hamiltonian" in cfg:
        h = cfg["hamiltonian"]
        if "mass" in h:
            spec = HamiltonianSpec.from_mass(h["mass"], h.get("gauge", "0"), h.get("potential", "0"))
        else:
            spec = HamiltonianSpec.from_coefficients(h["L2"], h.get("L1", "0"), h.get("L0", "0"))
        return spec.symbol()
    raise CliError(EXIT_SCHEMA, "config needs a 'symbol' or a 'hamiltonian'")


def build_field(cfg: dict, grid: Grid2D) -> PhaseField:
    node = parse_expr(cfg["field"], ("q", "p"))
    q, p = grid.mesh()
    vals = np.broadcast_to(evaluate(node, {"q": q, "p": p}), q.shape).astype(complex)
    return PhaseField(grid, vals)


def out_dir(cfg: dict, override: str | None) -> Path:
    d = Path(override or cfg.get("output", {}).get("dir", "whquant_out"))
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot create output directory {d}: {exc}") from exc
    return d


def _name(cfg, default):
    return cfg.get("output", {}).get("name", default)


def _write(writer, obj, path: Path):
    try:
        writer(obj, path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc
    log.info("wrote %s", path)


# ----------------------------------------------------------------- commands


def cmd_quantize(cfg: dict, out: Path) -> dict:
    w = build_weight(cfg)
    f = build_symbol(cfg)
    grid = build_grid(cfg.get("grid"))
    sym = quantize_symbol(f, w)
    name = _name(cfg, "quantize")
    doc = wio.symbol_to_dict(sym, grid.points)
    doc["weight"] = w.describe()
    _write(wio.write_json, doc, out / f"{name}.symbol.json")
    report = {"command": "quantize", "max_power": sym.max_power, "symmetric": sym.symmetric}
    consts = {}
    for t, c in enumerate(sym.coeffs):
        if c.poly is not None and len(c.poly) == 1:
            consts[f"C{t}"] = complex(c.poly[0])
    report["constant_coefficients"] = consts
    matrix = cfg.get("output", {}).get("matrix", "none")
    if matrix != "none":
        pres = cfg.get("presentation", "symmetrized" if "symmetrized" in sym.presentations else "left")
        A = go.assemble(sym, grid, get_scheme(cfg, grid), pres)
        report.update(presentation=pres, hermitian_defect=A.hermitian_defect)
        if matrix == "csv":
            _write(go.write_csv, A, out / f"{name}.matrix.csv")
        else:
            _write(go.write_binary, A, out / f"{name}.matrix.bin")
    return report


def cmd_oracle_check(cfg: dict, out: Path) -> dict:
    w = build_weight(cfg)
    grid = build_grid(cfg.get("grid"), default=(256, 0.125))
    tol = cfg.get("tolerance", 1e-6)
    report: dict = {"command": "oracle-check", "weight": w.describe(), "tolerance": tol}
    if "field" in cfg:
        pg = build_grid(cfg.get("p_grid"), default=(grid.n, grid.spacing))
        f = build_field(cfg, Grid2D(grid, pg))
        B = go.kernel_oracle(f, w, grid)
        tr, ct = B.trace(), f.integral()
        dev = abs(tr - ct)
        report.update(trace=tr, classical_integral=ct, deviation=dev, hermitian_defect=B.hermitian_defect)
    else:
        f = build_symbol(cfg)
        sym = quantize_symbol(f, w)
        pres = cfg.get("presentation", "symmetrized" if "symmetrized" in sym.presentations else "left")
        A = go.assemble(sym, grid, get_scheme(cfg, grid), pres)
        B = go.kernel_oracle(f, w, grid, get_scheme(cfg, grid))
        dev = go.action_deviation(A, B)
        s = grid.interior()
        report.update(
            presentation=pres,
            deviation=dev,
            raw_interior_entry_difference=float(np.max(np.abs(A.matrix[s, s] - B.matrix[s, s]))),
            hermitian_defect_assembled=A.hermitian_defect,
            hermitian_defect_oracle=B.hermitian_defect,
            symmetric=sym.symmetric,
        )
        c0 = sym.coeffs[0]
        if c0.poly is not None and len(c0.poly) == 1:
            # left-ordered constant C0 = i f0
            report["f0"] = complex(c0.poly[0] / 1j)
    report["passed"] = bool(dev <= tol)
    _write(wio.write_json, report, out / f"{_name(cfg, 'oracle_check')}.json")
    if not report["passed"]:
        raise CliError(EXIT_NUMERIC, f"oracle deviation {dev:.3e} exceeds {tol:.1e}")
    return report


def cmd_portrait(cfg: dict, out: Path) -> dict:
    from .portraits import portrait

    w = build_weight(cfg)
    qg = build_grid(cfg.get("grid"), default=(128, 0.125))
    pg = build_grid(cfg.get("p_grid"), default=(qg.n, qg.spacing))
    grid = Grid2D(qg, pg)
    method = cfg.get("method", "auto")
    if "field" in cfg:
        if method == "symbol":
            raise CliError(EXIT_SCHEMA, "method 'symbol' needs a 'symbol' or 'hamiltonian'")
        f = build_field(cfg, grid)
        res = portrait(f, w, method="fourier" if method == "auto" else method)
    else:
        if method in ("fourier", "direct"):
            f = build_field({"field": cfg["symbol"]}, grid) if "symbol" in cfg else None
            if f is None:
                raise CliError(EXIT_SCHEMA, "sampled portraits need 'field' or 'symbol'")
            res = portrait(f, w, method=method)
        else:
            res = portrait(build_symbol(cfg), w, grid)
    path = out / f"{_name(cfg, 'portrait')}.csv"
    _write(wio.write_phasefield_csv, res, path)
    v = res.values
    return {
        "command": "portrait",
        "weight": w.describe(),
        "min_real": float(v.real.min()),
        "max_abs_imag": float(np.abs(v.imag).max()),
        "warnings": list(res.warnings),
        "csv": str(path),
    }


def cmd_step_model(cfg: dict, out: Path) -> dict:
    from . import stepmodel as sm

    spec = dict(cfg.get("step", {}))
    x_range = spec.pop("x_range", None)
    n = spec.pop("n", 241)
    P = sm.StepModelParams(**spec)
    table = sm.figure_data(P, x_range, n)
    name = _name(cfg, "step_model")
    _write(sm.write_figure_csv, table, out / f"{name}.csv")
    rep = sm.asymptote_report(P)
    lim = sm.table_asymptotes(P)
    far = 8.0 / P.sigma_p
    ends = {}
    if table[0, 0] <= -far + 1e-12 and table[-1, 0] >= far - 1e-12:
        # first and last rows against the x = -inf / +inf limits
        for row, key in ((table[0], "-inf"), (table[-1], "+inf")):
            ends[key] = {
                "T": abs(row[1] - lim[f"T({key})"]),
                "Vplus": abs(row[3] - lim[f"V({key})"]),
                "Vminus": abs(row[4] - lim[f"V({key})"]),
            }
    report = {
        "command": "step-model",
        "params": P.__dict__,
        "asymptotes": rep,
        "endpoint_errors": ends,
        "note": "V(0) table entry and the value implied by V+-(0) differ by T(0)/(2 sigma_l^2)",
    }
    _write(wio.write_json, report, out / f"{name}.report.json")
    worst = max((e for d in ends.values() for e in d.values()), default=0.0)
    if worst > 1e-6:
        raise CliError(EXIT_NUMERIC, f"figure endpoints miss the asymptotes by {worst:.2e}")
    return {"command": "step-model", "rows": len(table), "endpoint_error": worst}


def cmd_selftest(cfg: dict, out: Path | None) -> dict:
    from .acceptance import run_all
    from .invariants import run_suites

    # an explicit criteria list alone skips the invariant suites
    suites = cfg.get("invariants", None if "criteria" not in cfg else [])
    results = run_all(cfg.get("criteria")) + (run_suites(suites) if suites != [] else [])
    for r in results:
        print(r.line())
        for c in r.checks:
            if not c.passed or log.isEnabledFor(logging.INFO):
                print(f"    {'ok ' if c.passed else 'BAD'} {c.name}: {c.value:.3e} (tol {c.tol:.0e}) {c.note}")
    report = {
        "command": "selftest",
        "criteria": [
            {"kind": r.kind, "id": r.number, "title": r.title, "passed": r.passed, "checks": [c.__dict__ for c in r.checks]}
            for r in results
        ],
    }
    if out is not None:
        _write(wio.write_json, report, out / f"{_name(cfg, 'selftest')}.json")
    failed = [f"{r.kind} {r.number}" for r in results if not r.passed]
    if failed:
        raise CliError(EXIT_NUMERIC, f"failing: {', '.join(failed)}")
    return {"command": "selftest", "passed": True}


HANDLERS = {
    "quantize": cmd_quantize,
    "oracle-check": cmd_oracle_check,
    "portrait": cmd_portrait,
    "step-model": cmd_step_model,
}


@contextlib.contextmanager
def thread_limit():
    raw = os.environ.get("WHQUANT_THREADS")
    if not raw:
        yield
        return
    try:
        n = int(raw)
        if n < 1:
            raise ValueError
    except ValueError:
        log.warning("ignoring WHQUANT_THREADS=%r (not a positive integer)", raw)
        yield
        return
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        log.warning("threadpoolctl not installed; WHQUANT_THREADS has no effect")
        yield
        return
    with threadpool_limits(n):
        yield


def grid_override(raw) -> dict:
    try:
        x_min, x_max, n = float(raw[0]), float(raw[1]), int(raw[2])
    except ValueError as exc:
        raise CliError(EXIT_SCHEMA, f"--grid expects X_MIN X_MAX N: {exc}") from exc
    if n < 8:
        raise CliError(EXIT_SCHEMA, "--grid needs N >= 8")
    return {"x_min": x_min, "x_max": x_max, "n": n}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="whquant", description="Covariant integral quantization toolkit")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON job file")
    ap.add_argument("--out", help="output directory (overrides output.dir)")
    ap.add_argument(
        "--grid", nargs=3, metavar=("X_MIN", "X_MAX", "N"), help="override the position grid of the config"
    )
    ap.add_argument("-v", "--verbose", action="count", default=0)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(
        level=(logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)],
        format="%(levelname)s %(message)s",
    )
    try:
        cfg = load_config(args.config, args.command)
        if args.grid:
            cfg["grid"] = grid_override(args.grid)
        with thread_limit():
            if args.command == "selftest":
                out = out_dir(cfg, args.out) if (args.out or "output" in cfg) else None
                result = cmd_selftest(cfg, out)
            else:
                result = HANDLERS[args.command](cfg, out_dir(cfg, args.out))
    except CliError as exc:
        print(f"whquant: error: {exc}", file=sys.stderr)
        return exc.code
    except ExprError as exc:
        print(f"whquant: error: bad expression: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except NotSeparableError as exc:
        print(f"whquant: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, FloatingPointError) as exc:
        print(f"whquant: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"whquant: error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(json.dumps(result, default=wio._json_default))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
