"""``specsing`` command line: delta-array scans, slab threshold tables, verification.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import verify as verify_mod
from .config import ConfigError, RunConfig, load_config, medium_from_dict, spec_from_dict
from .deltas import Strategy, closed_form_matrix, find_singularities_delta
from .errors import NumericalError, ValidationError
from .potential import DeltaArray, ProfileKind
from .slab import table1_pipeline

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
SIG = 13  # enough for 13-digit wavelengths to round-trip

SLAB_COLUMNS = ["m", "nu", "pumping", "lambda0_nm", "g0_per_cm", "lambda_star_nm",
                "g_star_per_cm", "eps", "residual"]
CURVE_COLUMNS = ["m", "pumping", "nu", "lambda_star_nm", "g_star_per_cm"]
DELTA_COLUMNS = ["row", "k", "m22_re", "m22_im", "m22_abs", "coupling_re", "coupling_im"]


def fmt(v) -> str:
    if isinstance(v, (int, np.integer, str)):
        return str(v)
    if v is None:
        return ""
    return f"{float(v):.{SIG}g}"


def thread_count(cfg: RunConfig | None = None) -> int:
    env = os.environ.get("SPECSING_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"SPECSING_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError("SPECSING_THREADS must be >= 1")
        return n
    if cfg is not None and cfg.threads:
        return cfg.threads
    return os.cpu_count() or 1


def write_rows(rows, columns, fmt_name, stream, extra=None):
    if fmt_name == "json":
        payload = {"rows": [dict(zip(columns, r)) for r in rows]}
        if extra:
            payload.update(extra)
        json.dump(payload, stream, indent=2, default=_json_default)
        stream.write("\n")
        return
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(v) for v in r])


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o).__name__)


def _open_out(path):
    return open(path, "w", newline="") if path else contextlib.nullcontext(sys.stdout)


# -- deltas --------------------------------------------------------------------

def delta_rows(block: dict):
    spec_block = {k: block[k] for k in ("centers", "couplings") if k in block}
    spec = spec_from_dict({"delta_array": spec_block})
    if not isinstance(spec, DeltaArray):
        raise ConfigError("deltas needs a delta array")
    try:
        k_min, k_max = (float(v) for v in block["k_range"])
    except (KeyError, TypeError, ValueError):
        raise ConfigError("deltas.k_range must be [k_min, k_max]") from None
    n_grid = int(block.get("n_grid", 401))
    try:
        strategy = Strategy(block.get("strategy", "scan"))
    except ValueError:
        raise ConfigError(f"unknown strategy {block.get('strategy')!r}") from None
    ks = np.linspace(k_min, k_max, n_grid)
    rows = []
    for k in ks:
        m = closed_form_matrix(spec, k).m22
        rows.append(["scan", k, m.real, m.imag, abs(m), None, None])
    idx = int(block.get("coupling_index", 0))
    roots = find_singularities_delta(spec, (k_min, k_max), strategy, n_grid=n_grid, coupling_index=idx)
    for r in roots:
        m = closed_form_matrix(r.spec, r.k).m22
        z = r.spec.couplings[idx] if strategy is Strategy.SOLVE_ONE_COUPLING else None
        rows.append(["root", r.k, m.real, m.imag, abs(m),
                     None if z is None else z.real, None if z is None else z.imag])
    return rows, len(roots)


def cmd_deltas(args) -> int:
    cfg = load_config(args.config)
    if cfg.command != "deltas":
        raise ConfigError("config has no deltas block")
    rows, n_roots = delta_rows(cfg.block)
    fmt_name = args.format or cfg.output_format
    with _open_out(args.out or cfg.output_path) as f:
        write_rows(rows, DELTA_COLUMNS, fmt_name, f)
    print(f"{n_roots} singularit{'y' if n_roots == 1 else 'ies'} found", file=sys.stderr)
    return EXIT_OK


# -- slab ------------------------------------------------------------------------

def parse_grid(text: str):
    try:
        a, b, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise ConfigError(f"grid must look like A:B:STEP, got {text!r}") from None
    if step <= 0 or b < a:
        raise ConfigError("grid needs STEP > 0 and B >= A")
    n = int(round((b - a) / step)) + 1
    return [round(a + i * step, 12) for i in range(n)]


def _slab_inputs(block):
    if "medium" not in block:
        raise ConfigError("slab.medium is required")
    medium = medium_from_dict(block["medium"])
    modes = [int(m) for m in block.get("modes", [])]
    nus = [float(v) for v in block.get("nus", [])]
    if not modes or not nus:
        raise ConfigError("slab.modes and slab.nus must be non-empty")
    if any(v < 0 for v in nus):
        raise ConfigError("slab.nus must be >= 0")
    pumpings = [ProfileKind(p) for p in block.get("pumpings", ["single", "double"])]
    return medium, modes, nus, pumpings


def slab_rows(medium, modes, nus, pumpings, workers=1, full=False):
    results = table1_pipeline(medium, modes, nus, pumpings, residuals=True, workers=workers)
    rows = [[r.mode_m, r.nu, r.pumping, r.lambda0_nm, r.g0_per_cm, r.lambda_star, r.g_star, r.eps,
             r.residual] for r in results]
    if full:
        from .singularity import full_numeric_singularity

        def one(r):
            try:
                return full_numeric_singularity(medium.replace(nu=r.nu, pumping=r.pumping), r.mode_m).residual
            except NumericalError as e:
                raise NumericalError(f"cell m={r.mode_m} nu={r.nu} {r.pumping}: {e}") from e

        if workers > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(workers) as ex:
                extra = list(ex.map(one, results))
        else:
            extra = [one(r) for r in results]
        for row, e in zip(rows, extra):
            row.append(e)
    return rows


def curve_rows(medium, modes, nus, pumpings):
    from .singularity import first_order_singularity, solve_unperturbed

    rows = []
    for m in sorted(modes):
        root = solve_unperturbed(medium, m)
        for p in pumpings:
            for nu in nus:
                r = first_order_singularity(medium.replace(nu=nu, pumping=p), m, root, residual=False)
                rows.append([m, p.value, nu, r.lambda_star, r.g_star])
    return rows


def cmd_slab(args) -> int:
    cfg = load_config(args.config)
    if cfg.command != "slab":
        raise ConfigError("config has no slab block")
    medium, modes, nus, pumpings = _slab_inputs(cfg.block)
    workers = thread_count(cfg)
    rows = slab_rows(medium, modes, nus, pumpings, workers, full=args.verify)
    cols = SLAB_COLUMNS + (["full_numeric_residual"] if args.verify else [])
    out = args.out or cfg.output_path
    fmt_name = args.format or cfg.output_format
    with _open_out(out) as f:
        write_rows(rows, cols, fmt_name, f)
    if args.curves:
        grid = parse_grid(args.nu_grid)
        crow = curve_rows(medium, modes, grid, pumpings)
        cpath = str(Path(out).with_suffix(".curves." + fmt_name)) if out else None
        with _open_out(cpath) as f:
            if not cpath:
                f.write("\n")
            write_rows(crow, CURVE_COLUMNS, fmt_name, f)
    return EXIT_OK


# -- verify ------------------------------------------------------------------------

def cmd_verify(args) -> int:
    outcomes = verify_mod.run(quick=args.quick, tol_override=args.tol)
    print(verify_mod.format_table(outcomes))
    failed = [o.name for o in outcomes if not o.passed]
    if failed:
        print("failed: " + ", ".join(failed))
        return EXIT_VERIFY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="specsing",
                                     description="Spectral singularities of complex 1D potentials")
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("deltas", help="scan M22 of a delta array and list its singularities")
    d.add_argument("--config", required=True)
    d.add_argument("--out")
    d.add_argument("--format", choices=("csv", "json"))
    d.set_defaults(func=cmd_deltas)

    s = sub.add_parser("slab", help="threshold wavelength and gain of a pumped slab")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--format", choices=("csv", "json"))
    s.add_argument("--curves", action="store_true", help="also emit first-order curves over a nu grid")
    s.add_argument("--nu-grid", default="0:0.5:0.01", help="A:B:STEP for --curves")
    s.add_argument("--verify", action="store_true", help="append the full-numeric residual")
    s.set_defaults(func=cmd_slab)

    v = sub.add_parser("verify", help="run the cross-engine property suite")
    v.add_argument("--quick", action="store_true", help="skip the second-order quadrature checks")
    v.add_argument("--tol", type=float, help="replace every tolerance with this value")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValidationError) as e:
        print(f"configuration error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as e:
        print(f"numerical failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
