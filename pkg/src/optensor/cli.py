"""Command-line front end.

Exit codes: 0 ok or physical, 1 usage or I/O error, 2 check failed,
3 prediction not heralded.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import OptensorError
from .tensor import Tolerances

EXIT_OK, EXIT_IO, EXIT_FAILED, EXIT_NOT_HERALDED = 0, 1, 2, 3


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    if x == int(x) and abs(x) < 1e16:
        return repr(float(x))
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Canonical JSON: sorted keys, floats with 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}"
                 for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    return json.dumps(str(obj))


def _tol(args) -> Tolerances:
    base = Tolerances()
    return Tolerances(herm=base.herm,
                      psd=base.psd if args.tolerance_psd is None else args.tolerance_psd,
                      eq=base.eq if args.tolerance_eq is None else args.tolerance_eq,
                      prop=base.prop)


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# -- subcommands ----------------------------------------------------------

def cmd_check(args) -> int:
    from .physicality import check_physical
    from .tensor import operator_from_json

    tol = _tol(args)
    op = operator_from_json(_load_json(args.operator), tol)
    verdict = check_physical(op, tol)
    _emit(args, dumps(verdict.to_json()))
    return EXIT_OK if verdict.physical else EXIT_FAILED


def cmd_contract(args) -> int:
    from .circuit import contract, contract_dense, fragment_from_json
    from .tensor import operator_to_json

    tol = _tol(args)
    frag = fragment_from_json(_load_json(args.circuit), os.path.dirname(args.circuit) or None, tol)
    value = contract(frag, tol=tol)
    if args.oracle:
        ref = contract_dense(frag, tol=tol)
        if isinstance(value, float):
            _emit(args, dumps({"contract": value, "oracle": ref, "difference": abs(value - ref)}))
        else:
            diff = float(np.max(np.abs(value.matrix - ref.reorder(value.ids).matrix)))
            _emit(args, dumps({"contract": operator_to_json(value),
                               "oracle": operator_to_json(ref), "difference": diff}))
        return EXIT_OK
    if isinstance(value, float):
        _emit(args, _fmt_float(value))
    else:
        _emit(args, dumps(operator_to_json(value)))
    return EXIT_OK


def cmd_herald(args) -> int:
    from .causaloid import decompose, herald, herald_bounds, minimal_fiducials, table_from_csv
    from .errors import UnboundedRatio

    tol = _tol(args)
    with open(args.table, encoding="utf-8") as fh:
        table = table_from_csv(fh.read())
    for lab in (args.row, args.ref):
        if lab not in table.rows:
            raise ValueError(f"row {lab!r} is not in the table")
    omega = minimal_fiducials(table, tol)
    rvecs, pvecs = decompose(table, omega, tol)
    rep = herald(rvecs[args.row], rvecs[args.ref], args.tolerance_prop)
    out = rep.to_json()
    out["fiducials"] = list(omega.labels)
    try:
        lo, hi = herald_bounds(rvecs[args.row], rvecs[args.ref], list(pvecs.values()))
        out["bounds"] = [lo, hi]
    except UnboundedRatio:
        out["bounds"] = None
    _emit(args, dumps(out))
    return EXIT_OK if rep.heralded else EXIT_NOT_HERALDED


def cmd_witness(args) -> int:
    from .causet import Rectangle
    from .lattice import (build_region_operator, inject, lattice_from_json, region_from_json,
                          region_surface, signaling_toy)
    from .witness import witness_sweep

    tol = _tol(args)
    data = _load_json(args.lattice)
    lat = lattice_from_json(data, os.path.dirname(args.lattice) or None, tol)
    if args.L is not None:
        lat = type(lat)(lat.width, lat.height, lat.operations, args.L)
    reg = region_from_json(data.get("region") if args.region is None
                           else _load_json(args.region), lat)
    a = build_region_operator(lat, reg, tol=tol)
    pos = dict(region_surface(lat, reg).positions)
    if args.inject_signal is not None:
        top = max(a.ids)
        a = inject(a, signaling_toy(args.inject_signal, top + 1, top + 2))
        pos[top + 1] = (0.05 * lat.L, 0.5 * lat.L)
        pos[top + 2] = (0.95 * lat.L, 0.5 * lat.L)
    seeds = list(range(args.seed, args.seed + args.seeds))
    rep = witness_sweep(a, pos, region=Rectangle(0.0, lat.L, 0.0, lat.L), L=lat.L,
                        m_max=args.m_max, D=args.D, seeds=seeds, mode=args.mode,
                        epsilon=args.epsilon_witness, tol=tol,
                        keep_steps=args.diagnostics is not None or args.format == "json")
    if args.format == "csv":
        _emit(args, rep.to_csv())
    else:
        _emit(args, dumps(rep.to_json(with_steps=False)))
    if args.diagnostics:
        with open(args.diagnostics, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dumps(rep.to_json(with_steps=True)) + "\n")
    return EXIT_OK if rep.physical else EXIT_FAILED


def cmd_gamma(args) -> int:
    from .opspace import OpRegion, compute_gamma, gamma_to_json, region_outcome, sample_from_csv

    with open(args.sample, encoding="utf-8") as fh:
        sample = sample_from_csv(fh.read())
    g = compute_gamma(sample)
    out = {"gamma": gamma_to_json(g)}
    if args.box:
        k = len(args.box) // 2
        if len(args.box) % 2:
            raise ValueError("--box takes lower bounds then upper bounds")
        box = OpRegion(tuple(args.box[:k]), tuple(args.box[k:]))
        out["gamma_A"] = gamma_to_json(region_outcome(g, box))
    _emit(args, dumps(out))
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def _nonneg(x: str) -> float:
    v = float(x)
    if v < 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError("tolerance must be a nonnegative number")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance-psd", type=_nonneg, default=None)
    common.add_argument("--tolerance-eq", type=_nonneg, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", "-o", default=None, help="write the report here")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="optensor", description="Operator tensor toolkit.")
    p.add_argument("--version", action="version", version=f"optensor {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", parents=[common], help="check physicality of an operator")
    s.add_argument("operator")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("contract", parents=[common], help="contract a circuit or fragment")
    s.add_argument("circuit")
    s.add_argument("--oracle", action="store_true",
                   help="also evaluate with the dense reference contraction")
    s.set_defaults(func=cmd_contract)

    s = sub.add_parser("herald", parents=[common], help="test prediction heralding")
    s.add_argument("table")
    s.add_argument("row", help="row label o|s")
    s.add_argument("ref", help="reference row label o'|s'")
    s.add_argument("--tolerance-prop", type=_nonneg, default=Tolerances().prop)
    s.set_defaults(func=cmd_herald)

    s = sub.add_parser("witness", parents=[common], help="physicality witness sweep")
    s.add_argument("lattice")
    s.add_argument("--region", default=None, help="region JSON (default: whole lattice)")
    s.add_argument("--L", type=float, default=None)
    s.add_argument("--m-max", type=int, default=6)
    s.add_argument("--D", type=int, default=2)
    s.add_argument("--seeds", type=int, default=1, help="number of seeds starting at --seed")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--grid", dest="mode", action="store_const", const="grid")
    mode.add_argument("--sprinkle", dest="mode", action="store_const", const="sprinkle")
    s.set_defaults(mode="sprinkle")
    s.add_argument("--epsilon-witness", type=float, default=1e-6)
    s.add_argument("--inject-signal", type=float, default=None, metavar="S",
                   help="tensor in a backward-signalling pair of strength S")
    s.add_argument("--diagnostics", default=None, help="write per-step JSON here")
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("gamma", parents=[common], help="scalar coincidence surface")
    s.add_argument("sample")
    s.add_argument("--box", type=float, nargs="+", default=None)
    s.set_defaults(func=cmd_gamma)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_IO
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"optensor: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OptensorError as exc:
        print(f"optensor: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
