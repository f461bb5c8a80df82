"""Command-line front end.

Every subcommand reads its input from ``--input`` (``-`` for stdin is not
supported; pass a file), writes JSON (CSV for ``trace``) to ``--output`` or
stdout, and embeds the fully resolved configuration in its output.  Options
may also come from ``--config`` (a JSON object whose keys are the long option
names with underscores); explicit flags win over the file.

Exit codes: 0 success, 1 numerical certificate failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .blaschke import (
    CenterOnBoundaryError,
    InvalidZeroSequenceError,
    chain_eval,
    finite_blaschke,
    prescribed_zero_blaschke,
)
from .factorization import NotSlicePreservingError, extract_zeros, outer_inner_split
from .hardy import QuadratureSpec, boundary_trace, hardy_norm, slice_norm_report
from .io import (
    InputError,
    dump_json,
    load_json,
    parse_quaternion,
    parse_rgrid,
    parse_series,
    parse_unit,
    parse_zero_list,
    series_to_json,
    write_trace_csv,
    zeros_to_json,
)
from .quaternion import UNIT_I, UNIT_J, UNIT_K, ImaginaryUnit, qnorm
from .series import eval_with_bound, slice_preservation
from .zeros import IdenticallyZeroError, UnclassifiedZero, find_zeros, zero_sequence

EXIT_OK, EXIT_CERTIFICATE, EXIT_INPUT = 0, 1, 2

COMMON = ("input", "output", "seed")
QUADRATURE = ("nodes", "rgrid", "unit_samples")
OPTIONS = {
    "eval": COMMON + ("point",),
    "norm": COMMON + QUADRATURE + ("p", "unit"),
    "zeros": COMMON + ("include_boundary",),
    "blaschke": COMMON + ("truncation", "mode", "boundary_nodes"),
    "factor": COMMON + QUADRATURE + ("unit", "truncation"),
    "trace": COMMON + QUADRATURE + ("unit",),
}
DEFAULTS = {
    "seed": 0,
    "output": None,
    "point": [],
    "include_boundary": True,
    "truncation": None,
    "mode": "prescribed",
    "boundary_nodes": 512,
    "nodes": None,
    "rgrid": None,
    "unit_samples": 128,
    "unit": None,
}

BLASCHKE_TARGET_TOL = 1e-8
BLASCHKE_BOUNDARY_TOL = 1e-5


class CertificateFailure(Exception):
    pass


# -- argument handling -------------------------------------------------------


def _p_value(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "∞"):
        return math.inf
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid p: {text!r}")
    if not p > 0:
        raise argparse.ArgumentTypeError("p must be positive")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slicehardy", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, argument_default=argparse.SUPPRESS)
        p.add_argument("--input", help="input JSON file")
        p.add_argument("--output", help="output file (default: stdout)")
        p.add_argument("--config", help="JSON file with option values")
        p.add_argument("--seed", type=int, help="random seed (default 0)")
        return p

    def add_quadrature(p):
        p.add_argument("--nodes", type=int, help="circle nodes per slice")
        p.add_argument("--rgrid", help="comma separated radii in [0, 1), increasing")
        p.add_argument("--unit-samples", dest="unit_samples", type=int, help="units sampled for sup over S")

    p = add("eval", "evaluate a series at points")
    p.add_argument("--point", action="append", help="quaternion w,x,y,z (repeatable)")

    p = add("norm", "Hardy norm or slice norm")
    p.add_argument("--p", type=_p_value, help="exponent, a positive number or inf")
    p.add_argument("--unit", help="restrict to the slice of this unit w,x,y,z")
    add_quadrature(p)

    p = add("zeros", "locate and classify zeros in the closed ball")
    p.add_argument("--interior-only", dest="include_boundary", action="store_false", help="drop boundary zeros")

    p = add("blaschke", "Blaschke product from a zero list")
    p.add_argument("--truncation", type=int, help="degree of the emitted series")
    p.add_argument("--mode", choices=("prescribed", "direct"), help="prescribed zeros (default) or centers as given")
    p.add_argument("--boundary-nodes", dest="boundary_nodes", type=int, help="nodes per slice for the boundary check")

    p = add("factor", "outer-inner split (slice preserving input) or zero extraction")
    p.add_argument("--unit", help="preserved slice unit w,x,y,z")
    p.add_argument("--truncation", type=int, help="series truncation degree")
    add_quadrature(p)

    p = add("trace", "boundary trace along one slice as CSV")
    p.add_argument("--unit", help="slice unit w,x,y,z (default 0,1,0,0)")
    add_quadrature(p)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults, the ``--config`` file and explicit flags; validate."""
    command = args.command
    allowed = OPTIONS[command]
    given = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    merged = {k: DEFAULTS[k] for k in allowed if k in DEFAULTS}
    if getattr(args, "config", None):
        data = load_json(args.config, "config")
        if not isinstance(data, dict):
            raise InputError("config", "expected a JSON object")
        for key, value in data.items():
            if key == "command":
                if value != command:
                    raise InputError("config.command", f"file is for {value!r}, not {command!r}")
                continue
            if key not in allowed:
                raise InputError(f"config.{key}", f"unknown option for {command!r}")
            merged[key] = value
    merged.update(given)
    if "input" not in merged:
        raise InputError("input", "missing (use --input)")
    return _normalise(command, merged)


def _normalise(command: str, cfg: dict) -> dict:
    out = dict(cfg)
    if not isinstance(out["seed"], int) or isinstance(out["seed"], bool):
        raise InputError("seed", "expected an integer")
    if "p" in OPTIONS[command]:
        if "p" not in out:
            raise InputError("p", "missing (use --p)")
        p = out["p"]
        if isinstance(p, str):
            try:
                p = _p_value(p)
            except argparse.ArgumentTypeError as exc:
                raise InputError("p", str(exc)) from None
        elif isinstance(p, bool) or not isinstance(p, (int, float)) or not p > 0:
            raise InputError("p", "expected a positive number or 'inf'")
        out["p"] = float(p)
    if out.get("unit") is not None:
        out["unit"] = parse_unit(out["unit"], "unit").array.tolist()
    if "rgrid" in out and out["rgrid"] is not None:
        out["rgrid"] = list(parse_rgrid(out["rgrid"], "rgrid"))
    for key in ("nodes", "truncation", "boundary_nodes", "unit_samples"):
        v = out.get(key)
        if v is not None and (isinstance(v, bool) or not isinstance(v, int) or v < 1):
            raise InputError(key, "expected a positive integer")
    if command == "eval":
        pts = out["point"]
        if not isinstance(pts, list) or (pts and all(isinstance(v, (int, float)) for v in pts)):
            pts = [pts]
        if not pts:
            raise InputError("point", "at least one point is required (use --point)")
        out["point"] = [parse_quaternion(v, f"point[{k}]").tolist() for k, v in enumerate(pts)]
    return out


def _spec(cfg: dict) -> QuadratureSpec:
    kwargs = {"circle_nodes": cfg.get("nodes"), "unit_samples": cfg.get("unit_samples", 128), "seed": cfg["seed"]}
    if cfg.get("rgrid") is not None:
        kwargs["r_grid"] = tuple(cfg["rgrid"])
    return QuadratureSpec(**kwargs)


def _load_series(path: str):
    """A series from a series document, or from the ``series`` entry of a report."""
    data = load_json(path, "input")
    if isinstance(data, dict) and "coeffs" not in data and "series" in data:
        return parse_series(data["series"], "series")
    return parse_series(data)


# -- commands ----------------------------------------------------------------


def cmd_eval(cfg: dict) -> dict:
    f = _load_series(cfg["input"])
    values = []
    for pt in cfg["point"]:
        v, bound = eval_with_bound(f, pt)
        values.append({"point": pt, "value": v.tolist(), "abs": abs(v), "truncation_bound": bound})
    return {"values": values}


def cmd_norm(cfg: dict) -> dict:
    f = _load_series(cfg["input"])
    spec = _spec(cfg)
    if cfg.get("unit") is not None:
        est = slice_norm_report(f, ImaginaryUnit.coerce(np.array(cfg["unit"])), cfg["p"], spec)
        scope = "slice"
    else:
        est = hardy_norm(f, cfg["p"], spec)
        scope = "hardy"
    return {"scope": scope, "estimate": est.to_dict(), "quadrature": spec.to_dict()}


def _zero_entry(rec) -> dict:
    d = rec.to_dict()
    d["on_boundary"] = rec.on_boundary
    if hasattr(rec, "residual"):
        d["residual"] = rec.residual
    return d


def cmd_zeros(cfg: dict) -> dict:
    f = _load_series(cfg["input"])
    records = find_zeros(f, include_boundary=cfg["include_boundary"])
    return {"zeros": [_zero_entry(r) for r in records]}


def _boundary_deviation(evaluate, n: int) -> float:
    """``max | |B(e^{u theta})| - 1 |`` over ``n`` nodes on the slices of i, j, k."""
    thetas = -math.pi + 2.0 * math.pi * np.arange(n) / n
    worst = 0.0
    for u in (UNIT_I, UNIT_J, UNIT_K):
        pts = np.cos(thetas)[:, None] * np.array([1.0, 0, 0, 0]) + np.sin(thetas)[:, None] * u.array
        worst = max(worst, float(np.max(np.abs(qnorm(evaluate(pts)) - 1.0))))
    return worst


def _certificate(name: str, value: float, tol: float) -> dict:
    return {"name": name, "value": value, "tolerance": tol, "passed": bool(value <= tol)}


def cmd_blaschke(cfg: dict) -> dict:
    records = parse_zero_list(load_json(cfg["input"], "input"))
    seq = zero_sequence(records)
    if cfg["mode"] == "prescribed":
        B = prescribed_zero_blaschke(records, cfg["truncation"])
    else:
        B = finite_blaschke(records, cfg["truncation"])
    evaluators = B.evaluators()
    residuals = [float(qnorm(chain_eval(evaluators, a.array))) for a in seq]
    n = cfg["boundary_nodes"]
    certs = []
    if cfg["mode"] == "prescribed":
        certs.append(_certificate("target_residual", max(residuals, default=0.0), BLASCHKE_TARGET_TOL))
    certs.append(_certificate("boundary_modulus", _boundary_deviation(lambda q: chain_eval(evaluators, q), n), BLASCHKE_BOUNDARY_TOL))
    certs.append(_certificate("series_boundary_modulus", _boundary_deviation(B.series, n), BLASCHKE_BOUNDARY_TOL))
    return {
        "product": B.to_dict(),
        "target_residuals": residuals,
        "series": series_to_json(B.series),
        "certificates": certs,
        "_passed": all(c["passed"] for c in certs),
    }


def _factor_unit(f, cfg):
    if cfg.get("unit") is not None:
        return ImaginaryUnit.coerce(np.array(cfg["unit"]))
    info = slice_preservation(f)
    if info.preserves_all_slices:
        return UNIT_I
    return info.preserved_slice


def cmd_factor(cfg: dict) -> dict:
    f = _load_series(cfg["input"])
    unit = _factor_unit(f, cfg)
    if unit is None:
        zeros = find_zeros(f, include_boundary=False)
        if any(isinstance(z, UnclassifiedZero) for z in zeros):
            raise CertificateFailure("some zeros could not be classified")
        ext = extract_zeros(f, cfg["truncation"], zeros=zeros)
        h_zeros = find_zeros(ext.h, include_boundary=False)
        certs = [
            _certificate("reconstruction", ext.residual, 1e-7),
            _certificate("h_zero_free", len(h_zeros), 0),
        ]
        return {
            "method": "zero_extraction",
            "zeros": zeros_to_json(zeros),
            "h": series_to_json(ext.h),
            "g": ext.g.to_dict(),
            "residual": ext.residual,
            "certificates": certs,
            "_passed": all(c["passed"] for c in certs),
        }
    split = outer_inner_split(f, unit, cfg["truncation"], _spec(cfg), seed=cfg["seed"])
    return {
        "method": "outer_inner",
        "unit": unit.array.tolist(),
        "E": series_to_json(split.E),
        "S": series_to_json(split.S),
        "B": split.B.to_dict(),
        "residual": split.residual,
        "certificates": [c.to_dict() for c in split.certificates],
        "_passed": split.passed,
    }


def cmd_trace(cfg: dict):
    f = _load_series(cfg["input"])
    unit = ImaginaryUnit.coerce(np.array(cfg["unit"])) if cfg.get("unit") is not None else UNIT_I
    spec = _spec(cfg)
    trace = boundary_trace(f, unit, spec)
    return trace, spec


COMMANDS = {
    "eval": cmd_eval,
    "norm": cmd_norm,
    "zeros": cmd_zeros,
    "blaschke": cmd_blaschke,
    "factor": cmd_factor,
    "trace": cmd_trace,
}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        cfg["command"] = args.command
        cfg["version"] = __version__
        if args.command == "trace":
            trace, spec = cmd_trace(cfg)
            bad = np.nonzero(~trace.converged)[0]
            comments = [
                "config " + json.dumps({**cfg, "quadrature": spec.to_dict()}),
                f"nonconverged_nodes {json.dumps(bad.tolist())}",
            ]
            write_trace_csv(trace, cfg["output"], comments)
            if bad.size:
                print(f"warning: {bad.size} trace nodes did not converge", file=sys.stderr)
                return EXIT_CERTIFICATE
            return EXIT_OK
        result = COMMANDS[args.command](cfg)
        passed = result.pop("_passed", True)
        dump_json({"config": cfg, **result}, cfg["output"])
        if not passed:
            print("error: certificate check failed", file=sys.stderr)
            return EXIT_CERTIFICATE
        return EXIT_OK
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InvalidZeroSequenceError, CenterOnBoundaryError, NotSlicePreservingError, IdenticallyZeroError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CertificateFailure, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATE


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
