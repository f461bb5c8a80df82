"""JSON and CSV formats.

Series      ``{"degree": N, "coeffs": [[w, x, y, z], ...]}`` (``N + 1`` rows)
Zero list   ``[{"type": "isolated", "point": [w, x, y, z], "mult": m},
              {"type": "spherical", "x": .., "y": .., "mult": 2m}]``
Trace CSV   columns ``theta, w, x, y, z, abs``

Parsing errors raise :class:`InputError` carrying the path of the offending
field (``coeffs[2][1]``, ``zeros[0].mult`` ...).
"""

from __future__ import annotations

import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .quaternion import ImaginaryUnit, Quaternion
from .series import RegularSeries
from .zeros import IsolatedZero, SphericalZero

__all__ = [
    "InputError",
    "load_json",
    "dump_json",
    "parse_series",
    "series_to_json",
    "parse_quaternion",
    "parse_unit",
    "parse_rgrid",
    "parse_zero_list",
    "zeros_to_json",
    "write_trace_csv",
]


class InputError(ValueError):
    """Malformed input; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.message = message


def load_json(path, field: str = "input"):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(field, f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(field, f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return None
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dump_json(obj, path=None) -> None:
    text = json.dumps(_jsonable(obj), indent=2)
    if path is None or str(path) == "-":
        sys.stdout.write(text + "\n")
    else:
        Path(path).write_text(text + "\n")


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(path, f"expected a number, got {type(value).__name__}")
    if not math.isfinite(value):
        raise InputError(path, "expected a finite number")
    return float(value)


def parse_quaternion(value, path: str = "point") -> Quaternion:
    """A quaternion from ``[w, x, y, z]`` or the string ``"w,x,y,z"``."""
    if isinstance(value, str):
        parts = [p.strip() for p in value.split(",")]
        try:
            value = [float(p) for p in parts]
        except ValueError as exc:
            raise InputError(path, f"cannot parse {value!r} as w,x,y,z") from exc
    if not isinstance(value, (list, tuple)) or len(value) != 4:
        raise InputError(path, "expected 4 components [w, x, y, z]")
    return Quaternion(*[_number(v, f"{path}[{k}]") for k, v in enumerate(value)])


def parse_unit(value, path: str = "unit") -> ImaginaryUnit:
    """An imaginary unit; a purely imaginary input is normalised."""
    q = parse_quaternion(value, path)
    if abs(q.w) > 1e-12:
        raise InputError(path, "an imaginary unit needs w = 0")
    n = float(np.linalg.norm(q.imag))
    if n == 0.0:
        raise InputError(path, "an imaginary unit cannot be zero")
    return ImaginaryUnit.from_vector(q.imag)


def parse_rgrid(value, path: str = "rgrid") -> tuple:
    if isinstance(value, str):
        items = [p for p in (s.strip() for s in value.split(",")) if p]
        try:
            value = [float(p) for p in items]
        except ValueError as exc:
            raise InputError(path, f"cannot parse {value!r} as a list of radii") from exc
    if not isinstance(value, (list, tuple)):
        raise InputError(path, "expected a list of radii")
    if not value:
        raise InputError(path, "r_grid must not be empty")
    radii = [_number(v, f"{path}[{k}]") for k, v in enumerate(value)]
    for k, r in enumerate(radii):
        if not 0.0 <= r < 1.0:
            raise InputError(f"{path}[{k}]", "radii must lie in [0, 1)")
        if k and r <= radii[k - 1]:
            raise InputError(f"{path}[{k}]", "radii must be strictly increasing")
    return tuple(radii)


def parse_series(obj, path: str = "") -> RegularSeries:
    pre = f"{path}." if path else ""
    if not isinstance(obj, dict):
        raise InputError(path or "series", "expected an object with 'coeffs'")
    if "coeffs" not in obj:
        raise InputError(f"{pre}coeffs", "missing")
    coeffs = obj["coeffs"]
    if not isinstance(coeffs, list) or not coeffs:
        raise InputError(f"{pre}coeffs", "expected a non-empty list of [w, x, y, z]")
    rows = []
    for n, c in enumerate(coeffs):
        p = f"{pre}coeffs[{n}]"
        if not isinstance(c, list) or len(c) != 4:
            raise InputError(p, "expected 4 components [w, x, y, z]")
        rows.append([_number(v, f"{p}[{k}]") for k, v in enumerate(c)])
    if "degree" in obj:
        deg = obj["degree"]
        if isinstance(deg, bool) or not isinstance(deg, int):
            raise InputError(f"{pre}degree", "expected an integer")
        if deg != len(rows) - 1:
            raise InputError(f"{pre}degree", f"degree {deg} does not match {len(rows)} coefficients")
    extra = set(obj) - {"degree", "coeffs"}
    if extra:
        raise InputError(f"{pre}{sorted(extra)[0]}", "unknown field")
    return RegularSeries(np.array(rows))


def series_to_json(f: RegularSeries) -> dict:
    return {"degree": f.degree, "coeffs": f.coeffs.tolist()}


def _mult(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise InputError(path, "expected a positive integer")
    return value


def parse_zero_list(obj, path: str = "zeros"):
    """Zero records from the JSON zero-list format."""
    if isinstance(obj, dict) and "zeros" in obj:
        obj, path = obj["zeros"], f"{path}" if path != "zeros" else "zeros"
    if not isinstance(obj, list):
        raise InputError(path, "expected a list of zero records")
    out = []
    for k, rec in enumerate(obj):
        p = f"{path}[{k}]"
        if not isinstance(rec, dict):
            raise InputError(p, "expected an object")
        kind = rec.get("type")
        if kind == "isolated":
            if "point" not in rec:
                raise InputError(f"{p}.point", "missing")
            point = parse_quaternion(rec["point"], f"{p}.point")
            mult = _mult(rec.get("mult", 1), f"{p}.mult")
            out.append(IsolatedZero(point, mult))
        elif kind == "spherical":
            for key in ("x", "y"):
                if key not in rec:
                    raise InputError(f"{p}.{key}", "missing")
            x = _number(rec["x"], f"{p}.x")
            y = _number(rec["y"], f"{p}.y")
            if y <= 0:
                raise InputError(f"{p}.y", "a spherical zero needs y > 0")
            mult = _mult(rec.get("mult", 2), f"{p}.mult")
            if mult % 2:
                raise InputError(f"{p}.mult", "spherical multiplicity must be even")
            out.append(SphericalZero(x, y, mult))
        else:
            raise InputError(f"{p}.type", "expected 'isolated' or 'spherical'")
    return out


def zeros_to_json(records) -> list:
    return [r.to_dict() for r in records]


def write_trace_csv(trace, out=None, comments=()) -> None:
    """Write a boundary trace as CSV; ``comments`` become leading ``#`` lines."""
    close = False
    if out is None or str(out) == "-":
        stream = sys.stdout
    else:
        stream = open(out, "w", newline="")
        close = True
    try:
        for line in comments:
            stream.write(f"# {line}\n")
        writer = csv.writer(stream)
        writer.writerow(["theta", "w", "x", "y", "z", "abs"])
        mods = trace.abs
        for t, v, m in zip(trace.thetas, trace.values, mods):
            writer.writerow([repr(float(t)), *(repr(float(c)) for c in v), repr(float(m))])
    finally:
        if close:
            stream.close()
