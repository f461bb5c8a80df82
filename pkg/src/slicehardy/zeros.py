"""Zeros of slice regular functions: location, classification, multiplicity.

The symmetrization ``f^s`` has real coefficients and vanishes exactly on the
spheres ``x + y S`` meeting the zero set of ``f``.  Its complex roots are
clustered into candidate spheres; each sphere is then examined through the
affine form ``f(x + yJ) = b + Jc``.  Whole-sphere factors
``Q = (q - x)**2 + y**2`` are divided out while ``b`` and ``c`` both vanish
(spherical multiplicity ``2m``); what remains of the root multiplicity is the
isolated multiplicity ``n``, located at ``J = -b c^{-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .quaternion import Quaternion, as_array, qinv, qmul, qnorm, slice_parts
from .series import RegularSeries, divide_real_polynomial, eval_series, symmetrization
from .slices import affine_arrays

__all__ = [
    "IsolatedZero",
    "SphericalZero",
    "UnclassifiedZero",
    "IdenticallyZeroError",
    "find_zeros",
    "interior_zeros",
    "zero_sequence",
    "records_from_sequence",
    "sphere_polynomial",
]

SPHERE_TOL = 1e-8
UNIT_TOL = 1e-6
CLUSTER_TOL = 1e-3
BOUNDARY_TOL = 1e-8


class IdenticallyZeroError(ValueError):
    pass


@dataclass(frozen=True)
class IsolatedZero:
    point: Quaternion
    multiplicity: int = 1
    residual: float = 0.0
    on_boundary: bool = False

    @property
    def x(self) -> float:
        return self.point.w

    @property
    def y(self) -> float:
        return float(np.linalg.norm(self.point.imag))

    def to_dict(self) -> dict:
        return {"type": "isolated", "point": self.point.tolist(), "mult": self.multiplicity}


@dataclass(frozen=True)
class SphericalZero:
    """The sphere ``x + y S`` with even spherical multiplicity ``2m``."""

    x: float
    y: float
    multiplicity: int = 2
    residual: float = 0.0
    on_boundary: bool = False

    def generator(self) -> Quaternion:
        return Quaternion(self.x, self.y, 0.0, 0.0)

    def to_dict(self) -> dict:
        return {"type": "spherical", "x": self.x, "y": self.y, "mult": self.multiplicity}


@dataclass(frozen=True)
class UnclassifiedZero:
    """A root of ``f^s`` that passed neither the spherical nor the isolated test."""

    x: float
    y: float
    root_multiplicity: int
    residuals: dict = field(default_factory=dict)
    on_boundary: bool = False

    def to_dict(self) -> dict:
        return {
            "type": "unclassified",
            "x": self.x,
            "y": self.y,
            "root_mult": self.root_multiplicity,
            "residuals": self.residuals,
        }


def sphere_polynomial(x: float, y: float) -> np.ndarray:
    """Ascending real coefficients of ``(q - x)**2 + y**2``."""
    return np.array([x * x + y * y, -2.0 * x, 1.0])


def _cluster(roots: np.ndarray, tol: float):
    """Single-linkage clusters of complex roots; returns lists of indices."""
    n = roots.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) <= tol * (1.0 + abs(roots[i])):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _polish(c_desc: np.ndarray, z: complex, steps: int = 3) -> complex:
    d = np.polyder(c_desc)
    best, best_res = z, abs(np.polyval(c_desc, z))
    for _ in range(steps):
        dz = np.polyval(d, z)
        if dz == 0:
            break
        z = z - np.polyval(c_desc, z) / dz
        res = abs(np.polyval(c_desc, z))
        if res < best_res:
            best, best_res = z, res
    return best


def _symmetrization_roots(f: RegularSeries, radius: float):
    c = symmetrization(f).real_coeffs()
    scale = np.max(np.abs(c))
    keep = np.nonzero(np.abs(c) > 1e-15 * scale)[0]
    c = c[: keep[-1] + 1]
    if c.size <= 1:
        return np.array([], dtype=complex), []
    # leading zeros of the ascending list are roots at the origin
    lead = int(keep[0])
    desc = c[lead:][::-1]
    roots = np.concatenate([np.roots(desc), np.zeros(lead, dtype=complex)])
    roots = roots[np.abs(roots) <= radius + CLUSTER_TOL]
    clusters = _cluster(roots, CLUSTER_TOL)
    out = []
    for idx in clusters:
        z = complex(np.mean(roots[idx]))
        if len(idx) == 1 and lead == 0:
            z = _polish(desc, z)
        out.append((z, len(idx)))
    return roots, out


def _scale(f: RegularSeries) -> float:
    return float(np.sum(qnorm(f.coeffs)))


def _classify_sphere(f: RegularSeries, x: float, y: float, root_mult: int, on_boundary: bool):
    g = f
    m = 0
    Q = sphere_polynomial(x, y)
    while 2 * (m + 1) <= root_mult:
        b, c = affine_arrays(g, x, y)
        if qnorm(b) + qnorm(c) >= SPHERE_TOL * _scale(g):
            break
        g, _ = divide_real_polynomial(g, Q)
        m += 1
    records = []
    if m:
        records.append(SphericalZero(x, y, 2 * m, float(_sphere_residual(f, x, y)), on_boundary))
    n = root_mult - 2 * m
    if n <= 0:
        return records
    b, c = affine_arrays(g, x, y)
    if qnorm(c) < 1e-300:
        records.append(UnclassifiedZero(x, y, n, {"b": float(qnorm(b)), "c": 0.0}, on_boundary))
        return records
    J = -qmul(b, qinv(c))
    unit_err = float(qnorm(qmul(J, J) + np.array([1.0, 0, 0, 0])))
    if unit_err < UNIT_TOL:
        v = J[1:] / np.linalg.norm(J[1:])
        point = np.concatenate([[x], y * v])
        res = float(qnorm(eval_series(f, point, warn_radius=np.inf)))
        records.append(IsolatedZero(Quaternion.from_array(point), n, res, on_boundary))
    else:
        records.append(UnclassifiedZero(x, y, n, {"unit": unit_err, "b": float(qnorm(b)), "c": float(qnorm(c))}, on_boundary))
    return records


def _sphere_residual(f, x, y):
    b, c = affine_arrays(f, x, y)
    return qnorm(b) + qnorm(c)


def find_zeros(f: RegularSeries, include_boundary: bool = True):
    """Classified zeros of ``f`` in the closed unit ball.

    Returns a list of :class:`IsolatedZero`, :class:`SphericalZero` and
    :class:`UnclassifiedZero` ordered by modulus.  Zeros within
    ``BOUNDARY_TOL`` of the unit sphere carry ``on_boundary = True`` (and are
    dropped when ``include_boundary`` is false).

    Raises
    ------
    IdenticallyZeroError
        If every coefficient vanishes.
    """
    if not np.any(f.coeffs):
        raise IdenticallyZeroError("f is identically zero")
    f = f.trim(1e-15 * float(np.max(qnorm(f.coeffs))))
    _, clusters = _symmetrization_roots(f, 1.0 + BOUNDARY_TOL)
    records = []
    for z, mult in clusters:
        if abs(z) > 1.0 + BOUNDARY_TOL:
            continue
        on_boundary = bool(abs(z) >= 1.0 - BOUNDARY_TOL)
        if not include_boundary and on_boundary:
            continue
        if abs(z.imag) <= 1e-9 * (1.0 + abs(z)):
            x = z.real
            point = Quaternion(x)
            res = float(qnorm(eval_series(f, point, warn_radius=np.inf)))
            records.append(IsolatedZero(point, max(1, mult // 2), res, on_boundary))
        elif z.imag > 0:
            records.extend(_classify_sphere(f, z.real, z.imag, mult, on_boundary))
    records.sort(key=_sort_key)
    return records


def _sort_key(rec):
    x, y = rec.x, rec.y
    return (round(float(np.hypot(x, y)), 12), x, y, type(rec).__name__)


def interior_zeros(f: RegularSeries):
    """Zeros strictly inside the ball (boundary zeros excluded)."""
    return find_zeros(f, include_boundary=False)


def zero_sequence(records):
    """List zeros as quaternions: isolated points repeated by multiplicity,
    spheres as ``[a, conj(a)] * m`` with generator ``a = x + y i``."""
    seq = []
    for rec in records:
        if isinstance(rec, IsolatedZero):
            seq.extend([rec.point] * rec.multiplicity)
        elif isinstance(rec, SphericalZero):
            a = rec.generator()
            seq.extend([a, a.conj()] * (rec.multiplicity // 2))
        else:
            raise ValueError("unclassified zeros have no place in a zero sequence")
    return seq


def records_from_sequence(seq, tol: float = 1e-12):
    """Group a zero sequence into records (inverse of :func:`zero_sequence`).

    Consecutive equal points merge into one isolated record; alternating
    non-real ``a, conj(a)`` pairs become a spherical record.
    """
    pts = [as_array(a) for a in seq]
    out = []
    k = 0
    while k < len(pts):
        a = pts[k]
        x, y, _ = slice_parts(a)
        x, y = float(x), float(y)
        if y > tol and k + 1 < len(pts) and np.allclose(pts[k + 1], a * [1, -1, -1, -1], atol=tol):
            m = 0
            while k + 1 < len(pts) and np.allclose(pts[k], a, atol=tol) and np.allclose(pts[k + 1], a * [1, -1, -1, -1], atol=tol):
                m += 1
                k += 2
            out.append(SphericalZero(x, y, 2 * m))
            continue
        p = 1
        while k + p < len(pts) and np.allclose(pts[k + p], a, atol=tol):
            p += 1
        out.append(IsolatedZero(Quaternion.from_array(a), p))
        k += p
    return out
