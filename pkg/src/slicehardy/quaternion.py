"""Quaternion arithmetic, imaginary units and slice coordinates.

Two layers live here.  The array layer (``qmul``, ``qconj``, ``qinv`` ...)
works on float arrays whose last axis has length 4, ordered ``[w, x, y, z]``
for ``w + x i + y j + z k``, and broadcasts like numpy.  The scalar layer
(:class:`Quaternion`, :class:`ImaginaryUnit`, :class:`SliceCoordinates`) is a
thin immutable wrapper used at API boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "Quaternion",
    "ImaginaryUnit",
    "SliceCoordinates",
    "ZeroDivisorError",
    "REAL_TOL",
    "as_array",
    "qmul",
    "qconj",
    "qnorm",
    "qnorm2",
    "qinv",
    "mul",
    "inverse",
    "slice_decompose",
    "slice_parts",
    "exp_on_slice",
    "sample_unit_sphere",
    "random_unit",
    "orthogonal_unit",
]

# absolute tolerance on the discriminating component for "is real" / "is on S"
REAL_TOL = 1e-12


class ZeroDivisorError(ZeroDivisionError):
    """Raised when inverting a quaternion whose modulus is below tolerance."""


def as_array(q) -> np.ndarray:
    """Coerce a Quaternion, ImaginaryUnit, real scalar or array-like to a float array."""
    if isinstance(q, Quaternion):
        return q.array
    if isinstance(q, ImaginaryUnit):
        return q.q.array
    if np.isscalar(q):
        return np.array([float(q), 0.0, 0.0, 0.0])
    arr = np.asarray(q, dtype=float)
    if arr.shape[-1:] != (4,):
        raise ValueError(f"quaternion arrays need a trailing axis of length 4, got shape {arr.shape}")
    return arr


def qmul(p, q) -> np.ndarray:
    """Hamilton product of broadcastable quaternion arrays."""
    p = as_array(p)
    q = as_array(q)
    pw, px, py, pz = np.moveaxis(p, -1, 0)
    qw, qx, qy, qz = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            pw * qw - px * qx - py * qy - pz * qz,
            pw * qx + px * qw + py * qz - pz * qy,
            pw * qy - px * qz + py * qw + pz * qx,
            pw * qz + px * qy - py * qx + pz * qw,
        ],
        axis=-1,
    )


def qconj(q) -> np.ndarray:
    q = as_array(q)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def qnorm2(q) -> np.ndarray:
    q = as_array(q)
    return np.sum(q * q, axis=-1)


def qnorm(q) -> np.ndarray:
    q = as_array(q)
    # hypot-style scaling avoids overflow for very large coefficients
    return np.linalg.norm(q, axis=-1)


def qinv(q, tol: float = 0.0) -> np.ndarray:
    """Elementwise inverse ``conj(q) / |q|^2``.

    Raises :class:`ZeroDivisorError` when any modulus is ``<= tol``.
    """
    q = as_array(q)
    n2 = qnorm2(q)
    if np.any(np.sqrt(n2) <= tol):
        raise ZeroDivisorError("quaternion modulus below tolerance")
    return qconj(q) / n2[..., None]


@dataclass(frozen=True)
class Quaternion:
    """An immutable quaternion ``w + x i + y j + z k``."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        w, x, y, z = (float(v) for v in np.asarray(arr, dtype=float).reshape(4))
        return cls(w, x, y, z)

    @classmethod
    def coerce(cls, value) -> "Quaternion":
        if isinstance(value, Quaternion):
            return value
        return cls.from_array(as_array(value))

    @property
    def array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    @property
    def real(self) -> float:
        return self.w

    @property
    def imag(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)

    def inverse(self, tol: float = REAL_TOL) -> "Quaternion":
        return inverse(self, tol)

    def is_real(self, tol: float = REAL_TOL) -> bool:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2) <= tol

    def isclose(self, other, atol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.array - as_array(other)) <= atol))

    def tolist(self) -> list[float]:
        return [self.w, self.x, self.y, self.z]

    def __abs__(self) -> float:
        return self.norm()

    def __iter__(self):
        return iter((self.w, self.x, self.y, self.z))

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __add__(self, other) -> "Quaternion":
        return Quaternion.from_array(self.array + as_array(other))

    __radd__ = __add__

    def __sub__(self, other) -> "Quaternion":
        return Quaternion.from_array(self.array - as_array(other))

    def __rsub__(self, other) -> "Quaternion":
        return Quaternion.from_array(as_array(other) - self.array)

    def __mul__(self, other) -> "Quaternion":
        if np.isscalar(other):
            return Quaternion.from_array(self.array * float(other))
        return Quaternion.from_array(qmul(self.array, as_array(other)))

    def __rmul__(self, other) -> "Quaternion":
        if np.isscalar(other):
            return Quaternion.from_array(self.array * float(other))
        return Quaternion.from_array(qmul(as_array(other), self.array))

    def __truediv__(self, other) -> "Quaternion":
        if not np.isscalar(other):
            raise TypeError("divide by a real scalar; use inverse() for quaternion division")
        return Quaternion.from_array(self.array / float(other))

    def __repr__(self) -> str:
        return f"Quaternion({self.w:.6g}, {self.x:.6g}, {self.y:.6g}, {self.z:.6g})"


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class ImaginaryUnit:
    """A point of the unit sphere S of purely imaginary quaternions (``u**2 == -1``)."""

    q: Quaternion

    def __post_init__(self):
        q = Quaternion.coerce(self.q)
        object.__setattr__(self, "q", q)
        if abs(q.w) > 1e-9 or abs(q.norm() - 1.0) > 1e-9:
            raise ValueError(f"{q!r} is not a unit imaginary quaternion")

    @classmethod
    def from_vector(cls, v: Iterable[float]) -> "ImaginaryUnit":
        v = np.asarray(list(v), dtype=float).reshape(3)
        n = np.linalg.norm(v)
        if n == 0:
            raise ValueError("zero vector has no direction")
        v = v / n
        return cls(Quaternion(0.0, *v))

    @classmethod
    def coerce(cls, value) -> "ImaginaryUnit":
        if isinstance(value, ImaginaryUnit):
            return value
        arr = as_array(value)
        if abs(arr[0]) > 1e-9:
            raise ValueError("imaginary unit must have zero real part")
        return cls.from_vector(arr[1:])

    @property
    def array(self) -> np.ndarray:
        return self.q.array

    @property
    def vector(self) -> np.ndarray:
        return self.q.imag

    def __neg__(self) -> "ImaginaryUnit":
        return ImaginaryUnit(-self.q)

    def __repr__(self) -> str:
        x, y, z = self.vector
        return f"ImaginaryUnit({x:.6g}i + {y:.6g}j + {z:.6g}k)"


UNIT_I = ImaginaryUnit(I)
UNIT_J = ImaginaryUnit(J)
UNIT_K = ImaginaryUnit(K)
DEFAULT_UNIT = UNIT_I


@dataclass(frozen=True)
class SliceCoordinates:
    """``q = x + y * unit`` with ``y >= 0``."""

    x: float
    y: float
    unit: ImaginaryUnit

    def quaternion(self) -> Quaternion:
        return Quaternion.from_array(np.array([self.x, 0, 0, 0]) + self.y * self.unit.array)

    def complex(self) -> complex:
        return complex(self.x, self.y)


def mul(p, q) -> Quaternion:
    """Hamilton product of two quaternions."""
    return Quaternion.from_array(qmul(as_array(p), as_array(q)))


def inverse(q, tol: float = REAL_TOL) -> Quaternion:
    """``conj(q) / |q|**2``; raises :class:`ZeroDivisorError` if ``|q| <= tol``."""
    return Quaternion.from_array(qinv(as_array(q), tol))


def slice_parts(q):
    """Vectorised slice decomposition of a quaternion array.

    Returns ``(x, y, units)`` with ``y >= 0`` and ``units`` of shape
    ``(..., 4)``; real entries get the default unit ``i``.
    """
    q = as_array(q)
    x = q[..., 0]
    v = q[..., 1:]
    y = np.linalg.norm(v, axis=-1)
    units = np.zeros(q.shape, dtype=float)
    real = y <= REAL_TOL
    safe = np.where(real, 1.0, y)
    units[..., 1:] = v / safe[..., None]
    units[..., 1] = np.where(real, 1.0, units[..., 1])
    units[..., 2:] = np.where(real[..., None], 0.0, units[..., 2:])
    y = np.where(real, 0.0, y)
    return x, y, units


def slice_decompose(q) -> SliceCoordinates:
    """Write ``q = x + y I`` with ``y >= 0`` and ``I`` in S (default ``i`` for real ``q``)."""
    x, y, u = slice_parts(as_array(q))
    return SliceCoordinates(float(x), float(y), ImaginaryUnit(Quaternion.from_array(u)))


def exp_on_slice(unit, theta):
    """``cos(theta) + unit * sin(theta)``.

    Scalar ``theta`` gives a :class:`Quaternion`; an array gives an array of
    shape ``theta.shape + (4,)``.
    """
    u = ImaginaryUnit.coerce(unit).array
    if np.isscalar(theta):
        return Quaternion.from_array(np.array([math.cos(theta), 0, 0, 0]) + math.sin(theta) * u)
    theta = np.asarray(theta, dtype=float)
    out = np.sin(theta)[..., None] * u
    out[..., 0] = np.cos(theta)
    return out


def _fibonacci_sphere(n: int) -> np.ndarray:
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = math.pi * (3.0 - math.sqrt(5.0)) * k
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)


def _random_rotation(rng: np.random.Generator) -> np.ndarray:
    m, r = np.linalg.qr(rng.standard_normal((3, 3)))
    m = m * np.sign(np.diag(r))
    if np.linalg.det(m) < 0:
        m[:, 0] = -m[:, 0]
    return m


def sample_unit_sphere(n: int, seed: int | None = None, as_units: bool = False):
    """Deterministic quasi-uniform points of S.

    The first points are ``i, j, k, -i, -j, -k`` (so ``n == 1`` gives ``[i]``
    and ``n >= 6`` always contains all six); the remainder is a Fibonacci
    lattice, rotated by a seeded random rotation when ``seed`` is given.

    Returns an ``(n, 4)`` array, or a list of :class:`ImaginaryUnit` when
    ``as_units`` is true.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    axes = np.array(
        [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]], dtype=float
    )
    head = axes[: min(n, 6)]
    rest = n - len(head)
    if rest > 0:
        pts = _fibonacci_sphere(rest)
        if seed is not None:
            pts = pts @ _random_rotation(np.random.default_rng(seed)).T
        vecs = np.concatenate([head, pts])
    else:
        vecs = head
    out = np.zeros((n, 4))
    out[:, 1:] = vecs
    if as_units:
        return [ImaginaryUnit(Quaternion.from_array(row)) for row in out]
    return out


def random_unit(rng: np.random.Generator) -> ImaginaryUnit:
    return ImaginaryUnit.from_vector(rng.standard_normal(3))


def orthogonal_unit(unit) -> ImaginaryUnit:
    """Some unit of S orthogonal to ``unit`` (deterministic)."""
    v = ImaginaryUnit.coerce(unit).vector
    trial = np.array([1.0, 0.0, 0.0]) if abs(v[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    w = trial - np.dot(trial, v) * v
    return ImaginaryUnit.from_vector(w)
