"""Blaschke factors, Blaschke products and the prescribed-zero construction.

For ``|a| < 1`` the factor ``M_a = (1 - q conj(a))^{-*} * (a - q) conj(a)/|a|``
has the pointwise closed form

    M_a(q) = s(q)^{-1} (a - q (1 + a**2) + q**2 a) conj(a)/|a|,
    s(q) = 1 - 2 Re(a) q + |a|**2 q**2,

because ``(1 - q conj(a))^{-*} = s^{-1} (1 - q a)`` and ``s`` has real
coefficients.  ``M_a * M_conj(a)`` is the real rational function
``((q - x)**2 + y**2) / (1 - 2 x q + |a|**2 q**2)``.

Products are evaluated without truncation through
``(f * g)(q) = f(q) g(f(q)^{-1} q f(q))`` applied factor by factor, and
materialised as truncated series on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .quaternion import Quaternion, as_array, qconj, qinv, qmul, qnorm
from .series import RegularSeries, real_reciprocal, star_mul
from .zeros import IsolatedZero, SphericalZero, records_from_sequence, zero_sequence

__all__ = [
    "CenterOnBoundaryError",
    "InvalidZeroSequenceError",
    "PointFactor",
    "SphericalFactor",
    "BlaschkeProduct",
    "default_truncation",
    "blaschke_factor",
    "spherical_factor",
    "blaschke_condition",
    "finite_blaschke",
    "prescribed_zero_blaschke",
    "chain_eval",
]

MAX_TRUNCATION = 4096
ONE = np.array([1.0, 0.0, 0.0, 0.0])


class CenterOnBoundaryError(ValueError):
    pass


class InvalidZeroSequenceError(ValueError):
    """The target sequence cannot be realised by the conjugation recursion."""


def default_truncation(radius: float, count: int = 1, tol: float = 1e-12) -> int:
    """Smallest ``N`` with ``N**(count-1) radius**(N+1) / (1 - radius) < tol`` (at least 16)."""
    if radius >= 1.0:
        raise CenterOnBoundaryError("radius must be below 1")
    if radius <= 0.0:
        return 16
    log_r = math.log(radius)
    for N in range(16, MAX_TRUNCATION + 1):
        if (count - 1) * math.log(N) + (N + 1) * log_r - math.log1p(-radius) < math.log(tol):
            return N
    return MAX_TRUNCATION


def _check_center(a) -> np.ndarray:
    a = as_array(a).astype(float)
    if float(qnorm(a)) >= 1.0:
        raise CenterOnBoundaryError(f"center {a.tolist()} does not lie in the open unit ball")
    return a


def _point_series(a: np.ndarray, N: int) -> RegularSeries:
    r = float(qnorm(a))
    if r == 0.0:
        return RegularSeries.identity().pad(N)
    x = a[0]
    recip = real_reciprocal(np.array([1.0, -2.0 * x, r * r]), N)
    # (1 - q a) * (a - q) = a - q (1 + a^2) + q^2 a
    num = np.array([a, -(ONE + qmul(a, a)), a])
    coeffs = np.stack([np.convolve(recip, num[:, m])[: N + 1] for m in range(4)], axis=-1)
    unit = qconj(a) / r
    return RegularSeries(qmul(coeffs, unit))


def _point_eval(a: np.ndarray, q: np.ndarray) -> np.ndarray:
    r = float(qnorm(a))
    if r == 0.0:
        return q.copy()
    q2 = qmul(q, q)
    s = ONE - 2.0 * a[0] * q + r * r * q2
    num = a - qmul(q, ONE + qmul(a, a)) + qmul(q2, a)
    return qmul(qmul(qinv(s), num), qconj(a) / r)


def _sphere_parts(a: np.ndarray):
    x = float(a[0])
    r2 = float(np.sum(a * a))
    return np.array([r2, -2.0 * x, 1.0]), np.array([1.0, -2.0 * x, r2])


def _sphere_series(a: np.ndarray, N: int) -> RegularSeries:
    num, den = _sphere_parts(a)
    c = np.convolve(real_reciprocal(den, N), num)[: N + 1]
    return RegularSeries.from_real(c)


def _sphere_eval(a: np.ndarray, q: np.ndarray) -> np.ndarray:
    num, den = _sphere_parts(a)
    q2 = qmul(q, q)
    top = num[0] * ONE + num[1] * q + q2
    bottom = ONE + den[1] * q + den[2] * q2
    return qmul(top, qinv(bottom))


@dataclass(frozen=True)
class PointFactor:
    """``M_a`` raised to the regular power ``power``."""

    a: Quaternion
    power: int = 1

    def __post_init__(self):
        object.__setattr__(self, "a", Quaternion.from_array(_check_center(self.a)))
        if self.power < 1:
            raise ValueError("power must be positive")

    def series(self, N: int) -> RegularSeries:
        s = _point_series(self.a.array, N)
        out = s
        for _ in range(self.power - 1):
            out = star_mul(out, s, N)
        return out

    def unit_evaluators(self):
        a = self.a.array
        return [lambda q, a=a: _point_eval(a, q)] * self.power

    def conj(self) -> "PointFactor":
        return PointFactor(self.a.conj(), self.power)

    def to_dict(self) -> dict:
        return {"type": "point", "a": self.a.tolist(), "power": self.power}


@dataclass(frozen=True)
class SphericalFactor:
    """``(M_a * M_conj(a))**power``: real coefficients, vanishing on ``x + |Im a| S``."""

    a: Quaternion
    power: int = 1

    def __post_init__(self):
        object.__setattr__(self, "a", Quaternion.from_array(_check_center(self.a)))
        if self.power < 1:
            raise ValueError("power must be positive")

    def series(self, N: int) -> RegularSeries:
        s = _sphere_series(self.a.array, N)
        out = s
        for _ in range(self.power - 1):
            out = star_mul(out, s, N)
        return out

    def unit_evaluators(self):
        a = self.a.array
        return [lambda q, a=a: _sphere_eval(a, q)] * self.power

    def conj(self) -> "SphericalFactor":
        return self

    def to_dict(self) -> dict:
        return {"type": "spherical", "a": self.a.tolist(), "power": self.power}


def chain_eval(evaluators, q) -> np.ndarray:
    """Pointwise value of a regular product of factors given as callables.

    Uses ``(f * g)(q) = f(q) g(f(q)^{-1} q f(q))`` repeatedly; once a partial
    value vanishes the product vanishes.  ``q`` may be an array ``(..., 4)``.
    """
    q = as_array(q).astype(float)
    acc = np.broadcast_to(ONE, q.shape).copy()
    cur = q.copy()
    for h in evaluators:
        v = h(cur)
        acc = qmul(acc, v)
        nv = qnorm(v)
        safe = np.where((nv > 0.0)[..., None], v, ONE)
        cur = qmul(qmul(qinv(safe), cur), safe)
    return acc


class BlaschkeProduct:
    """Ordered regular product of point and spherical factors.

    Parameters
    ----------
    factors : sequence of PointFactor or SphericalFactor
        Left-to-right order of the regular product.
    truncation : int, optional
        Degree of the materialised series; by default chosen from the largest
        center modulus so the geometric tail is below ``1e-13``.
    """

    def __init__(self, factors=(), truncation: int | None = None, meta: dict | None = None):
        self.factors = tuple(factors)
        if truncation is None:
            radius = max((float(abs(f.a)) for f in self.factors), default=0.0)
            count = sum(f.power * (2 if isinstance(f, SphericalFactor) else 1) for f in self.factors)
            truncation = default_truncation(radius, max(count, 1), tol=1e-13)
        self.truncation = int(truncation)
        self.meta = dict(meta or {})

    def __len__(self) -> int:
        return len(self.factors)

    @property
    def is_empty(self) -> bool:
        return not self.factors

    @cached_property
    def series(self) -> RegularSeries:
        N = self.truncation
        out = RegularSeries.constant(1.0)
        for fac in self.factors:
            out = star_mul(out, fac.series(N), N)
        return out

    def evaluators(self):
        out = []
        for fac in self.factors:
            out.extend(fac.unit_evaluators())
        return out

    def eval(self, q):
        """Exact pointwise value (no truncation)."""
        scalar = isinstance(q, Quaternion) or np.isscalar(q)
        out = chain_eval(self.evaluators(), q)
        return Quaternion.from_array(out) if scalar else out

    __call__ = eval

    def conj(self) -> "BlaschkeProduct":
        """Regular conjugate: conjugated centers in reverse order."""
        return BlaschkeProduct([f.conj() for f in reversed(self.factors)], self.truncation)

    def __mul__(self, other: "BlaschkeProduct") -> "BlaschkeProduct":
        return BlaschkeProduct(self.factors + other.factors, max(self.truncation, other.truncation))

    def centers(self):
        return [f.a for f in self.factors]

    def zero_count(self) -> int:
        return sum(f.power * (2 if isinstance(f, SphericalFactor) else 1) for f in self.factors)

    def to_dict(self) -> dict:
        return {"truncation": self.truncation, "factors": [f.to_dict() for f in self.factors]}

    def __repr__(self) -> str:
        return f"BlaschkeProduct({list(self.factors)!r}, truncation={self.truncation})"


def blaschke_factor(a, truncation: int | None = None) -> RegularSeries:
    """Truncated series of ``M_a``; ``M_0 = q``.

    Raises
    ------
    CenterOnBoundaryError
        If ``|a| >= 1``.
    """
    a = _check_center(a)
    N = truncation if truncation is not None else default_truncation(float(qnorm(a)))
    return _point_series(a, N)


def spherical_factor(a, truncation: int | None = None) -> RegularSeries:
    """Truncated real-coefficient series of ``M_a * M_conj(a)``."""
    a = _check_center(a)
    N = truncation if truncation is not None else default_truncation(float(qnorm(a)), 2)
    return _sphere_series(a, N)


def _as_points(zeros):
    zeros = list(zeros)
    if zeros and isinstance(zeros[0], (IsolatedZero, SphericalZero)):
        zeros = zero_sequence(zeros)
    return [as_array(z).astype(float) for z in zeros]


def _as_records(zeros):
    """Zero records as given, or grouped from a sequence of points."""
    zeros = list(zeros)
    if zeros and isinstance(zeros[0], (IsolatedZero, SphericalZero)):
        return zeros
    return records_from_sequence(_as_points(zeros))


def blaschke_condition(zeros) -> float:
    """``sum (1 - |a_n|)`` over a zero sequence (or list of zero records)."""
    return float(sum(1.0 - float(qnorm(a)) for a in _as_points(zeros)))


def _group_factors(records):
    factors = []
    for rec in records:
        if isinstance(rec, SphericalZero):
            factors.append(SphericalFactor(rec.generator(), rec.multiplicity // 2))
        else:
            factors.append(PointFactor(rec.point, rec.multiplicity))
    return factors


def finite_blaschke(zeros, truncation: int | None = None) -> BlaschkeProduct:
    """``M_{a_0} * M_{a_1} * ...`` with the given centers, in order.

    ``zeros`` is a sequence of points (consecutive equal points become
    powers, adjacent ``a, conj(a)`` pairs spherical factors) or a list of
    zero records.
    """
    points = _as_points(zeros)
    for a in points:
        _check_center(a)
    return BlaschkeProduct(_group_factors(_as_records(zeros)), truncation)


def _sphere_key(rec):
    return (round(rec.x, 9), round(rec.y, 9))


def prescribed_zero_blaschke(targets, truncation: int | None = None, tol: float = 1e-12) -> BlaschkeProduct:
    """Blaschke product whose sequence of zeros is ``targets``.

    ``targets`` is a sequence of points or a list of zero records.

    Centers are ``b_0 = a_0`` and ``b_n = P_n(a_n)^{-1} a_n P_n(a_n)``, where
    ``P_n`` is the product built so far (evaluated exactly).  A run of ``p``
    equal points gives ``M_b^{*p}``; ``m`` alternating pairs ``a, conj(a)``
    give ``(M_a * M_conj(a))^m``; real points are kept as they are.  The
    residuals ``|B(a_n)|`` are stored in ``meta["target_residuals"]``.

    Raises
    ------
    InvalidZeroSequenceError
        When an isolated target lies on a sphere that is also listed as a
        spherical zero, or a partial product already vanishes at the next
        target (for instance a point repeated non-consecutively).
    """
    points = _as_points(targets)
    for a in points:
        _check_center(a)
    records = _as_records(targets)
    spheres = {_sphere_key(r): k for k, r in enumerate(records) if isinstance(r, SphericalZero)}
    for k, rec in enumerate(records):
        key = _sphere_key(rec)
        if key in spheres and spheres[key] != k:
            raise InvalidZeroSequenceError(
                f"entry {k} lies on the sphere x={rec.x:.6g}, y={rec.y:.6g} listed as spherical "
                f"at entry {spheres[key]}; the interleaving is not defined"
            )
    factors = []
    evals = []
    for rec in records:
        if isinstance(rec, SphericalZero):
            fac = SphericalFactor(rec.generator(), rec.multiplicity // 2)
        elif rec.y == 0.0 or not factors:
            fac = PointFactor(rec.point, rec.multiplicity)
        else:
            a = rec.point.array
            v = chain_eval(evals, a)
            if float(qnorm(v)) <= tol:
                raise InvalidZeroSequenceError(f"partial product vanishes at target {a.tolist()}")
            b = qmul(qmul(qinv(v), a), v)
            fac = PointFactor(Quaternion.from_array(b), rec.multiplicity)
        factors.append(fac)
        evals.extend(fac.unit_evaluators())
    residuals = [float(qnorm(chain_eval(evals, a))) for a in points]
    return BlaschkeProduct(factors, truncation, meta={"target_residuals": residuals})
