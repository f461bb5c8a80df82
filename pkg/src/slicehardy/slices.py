"""Slicewise tools: splitting, extension, the representation formula, T_f.

On a sphere ``x + y S`` every regular function is affine,
``f(x + y J) = b + J c``.  Writing ``v = Im(c * conj(b))`` one gets

    |b + J c|**2 = |b|**2 + |c|**2 - 2 <J, v>,

so the extremes of ``|f|`` over the sphere are attained at ``J = -+v/|v|``
and equal ``sqrt(|b|**2 + |c|**2 +- 2 |v|)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quaternion import (
    ImaginaryUnit,
    Quaternion,
    UNIT_I,
    ZeroDivisorError,
    as_array,
    orthogonal_unit,
    qconj,
    qinv,
    qmul,
    qnorm,
    qnorm2,
    sample_unit_sphere,
    slice_parts,
)
from .series import RegularSeries, eval_series, regular_conjugate, slice_components, symmetrization

__all__ = [
    "NonOrthogonalBasisError",
    "SingularPointError",
    "SliceSplitting",
    "SphereAffineForm",
    "split",
    "extend",
    "representation_eval",
    "sphere_affine",
    "affine_arrays",
    "conjugation_map",
    "sphere_extremes",
    "sphere_max_min_modulus",
]


class NonOrthogonalBasisError(ValueError):
    pass


class SingularPointError(ArithmeticError):
    """The point lies on the zero set where the requested map is undefined."""


def _check_pair(I, J):
    I = ImaginaryUnit.coerce(I)
    J = ImaginaryUnit.coerce(J)
    anti = qmul(I.array, J.array) + qmul(J.array, I.array)
    if np.max(np.abs(anti)) > 1e-12:
        raise NonOrthogonalBasisError(f"{J!r} is not orthogonal to {I!r}")
    return I, J


@dataclass(frozen=True, eq=False)
class SliceSplitting:
    """``f_I(z) = F(z) + G(z) J`` with ``F``, ``G`` valued in ``L_I``.

    ``F_coeffs`` and ``G_coeffs`` are ``(N + 1, 4)`` quaternion arrays lying in
    ``span{1, I}``.
    """

    I: ImaginaryUnit
    J: ImaginaryUnit
    F_coeffs: np.ndarray
    G_coeffs: np.ndarray

    def F_complex(self) -> np.ndarray:
        return self.F_coeffs[:, 0] + 1j * (self.F_coeffs @ self.I.array)

    def G_complex(self) -> np.ndarray:
        return self.G_coeffs[:, 0] + 1j * (self.G_coeffs @ self.I.array)

    def F(self) -> RegularSeries:
        return RegularSeries(self.F_coeffs)

    def G(self) -> RegularSeries:
        return RegularSeries(self.G_coeffs)


def split(f: RegularSeries, I=UNIT_I, J=None) -> SliceSplitting:
    """Coefficientwise splitting ``a_n = F_n + G_n J`` with ``F_n, G_n`` in ``L_I``."""
    if J is None:
        J = orthogonal_unit(I)
    I, J = _check_pair(I, J)
    u, v = I.array, J.array
    w = qmul(u, v)
    c = f.coeffs
    alpha, beta = c[:, 0], c @ u
    gamma, delta = c @ v, c @ w
    F = np.outer(beta, u)
    F[:, 0] += alpha
    G = np.outer(delta, u)
    G[:, 0] += gamma
    return SliceSplitting(I, J, F, G)


def extend(F_coeffs, G_coeffs, I=UNIT_I, J=None) -> RegularSeries:
    """The regular function whose restriction to ``L_I`` is ``F + G J``.

    ``F_coeffs``/``G_coeffs`` may be quaternion arrays in ``span{1, I}`` or
    complex arrays (read through ``i -> I``).
    """
    if J is None:
        J = orthogonal_unit(I)
    I, J = _check_pair(I, J)
    F = _to_slice_array(F_coeffs, I)
    G = _to_slice_array(G_coeffs, I)
    n = max(F.shape[0], G.shape[0])
    F = np.vstack([F, np.zeros((n - F.shape[0], 4))])
    G = np.vstack([G, np.zeros((n - G.shape[0], 4))])
    return RegularSeries(F + qmul(G, J.array))


def _to_slice_array(values, I: ImaginaryUnit) -> np.ndarray:
    arr = np.asarray(values)
    if np.iscomplexobj(arr) or arr.ndim == 1:
        arr = np.asarray(arr, dtype=complex).reshape(-1)
        out = np.outer(arr.imag, I.array)
        out[:, 0] += arr.real
        return out
    return np.asarray(arr, dtype=float).reshape(-1, 4)


def representation_eval(f: RegularSeries, x: float, y: float, I=UNIT_I, J=UNIT_I) -> Quaternion:
    """``f(x + yJ)`` reconstructed from ``f(x + yI)`` and ``f(x - yI)``."""
    I = ImaginaryUnit.coerce(I)
    J = ImaginaryUnit.coerce(J)
    u = I.array
    plus = eval_series(f, np.array([x, 0, 0, 0]) + y * u)
    minus = eval_series(f, np.array([x, 0, 0, 0]) - y * u)
    JI = qmul(J.array, u)
    out = 0.5 * (plus + minus) + 0.5 * qmul(JI, minus - plus)
    return Quaternion.from_array(out)


@dataclass(frozen=True)
class SphereAffineForm:
    """``f(x + yJ) = b + J c`` for every ``J`` in S."""

    x: float
    y: float
    b: Quaternion
    c: Quaternion

    def at(self, J) -> Quaternion:
        return Quaternion.from_array(self.b.array + qmul(ImaginaryUnit.coerce(J).array, self.c.array))

    def extremes(self) -> tuple[float, float]:
        mx, mn = sphere_extremes(self.b.array, self.c.array)
        return float(mx), float(mn)

    def zero_unit(self):
        """``J = -b c^{-1}``, the only candidate zero when ``c != 0``."""
        return Quaternion.from_array(-qmul(self.b.array, qinv(self.c.array)))


def affine_arrays(f: RegularSeries, x, y):
    """Vectorised ``(b, c)`` arrays for spheres ``x + y S`` (broadcast ``x``, ``y``).

    With ``z = x + i y``, ``b = Re P(z)`` and ``c = Im P(z)`` where
    ``P(z) = sum z**n a_n`` componentwise.
    """
    P = slice_components(f, np.asarray(x) + 1j * np.asarray(y))
    return P.real, P.imag


def sphere_affine(f: RegularSeries, x: float, y: float) -> SphereAffineForm:
    """The pair ``(b, c)`` computed from the slice ``L_i``.

    ``b = (f(x+yi) + f(x-yi)) / 2`` and ``c = i (f(x-yi) - f(x+yi)) / 2``.
    """
    u = UNIT_I.array
    plus = eval_series(f, np.array([x, 0, 0, 0]) + y * u)
    minus = eval_series(f, np.array([x, 0, 0, 0]) - y * u)
    b = 0.5 * (plus + minus)
    c = 0.5 * qmul(u, minus - plus)
    return SphereAffineForm(float(x), float(y), Quaternion.from_array(b), Quaternion.from_array(c))


def sphere_extremes(b, c):
    """Closed-form ``(max, min)`` of ``|b + J c|`` over ``J`` in S (vectorised)."""
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    base = qnorm2(b) + qnorm2(c)
    v = qmul(c, qconj(b))[..., 1:]
    w = 2.0 * np.linalg.norm(v, axis=-1)
    return np.sqrt(base + w), np.sqrt(np.clip(base - w, 0.0, None))


def sphere_max_min_modulus(f: RegularSeries, x: float, y: float, method: str = "closed", samples: int = 10_000):
    """``(max, min)`` of ``|f|`` on the sphere ``x + y S``.

    ``method="closed"`` uses the affine structure; ``method="sampled"`` takes
    the extremes over ``samples`` quasi-uniform units (a lower/upper bound).
    """
    b, c = affine_arrays(f, x, y)
    if method == "closed":
        mx, mn = sphere_extremes(b, c)
        return float(mx), float(mn)
    if method != "sampled":
        raise ValueError(f"unknown method {method!r}")
    units = sample_unit_sphere(samples)
    vals = qnorm(b + qmul(units, c))
    return float(vals.max()), float(vals.min())


def conjugation_map(f: RegularSeries, q, tol: float = 1e-12) -> Quaternion:
    """``T_f(q) = f^c(q)^{-1} q f^c(q)``, defined off the zero set of ``f^s``."""
    qa = as_array(q)
    fs = symmetrization(f)
    if float(qnorm(eval_series(fs, qa, warn_radius=np.inf))) <= tol:
        raise SingularPointError("q lies on the zero set of the symmetrization")
    x, y, _ = slice_parts(qa)
    if y == 0.0:
        return Quaternion.from_array(qa)
    fc = eval_series(regular_conjugate(f), qa, warn_radius=np.inf)
    try:
        out = qmul(qinv(fc, tol), qmul(qa, fc))
    except ZeroDivisorError as exc:
        raise SingularPointError("f^c vanishes at q") from exc
    return Quaternion.from_array(out)
