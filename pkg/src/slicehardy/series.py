"""Truncated power series ``sum_n q**n a_n`` and the regular (*-) calculus.

A :class:`RegularSeries` stores right coefficients as an ``(N + 1, 4)``
array.  Evaluation at ``q = x + y I`` uses the fact that ``q**n`` lies in
``L_I``: with ``z = x + i y`` and ``P(z) = sum z**n a_n`` computed
componentwise in complex arithmetic, ``f(q) = Re P(z) + I * Im P(z)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .quaternion import (
    ImaginaryUnit,
    Quaternion,
    as_array,
    qconj,
    qmul,
    qnorm,
    slice_parts,
)

__all__ = [
    "RegularSeries",
    "SlicePreservationInfo",
    "SingularAtOriginError",
    "TruncationWarning",
    "eval_series",
    "eval_with_bound",
    "slice_components",
    "star_mul",
    "star_product",
    "regular_conjugate",
    "symmetrization",
    "star_inverse",
    "slice_preservation",
    "real_reciprocal",
    "real_mul",
    "divide_real_polynomial",
]

ORIGIN_TOL = 1e-12
SPAN_TOL = 1e-10


class SingularAtOriginError(ArithmeticError):
    """The series vanishes at the origin, so no *-inverse power series exists."""


class TruncationWarning(RuntimeWarning):
    """Evaluation outside the radius where the truncated series is meaningful."""


@dataclass(frozen=True, eq=False)
class RegularSeries:
    """Truncated power series with right quaternion coefficients."""

    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim == 1 and c.shape[0] == 4:
            c = c[None, :]
        if c.ndim != 2 or c.shape[1] != 4 or c.shape[0] < 1:
            raise ValueError(f"coefficients must have shape (N+1, 4), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # construction

    @classmethod
    def from_coeffs(cls, coeffs) -> "RegularSeries":
        rows = [as_array(c) for c in coeffs]
        return cls(np.array(rows, dtype=float))

    @classmethod
    def from_real(cls, coeffs) -> "RegularSeries":
        c = np.asarray(coeffs, dtype=float).reshape(-1)
        out = np.zeros((c.size, 4))
        out[:, 0] = c
        return cls(out)

    @classmethod
    def from_complex(cls, coeffs, unit=None) -> "RegularSeries":
        """Coefficients ``a + b i`` mapped to ``a + b I`` in the slice ``L_I``."""
        u = ImaginaryUnit.coerce(unit if unit is not None else Quaternion(0, 1)).array
        c = np.asarray(coeffs, dtype=complex).reshape(-1)
        out = np.outer(c.imag, u)
        out[:, 0] += c.real
        return cls(out)

    @classmethod
    def constant(cls, c) -> "RegularSeries":
        return cls(as_array(c)[None, :])

    @classmethod
    def identity(cls) -> "RegularSeries":
        """The series ``q``."""
        return cls(np.array([[0.0, 0, 0, 0], [1.0, 0, 0, 0]]))

    @classmethod
    def monomial(cls, n: int, a=1.0) -> "RegularSeries":
        c = np.zeros((n + 1, 4))
        c[n] = as_array(a)
        return cls(c)

    # structure

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def __len__(self) -> int:
        return self.coeffs.shape[0]

    def coefficient(self, n: int) -> Quaternion:
        return Quaternion.from_array(self.coeffs[n])

    def trim(self, tol: float = 0.0) -> "RegularSeries":
        """Drop trailing coefficients with modulus ``<= tol`` (keeps at least ``a_0``)."""
        mods = qnorm(self.coeffs)
        keep = np.nonzero(mods > tol)[0]
        last = int(keep[-1]) if keep.size else 0
        return RegularSeries(self.coeffs[: last + 1])

    def truncate(self, degree: int) -> "RegularSeries":
        if degree >= self.degree:
            return self.pad(degree)
        return RegularSeries(self.coeffs[: degree + 1])

    def pad(self, degree: int) -> "RegularSeries":
        if degree <= self.degree:
            return self
        c = np.zeros((degree + 1, 4))
        c[: self.coeffs.shape[0]] = self.coeffs
        return RegularSeries(c)

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.coeffs[:, 1:]) <= tol * (1.0 + qnorm(self.coeffs))[:, None]))

    def real_coeffs(self) -> np.ndarray:
        return self.coeffs[:, 0].copy()

    def as_complex(self, unit) -> np.ndarray:
        """Complex coefficients ``a + b i`` for coefficients ``a + b I`` in ``L_I``."""
        u = ImaginaryUnit.coerce(unit).array
        return self.coeffs[:, 0] + 1j * (self.coeffs @ u)

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(self.coeffs**2)))

    def coefficient_distance(self, other: "RegularSeries") -> float:
        """Largest coefficient difference after zero-padding to a common degree."""
        n = max(self.degree, other.degree)
        return float(np.max(qnorm(self.pad(n).coeffs - other.pad(n).coeffs)))

    # arithmetic

    def __add__(self, other) -> "RegularSeries":
        other = _coerce_series(other)
        n = max(self.degree, other.degree)
        return RegularSeries(self.pad(n).coeffs + other.pad(n).coeffs)

    __radd__ = __add__

    def __sub__(self, other) -> "RegularSeries":
        other = _coerce_series(other)
        n = max(self.degree, other.degree)
        return RegularSeries(self.pad(n).coeffs - other.pad(n).coeffs)

    def __rsub__(self, other) -> "RegularSeries":
        return _coerce_series(other) - self

    def __neg__(self) -> "RegularSeries":
        return RegularSeries(-self.coeffs)

    def scale(self, s: float) -> "RegularSeries":
        return RegularSeries(self.coeffs * float(s))

    def right_mul(self, c) -> "RegularSeries":
        """``f * c`` for a constant ``c``: coefficients ``a_n c``."""
        return RegularSeries(qmul(self.coeffs, as_array(c)))

    def left_mul(self, c) -> "RegularSeries":
        """``c * f`` for a constant ``c``: coefficients ``c a_n``."""
        return RegularSeries(qmul(as_array(c), self.coeffs))

    def __mul__(self, other) -> "RegularSeries":
        if np.isscalar(other):
            return self.scale(other)
        return star_mul(self, _coerce_series(other))

    def __rmul__(self, other) -> "RegularSeries":
        if np.isscalar(other):
            return self.scale(other)
        return star_mul(_coerce_series(other), self)

    def __call__(self, q):
        return eval_series(self, q)

    def eval(self, q):
        return eval_series(self, q)

    def conj(self) -> "RegularSeries":
        return regular_conjugate(self)

    def __repr__(self) -> str:
        return f"RegularSeries(degree={self.degree})"


def _coerce_series(value) -> RegularSeries:
    if isinstance(value, RegularSeries):
        return value
    return RegularSeries.constant(value)


def slice_components(f: RegularSeries, z):
    """``P(z) = sum z**n a_n`` componentwise for complex ``z``.

    Returns a complex array of shape ``z.shape + (4,)``; for ``q = x + y I``
    and ``z = x + i y`` one has ``f(q) = Re P + I * Im P``.
    """
    z = np.asarray(z, dtype=complex)
    # Horner, highest coefficient first
    c = f.coeffs
    acc = np.zeros(z.shape + (4,), dtype=complex)
    acc += c[-1]
    for n in range(c.shape[0] - 2, -1, -1):
        acc = acc * z[..., None] + c[n]
    return acc


def _combine(P: np.ndarray, units: np.ndarray) -> np.ndarray:
    return P.real + qmul(units, P.imag)


def eval_series(f: RegularSeries, q, warn_radius: float = 1.0):
    """Evaluate ``f(q) = sum q**n a_n``.

    ``q`` may be a single quaternion (returns :class:`Quaternion`) or an array
    of shape ``(..., 4)`` (returns an array).  A :class:`TruncationWarning` is
    emitted for points with ``|q| > warn_radius``.
    """
    scalar = isinstance(q, (Quaternion, ImaginaryUnit)) or np.isscalar(q)
    arr = as_array(q)
    x, y, units = slice_parts(arr)
    if np.any(np.hypot(x, y) > warn_radius + 1e-12):
        warnings.warn(
            f"evaluating a truncated series outside radius {warn_radius}", TruncationWarning, stacklevel=2
        )
    P = slice_components(f, x + 1j * y)
    out = _combine(P, units)
    if scalar or arr.ndim == 1:
        return Quaternion.from_array(out) if scalar else out
    return out


def eval_with_bound(f: RegularSeries, q):
    """Value together with the truncation estimate ``|a_N| |q|**N / (1 - |q|)``.

    The estimate treats ``f`` as the truncation of an infinite series and is
    infinite for ``|q| >= 1``.
    """
    arr = as_array(q)
    value = eval_series(f, arr, warn_radius=np.inf)
    r = qnorm(arr)
    aN = float(qnorm(f.coeffs[-1]))
    with np.errstate(divide="ignore"):
        bound = np.where(r < 1.0, aN * r ** f.degree / np.where(r < 1.0, 1.0 - r, 1.0), np.inf)
    if arr.ndim == 1:
        return Quaternion.from_array(value), float(bound)
    return value, bound


# quaternion convolution: c_n = sum_k a_k b_{n-k}, expanded over the 16
# component pairs of the Hamilton product
_PRODUCT_TABLE = (
    # (component of a, component of b, target component, sign)
    (0, 0, 0, 1), (1, 1, 0, -1), (2, 2, 0, -1), (3, 3, 0, -1),
    (0, 1, 1, 1), (1, 0, 1, 1), (2, 3, 1, 1), (3, 2, 1, -1),
    (0, 2, 2, 1), (2, 0, 2, 1), (3, 1, 2, 1), (1, 3, 2, -1),
    (0, 3, 3, 1), (3, 0, 3, 1), (1, 2, 3, 1), (2, 1, 3, -1),
)  # fmt: skip


def _qconvolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0] - 1, 4))
    for i, j, k, s in _PRODUCT_TABLE:
        if not (a[:, i].any() and b[:, j].any()):
            continue
        out[:, k] += s * np.convolve(a[:, i], b[:, j])
    return out


def star_mul(f: RegularSeries, g: RegularSeries, degree: int | None = None) -> RegularSeries:
    """Regular product ``f * g`` (coefficient convolution).

    The result has degree ``deg f + deg g`` unless ``degree`` truncates it.
    Truncating the factors at ``degree`` beforehand does not change the
    surviving coefficients.
    """
    a, b = f.coeffs, g.coeffs
    if degree is not None:
        a, b = a[: degree + 1], b[: degree + 1]
    c = _qconvolve(a, b)
    if degree is not None:
        if c.shape[0] <= degree:
            c = np.vstack([c, np.zeros((degree + 1 - c.shape[0], 4))])
        c = c[: degree + 1]
    return RegularSeries(c)


def star_product(factors, degree: int | None = None) -> RegularSeries:
    """Left-to-right regular product of a sequence of series."""
    factors = list(factors)
    if not factors:
        return RegularSeries.constant(1.0)
    acc = factors[0] if degree is None else factors[0].truncate(degree)
    for g in factors[1:]:
        acc = star_mul(acc, g, degree)
    return acc


def regular_conjugate(f: RegularSeries) -> RegularSeries:
    return RegularSeries(qconj(f.coeffs))


def symmetrization(f: RegularSeries, tol: float = 1e-9) -> RegularSeries:
    """``f^s = f * f^c = f^c * f``, returned with exactly real coefficients.

    Both orders are computed; an ``ArithmeticError`` signals disagreement
    (or non-real coefficients) beyond ``tol`` relative to ``sum |a_n|**2``.
    """
    fc = regular_conjugate(f)
    left = _qconvolve(f.coeffs, fc.coeffs)
    right = _qconvolve(fc.coeffs, f.coeffs)
    scale = 1.0 + float(np.sum(f.coeffs**2))
    if np.max(np.abs(left - right)) > tol * scale or np.max(np.abs(left[:, 1:])) > tol * scale:
        raise ArithmeticError("symmetrization is not real; coefficients are not finite-precision consistent")
    return RegularSeries.from_real(0.5 * (left[:, 0] + right[:, 0]))


def real_reciprocal(c: np.ndarray, degree: int, tol: float = ORIGIN_TOL) -> np.ndarray:
    """Coefficients of ``1 / sum c_n z**n`` up to ``degree`` (real ``c``)."""
    c = np.asarray(c, dtype=float)
    if abs(c[0]) < tol:
        raise SingularAtOriginError("constant term below tolerance")
    out = np.zeros(degree + 1)
    out[0] = 1.0 / c[0]
    m = c.shape[0]
    for n in range(1, degree + 1):
        k = min(n, m - 1)
        # sum_{j=1..k} c_j out_{n-j}
        out[n] = -np.dot(c[1 : k + 1], out[n - 1 :: -1][:k]) / c[0]
    return out


def real_mul(c: np.ndarray, f: RegularSeries, degree: int | None = None) -> RegularSeries:
    """Product of a real-coefficient series (given by ``c``) with ``f``."""
    c = np.asarray(c, dtype=float)
    cols = [np.convolve(c, f.coeffs[:, m]) for m in range(4)]
    out = np.stack(cols, axis=-1)
    if degree is not None:
        if out.shape[0] <= degree:
            out = np.vstack([out, np.zeros((degree + 1 - out.shape[0], 4))])
        out = out[: degree + 1]
    return RegularSeries(out)


def star_inverse(f: RegularSeries, out_degree: int) -> RegularSeries:
    """Truncation at ``out_degree`` of ``f^{-*} = (f^s)^{-1} f^c``."""
    a0 = float(qnorm(f.coeffs[0]))
    if a0 * a0 < ORIGIN_TOL:
        raise SingularAtOriginError(f"|f(0)| = {a0:.3g}; f^-* has no power series at the origin")
    s = symmetrization(f.truncate(out_degree) if f.degree > out_degree else f)
    recip = real_reciprocal(s.real_coeffs(), out_degree)
    return real_mul(recip, regular_conjugate(f), out_degree)


def divide_real_polynomial(f: RegularSeries, d: np.ndarray):
    """Long division ``f = d * g + r`` by a real polynomial, highest degree first.

    Descending division is the stable direction when the roots of ``d`` lie
    in the closed unit disc.  Returns ``(g, r)`` with ``r`` of degree
    ``< deg d``.
    """
    d = np.trim_zeros(np.asarray(d, dtype=float), "b")
    m = d.shape[0] - 1
    if m == 0:
        return RegularSeries(f.coeffs / d[0]), RegularSeries.constant(0.0)
    work = f.coeffs.copy()
    n = work.shape[0] - 1
    if n < m:
        return RegularSeries.constant(0.0), f
    g = np.zeros((n - m + 1, 4))
    lead = d[-1]
    for k in range(n - m, -1, -1):
        g[k] = work[k + m] / lead
        work[k : k + m + 1] -= np.outer(d, g[k])
    return RegularSeries(g), RegularSeries(work[:m])


@dataclass(frozen=True)
class SlicePreservationInfo:
    preserves_all_slices: bool
    preserved_slice: ImaginaryUnit | None

    def preserves(self, unit) -> bool:
        if self.preserves_all_slices:
            return True
        if self.preserved_slice is None:
            return False
        u = ImaginaryUnit.coerce(unit).vector
        return abs(abs(float(np.dot(u, self.preserved_slice.vector))) - 1.0) < 1e-9


def _canonical_direction(v: np.ndarray) -> np.ndarray:
    idx = int(np.argmax(np.abs(v) > 1e-12))
    return v if v[idx] > 0 else -v


def slice_preservation(f: RegularSeries, tol: float = SPAN_TOL) -> SlicePreservationInfo:
    """Detect real coefficients, or a single slice ``L_I`` containing all coefficients."""
    mods = qnorm(f.coeffs)
    imag = f.coeffs[:, 1:]
    inorm = np.linalg.norm(imag, axis=1)
    if np.all(inorm < tol * (1.0 + mods)):
        return SlicePreservationInfo(True, None)
    u = imag[int(np.argmax(inorm))]
    u = _canonical_direction(u / np.linalg.norm(u))
    resid = imag - np.outer(imag @ u, u)
    if np.all(np.linalg.norm(resid, axis=1) < tol * (1.0 + mods)):
        return SlicePreservationInfo(False, ImaginaryUnit.from_vector(u))
    return SlicePreservationInfo(False, None)
