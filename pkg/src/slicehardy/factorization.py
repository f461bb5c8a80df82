"""Zero extraction ``f = h * g`` and the outer/inner split on a preserved slice.

Zero extraction
    Spherical zeros are removed by real division (``M^s_a`` is the real
    rational ``Q_a / D_a``), real zeros likewise.  The remaining isolated
    zeros are made spherical one at a time: with ``F`` the current product
    ``f_beta * M_{gamma_0} * ...`` and ``G = F / (spheres already formed)``,
    the isolated zero ``p`` of ``G`` on the next sphere gives
    ``gamma = G(conj p)^{-1} conj(p) G(conj p)``.  Afterwards ``F`` vanishes
    only on whole spheres, ``h = F / prod M^s`` has no zeros and
    ``f = h * g`` with ``g`` the spherical/real factors followed by the point
    factors with centers ``conj(gamma)`` in reverse order.

Outer factor
    On ``L_I`` the function is a complex polynomial ``F``.  Boundary roots are
    split off as exact factors; for the rest, ``log E = c_0 + 2 sum c_k z**k``
    with ``c_k`` the Fourier coefficients of ``log|F|`` on the circle.
    ``E`` is sampled on an interior circle of radius ``rho`` and its Taylor
    coefficients recovered by FFT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .blaschke import BlaschkeProduct, PointFactor, SphericalFactor, default_truncation
from .hardy import QuadratureSpec, hardy_norm
from .quaternion import ImaginaryUnit, Quaternion, UNIT_I, qinv, qmul, qnorm
from .series import (
    RegularSeries,
    SingularAtOriginError,
    divide_real_polynomial,
    eval_series,
    real_mul,
    slice_preservation,
    star_inverse,
    star_mul,
)
from .slices import affine_arrays
from .zeros import IsolatedZero, SphericalZero, UnclassifiedZero, find_zeros, sphere_polynomial

__all__ = [
    "ZeroClassificationError",
    "NotSlicePreservingError",
    "QuadratureError",
    "ZeroExtraction",
    "OuterInnerSplit",
    "Certificate",
    "extract_zeros",
    "outer_factor_on_slice",
    "outer_inner_split",
    "outer_certificate",
    "interior_samples",
]


class ZeroClassificationError(ArithmeticError):
    pass


class NotSlicePreservingError(ValueError):
    pass


class QuadratureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Certificate:
    name: str
    passed: bool
    value: float
    tolerance: float

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "value": self.value, "tolerance": self.tolerance}


@dataclass(eq=False)
class ZeroExtraction:
    """``f = h * g`` with ``h`` zero-free in ``B`` and ``g`` a Blaschke product."""

    h: RegularSeries
    g: BlaschkeProduct
    residual: float
    zeros: list = field(default_factory=list)

    def reconstruct(self) -> RegularSeries:
        return star_mul(self.h, self.g.series, self.h.degree)


@dataclass(eq=False)
class OuterInnerSplit:
    """``f = E * Inner`` and ``Inner = S * B`` with certificates."""

    E: RegularSeries
    Inner: RegularSeries
    S: RegularSeries
    B: BlaschkeProduct
    unit: ImaginaryUnit
    certificates: list = field(default_factory=list)
    residual: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.certificates)

    def certificate(self, name: str) -> Certificate:
        for c in self.certificates:
            if c.name == name:
                return c
        raise KeyError(name)


# -- zero extraction ---------------------------------------------------------


def _real_poly_product(polys) -> np.ndarray:
    out = np.array([1.0])
    for p in polys:
        out = np.convolve(out, p)
    return out


def _relative_coefficient_error(a: RegularSeries, b: RegularSeries) -> float:
    scale = max(float(np.max(qnorm(b.coeffs))), 1e-300)
    return a.coefficient_distance(b) / scale


def _divide_exact(F: RegularSeries, d: np.ndarray, what: str) -> RegularSeries:
    g, r = divide_real_polynomial(F, d)
    scale = float(np.max(qnorm(F.coeffs)))
    if float(np.max(qnorm(r.coeffs))) > 1e-6 * max(scale, 1e-300):
        raise ZeroClassificationError(f"{what} does not divide the function (remainder {np.max(qnorm(r.coeffs)):.3g})")
    return g


def _isolated_point_on_sphere(G: RegularSeries, x: float, y: float) -> np.ndarray:
    b, c = affine_arrays(G, x, y)
    J = -qmul(b, qinv(c))
    v = J[1:] / np.linalg.norm(J[1:])
    return np.concatenate([[x], y * v])


def extract_zeros(f: RegularSeries, truncation: int | None = None, zeros=None) -> ZeroExtraction:
    """Factor ``f = h * g`` with ``h`` zero-free in ``B`` and ``g`` a Blaschke product.

    Parameters
    ----------
    f : RegularSeries
    truncation : int, optional
        Degree of the series for ``h`` and ``g``; defaults to a geometric-tail
        choice from the largest zero modulus.
    zeros : list of zero records, optional
        Interior zeros of ``f`` if already known; otherwise :func:`find_zeros`.

    Raises
    ------
    ZeroClassificationError
        For unclassified zeros or when the spherical division fails.
    """
    if zeros is None:
        zeros = find_zeros(f, include_boundary=False)
    zeros = [z for z in zeros if not z.on_boundary]
    bad = [z for z in zeros if isinstance(z, UnclassifiedZero)]
    if bad:
        raise ZeroClassificationError(f"unclassified zeros: {[b.to_dict() for b in bad]}")
    if not zeros:
        return ZeroExtraction(f, BlaschkeProduct([], truncation or f.degree), 0.0, [])

    radius = max(float(np.hypot(z.x, z.y)) for z in zeros)
    count = sum(z.multiplicity for z in zeros)
    T = truncation or max(f.degree, default_truncation(radius, count, tol=1e-13))

    spheres = [z for z in zeros if isinstance(z, SphericalZero)]
    reals = [z for z in zeros if isinstance(z, IsolatedZero) and z.y == 0.0]
    points = [z for z in zeros if isinstance(z, IsolatedZero) and z.y > 0.0]

    # slice-preserving part: spherical and real zeros, divided out as real rationals
    nums, dens, g_factors = [], [], []
    for z in spheres:
        m = z.multiplicity // 2
        a = Quaternion(z.x, z.y)
        nums += [sphere_polynomial(z.x, z.y)] * m
        r2 = z.x**2 + z.y**2
        dens += [np.array([1.0, -2.0 * z.x, r2])] * m
        g_factors.append(SphericalFactor(a, m))
    for z in reals:
        x = z.x
        k = z.multiplicity
        if x == 0.0:
            nums += [np.array([0.0, 1.0])] * k
        else:
            # M_x = sign(x) (x - q) / (1 - x q)
            nums += [np.sign(x) * np.array([x, -1.0])] * k
            dens += [np.array([1.0, -x])] * k
        g_factors.append(PointFactor(Quaternion(x), k))
    F = real_mul(_real_poly_product(dens), f)
    F = _divide_exact(F, _real_poly_product(nums), "the spherical/real part")

    # isolated non-real zeros: make each sphere spherical by right multiplication
    formed: dict[tuple, int] = {}
    gammas = []
    sphere_nums, sphere_dens = [], []
    F = F.pad(T)
    for z in points:
        x, y = z.x, z.y
        key = (round(x, 9), round(y, 9))
        Q = sphere_polynomial(x, y)
        for _ in range(z.multiplicity):
            k = formed.get(key, 0)
            G = _divide_exact(F, _real_poly_product([Q] * k), "a formed sphere") if k else F
            p = _isolated_point_on_sphere(G, x, y)
            pc = p * np.array([1.0, -1.0, -1.0, -1.0])
            v = eval_series(G, pc, warn_radius=np.inf)
            if float(qnorm(v)) < 1e-12 * float(np.sum(qnorm(G.coeffs))):
                raise ZeroClassificationError(f"function vanishes at the conjugate point {pc.tolist()}")
            gamma = qmul(qmul(qinv(v), pc), v)
            gammas.append(gamma)
            F = star_mul(F, PointFactor(Quaternion.from_array(gamma)).series(T), T)
            formed[key] = k + 1
            sphere_nums.append(Q)
            sphere_dens.append(np.array([1.0, -2.0 * x, x * x + y * y]))
    if sphere_nums:
        F = real_mul(_real_poly_product(sphere_dens), F)
        F = _divide_exact(F, _real_poly_product(sphere_nums), "the symmetrised isolated part")
    h = F.truncate(T)
    g_factors += [PointFactor(Quaternion.from_array(gm).conj()) for gm in reversed(gammas)]
    g = BlaschkeProduct(g_factors, T)
    recon = star_mul(h, g.series, T)
    residual = _relative_coefficient_error(recon, f.pad(T))
    return ZeroExtraction(h, g, residual, list(zeros))


# -- outer factor ------------------------------------------------------------


def _check_slice(f: RegularSeries, I) -> ImaginaryUnit:
    I = ImaginaryUnit.coerce(I)
    if not slice_preservation(f).preserves(I):
        raise NotSlicePreservingError(f"coefficients do not lie in the slice of {I!r}")
    return I


def _boundary_roots(c: np.ndarray, tol: float = 1e-8):
    """Split ``F`` (ascending complex coefficients) into roots on the circle and the rest."""
    c = np.trim_zeros(c, "b")
    if c.size <= 1:
        return c, np.array([], dtype=complex)
    roots = np.roots(c[::-1])
    on = roots[np.abs(np.abs(roots) - 1.0) < tol]
    rest = c[::-1]
    for z in on:
        z = z / abs(z)
        rest, _ = np.polydiv(rest, np.array([1.0, -z]))
    return rest[::-1], on / np.abs(on)


def outer_factor_on_slice(f: RegularSeries, I=UNIT_I, spec: QuadratureSpec | None = None, nodes: int = 8192) -> RegularSeries:
    """Outer factor ``E`` of ``f`` on the preserved slice ``L_I``, extended to ``B``.

    ``E`` has coefficients in ``L_I``, ``|E~| = |f~|`` on the circle and
    ``E(0) > 0``.  ``log|f~|`` is sampled at ``max(nodes, spec.circle_nodes)``
    points (at least ``4 (deg f + 1)``).

    Raises
    ------
    NotSlicePreservingError
        If the coefficients of ``f`` do not lie in ``L_I``.
    QuadratureError
        If ``log|f~|`` cannot be sampled (nodes at which ``|f~|`` is below
        ``1e-13`` persist after one refinement).
    """
    I = _check_slice(f, I)
    c = f.as_complex(I)
    c = c[: int(np.max(np.nonzero(np.abs(c) > 0)[0], initial=0)) + 1]
    N = c.size - 1
    if N == 0:
        return RegularSeries.from_complex([abs(c[0])], I)
    core, on_circle = _boundary_roots(c)
    M = core.size - 1
    if spec is not None and spec.circle_nodes:
        nodes = max(nodes, spec.circle_nodes)
    n = max(nodes, 1 << (4 * (N + 1) - 1).bit_length())
    scale = float(np.max(np.abs(core)))
    for _ in range(2):
        # F at the nodes e^{i theta_j}, theta_j = 2 pi j / n
        mod = np.abs(n * np.fft.ifft(np.concatenate([core, np.zeros(n - core.size)])))
        if np.all(mod > 1e-13 * scale):
            break
        n *= 2
    else:
        raise QuadratureError("|f| vanishes at quadrature nodes after refinement; log|f| is not integrable at this resolution")
    ck = np.fft.fft(np.log(mod)) / n
    d = np.zeros(n, dtype=complex)
    d[0] = ck[0].real
    d[1 : n // 2] = 2.0 * ck[1 : n // 2]
    rho = max(0.9, 1e-6 ** (1.0 / max(M, 1)))
    with np.errstate(under="ignore"):
        d *= rho ** np.arange(n)
    E_vals = np.exp(n * np.fft.ifft(d))
    e = np.fft.fft(E_vals)[: M + 1] / n / rho ** np.arange(M + 1)
    # boundary roots are outer factors themselves
    for z in on_circle:
        e = np.convolve(e, np.array([-z, 1.0]))
    e = e * np.exp(-1j * np.angle(e[0]))
    return RegularSeries.from_complex(e, I)


def interior_samples(n: int, rng: np.random.Generator, radius: float = 1.0) -> np.ndarray:
    """``n`` points uniformly distributed in the ball of the given radius."""
    v = rng.standard_normal((n, 4))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * (radius * rng.random(n) ** 0.25)[:, None]


def outer_inner_split(
    f: RegularSeries,
    I=UNIT_I,
    truncation: int | None = None,
    spec: QuadratureSpec | None = None,
    seed: int = 0,
    n_interior: int = 1000,
    n_boundary: int = 512,
) -> OuterInnerSplit:
    """``f = E * S * B`` for a function preserving the slice ``L_I``.

    Certificates (name, tolerance):

    - ``reconstruction`` E*S*B vs f, relative coefficient error, 1e-6
    - ``inner_interior`` max |Inner| - 1 at interior samples, 1e-6
    - ``inner_boundary`` max ||Inner~| - 1| at boundary nodes, 1e-5
    - ``outer_domination`` max(|f| - |E|) at interior samples, 1e-8
    - ``boundary_modulus`` max ||E~| - |f~|| at boundary nodes, 1e-5
    - ``norm_preservation`` relative gap of ``||E||_2`` and ``||f||_2``, 1e-5
    - ``outer_zero_free`` / ``singular_zero_free`` interior zero counts, 0
    """
    spec = spec or QuadratureSpec()
    I = _check_slice(f, I)
    E = outer_factor_on_slice(f, I, spec)
    zeros = find_zeros(f, include_boundary=False)
    c = f.as_complex(I)
    roots = np.roots(np.trim_zeros(c, "b")[::-1]) if np.count_nonzero(c) > 1 else np.array([])
    inside = np.abs(roots)[np.abs(roots) < 1.0 - 1e-8]
    outside = np.abs(roots)[np.abs(roots) > 1.0 + 1e-8]
    rate = max(np.max(inside, initial=0.0), np.max(1.0 / outside, initial=0.0))
    T = truncation or max(64, f.degree, default_truncation(min(rate, 0.999), 2, tol=1e-11))

    Inner = star_mul(star_inverse(E, T), f, T)
    ext = extract_zeros(Inner, T, zeros=zeros)
    S, B = ext.h, ext.g

    rng = np.random.default_rng(seed)
    pts = interior_samples(n_interior, rng, 0.999)
    certs = []
    recon = star_mul(E, star_mul(S, B.series, T), T)
    certs.append(Certificate("reconstruction", None, _relative_coefficient_error(recon, f.pad(T)), 1e-6))
    inner_vals = qnorm(eval_series(Inner, pts, warn_radius=np.inf))
    certs.append(Certificate("inner_interior", None, float(np.max(inner_vals) - 1.0), 1e-6))
    inner_trace = _trace_abs(Inner, I, n_boundary)
    certs.append(Certificate("inner_boundary", None, float(np.max(np.abs(inner_trace - 1.0))), 1e-5))
    dom = qnorm(eval_series(f, pts, warn_radius=np.inf)) - qnorm(eval_series(E, pts, warn_radius=np.inf))
    certs.append(Certificate("outer_domination", None, float(np.max(dom)), 1e-8))
    gap = np.abs(_trace_abs(E, I, n_boundary) - _trace_abs(f, I, n_boundary))
    certs.append(Certificate("boundary_modulus", None, float(np.max(gap)), 1e-5))
    nf = f.l2_norm()
    certs.append(Certificate("norm_preservation", None, abs(E.l2_norm() - nf) / nf, 1e-5))
    certs.append(Certificate("outer_zero_free", None, float(len(find_zeros(E, include_boundary=False))), 0.0))
    certs.append(Certificate("singular_zero_free", None, float(len(find_zeros(S.trim(1e-13 * float(np.max(qnorm(S.coeffs)))), include_boundary=False))), 0.0))
    certs = [Certificate(c.name, bool(c.value <= c.tolerance), c.value, c.tolerance) for c in certs]
    return OuterInnerSplit(E, Inner, S, B, I, certs, certs[0].value)


def _trace_abs(f: RegularSeries, I, n: int) -> np.ndarray:
    thetas = -math.pi + 2.0 * math.pi * np.arange(n) / n
    u = ImaginaryUnit.coerce(I).array
    pts = np.cos(thetas)[:, None] * np.array([1.0, 0, 0, 0]) + np.sin(thetas)[:, None] * u
    return qnorm(eval_series(f, pts, warn_radius=np.inf))


def outer_certificate(f: RegularSeries, p: float = 2.0, spec: QuadratureSpec | None = None, truncation: int = 256) -> dict:
    """Sufficient test for outerness: ``f`` zero-free and ``f^{-*}`` in ``H^{p'}``.

    ``p'`` is the conjugate exponent (``1/p + 1/p' = 1``).  Returns a report
    with ``passed`` and the evidence gathered.
    """
    if not 1.0 <= p <= math.inf:
        raise ValueError("p must lie in [1, inf]")
    spec = spec or QuadratureSpec()
    q = math.inf if p == 1.0 else (1.0 if math.isinf(p) else p / (p - 1.0))
    zeros = find_zeros(f, include_boundary=False)
    report = {
        "p": "inf" if math.isinf(p) else p,
        "conjugate_exponent": "inf" if math.isinf(q) else q,
        "interior_zeros": [z.to_dict() for z in zeros],
        "nonvanishing": not zeros,
    }
    try:
        inv = star_inverse(f, truncation)
    except SingularAtOriginError as exc:
        report.update(inverse_norm=None, inverse_divergent=True, reason=str(exc), passed=False)
        return report
    est = hardy_norm(inv, q, spec)
    report.update(inverse_norm=est.value, inverse_divergent=est.divergent)
    report["passed"] = bool(report["nonvanishing"] and not est.divergent)
    return report
