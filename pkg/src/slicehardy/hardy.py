"""Integral means, Hardy norms, boundary traces and Poisson reconstruction.

Circle samples come from one FFT per radius.  For a series ``f`` and the
trapezoid nodes ``theta_k = -pi + 2 pi k / n`` one has
``P(r e^{i theta_k}) = sum_n a_n r**n (-1)**n w**(n k)`` with ``w = e^{2 pi i/n}``,
which is ``n * ifft`` of the (aliased) weighted coefficients.  On the slice
``L_J`` the value is ``f(r e^{J theta}) = Re P + J Im P``, so

    |f(r e^{J theta})|**2 = A(theta) - 2 <J, V(theta)>,

with ``A = |Re P|**2 + |Im P|**2`` and ``V = Im(Im P * conj(Re P))``.  One FFT
therefore serves every slice at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .quaternion import (
    ImaginaryUnit,
    Quaternion,
    UNIT_I,
    qconj,
    qinv,
    qmul,
    qnorm,
    qnorm2,
    sample_unit_sphere,
)
from .series import RegularSeries, eval_series

__all__ = [
    "QuadratureSpec",
    "HardyNormEstimate",
    "BoundaryTrace",
    "default_r_grid",
    "circle_nodes",
    "circle_values",
    "circle_mean",
    "circle_means",
    "slice_norm",
    "slice_norm_report",
    "hardy_norm",
    "three_sphere_mean",
    "three_sphere_norm",
    "three_sphere_mean_sampled",
    "boundary_trace",
    "poisson_reconstruct",
    "boundary_star_product",
    "trace_lp_norm",
]

MIN_NODES = 1024
MAX_AUTO_NODES = 1 << 16


def default_r_grid(n: int = 20, r_max: float = 0.999) -> np.ndarray:
    """Radii clustering geometrically at 1: ``1 - r_k = 0.5 (2 (1 - r_max))**(k/(n-1))``."""
    if n < 2:
        return np.array([r_max])
    gap = 0.5 * (2.0 * (1.0 - r_max)) ** (np.arange(n) / (n - 1))
    return 1.0 - gap


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature policy.

    Parameters
    ----------
    circle_nodes : int or None
        Trapezoid nodes on ``[-pi, pi)``.  ``None`` picks
        ``max(1024, 4 (N + 1))`` rounded up to a power of two; an explicit
        value below ``2 N + 1`` is raised to ``2 N + 1`` for the series at hand.
    r_grid : sequence of float
        Strictly increasing radii in ``[0, 1)`` used for means, monotonicity
        and divergence diagnostics.
    unit_samples : int
        Units of S sampled before local refinement of the sup over slices.
    seed : int or None
        Rotates the unit lattice; ``None`` keeps it fixed.
    """

    circle_nodes: int | None = None
    r_grid: tuple = field(default_factory=lambda: tuple(default_r_grid()))
    unit_samples: int = 128
    seed: int | None = None

    def __post_init__(self):
        r = np.asarray(self.r_grid, dtype=float)
        if r.ndim != 1 or r.size == 0:
            raise ValueError("r_grid must be a non-empty sequence")
        if np.any(np.diff(r) <= 0):
            raise ValueError("r_grid must be strictly increasing")
        if r[0] < 0 or r[-1] >= 1:
            raise ValueError("r_grid values must lie in [0, 1)")
        if self.circle_nodes is not None and self.circle_nodes < 2:
            raise ValueError("circle_nodes must be at least 2")
        if self.unit_samples < 1:
            raise ValueError("unit_samples must be at least 1")
        object.__setattr__(self, "r_grid", tuple(float(v) for v in r))

    def nodes_for(self, degree: int) -> int:
        need = 2 * degree + 1
        if self.circle_nodes is not None:
            return max(int(self.circle_nodes), need)
        n = max(MIN_NODES, 4 * (degree + 1))
        return min(1 << (n - 1).bit_length(), max(MAX_AUTO_NODES, need))

    def to_dict(self) -> dict:
        return {
            "circle_nodes": self.circle_nodes,
            "r_grid": list(self.r_grid),
            "unit_samples": self.unit_samples,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class HardyNormEstimate:
    """A Hardy (or slice) norm together with its diagnostics.

    ``value`` is the norm of the represented series on the boundary
    (``r_used = 1``).  ``means`` are the integral means along ``r_grid`` for
    the achieved unit, ``monotone`` reports whether they are nondecreasing,
    and ``divergent`` flags growth without plateau (the truncated series
    approximates a function outside ``H^p``).
    """

    p: float
    value: float
    achieved_unit: ImaginaryUnit
    r_used: float
    truncation_error_bound: float
    r_grid: tuple = ()
    means: tuple = ()
    monotone: bool = True
    divergent: bool = False

    def to_dict(self) -> dict:
        return {
            "p": "inf" if math.isinf(self.p) else self.p,
            "value": self.value,
            "achieved_unit": self.achieved_unit.array.tolist(),
            "r_used": self.r_used,
            "truncation_error_bound": self.truncation_error_bound,
            "r_grid": list(self.r_grid),
            "means": list(self.means),
            "monotone": self.monotone,
            "divergent": self.divergent,
        }


@dataclass(frozen=True, eq=False)
class BoundaryTrace:
    """Samples of the radial limit on ``∂B_I`` at trapezoid nodes.

    ``converged[k]`` is false where the radial extrapolation disagrees with
    the boundary value (or where a derived trace is undefined).
    """

    I: ImaginaryUnit
    thetas: np.ndarray
    values: np.ndarray
    converged: np.ndarray

    def __post_init__(self):
        if len(self.thetas) != len(self.values) or len(self.thetas) != len(self.converged):
            raise ValueError("thetas, values and converged must have equal length")

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))

    @property
    def abs(self) -> np.ndarray:
        return qnorm(self.values)

    def __len__(self) -> int:
        return len(self.thetas)


# -- circle sampling ---------------------------------------------------------


def circle_nodes(n: int) -> np.ndarray:
    return -math.pi + 2.0 * math.pi * np.arange(n) / n


def _slice_poly_on_circle(f: RegularSeries, r: float, n: int) -> np.ndarray:
    """Complex ``(n, 4)`` array of ``P(r e^{i theta_k})``."""
    N = f.degree
    k = np.arange(N + 1)
    with np.errstate(under="ignore"):
        w = np.power(float(r), k) * np.where(k % 2 == 0, 1.0, -1.0)
    a = f.coeffs * w[:, None]
    if N + 1 > n:
        pad = (-(N + 1)) % n
        a = np.vstack([a, np.zeros((pad, 4))]).reshape(-1, n, 4).sum(axis=0)
    else:
        a = np.vstack([a, np.zeros((n - N - 1, 4))])
    return n * np.fft.ifft(a, axis=0)


def _affine_data(P: np.ndarray):
    b, c = P.real, P.imag
    A = qnorm2(b) + qnorm2(c)
    V = qmul(c, qconj(b))[..., 1:]
    return A, V


def circle_values(f: RegularSeries, I=UNIT_I, r: float = 1.0, n: int | None = None):
    """``(thetas, values)`` of ``f(r e^{I theta})`` on ``n`` trapezoid nodes."""
    I = ImaginaryUnit.coerce(I)
    if n is None:
        n = QuadratureSpec().nodes_for(f.degree)
    P = _slice_poly_on_circle(f, r, n)
    return circle_nodes(n), P.real + qmul(I.array, P.imag)


def _abs2_on_slice(A, V, unit_vec):
    return np.clip(A - 2.0 * (V @ unit_vec), 0.0, None)


def _mean_from_abs2(m2: np.ndarray, p: float) -> float:
    if math.isinf(p):
        return float(np.sqrt(m2.max()))
    return float(np.mean(m2 ** (0.5 * p)) ** (1.0 / p))


def circle_mean(f: RegularSeries, I=UNIT_I, r: float = 0.999, p: float = 2.0, spec: QuadratureSpec | None = None) -> float:
    """Integral mean ``M_p(f_I, r)`` by the trapezoid rule (max for ``p = inf``)."""
    _check_p(p)
    spec = spec or QuadratureSpec()
    n = spec.nodes_for(f.degree)
    A, V = _affine_data(_slice_poly_on_circle(f, r, n))
    return _mean_from_abs2(_abs2_on_slice(A, V, ImaginaryUnit.coerce(I).vector), p)


def circle_means(f: RegularSeries, I=UNIT_I, p: float = 2.0, spec: QuadratureSpec | None = None, radii=None) -> np.ndarray:
    """``M_p(f_I, r)`` for every radius of ``radii`` (default ``spec.r_grid``)."""
    spec = spec or QuadratureSpec()
    radii = spec.r_grid if radii is None else radii
    return np.array([circle_mean(f, I, r, p, spec) for r in radii])


def _check_p(p):
    if not (p > 0):
        raise ValueError(f"exponent p must be positive, got {p}")


# -- divergence diagnostics --------------------------------------------------


def _coefficient_growth(f: RegularSeries) -> float:
    """Least-squares slope of ``log |a_n|`` over the upper half of the coefficients."""
    mods = qnorm(f.coeffs)
    N = f.degree
    if N < 32:
        return -np.inf
    idx = np.arange(N // 2, N + 1)
    m = mods[idx]
    keep = m > 1e-300
    if keep.sum() < 8:
        return -np.inf
    return float(np.polyfit(idx[keep], np.log(m[keep]), 1)[0])


def _divergence_flag(f: RegularSeries, radii, means) -> bool:
    means = np.asarray(means, dtype=float)
    radii = np.asarray(radii, dtype=float)
    if _coefficient_growth(f) > math.log(1.01):
        return True
    if means.size < 3 or means[-2] <= 0:
        return False
    if means[-1] / means[-2] <= 1.0 + 1e-3:
        return False
    h = 1.0 - radii[-3:]
    d1, d2 = means[-2] - means[-3], means[-1] - means[-2]
    if d1 <= 0:
        return bool(d2 > 0)
    # approaching a finite limit linearly in 1 - r, the increments shrink like
    # the radial gaps; halfway between that and constant increments is the cut
    return bool(d2 / d1 > 0.5 * (1.0 + (h[1] - h[2]) / (h[0] - h[1])))


def _tail_bound(f: RegularSeries, r: float) -> float:
    aN = float(qnorm(f.coeffs[-1]))
    if r >= 1.0:
        return math.inf
    return aN * r**f.degree / (1.0 - r)


def _is_monotone(means, tol: float = 1e-12) -> bool:
    means = np.asarray(means)
    return bool(np.all(np.diff(means) >= -tol * np.maximum(1.0, np.abs(means[1:]))))


# -- slice and global norms --------------------------------------------------


def slice_norm_report(f: RegularSeries, I=UNIT_I, p: float = 2.0, spec: QuadratureSpec | None = None) -> HardyNormEstimate:
    """``||f_I||_p`` with monotonicity, divergence and truncation diagnostics.

    The value is the boundary mean of the represented series, which is the
    limit of the nondecreasing means for a polynomial.  The means along
    ``r_grid`` are reported for the diagnostics.
    """
    _check_p(p)
    spec = spec or QuadratureSpec()
    I = ImaginaryUnit.coerce(I)
    means = circle_means(f, I, p, spec)
    value = circle_mean(f, I, 1.0, p, spec)
    return HardyNormEstimate(
        p=float(p),
        value=value,
        achieved_unit=I,
        r_used=1.0,
        truncation_error_bound=_tail_bound(f, spec.r_grid[-1]),
        r_grid=spec.r_grid,
        means=tuple(float(m) for m in means),
        monotone=_is_monotone(means),
        divergent=_divergence_flag(f, spec.r_grid, means),
    )


def slice_norm(f: RegularSeries, I=UNIT_I, p: float = 2.0, spec: QuadratureSpec | None = None) -> float:
    return slice_norm_report(f, I, p, spec).value


def _angles_to_vec(t):
    th, ph = t
    return np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])


def _vec_to_angles(v):
    return np.array([math.acos(max(-1.0, min(1.0, v[2]))), math.atan2(v[1], v[0])])


def _sup_over_units(objective, spec: QuadratureSpec):
    """Maximise ``objective(unit_vector)`` over S: sampled lattice plus Nelder-Mead."""
    units = sample_unit_sphere(spec.unit_samples, seed=spec.seed)[:, 1:]
    vals = np.array([objective(u) for u in units])
    order = np.argsort(vals)[::-1]
    best_val, best_vec = float(vals[order[0]]), units[order[0]]
    if np.ptp(vals) <= 1e-15 * max(1.0, abs(best_val)):
        return best_val, best_vec
    for idx in order[:3]:
        res = optimize.minimize(
            lambda t: -objective(_angles_to_vec(t)),
            _vec_to_angles(units[idx]),
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-15, "maxiter": 400},
        )
        if -res.fun > best_val:
            best_val, best_vec = float(-res.fun), _angles_to_vec(res.x)
    return best_val, best_vec


def hardy_norm(f: RegularSeries, p: float = 2.0, spec: QuadratureSpec | None = None) -> HardyNormEstimate:
    """``||f||_p = sup_I ||f_I||_p``; ``p = inf`` gives ``sup_B |f|``.

    For finite ``p`` the supremum over S is taken over ``spec.unit_samples``
    lattice units refined by Nelder-Mead (a lower bound that is sharp for
    smooth integrands).  For ``p = inf`` the maximum over each boundary
    sphere is exact (closed form) and only the angle is searched.
    """
    _check_p(p)
    spec = spec or QuadratureSpec()
    n = spec.nodes_for(f.degree)
    A, V = _affine_data(_slice_poly_on_circle(f, 1.0, n))

    if math.isinf(p):
        value, vec = _sup_modulus(f, A, V, n)
    else:
        s = 0.5 * p

        def objective(u):
            return float(np.mean(_abs2_on_slice(A, V, u) ** s))

        best, vec = _sup_over_units(objective, spec)
        value = best ** (1.0 / p)
    unit = ImaginaryUnit.from_vector(vec)
    if math.isinf(p):
        means = np.array([_sphere_sup_at_radius(f, r, n) for r in spec.r_grid])
    else:
        means = circle_means(f, unit, p, spec)
    return HardyNormEstimate(
        p=float(p),
        value=float(value),
        achieved_unit=unit,
        r_used=1.0,
        truncation_error_bound=_tail_bound(f, spec.r_grid[-1]),
        r_grid=spec.r_grid,
        means=tuple(float(m) for m in means),
        monotone=_is_monotone(means),
        divergent=_divergence_flag(f, spec.r_grid, means),
    )


def _sphere_sup_at_radius(f, r, n):
    A, V = _affine_data(_slice_poly_on_circle(f, r, n))
    return float(np.sqrt(np.max(A + 2.0 * np.linalg.norm(V, axis=-1))))


def _sup_modulus(f: RegularSeries, A, V, n):
    """Max of ``|f|`` on the boundary spheres, refined in the angle."""
    w = np.linalg.norm(V, axis=-1)
    m2 = A + 2.0 * w
    k = int(np.argmax(m2))
    thetas = circle_nodes(n)
    h = 2.0 * math.pi / n

    def neg(theta):
        z = np.exp(1j * theta)
        Pz = _poly_at(f, z)
        a, v = _affine_data(Pz)
        return -float(a + 2.0 * np.linalg.norm(v))

    res = optimize.minimize_scalar(neg, bounds=(thetas[k] - h, thetas[k] + h), method="bounded", options={"xatol": 1e-12})
    best2, theta = (-res.fun, res.x) if -res.fun > m2[k] else (m2[k], thetas[k])
    a, v = _affine_data(_poly_at(f, np.exp(1j * theta)))
    nv = np.linalg.norm(v)
    vec = -v / nv if nv > 1e-15 else np.array([1.0, 0.0, 0.0])
    return math.sqrt(max(best2, 0.0)), vec


def _poly_at(f: RegularSeries, z: complex) -> np.ndarray:
    from .series import slice_components

    return slice_components(f, np.asarray(z))


# -- three-sphere mean -------------------------------------------------------


def _sphere_average_power(A, w, s):
    """Average of ``(A - 2 w t)**s`` for ``t`` uniform on ``[-1, 1]``.

    ``J . V`` is uniform on ``[-|V|, |V|]`` when ``J`` is uniform on S.
    """
    A = np.asarray(A, dtype=float)
    w = np.asarray(w, dtype=float)
    small = w <= 1e-12 * np.maximum(A, 1e-300)
    hi = np.clip(A + 2.0 * w, 0.0, None)
    lo = np.clip(A - 2.0 * w, 0.0, None)
    safe_w = np.where(small, 1.0, w)
    with np.errstate(invalid="ignore", divide="ignore"):
        exact = (hi ** (s + 1) - lo ** (s + 1)) / (4.0 * safe_w * (s + 1))
    return np.where(small, np.clip(A, 0.0, None) ** s, exact)


def three_sphere_mean(f: RegularSeries, r: float, p: float = 2.0, n: int | None = None) -> float:
    """``N_p(f, r)``: the ``L^p`` mean of ``f`` over the 3-sphere ``|q| = r``.

    With ``q = r e^{J theta}`` the normalised hypersurface measure is
    ``sin(theta)**2 d theta dsigma(J) / pi`` on ``[-pi, pi) x S`` (the
    double cover is harmless), and the average over ``J`` has the closed
    form of :func:`_sphere_average_power`.  ``r = 1`` gives the boundary
    value of the represented series.
    """
    _check_p(p)
    if not 0.0 <= r <= 1.0:
        raise ValueError("radius must lie in [0, 1]")
    n = n or QuadratureSpec().nodes_for(f.degree + 1)
    A, V = _affine_data(_slice_poly_on_circle(f, r, n))
    w = np.linalg.norm(V, axis=-1)
    weight = np.sin(circle_nodes(n)) ** 2
    if math.isinf(p):
        return float(np.sqrt(np.max(A + 2.0 * w)))
    avg = _sphere_average_power(A, w, 0.5 * p)
    return float((2.0 * np.mean(weight * avg)) ** (1.0 / p))


def three_sphere_norm(f: RegularSeries, p: float = 2.0, n: int | None = None) -> float:
    return three_sphere_mean(f, 1.0, p, n)


def three_sphere_mean_sampled(f: RegularSeries, r: float, p: float = 2.0, n_theta: int = 256, n_units: int = 400) -> float:
    """Plain product quadrature over angles and lattice units (cross-check)."""
    thetas = circle_nodes(n_theta)
    units = sample_unit_sphere(n_units + 6)[6:, 1:]
    A, V = _affine_data(_slice_poly_on_circle(f, r, n_theta))
    m2 = np.clip(A[:, None] - 2.0 * V @ units.T, 0.0, None)
    vals = m2 ** (0.5 * p)
    return float((2.0 * np.mean(np.sin(thetas)[:, None] ** 2 * vals)) ** (1.0 / p))


# -- boundary traces ---------------------------------------------------------


def boundary_trace(f: RegularSeries, I=UNIT_I, spec: QuadratureSpec | None = None, tol: float = 1e-6) -> BoundaryTrace:
    """Radial limits ``f~(e^{I theta})`` at the trapezoid nodes.

    The values are boundary values of the represented series.  Each node is
    checked by quadratic extrapolation in ``1 - r`` from the last three radii
    of ``r_grid``; nodes where the extrapolation misses the boundary value by
    more than ``tol * (1 + |value|)`` are marked non-converged.
    """
    spec = spec or QuadratureSpec()
    I = ImaginaryUnit.coerce(I)
    n = spec.nodes_for(f.degree)
    thetas, values = circle_values(f, I, 1.0, n)
    radii = np.asarray(spec.r_grid[-3:])
    if radii.size < 3:
        converged = np.ones(n, dtype=bool)
    else:
        samples = np.stack([circle_values(f, I, r, n)[1] for r in radii])
        h = 1.0 - radii
        # Lagrange weights for evaluating the interpolant at h = 0
        wts = np.array([np.prod([-h[m] / (h[j] - h[m]) for m in range(3) if m != j]) for j in range(3)])
        extrap = np.tensordot(wts, samples, axes=1)
        err = qnorm(extrap - values)
        converged = err <= tol * (1.0 + qnorm(values))
    return BoundaryTrace(I, thetas, values, converged)


def trace_lp_norm(trace: BoundaryTrace, p: float = 2.0) -> float:
    """``||f~_I||_{L^p}`` of a sampled trace (trapezoid rule)."""
    _check_p(p)
    return _mean_from_abs2(qnorm2(trace.values), p)


def poisson_reconstruct(trace: BoundaryTrace, r: float, theta: float) -> Quaternion:
    """Poisson integral of the trace at ``r e^{I theta}``.

    The samples are replaced by their trigonometric interpolant, whose
    Poisson integral is ``sum_k c_k r**|k| e^{i k theta}``.  The kernel is
    real, so the slice-valued data integrate componentwise.  The result is
    exact for traces of polynomials of degree below ``n / 2``.
    """
    if not 0.0 <= r < 1.0:
        raise ValueError("radius must lie in [0, 1)")
    n = len(trace)
    k = np.fft.fftfreq(n, 1.0 / n)
    c = np.fft.fft(trace.values, axis=0) / n
    t = theta - trace.thetas[0]
    terms = r ** np.abs(k) * np.exp(1j * k * t)
    if n % 2 == 0:
        # the Nyquist mode of a real interpolant is a cosine
        terms[n // 2] = r ** (n // 2) * math.cos(0.5 * n * t)
    out = np.real(terms @ c)
    return Quaternion.from_array(out)


def boundary_star_product(
    tf: BoundaryTrace,
    tg: BoundaryTrace,
    f: RegularSeries | None = None,
    g: RegularSeries | None = None,
    tol: float = 1e-12,
) -> BoundaryTrace:
    """Trace of ``f * g`` from traces of ``f`` and ``g``.

    At each node ``(f*g)~ = f~ * g~(f~^{-1} e^{I theta} f~)``.  The argument lies
    on the same boundary circle but on the slice of ``J = f~^{-1} I f~``; its
    value comes from ``g~(e^{±I theta})`` via the representation formula
    (nodes are symmetric under ``theta -> -theta``).  When ``tg`` lacks the
    mirrored node, ``g`` is evaluated directly.  Nodes where ``f~`` vanishes
    are returned as NaN with ``converged = False``.
    """
    if tf.I != tg.I or len(tf) != len(tg) or not np.allclose(tf.thetas, tg.thetas, atol=1e-14):
        raise ValueError("traces must share the slice and the nodes")
    n = len(tf)
    u = tf.I.array
    idx = np.rint((np.pi - tg.thetas) * n / (2 * np.pi)) % n
    mirror = idx.astype(int)
    mirrored_ok = np.allclose(np.angle(np.exp(1j * (tg.thetas[mirror] + tg.thetas))), 0.0, atol=1e-12)
    if mirrored_ok:
        g_minus = tg.values[mirror]
    elif g is not None:
        g_minus = eval_series(g, np.cos(tg.thetas)[:, None] * np.array([1.0, 0, 0, 0]) - np.sin(tg.thetas)[:, None] * u, warn_radius=np.inf)
    else:
        raise ValueError("trace nodes are not symmetric; pass g for direct evaluation")
    fv = tf.values
    ok = qnorm(fv) > tol
    fv_safe = np.where(ok[:, None], fv, np.array([1.0, 0, 0, 0]))
    Jq = qmul(qinv(fv_safe), qmul(u, fv_safe))
    JI = qmul(Jq, u)
    gJ = 0.5 * (tg.values + g_minus) + 0.5 * qmul(JI, g_minus - tg.values)
    values = qmul(fv_safe, gJ)
    values[~ok] = np.nan
    return BoundaryTrace(tf.I, tf.thetas.copy(), values, ok & tf.converged & tg.converged)
