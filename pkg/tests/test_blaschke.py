import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_zero_point
from slicehardy.blaschke import (
    BlaschkeProduct,
    CenterOnBoundaryError,
    InvalidZeroSequenceError,
    PointFactor,
    SphericalFactor,
    blaschke_condition,
    blaschke_factor,
    chain_eval,
    default_truncation,
    finite_blaschke,
    prescribed_zero_blaschke,
    spherical_factor,
)
from slicehardy.quaternion import I, J, Quaternion, UNIT_I, UNIT_J, UNIT_K, qconj, qmul, qnorm
from slicehardy.series import RegularSeries, eval_series, star_mul
from slicehardy.zeros import IsolatedZero, SphericalZero, find_zeros


def boundary_points(unit, n=512):
    t = -math.pi + 2 * math.pi * np.arange(n) / n
    return np.cos(t)[:, None] * [1, 0, 0, 0] + np.sin(t)[:, None] * unit.array


def test_factor_at_origin_is_identity():
    assert np.allclose(blaschke_factor(Quaternion(0.0), 8).coeffs, RegularSeries.identity().pad(8).coeffs)


def test_factor_at_one_half():
    # (1/2 - q) / (1 - q/2) = 1/2 - 3 sum_{n>=1} q^n / 2^(n+1)
    M = blaschke_factor(Quaternion(0.5), 30)
    expected = np.r_[0.5, -3.0 / 2.0 ** (np.arange(1, 31) + 1)]
    assert M.is_real()
    assert np.allclose(M.real_coeffs(), expected, atol=1e-15)
    assert qnorm(eval_series(M, Quaternion(0.5).array)) < 1e-12


def test_factor_vanishes_at_center():
    M = blaschke_factor(0.5 * I, 40)
    assert qnorm(eval_series(M, 0.5 * I.array)) < 1e-12


def test_series_matches_closed_form(rng):
    for _ in range(5):
        a = random_zero_point(rng)
        fac = PointFactor(Quaternion.from_array(a))
        s = fac.series(default_truncation(float(qnorm(a)), tol=1e-14))
        pts = np.array([random_zero_point(rng, 0.0, 0.9) for _ in range(20)])
        assert np.allclose(eval_series(s, pts), chain_eval(fac.unit_evaluators(), pts), atol=1e-11)


def test_center_on_boundary_rejected():
    with pytest.raises(CenterOnBoundaryError):
        blaschke_factor(I)
    with pytest.raises(CenterOnBoundaryError):
        finite_blaschke([Quaternion(0.6, 0.8)])


def test_blaschke_condition_examples():
    assert blaschke_condition([]) == 0.0
    assert blaschke_condition([Quaternion(0.0)]) == 1.0
    zs = [(1 - 2.0**-n) * I for n in range(11)]
    assert blaschke_condition(zs) == pytest.approx(2 - 2.0**-10, abs=1e-14)


def test_finite_single_zero_is_factor():
    a = Quaternion(0.2, -0.1, 0.3, 0.4)
    B = finite_blaschke([a], 40)
    assert np.allclose(B.series.coeffs, blaschke_factor(a, 40).coeffs)


def test_spherical_pair_is_real_factor():
    # M^s_{i/2} = (q^2 + 1/4) / (1 + q^2/4)
    N = 40
    B = finite_blaschke([0.5 * I, -0.5 * I], N)
    assert len(B.factors) == 1 and isinstance(B.factors[0], SphericalFactor)
    den = (-0.25) ** np.arange(N // 2 + 1)
    geo = np.zeros(N + 1)
    geo[::2] = den
    expected = np.convolve([0.25, 0.0, 1.0], geo)[: N + 1]
    assert B.series.is_real(1e-12)
    assert np.allclose(B.series.real_coeffs(), expected, atol=1e-15)
    assert np.allclose(spherical_factor(0.5 * J, N).coeffs, B.series.coeffs)


def test_finite_product_boundary_modulus(rng):
    for _ in range(5):
        pts = [random_zero_point(rng) for _ in range(rng.integers(1, 9))]
        B = finite_blaschke(pts)
        for u in (UNIT_I, UNIT_J, UNIT_K):
            assert np.max(np.abs(qnorm(B.eval(boundary_points(u))) - 1)) < 1e-6
            assert np.max(np.abs(qnorm(eval_series(B.series, boundary_points(u), warn_radius=np.inf)) - 1)) < 1e-6


def test_prescribed_single_target():
    a = Quaternion(0.1, 0.3, -0.2, 0.1)
    B = prescribed_zero_blaschke([a])
    assert len(B.factors) == 1 and B.factors[0].a.isclose(a)


def test_prescribed_two_points_on_one_sphere():
    B = prescribed_zero_blaschke([0.5 * I, 0.5 * J])
    for a in (0.5 * I, 0.5 * J):
        assert qnorm(B.eval(a).array) < 1e-9
        assert qnorm(eval_series(B.series, a.array)) < 1e-9
    # two distinct zeros on the sphere make it spherical
    (z,) = find_zeros(B.series)
    assert isinstance(z, SphericalZero) and (z.x, z.y) == (pytest.approx(0, abs=1e-7), pytest.approx(0.5))


def test_prescribed_real_targets_unchanged():
    targets = [Quaternion(0.3, 0.2), Quaternion(-0.4), Quaternion(0.1, 0, 0.5)]
    B = prescribed_zero_blaschke(targets)
    assert B.factors[1].a.isclose(Quaternion(-0.4))
    assert max(B.meta["target_residuals"]) < 1e-12


def test_prescribed_rejects_isolated_point_on_listed_sphere():
    a = 0.5 * I
    with pytest.raises(InvalidZeroSequenceError):
        prescribed_zero_blaschke([0.5 * J, a, a.conj()])


def test_conjugate_product_reverses_order():
    B = BlaschkeProduct([PointFactor(0.3 * I), PointFactor(Quaternion(0.1, 0, 0.4))], 60)
    Bc = B.conj()
    assert Bc.factors[0].a.isclose(Quaternion(0.1, 0, -0.4))
    c = np.array(B.series.coeffs)
    c[:, 1:] *= -1
    assert np.allclose(Bc.series.coeffs, c, atol=1e-12)


# -- invariants ----------------------------------------------------------------


def test_factor_zero_at_center_bulk(rng):
    for _ in range(50):
        a = random_zero_point(rng, 0.0, 0.8)
        N = int(math.ceil(40 / (1 - qnorm(a))))
        assert qnorm(eval_series(blaschke_factor(a, N), a)) < 1e-10


def test_factor_maps_ball_into_ball(rng):
    for _ in range(5):
        a = random_zero_point(rng)
        pts = np.array([random_zero_point(rng, 0.0, 0.999) for _ in range(1000)])
        assert np.all(qnorm(PointFactor(Quaternion.from_array(a)).unit_evaluators()[0](pts)) < 1.0)


def test_spherical_factors_real(rng):
    for _ in range(10):
        s = spherical_factor(random_zero_point(rng))
        assert s.is_real(1e-12)


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_zeros_recovered_from_finite_product(seed, n):
    rng = np.random.default_rng(seed)
    pts = [random_zero_point(rng) for _ in range(n)]
    B = finite_blaschke(pts)
    zs = find_zeros(B.series)
    assert all(isinstance(z, IsolatedZero) for z in zs)
    assert sum(z.multiplicity for z in zs) == n
    # the first center is always a zero; the others sit on the expected spheres
    assert any(np.allclose(z.point.array, pts[0], atol=1e-7) for z in zs)
    spheres = sorted((round(float(p[0]), 6), round(float(np.linalg.norm(p[1:])), 6)) for p in pts)
    found = sorted((round(z.x, 6), round(z.y, 6)) for z in zs)
    assert np.allclose(spheres, found, atol=1e-6)


def test_zeros_of_factors_survive_products(rng):
    a, b = random_zero_point(rng), random_zero_point(rng)
    h = star_mul(blaschke_factor(a, 60), blaschke_factor(b, 60), 60)
    assert qnorm(eval_series(h, a)) < 1e-10


def test_records_keep_their_grouping():
    recs = [IsolatedZero(0.5 * I, 1), SphericalZero(0.0, 0.5, 2)]
    with pytest.raises(InvalidZeroSequenceError):
        prescribed_zero_blaschke(recs)
    B = finite_blaschke([SphericalZero(0.0, 0.5, 2), IsolatedZero(Quaternion(0.3), 2)])
    assert [type(f) for f in B.factors] == [SphericalFactor, PointFactor]
    assert B.factors[1].power == 2
