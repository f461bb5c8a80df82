"""Random inputs shared by the test modules."""

import numpy as np
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from slicehardy.quaternion import ImaginaryUnit
from slicehardy.series import RegularSeries

finite = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)


def coeff_arrays(min_degree=0, max_degree=6, scale=2.0):
    elems = st.floats(-scale, scale, allow_nan=False, allow_infinity=False)
    return st.integers(min_degree, max_degree).flatmap(lambda n: hnp.arrays(np.float64, (n + 1, 4), elements=elems))


def series_strategy(min_degree=0, max_degree=6):
    return coeff_arrays(min_degree, max_degree).map(RegularSeries)


def quaternions(scale=2.0):
    return hnp.arrays(np.float64, 4, elements=st.floats(-scale, scale, allow_nan=False, allow_infinity=False))


def units():
    vec = hnp.arrays(np.float64, 3, elements=st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False))
    return vec.filter(lambda v: np.linalg.norm(v) > 1e-3).map(ImaginaryUnit.from_vector)


def random_series(rng, degree, complex_unit=None):
    """Gaussian coefficients; with ``complex_unit`` they lie in that slice."""
    if complex_unit is None:
        return RegularSeries(rng.standard_normal((degree + 1, 4)))
    c = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    return RegularSeries.from_complex(c, complex_unit)


def random_ball_point(rng, radius=0.95):
    v = rng.standard_normal(4)
    return v / np.linalg.norm(v) * radius * rng.random() ** 0.25


def random_unit(rng):
    return ImaginaryUnit.from_vector(rng.standard_normal(3))


def random_zero_point(rng, rmin=0.1, rmax=0.85):
    """A non-real point of the ball with modulus in ``[rmin, rmax]``."""
    v = rng.standard_normal(4)
    v /= np.linalg.norm(v)
    return v * rng.uniform(rmin, rmax)
