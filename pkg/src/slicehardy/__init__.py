"""Slice regular functions on the quaternionic unit ball.

Power series with right quaternionic coefficients, their regular product,
Hardy norms and boundary traces, zeros and Blaschke products, and the
factorizations ``f = h * g`` (zero extraction) and ``f = E * S * B``
(outer, singular and Blaschke parts) for one-slice-preserving functions.
"""

__version__ = "0.1.0"

from .quaternion import (
    DEFAULT_UNIT,
    UNIT_I,
    UNIT_J,
    UNIT_K,
    ImaginaryUnit,
    Quaternion,
    ZeroDivisorError,
    qconj,
    qinv,
    qmul,
    qnorm,
    sample_unit_sphere,
)
from .series import (
    RegularSeries,
    SingularAtOriginError,
    TruncationWarning,
    eval_series,
    eval_with_bound,
    regular_conjugate,
    slice_preservation,
    star_inverse,
    star_mul,
    star_product,
    symmetrization,
)
from .slices import conjugation_map, extend, sphere_affine, sphere_max_min_modulus, split
from .hardy import (
    BoundaryTrace,
    HardyNormEstimate,
    QuadratureSpec,
    boundary_star_product,
    boundary_trace,
    circle_mean,
    hardy_norm,
    poisson_reconstruct,
    slice_norm,
    three_sphere_mean,
    three_sphere_norm,
)
from .zeros import IsolatedZero, SphericalZero, UnclassifiedZero, find_zeros
from .blaschke import (
    BlaschkeProduct,
    blaschke_condition,
    blaschke_factor,
    finite_blaschke,
    prescribed_zero_blaschke,
    spherical_factor,
)
from .factorization import extract_zeros, outer_certificate, outer_factor_on_slice, outer_inner_split

__all__ = [
    "__version__",
    "DEFAULT_UNIT",
    "UNIT_I",
    "UNIT_J",
    "UNIT_K",
    "ImaginaryUnit",
    "Quaternion",
    "ZeroDivisorError",
    "qconj",
    "qinv",
    "qmul",
    "qnorm",
    "sample_unit_sphere",
    "RegularSeries",
    "SingularAtOriginError",
    "TruncationWarning",
    "eval_series",
    "eval_with_bound",
    "regular_conjugate",
    "slice_preservation",
    "star_inverse",
    "star_mul",
    "star_product",
    "symmetrization",
    "conjugation_map",
    "extend",
    "sphere_affine",
    "sphere_max_min_modulus",
    "split",
    "BoundaryTrace",
    "HardyNormEstimate",
    "QuadratureSpec",
    "boundary_star_product",
    "boundary_trace",
    "circle_mean",
    "hardy_norm",
    "poisson_reconstruct",
    "slice_norm",
    "three_sphere_mean",
    "three_sphere_norm",
    "IsolatedZero",
    "SphericalZero",
    "UnclassifiedZero",
    "find_zeros",
    "BlaschkeProduct",
    "blaschke_condition",
    "blaschke_factor",
    "finite_blaschke",
    "prescribed_zero_blaschke",
    "spherical_factor",
    "extract_zeros",
    "outer_certificate",
    "outer_factor_on_slice",
    "outer_inner_split",
]
