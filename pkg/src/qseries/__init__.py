"""Numerical toolkit for quaternionic regular power series and the sigma-metric."""

from .quaternion import (
    ImaginaryUnit,
    Quaternion,
    inverse,
    multiply,
    power,
    recover_components,
    same_slice,
)
from .series import (
    EvalResult,
    RegularSeries,
    binomial_expand,
    evaluate,
    formal_derivative,
    geometric_series,
    lacunary_series,
    load_series,
    radius_estimate,
    reexpand,
    save_series,
    star_multiply,
    star_power_eval,
    star_power_series,
    tail_bound,
)
from .sigma import (
    Membership,
    SigmaBall,
    in_analyticity_region_ball,
    in_analyticity_region_sigma,
    in_sigma_ball,
    omega,
    sample_boundary,
    sigma,
)
from .slices import dbar_check, representation_eval, slice_derivative_check, split_bc

__all__ = [
    "ImaginaryUnit", "Quaternion", "inverse", "multiply", "power", "recover_components", "same_slice",
    "EvalResult", "RegularSeries", "binomial_expand", "evaluate", "formal_derivative", "geometric_series",
    "lacunary_series", "load_series", "radius_estimate", "reexpand", "save_series", "star_multiply",
    "star_power_eval", "star_power_series", "tail_bound",
    "Membership", "SigmaBall", "in_analyticity_region_ball", "in_analyticity_region_sigma", "in_sigma_ball",
    "omega", "sample_boundary", "sigma",
    "dbar_check", "representation_eval", "slice_derivative_check", "split_bc",
]
