"""Frequency functions, radial profiles and the checks built on them."""

from .growth import DriftConstants, check_growth_bound, drift_constants, integrated_bound
from .identities import (
    check_harnack,
    check_monotone_F,
    consistency_checks,
    identity_checks,
    poincare_ratio,
    rellich_necas_residual,
    representation_I,
    vanishing_order,
)
from .nonlinear import check_scaling, check_weak_doubling
from .profile import (
    KINDS,
    RadialProfile,
    RadialSample,
    frequency_value,
    radial_moments,
    radius_grid,
    sweep_profile,
)

__all__ = [
    "KINDS",
    "DriftConstants",
    "RadialProfile",
    "RadialSample",
    "check_growth_bound",
    "check_harnack",
    "check_monotone_F",
    "check_scaling",
    "check_weak_doubling",
    "consistency_checks",
    "drift_constants",
    "frequency_value",
    "identity_checks",
    "integrated_bound",
    "poincare_ratio",
    "radial_moments",
    "radius_grid",
    "rellich_necas_residual",
    "representation_I",
    "sweep_profile",
    "vanishing_order",
]
