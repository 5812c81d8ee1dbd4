"""Achievable rates and rate regions for Gaussian dirty tape channels.

Rates are floats in nats throughout; use :func:`to_unit` to render them.
"""

from .errors import DegeneracyError, DirtyTapeError, NumericalError, ParameterError
from .rate_core import (
    SingleUserParams,
    beta_star,
    c1,
    c1_inner,
    c3,
    costa_alpha,
    to_unit,
    trivial_upper,
)
from .timeshare import TimeShareSolution, c2, c4, two_mode_timeshare, upper_concave_envelope
from .mac_regions import (
    Frontier,
    JdptCoefficients,
    MacDtcCoefficients,
    MacParams,
    Pentagon,
    frontier_union,
    gaussian_mac_capacity_pentagon,
    jdpt_frontier,
    jdpt_pentagon,
    mac_dtc_frontier,
    mac_dtc_pentagon,
)

__version__ = "0.1.0"

__all__ = [
    "DegeneracyError",
    "DirtyTapeError",
    "Frontier",
    "JdptCoefficients",
    "MacDtcCoefficients",
    "MacParams",
    "NumericalError",
    "ParameterError",
    "Pentagon",
    "SingleUserParams",
    "TimeShareSolution",
    "beta_star",
    "c1",
    "c1_inner",
    "c2",
    "c3",
    "c4",
    "costa_alpha",
    "frontier_union",
    "gaussian_mac_capacity_pentagon",
    "jdpt_frontier",
    "jdpt_pentagon",
    "mac_dtc_frontier",
    "mac_dtc_pentagon",
    "to_unit",
    "trivial_upper",
    "two_mode_timeshare",
    "upper_concave_envelope",
]
