"""Closed-form single-user rate bounds for the Gaussian dirty tape channel.

The channel is ``Y = X + S + Z`` with interference ``S ~ N(0, ps)`` known causally
at the transmitter and unknown noise ``Z ~ N(0, pz)``. All rates are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

LN2 = math.log(2.0)

# half log of the cubic-lattice shaping loss 2*pi*e/12, in nats
LATTICE_LOSS = 0.5 * math.log(2.0 * math.pi * math.e / 12.0)

# p/pz below which the lattice bound is clamped to zero
LATTICE_THRESHOLD_SNR = 2.0 * math.pi * math.e / 12.0 - 1.0

_NEG_CLAMP = 1e-14
_DOMAIN_SLACK = 1e-12

UNITS = ("bits", "nats")


def check_finite(**values: float) -> None:
    for name, v in values.items():
        if not isinstance(v, (int, float, np.floating, np.integer)) or not math.isfinite(v):
            raise ParameterError(f"{name} must be a finite number, got {v!r}")


def clamp_rate(value: float) -> float:
    """Snap floating-point dust below zero to exactly 0."""
    if -_NEG_CLAMP < value < 0.0:
        return 0.0
    return float(value)


def to_unit(value, unit: str = "bits"):
    """Convert a rate (or array of rates) in nats to ``unit``."""
    if unit == "nats":
        return value
    if unit == "bits":
        return value / LN2
    raise ParameterError(f"unknown unit {unit!r}; expected one of {UNITS}")


@dataclass(frozen=True)
class SingleUserParams:
    """Powers of one dirty tape channel instance (linear scale)."""

    p: float
    ps: float
    pz: float

    def __post_init__(self):
        check_finite(p=self.p, ps=self.ps, pz=self.pz)
        if self.p < 0 or self.ps < 0:
            raise ParameterError(f"powers must be nonnegative (p={self.p}, ps={self.ps})")
        if self.pz <= 0:
            raise ParameterError(f"noise power pz must be > 0, got {self.pz}")

    def with_power(self, p: float) -> "SingleUserParams":
        return SingleUserParams(p, self.ps, self.pz)


def beta_max(params: SingleUserParams) -> float:
    """Upper end of the compensation domain; ``inf`` when there is no interference."""
    if params.ps == 0:
        return math.inf
    return math.sqrt(params.p / params.ps)


def check_beta(beta: float, p: float, ps: float, name: str = "beta", symmetric: bool = False) -> None:
    """Raise unless ``beta`` lies in [0, sqrt(p/ps)] (or [-sqrt, sqrt] if ``symmetric``)."""
    check_finite(**{name: beta})
    lo_ok = beta >= 0 or symmetric
    if not lo_ok or beta * beta * ps > p * (1 + _DOMAIN_SLACK):
        lo = "-sqrt(p/ps)" if symmetric else "0"
        raise ParameterError(f"{name}={beta} outside [{lo}, sqrt(p/ps)] for p={p}, ps={ps}")


def _c1_inner_nats(p, ps, pz, beta):
    num = np.maximum(p - beta * beta * ps, 0.0)
    return 0.5 * np.log1p(num / (pz + (1.0 - beta) ** 2 * ps))


def _beta_star_array(p, ps, pz):
    p = np.asarray(p, dtype=float)
    s = p + pz + ps
    disc = np.maximum(s * s - 4.0 * p * ps, 0.0)
    # smaller root of ps*b^2 - s*b + p, written without cancellation
    b = 2.0 * p / (s + np.sqrt(disc))
    if ps == 0:
        return np.zeros_like(b)
    return np.minimum(b, np.sqrt(p / ps))


def c1_array(p, ps: float, pz: float):
    """Vectorized compensation rate C1 over an array of transmit powers."""
    p = np.asarray(p, dtype=float)
    return _c1_inner_nats(p, ps, pz, _beta_star_array(p, ps, pz))


def c3_array(p, pz: float):
    p = np.asarray(p, dtype=float)
    return np.maximum(0.0, 0.5 * np.log1p(p / pz) - LATTICE_LOSS)


def upper_array(p, pz: float):
    return 0.5 * np.log1p(np.asarray(p, dtype=float) / pz)


def c1_inner(params: SingleUserParams, beta: float) -> float:
    """Rate of the compensation strategy ``X = U - beta*S`` with Gaussian U."""
    if params.ps > 0:
        check_beta(beta, params.p, params.ps)
    else:
        check_finite(beta=beta)
        if beta < 0:
            raise ParameterError(f"beta must be >= 0, got {beta}")
    return clamp_rate(_c1_inner_nats(params.p, params.ps, params.pz, beta))


def beta_star(params: SingleUserParams) -> float:
    """Closed-form maximizer of :func:`c1_inner` over the compensation domain.

    Returns 0 when ``ps == 0`` (the rate does not depend on beta there).
    """
    return float(_beta_star_array(params.p, params.ps, params.pz))


def c1(params: SingleUserParams) -> float:
    return c1_inner(params, beta_star(params))


def c3(params: SingleUserParams) -> float:
    """Inflated-lattice lower bound, clamped at zero; independent of ``ps``."""
    return clamp_rate(float(c3_array(params.p, params.pz)))


def trivial_upper(params: SingleUserParams) -> float:
    """Interference-free AWGN capacity, also the dirty paper (Costa) capacity."""
    return clamp_rate(float(upper_array(params.p, params.pz)))


def costa_alpha(params: SingleUserParams) -> float:
    """Costa's dirty paper inflation factor p/(p+pz)."""
    denom = params.p + params.pz
    if denom == 0:
        raise ParameterError("costa_alpha undefined for p = pz = 0")
    return params.p / denom
