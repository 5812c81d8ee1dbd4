"""Two-user rate regions for the Gaussian MAC with additive interference.

Two scenarios share ``Y = X1 + X2 + S + Z``:

* MAC dirty tape: both transmitters know ``S`` causally and each spends
  ``beta_i**2 * ps`` of its power cleaning it.
* Joint dirty paper / dirty tape (JDPT): transmitter 1 knows ``S`` noncausally
  and uses Costa-style inflation ``alpha``; transmitter 2 compensates with ``beta``.

Each coefficient choice yields a pentagon; the regions are unions of pentagons
and are summarized by their upper boundary on a grid of R1 values.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ParameterError
from .rate_core import check_beta, check_finite

log = logging.getLogger(__name__)

DEFAULT_BETA_POINTS = 201
DEFAULT_ALPHA_POINTS = 301
DEFAULT_ALPHA_BRACKET = (-1.0, 2.0)
DEFAULT_R1_POINTS = 1001
REFINE_POINTS = 11
_CHUNK = 2048


@dataclass(frozen=True)
class MacParams:
    p1: float
    p2: float
    ps: float
    pz: float

    def __post_init__(self):
        check_finite(p1=self.p1, p2=self.p2, ps=self.ps, pz=self.pz)
        if min(self.p1, self.p2, self.ps) < 0:
            raise ParameterError(f"powers must be nonnegative: {self}")
        if self.pz <= 0:
            raise ParameterError(f"noise power pz must be > 0, got {self.pz}")

    def beta_max(self, i: int) -> float:
        """Largest admissible compensation coefficient for transmitter ``i``; 0 if ps == 0."""
        p = self.p1 if i == 1 else self.p2
        return math.sqrt(p / self.ps) if self.ps > 0 else 0.0


@dataclass(frozen=True)
class MacDtcCoefficients:
    beta1: float
    beta2: float

    def check(self, params: MacParams) -> None:
        _check_comp(self.beta1, params.p1, params.ps, "beta1")
        _check_comp(self.beta2, params.p2, params.ps, "beta2")


@dataclass(frozen=True)
class JdptCoefficients:
    alpha: float
    beta: float

    def check(self, params: MacParams) -> None:
        check_finite(alpha=self.alpha)
        _check_comp(self.beta, params.p2, params.ps, "beta", symmetric=True)
        if params.p1 == 0 and self.alpha != 0:
            raise ParameterError("alpha must be 0 when p1 == 0 (ps/p1 term undefined)")


def _check_comp(beta, p, ps, name, symmetric=False):
    if ps == 0:
        check_finite(**{name: beta})
        if beta != 0:
            raise ParameterError(f"{name} must be 0 when ps == 0, got {beta}")
        return
    check_beta(beta, p, ps, name, symmetric=symmetric)


@dataclass(frozen=True)
class Pentagon:
    """``{0 <= R1 <= r1_max, 0 <= R2 <= r2_max, R1 + R2 <= r_sum}`` in nats."""

    r1_max: float
    r2_max: float
    r_sum: float

    def __post_init__(self):
        for name in ("r1_max", "r2_max", "r_sum"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ParameterError(f"{name} must be finite and >= 0, got {v}")

    def contains(self, r1: float, r2: float, tol: float = 0.0) -> bool:
        return (
            -tol <= r1 <= self.r1_max + tol
            and -tol <= r2 <= self.r2_max + tol
            and r1 + r2 <= self.r_sum + tol
        )

    def as_tuple(self):
        return (self.r1_max, self.r2_max, self.r_sum)


def mac_dtc_bounds(p1, p2, ps, pz, beta1, beta2):
    """Unclamped MAC dirty tape bounds (nats); broadcasts over the coefficients."""
    beta1 = np.asarray(beta1, dtype=float)
    beta2 = np.asarray(beta2, dtype=float)
    den = (1.0 - beta1 - beta2) ** 2 * ps + pz
    clean1 = beta1 * beta1 * ps
    clean2 = beta2 * beta2 * ps
    r1 = 0.5 * np.log1p(np.maximum(p1 - clean1, 0.0) / den)
    r2 = 0.5 * np.log1p(np.maximum(p2 - clean2, 0.0) / den)
    rs = 0.5 * np.log1p(np.maximum(p1 + p2 - clean1 - clean2, 0.0) / den)
    return r1, r2, rs


def jdpt_bounds(p1, p2, ps, pz, alpha, beta):
    """Unclamped JDPT bounds (nats); broadcasts over the coefficients.

    Individual bounds may come out negative for poor coefficient choices.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    # alpha**2 * ps / p1, taken as 0 when alpha == 0 (forced when p1 == 0)
    if p1 > 0:
        infl = alpha * alpha * ps / p1
    else:
        infl = np.zeros_like(alpha)
    den = (1.0 - alpha - beta) ** 2 * ps + infl * pz + pz
    r1 = 0.5 * np.log((p1 + (1.0 - beta) ** 2 * ps + pz) / den)
    r2 = 0.5 * np.log1p(np.maximum(p2 - beta * beta * ps, 0.0) * (1.0 + infl) / den)
    rs = 0.5 * np.log((p1 + p2 + (1.0 - 2.0 * beta) * ps + pz) / den)
    return r1, r2, rs


def _pentagon(r1, r2, rs) -> Pentagon:
    return Pentagon(max(float(r1), 0.0), max(float(r2), 0.0), max(float(rs), 0.0))


def mac_dtc_pentagon(params: MacParams, coeffs: MacDtcCoefficients) -> Pentagon:
    coeffs.check(params)
    return _pentagon(*mac_dtc_bounds(params.p1, params.p2, params.ps, params.pz, coeffs.beta1, coeffs.beta2))


def jdpt_pentagon(params: MacParams, coeffs: JdptCoefficients) -> Pentagon:
    coeffs.check(params)
    return _pentagon(*jdpt_bounds(params.p1, params.p2, params.ps, params.pz, coeffs.alpha, coeffs.beta))


def gaussian_mac_capacity_pentagon(params: MacParams) -> Pentagon:
    """Capacity region of the interference-free Gaussian MAC (outer bound)."""
    p1, p2, pz = params.p1, params.p2, params.pz
    return Pentagon(0.5 * math.log1p(p1 / pz), 0.5 * math.log1p(p2 / pz), 0.5 * math.log1p((p1 + p2) / pz))


@dataclass
class Frontier:
    """Upper boundary of a union of pentagons sampled on an R1 grid.

    ``generators`` holds, per point, the coefficient pair of a pentagon that
    contains it (or the pentagon index for :func:`frontier_union`).
    """

    r1: np.ndarray
    r2: np.ndarray
    generators: Optional[np.ndarray] = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.r1 = np.asarray(self.r1, dtype=float)
        self.r2 = np.asarray(self.r2, dtype=float)
        if self.r1.shape != self.r2.shape or self.r1.ndim != 1:
            raise ParameterError("r1 and r2 must be 1-D arrays of equal length")
        if np.any(np.diff(self.r1) <= 0):
            raise ParameterError("frontier r1 must be strictly increasing")
        if np.any(np.diff(self.r2) > 0) or np.any(self.r2 < 0):
            raise ParameterError("frontier r2 must be nonnegative and nonincreasing")

    def __len__(self):
        return len(self.r1)

    def points(self):
        return np.column_stack([self.r1, self.r2])

    def on_grid(self, grid) -> np.ndarray:
        """R2 at each value of ``grid``; NaN where the frontier has no exact point."""
        grid = np.asarray(grid, dtype=float)
        k = np.searchsorted(self.r1, grid)
        k = np.minimum(k, len(self.r1) - 1)
        hit = self.r1[k] == grid
        return np.where(hit, self.r2[k], np.nan)


def _union(r1m, r2m, rs, grid):
    """Per-grid-point best pentagon: returns (r1, r2, index) with the reach endpoint appended."""
    reach = np.minimum(r1m, rs)
    top = reach.max()
    grid = np.unique(np.asarray(grid, dtype=float))
    grid = grid[(grid >= 0) & (grid <= top)]
    if len(grid) == 0 or grid[-1] < top:
        grid = np.append(grid, top)

    best = np.full(grid.shape, -np.inf)
    arg = np.zeros(grid.shape, dtype=np.int64)
    for start in range(0, len(r1m), _CHUNK):
        sl = slice(start, start + _CHUNK)
        ok = grid[None, :] <= reach[sl, None]
        val = np.where(ok, np.minimum(r2m[sl, None], rs[sl, None] - grid[None, :]), -np.inf)
        k = np.argmax(val, axis=0)
        v = val[k, np.arange(len(grid))]
        better = v > best
        best = np.where(better, v, best)
        arg = np.where(better, k + start, arg)
    return grid, best, arg


def frontier_union(pentagons: Sequence[Pentagon], r1_grid=None, n_points: int = DEFAULT_R1_POINTS) -> Frontier:
    """Upper boundary of the union of ``pentagons``.

    For each R1 on the grid, R2 is the largest value allowed by any pentagon
    that can still reach R1. The largest reachable R1 is always included as the
    final point. ``generators`` gives the index of the winning pentagon.
    """
    if len(pentagons) == 0:
        raise ParameterError("frontier_union needs at least one pentagon")
    arr = np.array([pg.as_tuple() for pg in pentagons], dtype=float)
    if r1_grid is None:
        r1_grid = np.linspace(0.0, arr[:, 0].max(), n_points)
    grid, r2, idx = _union(arr[:, 0], arr[:, 1], arr[:, 2], r1_grid)
    return Frontier(grid, r2, generators=idx)


def outer_r1_grid(params: MacParams, n_points: int = DEFAULT_R1_POINTS) -> np.ndarray:
    """Uniform R1 grid from 0 to the interference-free single-user rate of transmitter 1."""
    return np.linspace(0.0, gaussian_mac_capacity_pentagon(params).r1_max, n_points)


def outer_frontier(params: MacParams, r1_grid=None) -> Frontier:
    if r1_grid is None:
        r1_grid = outer_r1_grid(params)
    return frontier_union([gaussian_mac_capacity_pentagon(params)], r1_grid)


def coefficient_grid(hi: float, n: int, symmetric: bool = False) -> np.ndarray:
    """``n`` points on [0, hi] (or [-hi, hi]); grids with n and 2n-1 points nest exactly."""
    if hi == 0 or n == 1:
        return np.zeros(1)
    t = np.arange(n) / (n - 1)
    if symmetric:
        return hi * (2.0 * t - 1.0)
    return hi * t


def _clip_rates(r):
    return np.maximum(r, 0.0)


def mac_dtc_frontier(
    params: MacParams,
    n_beta: int = DEFAULT_BETA_POINTS,
    r1_grid=None,
) -> Frontier:
    """Boundary of the MAC dirty tape region over an ``n_beta`` x ``n_beta`` coefficient grid."""
    if n_beta < 1:
        raise ParameterError("n_beta must be >= 1")
    b1 = coefficient_grid(params.beta_max(1), n_beta)
    b2 = coefficient_grid(params.beta_max(2), n_beta)
    B1, B2 = (m.ravel() for m in np.meshgrid(b1, b2, indexing="ij"))
    r1, r2, rs = (_clip_rates(v) for v in mac_dtc_bounds(params.p1, params.p2, params.ps, params.pz, B1, B2))
    if r1_grid is None:
        r1_grid = outer_r1_grid(params)
    grid, best, idx = _union(r1, r2, rs, r1_grid)
    return Frontier(grid, best, generators=np.column_stack([B1[idx], B2[idx]]))


def jdpt_frontier(
    params: MacParams,
    n_alpha: int = DEFAULT_ALPHA_POINTS,
    n_beta: int = DEFAULT_BETA_POINTS,
    alpha_bracket=DEFAULT_ALPHA_BRACKET,
    refine: bool = True,
    r1_grid=None,
) -> Frontier:
    """Boundary of the JDPT region over an alpha x beta coefficient grid.

    With ``refine`` on, a local 11x11 grid is laid around every coefficient
    pair that wins somewhere on the coarse frontier. ``info['alpha_interior']``
    reports whether all coarse winners sit strictly inside ``alpha_bracket``.
    """
    lo, hi = (float(v) for v in alpha_bracket)
    check_finite(alpha_lo=lo, alpha_hi=hi)
    if not lo < hi:
        raise ParameterError(f"alpha bracket must satisfy lo < hi, got {alpha_bracket}")
    if n_alpha < 2 or n_beta < 1:
        raise ParameterError("need n_alpha >= 2 and n_beta >= 1")
    p1, p2, ps, pz = params.p1, params.p2, params.ps, params.pz
    if r1_grid is None:
        r1_grid = outer_r1_grid(params)

    if ps == 0 or p1 == 0:
        # alpha drops out (ps == 0) or is forced to 0 (p1 == 0)
        alphas = np.zeros(1)
    else:
        alphas = np.linspace(lo, hi, n_alpha)
    bmax = params.beta_max(2)
    betas = coefficient_grid(bmax, n_beta, symmetric=True)
    A, B = (m.ravel() for m in np.meshgrid(alphas, betas, indexing="ij"))

    def rates(A, B):
        return [_clip_rates(v) for v in jdpt_bounds(p1, p2, ps, pz, A, B)]

    grid, best, idx = _union(*rates(A, B), r1_grid)
    winners = np.unique(idx)
    info = {"alpha_interior": True, "clamped_pentagons": 0}
    if len(alphas) > 1:
        wa = A[winners]
        info["alpha_interior"] = bool(np.all((wa > lo) & (wa < hi)))
        if not info["alpha_interior"]:
            log.warning("JDPT alpha incumbent on bracket edge %s for %s", alpha_bracket, params)

    if refine and len(alphas) > 1:
        da = alphas[1] - alphas[0]
        db = betas[1] - betas[0] if len(betas) > 1 else 0.0
        extra_a, extra_b = [A], [B]
        for k in winners:
            la = np.linspace(A[k] - da, A[k] + da, REFINE_POINTS)
            lb = np.clip(np.linspace(B[k] - db, B[k] + db, REFINE_POINTS), -bmax, bmax)
            ma, mb = np.meshgrid(la, lb, indexing="ij")
            extra_a.append(ma.ravel())
            extra_b.append(mb.ravel())
        A = np.concatenate(extra_a)
        B = np.concatenate(extra_b)
        grid, best, idx = _union(*rates(A, B), r1_grid)

    raw_sum = jdpt_bounds(p1, p2, ps, pz, A[idx], B[idx])[2]
    info["clamped_pentagons"] = int(np.count_nonzero(raw_sum < 0))
    return Frontier(grid, best, generators=np.column_stack([A[idx], B[idx]]), info=info)


def dominates(upper: Frontier, lower: Frontier, grid, tol: float = 0.0) -> bool:
    """True if ``upper`` is defined and at least ``lower`` wherever ``lower`` is defined on ``grid``."""
    u = upper.on_grid(grid)
    lo = lower.on_grid(grid)
    have = ~np.isnan(lo)
    if np.any(np.isnan(u[have])):
        return False
    return bool(np.all(u[have] >= lo[have] - tol))
