"""Two-mode time sharing between rate-power curves, plus a concave-envelope oracle.

A *rate function* here is any vectorized callable mapping an array of transmit
powers to rates in nats, with ``f(0) == 0`` and nondecreasing in power.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ParameterError
from .rate_core import SingleUserParams, c1_array, c3_array, check_finite, clamp_rate

RateFunction = Callable[[np.ndarray], np.ndarray]

DEFAULT_GRID = 101
DEFAULT_ROUNDS = 2
REFINE_POINTS = 21
TIE_TOL = 1e-12


@dataclass(frozen=True)
class TimeShareSolution:
    """Best two-mode split: mode 1 runs a fraction ``lam`` of the time with a
    fraction ``xi`` of the power budget."""

    rate: float
    lam: float
    xi: float

    def __post_init__(self):
        if not (0.0 <= self.lam <= 1.0 and 0.0 <= self.xi <= 1.0):
            raise ParameterError(f"lam={self.lam}, xi={self.xi} must lie in [0, 1]")


def timeshare_objective(f: RateFunction, g: RateFunction, p: float, lam, xi):
    """``lam*f(xi*p/lam) + (1-lam)*g((1-xi)*p/(1-lam))``, broadcasting over lam, xi.

    A mode that is active for zero time contributes exactly 0.
    """
    lam = np.asarray(lam, dtype=float)
    xi = np.asarray(xi, dtype=float)
    lam, xi = np.broadcast_arrays(lam, xi)
    on1 = lam > 0
    on2 = lam < 1
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(on1, xi * p / np.where(on1, lam, 1.0), 0.0)
        b = np.where(on2, (1.0 - xi) * p / np.where(on2, 1.0 - lam, 1.0), 0.0)
    t1 = np.where(on1, lam * f(a), 0.0)
    t2 = np.where(on2, (1.0 - lam) * g(b), 0.0)
    return t1 + t2


def _pick(vals, lams, xis):
    # ties within TIE_TOL go to the candidate nearest the no-sharing corner (1, 1)
    best = vals.max()
    tied = np.flatnonzero(vals >= best - TIE_TOL)
    dist = (1.0 - lams[tied]) ** 2 + (1.0 - xis[tied]) ** 2
    k = tied[np.argmin(dist)]
    return vals[k], lams[k], xis[k]


def two_mode_timeshare(
    f: RateFunction,
    g: RateFunction,
    p: float,
    grid: int = DEFAULT_GRID,
    rounds: int = DEFAULT_ROUNDS,
) -> TimeShareSolution:
    """Maximize the two-mode time-sharing objective over ``(lam, xi)`` in [0, 1]^2.

    A ``grid`` x ``grid`` search is followed by ``rounds`` local passes, each
    shrinking the grid spacing tenfold around the incumbent.
    """
    check_finite(p=p)
    if p < 0:
        raise ParameterError(f"power must be >= 0, got {p}")
    if grid < 2:
        raise ParameterError(f"grid must have at least 2 points, got {grid}")

    axis = np.linspace(1.0, 0.0, grid)
    L, X = np.meshgrid(axis, axis, indexing="ij")
    lams, xis = L.ravel(), X.ravel()
    vals = timeshare_objective(f, g, p, lams, xis)
    best, lam0, xi0 = _pick(vals, lams, xis)

    h = 1.0 / (grid - 1)
    for _ in range(rounds):
        la = np.linspace(min(1.0, lam0 + h), max(0.0, lam0 - h), REFINE_POINTS)
        xa = np.linspace(min(1.0, xi0 + h), max(0.0, xi0 - h), REFINE_POINTS)
        L, X = np.meshgrid(la, xa, indexing="ij")
        lams = np.concatenate([[1.0, lam0], L.ravel()])
        xis = np.concatenate([[1.0, xi0], X.ravel()])
        vals = timeshare_objective(f, g, p, lams, xis)
        vals[1] = best
        best, lam0, xi0 = _pick(vals, lams, xis)
        h /= 10.0

    return TimeShareSolution(clamp_rate(float(best)), float(lam0), float(xi0))


def _c1_fn(ps: float, pz: float) -> RateFunction:
    return lambda x: c1_array(x, ps, pz)


def _c3_fn(pz: float) -> RateFunction:
    return lambda x: c3_array(x, pz)


def c2(params: SingleUserParams, grid: int = DEFAULT_GRID, rounds: int = DEFAULT_ROUNDS) -> TimeShareSolution:
    """Time sharing between two compensation-strategy modes."""
    f = _c1_fn(params.ps, params.pz)
    return two_mode_timeshare(f, f, params.p, grid, rounds)


# C2 lookup table for the C4 search: nodes in units of pz
_TABLE_DECADES = (-6.0, 12.0)
_TABLE_NODES = 3000


@lru_cache(maxsize=32)
def _c2_table(ps: float, pz: float, grid: int, rounds: int):
    nodes = np.concatenate([[0.0], pz * np.logspace(*_TABLE_DECADES, _TABLE_NODES)])
    vals = np.array([c2(SingleUserParams(x, ps, pz), grid, rounds).rate for x in nodes])
    nodes.setflags(write=False)
    vals.setflags(write=False)
    return nodes, vals


class TabulatedC2:
    """C2 by linear interpolation between exactly computed nodes.

    C2 is concave, so the chord between two nodes never exceeds it; the chord
    value is itself achievable by time sharing two C2 modes. Powers past the
    last node are computed exactly.
    """

    def __init__(self, params: SingleUserParams, grid: int = DEFAULT_GRID, rounds: int = DEFAULT_ROUNDS):
        self.params = params
        self.grid = grid
        self.rounds = rounds
        nodes, vals = _c2_table(float(params.ps), float(params.pz), grid, rounds)
        p = params.p
        k = int(np.searchsorted(nodes, p))
        if k < len(nodes) and nodes[k] == p:
            self.nodes, self.vals = nodes, vals
        else:
            exact = c2(params, grid, rounds).rate
            self.nodes = np.insert(nodes, k, p)
            self.vals = np.insert(vals, k, exact)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self.nodes, self.vals)
        far = x > self.nodes[-1]
        if np.any(far):
            ps, pz = self.params.ps, self.params.pz
            out = np.array(out, copy=True)
            out[far] = [c2(SingleUserParams(v, ps, pz), self.grid, self.rounds).rate for v in x[far]]
        return out


def c4(params: SingleUserParams, grid: int = DEFAULT_GRID, rounds: int = DEFAULT_ROUNDS) -> TimeShareSolution:
    """Time sharing between a C2 mode and an inflated-lattice (C3) mode."""
    return two_mode_timeshare(TabulatedC2(params, grid, rounds), _c3_fn(params.pz), params.p, grid, rounds)


def default_support(p: float, n: int = 10_000) -> np.ndarray:
    """Mixed linear/log grid on [0, max(1e3*p, 2*p)] that contains ``p`` exactly."""
    p_max = max(1e3 * p, 2 * p)
    lin = np.linspace(0.0, p_max, n // 2)
    log = np.geomspace(p_max * 1e-8, p_max, n - n // 2)
    return np.unique(np.concatenate([lin, log, [0.0, p]]))


def _upper_hull(x, y):
    hx, hy = [], []
    for xi, yi in zip(x, y):
        while len(hx) >= 2:
            # drop the middle point unless it lies strictly above the chord
            cross = (hx[-1] - hx[-2]) * (yi - hy[-2]) - (hy[-1] - hy[-2]) * (xi - hx[-2])
            if cross >= 0:
                hx.pop()
                hy.pop()
            else:
                break
        hx.append(xi)
        hy.append(yi)
    return np.array(hx), np.array(hy)


def upper_concave_envelope(f: RateFunction, p: float, support=None) -> float:
    """Least concave majorant of ``f`` sampled on ``support``, evaluated at ``p``."""
    check_finite(p=p)
    if support is None:
        if p == 0:
            return clamp_rate(float(f(np.array([0.0]))[0]))
        support = default_support(p)
    x = np.unique(np.asarray(support, dtype=float))
    if p < x[0] or p > x[-1]:
        raise ParameterError(f"p={p} outside support [{x[0]}, {x[-1]}]")
    hx, hy = _upper_hull(x, np.asarray(f(x), dtype=float))
    return clamp_rate(float(np.interp(p, hx, hy)))


__all__ = [
    "TimeShareSolution",
    "TabulatedC2",
    "c2",
    "c4",
    "default_support",
    "timeshare_objective",
    "two_mode_timeshare",
    "upper_concave_envelope",
]
