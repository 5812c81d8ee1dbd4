"""Seeded verification suites pairing each closed form with an independent route.

Used by ``dirtytape verify`` and by the acceptance tests.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import gauss_oracle as go
from .errors import DirtyTapeError
from .mac_regions import JdptCoefficients, MacDtcCoefficients, MacParams
from .rate_core import SingleUserParams, beta_star, c1, c1_inner
from .search import golden_section_max


@dataclass
class SuiteResult:
    name: str
    passed: bool
    worst: float
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0


def _rng(seed: int, stream: int) -> np.random.Generator:
    # one Philox stream per suite so suites are independent of run order
    return np.random.Generator(np.random.Philox(key=[seed, stream]))


def _logu(rng, lo, hi):
    return float(10.0 ** rng.uniform(lo, hi))


def draw_single_user(rng) -> tuple:
    params = SingleUserParams(_logu(rng, -2, 3), _logu(rng, -2, 3), _logu(rng, -1, 1))
    beta = float(rng.uniform(0.0, math.sqrt(params.p / params.ps)))
    return params, beta


def draw_mac(rng) -> MacParams:
    return MacParams(_logu(rng, -2, 3), _logu(rng, -2, 3), _logu(rng, -2, 3), _logu(rng, -1, 1))


def _timed(fn):
    def run(*a, **kw):
        t0 = time.perf_counter()
        try:
            res = fn(*a, **kw)
        except DirtyTapeError as exc:
            res = SuiteResult(fn.__name__.removeprefix("suite_"), False, math.nan, {"error": repr(exc)})
        res.seconds = time.perf_counter() - t0
        return res

    run.__name__ = fn.__name__
    return run


@_timed
def suite_c1_oracle(draws: int = 1000, seed: int = 0) -> SuiteResult:
    rng = _rng(seed, 1)
    worst = 0.0
    for _ in range(draws):
        params, beta = draw_single_user(rng)
        worst = max(worst, go.verify_c1(params, beta).worst)
    return SuiteResult("c1_oracle", worst <= go.ORACLE_TOL, worst, {"draws": draws})


@_timed
def suite_mac_dtc_oracle(draws: int = 1000, seed: int = 0) -> SuiteResult:
    rng = _rng(seed, 2)
    worst = {"r1_max": 0.0, "r2_max": 0.0, "r_sum": 0.0}
    for _ in range(draws):
        params = draw_mac(rng)
        coeffs = MacDtcCoefficients(
            float(rng.uniform(0, params.beta_max(1))), float(rng.uniform(0, params.beta_max(2)))
        )
        for k, v in go.verify_mac_dtc(params, coeffs).discrepancies.items():
            worst[k] = max(worst[k], v)
    w = max(worst.values())
    return SuiteResult("mac_dtc_oracle", w <= go.ORACLE_TOL, w, {"draws": draws, **worst})


@_timed
def suite_jdpt_oracle(draws: int = 1000, seed: int = 0) -> SuiteResult:
    """Every draw is audited; mismatches above tolerance are counted and the first few kept."""
    rng = _rng(seed, 3)
    worst = {"r1_max": 0.0, "r2_max": 0.0, "r_sum": 0.0}
    mismatches = []
    n_bad = 0
    for _ in range(draws):
        params = draw_mac(rng)
        bm = params.beta_max(2)
        coeffs = JdptCoefficients(float(rng.uniform(-2.0, 3.0)), float(rng.uniform(-bm, bm)))
        rep = go.verify_jdpt(params, coeffs)
        for k, v in rep.discrepancies.items():
            worst[k] = max(worst[k], v)
        if not rep.passed:
            n_bad += 1
            if len(mismatches) < 5:
                mismatches.append({"params": params, "coeffs": coeffs, "closed": rep.closed_form, "oracle": rep.oracle})
    w = max(worst.values())
    return SuiteResult(
        "jdpt_oracle", n_bad == 0, w, {"draws": draws, "mismatches": n_bad, "examples": mismatches, **worst}
    )


def compensation_objective(p: float, ps: float, pz: float):
    """A strictly increasing transform of the compensation rate in beta, chosen per regime
    so that golden-section search resolves the maximizer well.

    For ``ps < pz`` the beta-dependence is a small correction to ``(p+pz)/pz``, so
    that constant is divided out exactly:
    ``SNR(beta) + 1 - (p+pz)/pz = ps * phi(beta) / pz``.
    """
    if ps >= pz:
        return lambda b: (p - b * b * ps) / (pz + (1.0 - b) ** 2 * ps)
    return lambda b: (pz * (1.0 - 2.0 * b) - (p + pz) * (1.0 - b) ** 2) / (pz + ps * (1.0 - b) ** 2)


@_timed
def suite_beta_star(draws: int = 1000, seed: int = 0) -> SuiteResult:
    rng = _rng(seed, 4)
    worst_beta = worst_rate = 0.0
    for _ in range(draws):
        params, _ = draw_single_user(rng)
        hi = math.sqrt(params.p / params.ps)
        g = golden_section_max(compensation_objective(params.p, params.ps, params.pz), 0.0, hi, tol=1e-12)
        b = beta_star(params)
        worst_beta = max(worst_beta, abs(g - b))
        worst_rate = max(worst_rate, abs(c1_inner(params, min(g, hi)) - c1(params)))
    ok = worst_beta <= 1e-7 and worst_rate <= 1e-12
    return SuiteResult("beta_star", ok, worst_beta, {"draws": draws, "worst_rate_gap": worst_rate})


@_timed
def suite_non_gaussian_inputs(params: SingleUserParams = SingleUserParams(100.0, 100.0, 1.0)) -> SuiteResult:
    """Non-Gaussian U never beats C1; only Gaussian U at beta* attains it."""
    cap = c1(params)
    bs = beta_star(params)
    rows = {}
    ok = True
    worst = -math.inf
    for name, law in go.BUNDLED_DENSITIES.items():
        for tag, b in (("0", 0.0), ("half", bs / 2), ("star", bs)):
            var = params.p - b * b * params.ps
            mi = go.mi_linear_assignment_quadrature(law(var), b, params)
            excess = mi - cap
            rows[f"{name}@{tag}"] = mi
            worst = max(worst, excess)
            tight = abs(excess) <= 1e-6
            if excess > 1e-6 or tight != (name == "gaussian" and tag == "star"):
                ok = False
    return SuiteResult("non_gaussian_inputs", ok, worst, {"c1": cap, **rows})


GAUSSIAN_INPUT_SETTINGS = (
    SingleUserParams(100.0, 100.0, 1.0),
    SingleUserParams(1.0, 100.0, 1.0),
    SingleUserParams(10.0, 1.0, 1.0),
)


@_timed
def suite_gaussian_inputs(trials: int = 10_000, seed: int = 0, settings=GAUSSIAN_INPUT_SETTINGS) -> SuiteResult:
    detail = {}
    violations = 0
    worst = math.inf
    for i, params in enumerate(settings):
        rep = go.gaussian_input_check(params, trials, seed=seed * 1000 + i)
        violations += rep.violations
        worst = min(worst, rep.worst_margin)
        detail[f"p={params.p},ps={params.ps},pz={params.pz}"] = rep.worst_margin
    return SuiteResult("gaussian_inputs", violations == 0, worst, {"trials": trials, "violations": violations, **detail})


def mc_constructions():
    """(label, covariance, group A, group B, analytic MI) for the sampling cross-check."""
    su = SingleUserParams(100.0, 100.0, 1.0)
    bs = beta_star(su)
    mac = MacParams(200.0, 100.0, 100.0, 1.0)
    indep = go.CovModel(("U", "Y"), np.eye(2))
    jd = go.build_cov_jdpt(mac, JdptCoefficients(0.9, 0.3))
    return [
        ("independent", indep, ["U"], ["Y"], 0.0),
        ("dtc_beta_star", go.build_cov_dtc(su, bs), ["U"], ["Y"], c1(su)),
        ("jdpt_sum", jd, ["U1", "U2"], ["Y"], go.gaussian_mi(jd, ["U1", "U2"], ["Y"])),
    ]


@_timed
def suite_monte_carlo(n: int = 1_000_000, seed: int = 0) -> SuiteResult:
    detail = {}
    ok = True
    worst = 0.0
    for k, (label, cov, a, b, exact) in enumerate(mc_constructions()):
        est = go.mc_estimate_mi(cov, a, b, n=n, seed=seed * 100 + k)
        again = go.mc_estimate_mi(cov, a, b, n=n, seed=seed * 100 + k)
        z = abs(est.estimate - exact) / est.stderr if est.stderr > 0 else math.inf
        detail[label] = {"estimate": est.estimate, "stderr": est.stderr, "analytic": exact}
        worst = max(worst, z)
        ok &= z <= 3.0 and est == again
    return SuiteResult("monte_carlo", ok, worst, {"n": n, **detail})


def run_all(seed: int = 0, draws: int = 1000, trials: int = 10_000, mc_samples: int = 1_000_000):
    return [
        suite_c1_oracle(draws, seed),
        suite_mac_dtc_oracle(draws, seed),
        suite_jdpt_oracle(draws, seed),
        suite_beta_star(draws, seed),
        suite_non_gaussian_inputs(),
        suite_gaussian_inputs(trials, seed),
        suite_monte_carlo(mc_samples, seed),
    ]
