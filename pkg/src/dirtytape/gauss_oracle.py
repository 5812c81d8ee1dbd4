"""Ground-truth mutual information for the Gaussian constructions.

Everything here is computed from first principles (joint covariances,
quadrature of differential entropies, sampling) and never calls the closed-form
rate expressions except to report discrepancies against them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate, special

from .errors import DegeneracyError, NumericalError, ParameterError
from .mac_regions import JdptCoefficients, MacDtcCoefficients, MacParams, jdpt_bounds, mac_dtc_bounds
from .rate_core import SingleUserParams, c1, c1_inner, check_beta, check_finite

LABELS = ("U", "U1", "U2", "S", "Z", "X", "X1", "X2", "Y")
PSD_TOL = 1e-10
SINGULAR_TOL = 1e-12
ORACLE_TOL = 1e-9


@dataclass(frozen=True)
class CovModel:
    """Zero-mean jointly Gaussian variables with labels and a covariance matrix."""

    names: tuple
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        names = tuple(self.names)
        m = np.array(self.matrix, dtype=float)
        if len(set(names)) != len(names):
            raise ParameterError(f"duplicate labels in {names}")
        unknown = set(names) - set(LABELS)
        if unknown:
            raise ParameterError(f"unknown labels {sorted(unknown)}")
        if m.shape != (len(names), len(names)):
            raise ParameterError(f"matrix shape {m.shape} does not match {len(names)} labels")
        if not np.all(np.isfinite(m)):
            raise ParameterError("covariance entries must be finite")
        scale = max(1.0, float(np.abs(m).max()))
        if not np.allclose(m, m.T, rtol=0, atol=1e-12 * scale):
            raise ParameterError("covariance matrix is not symmetric")
        m = 0.5 * (m + m.T)
        w, v = np.linalg.eigh(m)
        if w.min() < -PSD_TOL:
            raise ParameterError(f"covariance not PSD (min eigenvalue {w.min():.3e})")
        if w.min() < 0:
            m = (v * np.maximum(w, 0.0)) @ v.T
            m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_loadings(cls, names, loadings, source_vars) -> "CovModel":
        """Covariance of ``loadings @ sources`` for independent sources with the given variances."""
        L = np.asarray(loadings, dtype=float)
        return cls(names, (L * np.asarray(source_vars, dtype=float)) @ L.T)

    def index(self, labels: Iterable[str]) -> list:
        try:
            return [self.names.index(n) for n in labels]
        except ValueError as exc:
            raise ParameterError(f"label not in model {self.names}: {exc}") from None

    def var(self, label: str) -> float:
        i = self.names.index(label)
        return float(self.matrix[i, i])

    def cov(self, a: str, b: str) -> float:
        i, j = self.index([a, b])
        return float(self.matrix[i, j])

    def output_residual(self, inputs: Sequence[str], output: str = "Y") -> float:
        """Max deviation of the output's covariance row from ``sum(inputs) + S + Z``."""
        idx = self.index(list(inputs) + ["S", "Z"])
        row = self.matrix[idx].sum(axis=0)
        return float(np.abs(row - self.matrix[self.names.index(output)]).max())


def _logdet(cov: CovModel, labels) -> float:
    """log-determinant of the correlation matrix of ``labels``; constant variables are dropped."""
    labels = [n for n in dict.fromkeys(labels) if cov.var(n) > 0]
    if not labels:
        return 0.0
    idx = cov.index(labels)
    m = cov.matrix[np.ix_(idx, idx)]
    d = np.sqrt(np.diag(m))
    r = m / np.outer(d, d)
    if np.linalg.eigvalsh(r).min() <= SINGULAR_TOL:
        raise DegeneracyError(f"singular covariance on {labels}")
    return 2.0 * float(np.log(np.diag(np.linalg.cholesky(r))).sum())


def _clamp_mi(v: float) -> float:
    if v < -ORACLE_TOL:
        raise NumericalError(f"negative mutual information {v}")
    return max(v, 0.0)


def gaussian_cond_mi(cov: CovModel, a: Sequence[str], b: Sequence[str], c: Sequence[str] = ()) -> float:
    """I(A; B | C) in nats."""
    a, b, c = list(a), list(b), list(c)
    cov.index(a + b + c)
    if set(a) & set(b) - set(c):
        raise DegeneracyError("groups share an unconditioned variable: information is infinite")
    v = 0.5 * (_logdet(cov, a + c) + _logdet(cov, b + c) - _logdet(cov, c) - _logdet(cov, a + b + c))
    return _clamp_mi(v)


def gaussian_mi(cov: CovModel, a: Sequence[str], b: Sequence[str]) -> float:
    """I(A; B) = 1/2 log(det S_A det S_B / det S_AB) in nats."""
    return gaussian_cond_mi(cov, a, b, ())


# ---------------------------------------------------------------------------
# covariance constructions

def build_cov_dtc(params: SingleUserParams, beta: float) -> CovModel:
    """``U ~ N(0, p - beta^2 ps)`` independent of S, ``X = U - beta S``."""
    p, ps, pz = params.p, params.ps, params.pz
    if ps > 0:
        check_beta(beta, p, ps)
    #              U     S     Z
    L = [[1.0, 0.0, 0.0],     # U
         [0.0, 1.0, 0.0],     # S
         [0.0, 0.0, 1.0],     # Z
         [1.0, -beta, 0.0],   # X
         [1.0, 1.0 - beta, 1.0]]  # Y
    return CovModel.from_loadings(("U", "S", "Z", "X", "Y"), L, [max(p - beta * beta * ps, 0.0), ps, pz])


def build_cov_mac_dtc(params: MacParams, coeffs: MacDtcCoefficients) -> CovModel:
    """Both users causal: independent ``Ui ~ N(0, pi - betai^2 ps)``, ``Xi = Ui - betai S``."""
    coeffs.check(params)
    b1, b2 = coeffs.beta1, coeffs.beta2
    ps = params.ps
    #        U1    U2    S                Z
    L = [[1.0, 0.0, 0.0, 0.0],
         [0.0, 1.0, 0.0, 0.0],
         [0.0, 0.0, 1.0, 0.0],
         [0.0, 0.0, 0.0, 1.0],
         [1.0, 0.0, -b1, 0.0],
         [0.0, 1.0, -b2, 0.0],
         [1.0, 1.0, 1.0 - b1 - b2, 1.0]]
    v = [max(params.p1 - b1 * b1 * ps, 0.0), max(params.p2 - b2 * b2 * ps, 0.0), ps, params.pz]
    return CovModel.from_loadings(("U1", "U2", "S", "Z", "X1", "X2", "Y"), L, v)


def build_cov_jdpt(params: MacParams, coeffs: JdptCoefficients) -> CovModel:
    """User 1 noncausal: ``U1 = X1 + alpha S`` with ``X1 ~ N(0, p1)`` independent of S;
    user 2 causal: ``X2 = U2 - beta S``."""
    coeffs.check(params)
    a, b = coeffs.alpha, coeffs.beta
    ps = params.ps
    #        X1    U2    S             Z
    L = [[1.0, 0.0, a, 0.0],           # U1
         [0.0, 1.0, 0.0, 0.0],         # U2
         [0.0, 0.0, 1.0, 0.0],         # S
         [0.0, 0.0, 0.0, 1.0],         # Z
         [1.0, 0.0, 0.0, 0.0],         # X1
         [0.0, 1.0, -b, 0.0],          # X2
         [1.0, 1.0, 1.0 - b, 1.0]]     # Y
    v = [params.p1, max(params.p2 - b * b * ps, 0.0), ps, params.pz]
    return CovModel.from_loadings(("U1", "U2", "S", "Z", "X1", "X2", "Y"), L, v)


# ---------------------------------------------------------------------------
# closed form vs oracle

@dataclass
class VerificationReport:
    name: str
    closed_form: dict
    oracle: dict
    tol: float = ORACLE_TOL

    @property
    def discrepancies(self) -> dict:
        return {k: abs(self.closed_form[k] - self.oracle[k]) for k in self.closed_form}

    @property
    def worst(self) -> float:
        return max(self.discrepancies.values())

    @property
    def passed(self) -> bool:
        return self.worst <= self.tol


def verify_c1(params: SingleUserParams, beta: float) -> VerificationReport:
    cov = build_cov_dtc(params, beta)
    return VerificationReport(
        "c1", {"rate": c1_inner(params, beta)}, {"rate": gaussian_mi(cov, ["U"], ["Y"])}
    )


def verify_mac_dtc(params: MacParams, coeffs: MacDtcCoefficients) -> VerificationReport:
    cov = build_cov_mac_dtc(params, coeffs)
    r1, r2, rs = mac_dtc_bounds(params.p1, params.p2, params.ps, params.pz, coeffs.beta1, coeffs.beta2)
    oracle = {
        "r1_max": gaussian_cond_mi(cov, ["U1"], ["Y"], ["U2"]),
        "r2_max": gaussian_cond_mi(cov, ["U2"], ["Y"], ["U1"]),
        "r_sum": gaussian_mi(cov, ["U1", "U2"], ["Y"]),
    }
    return VerificationReport("mac_dtc", {"r1_max": float(r1), "r2_max": float(r2), "r_sum": float(rs)}, oracle)


def verify_jdpt(params: MacParams, coeffs: JdptCoefficients) -> VerificationReport:
    """Compares the unclamped JDPT closed forms with the binning-rate expressions
    I(U1;Y|U2) - I(U1;S), I(U2;Y|U1), I(U1,U2;Y) - I(U1;S)."""
    cov = build_cov_jdpt(params, coeffs)
    r1, r2, rs = jdpt_bounds(params.p1, params.p2, params.ps, params.pz, coeffs.alpha, coeffs.beta)
    bin_rate = gaussian_mi(cov, ["U1"], ["S"])
    oracle = {
        "r1_max": gaussian_cond_mi(cov, ["U1"], ["Y"], ["U2"]) - bin_rate,
        "r2_max": gaussian_cond_mi(cov, ["U2"], ["Y"], ["U1"]),
        "r_sum": gaussian_mi(cov, ["U1", "U2"], ["Y"]) - bin_rate,
    }
    return VerificationReport("jdpt", {"r1_max": float(r1), "r2_max": float(r2), "r_sum": float(rs)}, oracle)


# ---------------------------------------------------------------------------
# univariate inputs for linear assignment with non-Gaussian U

_SQRT2PI = math.sqrt(2.0 * math.pi)


def _normal_pdf(x, sigma):
    return np.exp(-0.5 * (x / sigma) ** 2) / (sigma * _SQRT2PI)


def _normal_cdf(x, sigma):
    return special.ndtr(x / sigma)


class ScalarDensity:
    """Zero-mean univariate law of U.

    Subclasses give ``pdf`` on ``support``; ``convolved_pdf`` (the density of
    U plus independent Gaussian noise) defaults to adaptive quadrature and may be
    overridden with a closed form. Discrete laws override ``convolved_pdf``
    and ``breakpoints`` only.
    """

    variance: float

    def support(self):
        raise NotImplementedError

    def pdf(self, u):
        raise NotImplementedError

    def breakpoints(self) -> list:
        lo, hi = self.support()
        return [lo, 0.0, hi]

    def convolved_pdf(self, y: float, sigma: float) -> float:
        lo, hi = self.support()
        val, _ = integrate.quad(
            lambda u: self.pdf(u) * _normal_pdf(y - u, sigma),
            lo, hi, points=[0.0, y] if lo < y < hi else [0.0],
            epsabs=1e-14, epsrel=1e-12, limit=200,
        )
        return val

    def total_mass(self) -> float:
        lo, hi = self.support()
        val, _ = integrate.quad(self.pdf, lo, hi, points=[0.0], epsabs=1e-12, limit=200)
        return val


@dataclass(frozen=True)
class GaussianDensity(ScalarDensity):
    variance: float

    def support(self):
        s = 12.0 * math.sqrt(self.variance)
        return (-s, s)

    def pdf(self, u):
        return _normal_pdf(u, math.sqrt(self.variance))

    def convolved_pdf(self, y, sigma):
        return float(_normal_pdf(y, math.sqrt(self.variance + sigma * sigma)))


@dataclass(frozen=True)
class UniformDensity(ScalarDensity):
    variance: float

    @property
    def half_width(self):
        return math.sqrt(3.0 * self.variance)

    def support(self):
        return (-self.half_width, self.half_width)

    def pdf(self, u):
        w = self.half_width
        return np.where(np.abs(u) <= w, 0.5 / w, 0.0)

    def convolved_pdf(self, y, sigma):
        w = self.half_width
        return float((_normal_cdf(y + w, sigma) - _normal_cdf(y - w, sigma)) / (2.0 * w))


@dataclass(frozen=True)
class TriangularDensity(ScalarDensity):
    """Symmetric triangle on [-w, w]; convolution left to quadrature."""

    variance: float

    @property
    def half_width(self):
        return math.sqrt(6.0 * self.variance)

    def support(self):
        return (-self.half_width, self.half_width)

    def pdf(self, u):
        w = self.half_width
        return np.maximum(w - np.abs(u), 0.0) / (w * w)


@dataclass(frozen=True)
class TwoPointDensity(ScalarDensity):
    """Equiprobable atoms at +-sqrt(variance)."""

    variance: float

    def support(self):
        a = math.sqrt(self.variance)
        return (-a, a)

    def pdf(self, u):
        raise ParameterError("two-point law has no density; use convolved_pdf")

    def total_mass(self):
        return 1.0

    def convolved_pdf(self, y, sigma):
        a = math.sqrt(self.variance)
        return float(0.5 * (_normal_pdf(y - a, sigma) + _normal_pdf(y + a, sigma)))


BUNDLED_DENSITIES = {
    "gaussian": GaussianDensity,
    "uniform": UniformDensity,
    "triangular": TriangularDensity,
    "two_point": TwoPointDensity,
}

QUAD_TOL = 1e-7


def output_entropy(density: ScalarDensity, sigma: float) -> tuple:
    """(h(U + N(0, sigma^2)), quadrature error estimate) in nats."""
    span = 10.0 * math.sqrt(density.variance + sigma * sigma)
    lo, hi = density.support()
    a, b = min(-span, lo - 10 * sigma), max(span, hi + 10 * sigma)

    def integrand(y):
        q = density.convolved_pdf(y, sigma)
        return -q * math.log(q) if q > 0 else 0.0

    pts = sorted({lo, 0.0, hi})
    val, err = integrate.quad(integrand, a, b, points=pts, epsabs=1e-9, epsrel=1e-11, limit=500)
    return val, err


def mi_linear_assignment_quadrature(density: ScalarDensity, beta: float, params: SingleUserParams) -> float:
    """I(U; Y) for ``X = U - beta S`` with U drawn from ``density``, by quadrature.

    Uses ``I = h(U + (1-beta) S + Z) - h((1-beta) S + Z)``; the second term is Gaussian.
    """
    p, ps, pz = params.p, params.ps, params.pz
    if ps > 0:
        check_beta(beta, p, ps)
    budget = p - beta * beta * ps
    if density.variance > budget * (1 + 1e-12) + 1e-300:
        raise ParameterError(f"Var(U)={density.variance} exceeds power left after cleaning {budget}")
    if density.variance == 0:
        return 0.0
    noise_var = (1.0 - beta) ** 2 * ps + pz
    sigma = math.sqrt(noise_var)
    h_y, err = output_entropy(density, sigma)
    if not err <= QUAD_TOL:
        raise NumericalError(f"quadrature error estimate {err:.2e} above {QUAD_TOL}")
    h_noise = 0.5 * math.log(2.0 * math.pi * math.e * noise_var)
    return h_y - h_noise


# ---------------------------------------------------------------------------
# jointly Gaussian (X, S, U) with U independent of S

@dataclass
class GaussianInputReport:
    trials: int
    violations: int
    worst_margin: float
    worst_bound_gap: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def triple_cov(params: SingleUserParams, direction) -> CovModel:
    """Cov of (U, S, Z, X, Y) with ``X = sqrt(p) (a U' + b S' + c N')``, unit (a, b, c).

    ``U' = U`` and ``S' = S/sqrt(ps)`` are independent standard normals and ``N'``
    is private transmitter noise, so U is independent of S and E[X^2] = p.
    """
    a, b, c = (float(t) for t in direction)
    sp = math.sqrt(params.p)
    # sources: U', S', N', Z  (unit, unit, unit, pz)
    ss = math.sqrt(params.ps)
    L = [[1.0, 0.0, 0.0, 0.0],
         [0.0, ss, 0.0, 0.0],
         [0.0, 0.0, 0.0, 1.0],
         [sp * a, sp * b, sp * c, 0.0],
         [sp * a, sp * b + ss, sp * c, 1.0]]
    return CovModel.from_loadings(("U", "S", "Z", "X", "Y"), L, [1.0, 1.0, 1.0, params.pz])


def linear_bound(params: SingleUserParams, beta: float) -> float:
    """1/2 log(1 + (p - beta^2 ps)/(pz + (1-beta)^2 ps)) for any real beta with beta^2 ps <= p."""
    p, ps, pz = params.p, params.ps, params.pz
    return 0.5 * math.log1p(max(p - beta * beta * ps, 0.0) / (pz + (1.0 - beta) ** 2 * ps))


def gaussian_input_check(params: SingleUserParams, trials: int = 10_000, seed: int = 0) -> GaussianInputReport:
    """Random jointly Gaussian inputs never beat C1.

    Odd trials include private noise in X; even trials make X a deterministic
    linear function of (U, S). Each trial also checks the intermediate bound at
    ``beta = -E[XS]/ps``.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    cap = c1(params)
    violations = 0
    worst = math.inf
    worst_gap = math.inf
    for t in range(trials):
        d = rng.standard_normal(3)
        if t % 2 == 0:
            d[2] = 0.0
        d /= np.linalg.norm(d)
        cov = triple_cov(params, d)
        mi = gaussian_mi(cov, ["U"], ["Y"])
        b = -cov.cov("X", "S") / params.ps if params.ps > 0 else 0.0
        bound = linear_bound(params, b)
        margin = cap - mi
        gap = bound - mi
        if margin < -ORACLE_TOL or gap < -ORACLE_TOL:
            violations += 1
        worst = min(worst, margin)
        worst_gap = min(worst_gap, gap)
    return GaussianInputReport(trials, violations, worst, worst_gap)


# ---------------------------------------------------------------------------
# sampling cross-check

@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    stderr: float
    n: int


def _mi_from_matrix(m: np.ndarray, ka: int) -> float:
    d = np.sqrt(np.diag(m))
    r = m / np.outer(d, d)

    def ld(x):
        sign, v = np.linalg.slogdet(x)
        if sign <= 0:
            raise NumericalError("singular sample covariance")
        return v

    return 0.5 * (ld(r[:ka, :ka]) + ld(r[ka:, ka:]) - ld(r))


def mc_estimate_mi(
    cov: CovModel,
    a: Sequence[str],
    b: Sequence[str],
    n: int = 1_000_000,
    seed: int = 0,
    groups: int = 100,
) -> MCEstimate:
    """Plug-in Gaussian MI from ``n`` samples with a delete-a-group jackknife error.

    Samples come from a Philox stream keyed by ``seed``; equal seeds give identical results.
    """
    if n < 1000:
        raise ParameterError(f"need n >= 1000 samples, got {n}")
    check_finite(seed=seed)
    a = [x for x in a if cov.var(x) > 0]
    b = [x for x in b if cov.var(x) > 0]
    if not a or not b:
        return MCEstimate(0.0, 0.0, n)
    idx = cov.index(a + b)
    m = cov.matrix[np.ix_(idx, idx)]
    w, v = np.linalg.eigh(m)
    root = v * np.sqrt(np.maximum(w, 0.0))
    rng = np.random.Generator(np.random.Philox(seed))
    x = rng.standard_normal((n, len(idx))) @ root.T

    starts = np.linspace(0, n, groups + 1).astype(int)[:-1]
    s1 = np.add.reduceat(x, starts, axis=0)
    s2 = np.add.reduceat(x[:, :, None] * x[:, None, :], starts, axis=0)
    counts = np.diff(np.append(starts, n))

    def est(t1, t2, k):
        mean = t1 / k
        return _mi_from_matrix((t2 - k * np.outer(mean, mean)) / (k - 1), len(a))

    T1, T2 = s1.sum(axis=0), s2.sum(axis=0)
    full = est(T1, T2, n)
    loo = np.array([est(T1 - s1[g], T2 - s2[g], n - counts[g]) for g in range(groups)])
    se = math.sqrt((groups - 1) / groups * np.sum((loo - loo.mean()) ** 2))
    return MCEstimate(float(full), float(se), n)


__all__ = [
    "BUNDLED_DENSITIES",
    "CovModel",
    "GaussianDensity",
    "MCEstimate",
    "ScalarDensity",
    "GaussianInputReport",
    "TriangularDensity",
    "TwoPointDensity",
    "UniformDensity",
    "VerificationReport",
    "build_cov_dtc",
    "build_cov_jdpt",
    "build_cov_mac_dtc",
    "gaussian_cond_mi",
    "gaussian_mi",
    "mc_estimate_mi",
    "mi_linear_assignment_quadrature",
    "gaussian_input_check",
    "triple_cov",
    "verify_c1",
    "verify_jdpt",
    "verify_mac_dtc",
]
