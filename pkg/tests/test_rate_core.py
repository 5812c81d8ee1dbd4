import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirtytape import ParameterError
from dirtytape.rate_core import (
    LATTICE_LOSS,
    LATTICE_THRESHOLD_SNR,
    LN2,
    SingleUserParams,
    beta_star,
    c1,
    c1_inner,
    c3,
    costa_alpha,
    to_unit,
    trivial_upper,
)
from dirtytape.search import golden_section_max

P = SingleUserParams
bits = lambda v: v / LN2  # noqa: E731

powers = st.floats(min_value=1e-3, max_value=1e5)
noise = st.floats(min_value=1e-2, max_value=1e2)


def dense_max(params, n=200_001):
    """Brute-force max of the compensation rate over the admissible beta interval."""
    hi = math.sqrt(params.p / params.ps)
    b = np.linspace(0.0, hi, n)
    vals = 0.5 * np.log1p(np.maximum(params.p - b * b * params.ps, 0) / (params.pz + (1 - b) ** 2 * params.ps))
    k = int(np.argmax(vals))
    return b[k], vals[k]


class TestParams:
    @pytest.mark.parametrize("bad", [(-1, 1, 1), (1, -1, 1), (1, 1, 0), (1, 1, -2), (math.nan, 1, 1), (1, math.inf, 1)])
    def test_rejects(self, bad):
        with pytest.raises(ParameterError):
            P(*bad)

    def test_zero_power_ok(self):
        assert P(0, 0, 1).p == 0


class TestC1Inner:
    def test_zero_power(self):
        assert c1_inner(P(0, 100, 1), 0.0) == 0.0

    def test_no_cleaning(self):
        v = c1_inner(P(100, 100, 1), 0.0)
        assert v == pytest.approx(0.5 * math.log(1 + 100 / 101))
        assert bits(v) == pytest.approx(0.4964, abs=1e-4)

    def test_full_cancellation(self):
        v = c1_inner(P(200, 100, 1), 1.0)
        assert bits(v) == pytest.approx(0.5 * math.log2(101), abs=1e-12)
        assert bits(v) == pytest.approx(3.3291, abs=1e-4)

    @pytest.mark.parametrize("beta", [-0.1, 1.0 + 1e-6, math.nan])
    def test_domain(self, beta):
        with pytest.raises(ParameterError):
            c1_inner(P(100, 100, 1), beta)

    def test_domain_edge_is_zero_rate(self):
        assert c1_inner(P(100, 100, 1), 1.0) == 0.0 or c1_inner(P(100, 100, 1), 1.0) < 1e-14


class TestBetaStar:
    def test_no_interference(self):
        assert beta_star(P(100, 0, 1)) == 0.0

    def test_closed_form_value(self):
        b = beta_star(P(100, 100, 1))
        assert b == pytest.approx((201 - math.sqrt(401)) / 200, abs=1e-15)
        assert b == pytest.approx(0.904875, abs=1e-6)
        g = golden_section_max(lambda x: c1_inner(P(100, 100, 1), x), 0, 1, tol=1e-12)
        assert abs(g - b) < 1e-7

    def test_second_example_vs_grid(self):
        b = beta_star(P(4, 1, 1))
        assert b == pytest.approx((6 - math.sqrt(20)) / 2, abs=1e-15)
        bg, _ = dense_max(P(4, 1, 1))
        assert abs(bg - b) < 1e-4

    @given(powers, powers, noise)
    def test_in_domain(self, p, ps, pz):
        b = beta_star(P(p, ps, pz))
        assert 0 <= b and b * b * ps <= p * (1 + 1e-12)


class TestC1:
    def test_zero(self):
        assert c1(P(0, 100, 1)) == 0

    def test_reference_point(self):
        params = P(100, 100, 1)
        _, best = dense_max(params)
        assert c1(params) >= best - 1e-12
        assert bits(c1(params)) == pytest.approx(1.6970164, abs=1e-6)

    def test_interference_free(self):
        assert bits(c1(P(100, 0, 1))) == pytest.approx(0.5 * math.log2(101), abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(powers, powers, noise)
    def test_beats_every_grid_beta(self, p, ps, pz):
        params = P(p, ps, pz)
        hi = math.sqrt(p / ps)
        best = c1(params)
        for b in np.linspace(0, hi, 2001):
            assert c1_inner(params, float(min(b, hi))) <= best + 1e-12

    @given(powers, powers, noise)
    def test_below_upper(self, p, ps, pz):
        assert c1(P(p, ps, pz)) <= trivial_upper(P(p, ps, pz)) + 1e-15

    @given(powers, noise)
    def test_ps_zero_collapse(self, p, pz):
        assert abs(c1(P(p, 0, pz)) - trivial_upper(P(p, 0, pz))) <= 1e-12

    def test_monotone(self):
        ps_grid = np.geomspace(1e-2, 1e4, 60)
        p_grid = np.geomspace(1e-3, 1e5, 80)
        for pz in (0.1, 1.0, 10.0):
            for ps in ps_grid[::7]:
                r = [c1(P(p, ps, pz)) for p in p_grid]
                assert np.all(np.diff(r) >= -1e-15)
            for p in p_grid[::9]:
                r = [c1(P(p, ps, pz)) for ps in ps_grid]
                assert np.all(np.diff(r) <= 1e-15)

    def test_high_snr_closure(self):
        params = P(1e4, 100, 1)
        assert bits(trivial_upper(params) - c1(params)) <= 0.01


class TestC3:
    def test_zero(self):
        assert c3(P(0, 5, 1)) == 0

    def test_value(self):
        v = bits(c3(P(100, 0, 1)))
        assert v == pytest.approx(0.5 * math.log2(101) - 0.5 * math.log2(2 * math.pi * math.e / 12), abs=1e-12)
        assert v == pytest.approx(3.0745, abs=1e-4)

    def test_threshold(self):
        assert LATTICE_THRESHOLD_SNR == pytest.approx(0.42329, abs=1e-5)
        assert c3(P(LATTICE_THRESHOLD_SNR, 0, 1)) == 0.0
        assert c3(P(LATTICE_THRESHOLD_SNR * 1.0001, 0, 1)) > 0

    def test_independent_of_ps(self):
        assert c3(P(3, 0, 1)) == c3(P(3, 1e4, 1))

    @given(powers, powers, noise)
    def test_gap_to_upper(self, p, ps, pz):
        params = P(p, ps, pz)
        v = c3(params)
        assert v <= trivial_upper(params)
        if v > 0:
            assert trivial_upper(params) - v == pytest.approx(LATTICE_LOSS, abs=1e-12)


class TestUpperAndAlpha:
    def test_upper(self):
        assert trivial_upper(P(0, 1, 1)) == 0
        assert bits(trivial_upper(P(1, 7, 1))) == pytest.approx(0.5, abs=1e-15)
        assert bits(trivial_upper(P(100, 7, 1))) == pytest.approx(3.3291, abs=1e-4)

    def test_alpha(self):
        assert costa_alpha(P(0, 1, 1)) == 0
        assert costa_alpha(P(100, 1, 1)) == pytest.approx(100 / 101)
        assert costa_alpha(P(3, 1, 3)) == 0.5

    def test_units(self):
        assert to_unit(1.0, "nats") == 1.0
        assert to_unit(LN2, "bits") == pytest.approx(1.0)
        with pytest.raises(ParameterError):
            to_unit(1.0, "dB")
