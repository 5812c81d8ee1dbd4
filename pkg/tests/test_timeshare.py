import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirtytape import ParameterError
from dirtytape.rate_core import LN2, SingleUserParams, c1, c1_array, c3, c3_array, trivial_upper
from dirtytape.timeshare import (
    TabulatedC2,
    TimeShareSolution,
    c2,
    c4,
    default_support,
    timeshare_objective,
    two_mode_timeshare,
    upper_concave_envelope,
)

P = SingleUserParams
C1 = lambda x: c1_array(x, 100.0, 1.0)  # noqa: E731
C3 = lambda x: c3_array(x, 1.0)  # noqa: E731


def bits(v):
    return v / LN2


class TestObjective:
    def test_no_sharing_corner(self):
        v = timeshare_objective(C1, C3, 100.0, 1.0, 1.0)
        assert float(v) == pytest.approx(c1(P(100, 100, 1)), abs=1e-15)

    def test_other_corner(self):
        v = timeshare_objective(C1, C3, 100.0, 0.0, 0.0)
        assert float(v) == pytest.approx(c3(P(100, 100, 1)), abs=1e-15)

    def test_idle_mode_contributes_zero(self):
        # lam == 0 with xi > 0 wastes power, the idle mode gives nothing
        v = timeshare_objective(C1, C3, 100.0, 0.0, 0.5)
        assert float(v) == pytest.approx(float(C3(np.array(50.0))), abs=1e-15)

    def test_broadcast(self):
        v = timeshare_objective(C1, C1, 10.0, np.linspace(0, 1, 5)[:, None], np.linspace(0, 1, 3)[None, :])
        assert v.shape == (5, 3)
        assert np.all(np.isfinite(v))


class TestTwoMode:
    def test_rejects(self):
        with pytest.raises(ParameterError):
            two_mode_timeshare(C1, C1, -1.0)
        with pytest.raises(ParameterError):
            two_mode_timeshare(C1, C1, 1.0, grid=1)

    def test_solution_bounds(self):
        with pytest.raises(ParameterError):
            TimeShareSolution(1.0, 1.5, 0.0)

    def test_concave_inputs_prefer_no_sharing(self):
        # log1p is concave, so the tie rule must return the (1, 1) corner
        f = lambda x: 0.5 * np.log1p(x)  # noqa: E731
        s = two_mode_timeshare(f, f, 3.0)
        assert (s.lam, s.xi) == (1.0, 1.0)
        assert s.rate == pytest.approx(0.5 * math.log1p(3.0), abs=1e-15)

    def test_zero_power(self):
        s = two_mode_timeshare(C1, C3, 0.0)
        assert s.rate == 0.0

    @settings(max_examples=25, deadline=None)
    @given(st.floats(1e-2, 1e4))
    def test_at_least_each_mode(self, p):
        s = two_mode_timeshare(C1, C3, p, grid=41)
        assert s.rate >= float(C1(np.array(p))) - 1e-15
        assert s.rate >= float(C3(np.array(p))) - 1e-15


class TestC2:
    def test_low_power_gain(self):
        s = c2(P(1, 100, 1))
        assert bits(s.rate) == pytest.approx(0.0195583, abs=1e-6)
        assert s.lam == pytest.approx(0.0077, abs=1e-9) and s.xi == 1.0
        assert s.rate > c1(P(1, 100, 1))

    def test_mid_power_gain(self):
        # the tangent point of the envelope sits above p = 100
        s = c2(P(100, 100, 1))
        assert bits(s.rate) == pytest.approx(1.9558323, abs=1e-6)
        assert s.rate > c1(P(100, 100, 1)) + 0.1

    def test_high_power_no_gain(self):
        s = c2(P(1e4, 100, 1))
        assert (s.lam, s.xi) == (1.0, 1.0)
        assert s.rate == c1(P(1e4, 100, 1))

    @pytest.mark.parametrize("p", [0.3, 1.0, 7.0, 100.0, 1e3])
    def test_matches_envelope_oracle(self, p):
        s = c2(P(p, 100, 1))
        env = upper_concave_envelope(C1, p)
        assert abs(bits(s.rate - env)) <= 1e-4
        assert s.rate <= trivial_upper(P(p, 100, 1))

    def test_ps_zero_no_gain(self):
        s = c2(P(5, 0, 1))
        assert s.rate == pytest.approx(trivial_upper(P(5, 0, 1)), abs=1e-14)


class TestC4:
    def test_low_power_lattice_mix(self):
        s = c4(P(1, 100, 1))
        assert bits(s.rate) == pytest.approx(0.2717472, abs=1e-6)
        assert s.xi == 0.0

    def test_high_power(self):
        s = c4(P(1e4, 100, 1))
        assert bits(s.rate) == pytest.approx(6.63668, abs=1e-5)

    @pytest.mark.parametrize("p", [0.1, 1.0, 30.0, 300.0])
    def test_chain(self, p):
        params = P(p, 100, 1)
        r2, r4 = c2(params).rate, c4(params).rate
        assert c1(params) <= r2 + 1e-12
        assert r2 <= r4 + 1e-12 and c3(params) <= r4 + 1e-12
        assert r4 <= trivial_upper(params) + 1e-12


class TestTabulated:
    def test_exact_at_p(self):
        params = P(3.3, 100, 1)
        t = TabulatedC2(params, grid=41)
        assert float(t(np.array(3.3))) == c2(params, grid=41).rate

    def test_chord_below_exact(self):
        t = TabulatedC2(P(3.3, 100, 1), grid=41)
        xs = np.geomspace(1e-3, 1e4, 15)
        exact = np.array([c2(P(x, 100, 1), grid=41).rate for x in xs])
        assert np.all(t(xs) <= exact + 1e-6)
        assert np.all(t(xs) >= exact - 1e-4)

    def test_beyond_table(self):
        t = TabulatedC2(P(1.0, 100, 1), grid=41)
        x = 1e13
        assert float(t(np.array([x]))[0]) == pytest.approx(c2(P(x, 100, 1), grid=41).rate)


class TestEnvelope:
    def test_concave_function_unchanged(self):
        f = lambda x: np.sqrt(x)  # noqa: E731
        assert upper_concave_envelope(f, 4.0) == pytest.approx(2.0, abs=1e-12)

    def test_lattice_below_threshold_positive(self):
        f = lambda x: c3_array(x, 1.0)  # noqa: E731
        assert c3(P(0.2, 0, 1)) == 0.0
        assert upper_concave_envelope(f, 0.2) == pytest.approx(0.0376722, abs=1e-6)

    def test_convex_piece(self):
        f = lambda x: np.asarray(x, dtype=float) ** 2  # noqa: E731
        assert upper_concave_envelope(f, 1.0, support=np.linspace(0, 2, 101)) == pytest.approx(2.0)

    def test_outside_support(self):
        with pytest.raises(ParameterError):
            upper_concave_envelope(C1, 5.0, support=[0, 1, 2])

    def test_support_contains_p(self):
        s = default_support(7.25)
        assert 7.25 in s and s[0] == 0.0 and s[-1] == pytest.approx(7250.0)
