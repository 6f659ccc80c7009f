import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from proadapt import (Direction, SlaSpec, Tactic, TimeSeries, UtilityParams,
                      order_specs_by_reward, utility)


def params(**overrides):
    base = dict(tau=1.0, rate=10.0, response_time=0.5, target=0.7, max_rate=20.0,
                dimmer=1.0, reward_optional=2.0, reward_mandatory=1.0, cost=1.0)
    base.update(overrides)
    return UtilityParams(**base)


class TestUtility:
    def test_within_target_full_dimmer(self):
        assert utility(params()) == pytest.approx(20.0)

    def test_over_target_penalized(self):
        p = params(response_time=0.9, dimmer=0.5)
        assert utility(p) == pytest.approx(-20.0)

    def test_mixed_dimmer_hand_computed(self):
        p = params(tau=2.0, rate=5.0, response_time=0.6, max_rate=10.0, dimmer=0.25,
                   reward_optional=4.0, reward_mandatory=2.0, cost=2.0)
        expected = 2.0 * 5.0 * (0.25 * 4.0 + 0.75 * 2.0) / 2.0
        assert utility(p) == pytest.approx(expected)
        assert expected == 12.5

    def test_nonpositive_cost_rejected(self):
        with pytest.raises(ValueError):
            params(cost=0.0)
        with pytest.raises(ValueError):
            params(cost=-1.0)

    def test_over_target_at_capacity_is_zero(self):
        # min(0, a - k) clamps whenever the request rate meets capacity
        for rate in (20.0, 25.0, 100.0):
            assert utility(params(response_time=1.0, rate=rate, max_rate=20.0)) == 0.0

    def test_linear_hence_continuous_in_dimmer(self):
        lo, hi = utility(params(dimmer=0.0)), utility(params(dimmer=1.0))
        for d in np.linspace(0.0, 1.0, 11):
            assert utility(params(dimmer=float(d))) == pytest.approx(lo + d * (hi - lo))

    @given(st.floats(0.1, 50.0), st.floats(0.0, 50.0))
    def test_monotone_in_optional_reward(self, r_lo, bump):
        d = 0.4
        low = utility(params(dimmer=d, reward_optional=r_lo))
        high = utility(params(dimmer=d, reward_optional=r_lo + bump))
        assert high >= low

    def test_cost_scaling_is_exact_for_powers_of_two(self):
        base = params(cost=1.0)
        for scale in (0.5, 2.0, 4.0, 8.0):
            assert utility(params(cost=scale)) == utility(base) / scale

    @given(st.floats(0.01, 1e6))
    def test_cost_scaling_inverse(self, scale):
        assert utility(params(cost=scale)) == pytest.approx(utility(params()) / scale,
                                                            rel=1e-12)

    def test_dimmer_bounds_enforced(self):
        with pytest.raises(ValueError):
            params(dimmer=1.5)
        with pytest.raises(ValueError):
            params(dimmer=-0.1)


class TestOrderSpecsByReward:
    def test_reward_ordering(self):
        resp = SlaSpec("response_time", 3.0, penalty=3.0, reward=10.0)
        load = SlaSpec("server_load", 0.75, penalty=2.0, reward=7.0)
        assert [s.name for s in order_specs_by_reward([load, resp])] == \
            ["response_time", "server_load"]

    def test_empty(self):
        assert order_specs_by_reward([]) == []

    def test_ties_keep_input_order(self):
        a = SlaSpec("a", 1.0, reward=5.0)
        b = SlaSpec("b", 1.0, reward=5.0)
        assert [s.name for s in order_specs_by_reward([a, b])] == ["a", "b"]

    @given(st.lists(st.floats(0.0, 100.0), max_size=12))
    def test_idempotent_permutation(self, rewards):
        specs = [SlaSpec(f"s{i}", 1.0, reward=r) for i, r in enumerate(rewards)]
        ordered = order_specs_by_reward(specs)
        assert sorted(s.name for s in ordered) == sorted(s.name for s in specs)
        assert order_specs_by_reward(ordered) == ordered
        assert len(ordered) == len(specs)


class TestTimeSeries:
    def test_rejects_nan_and_inf(self):
        with pytest.raises(ValueError):
            TimeSeries([1.0, float("nan")])
        with pytest.raises(ValueError):
            TimeSeries([1.0, math.inf])

    def test_rejects_bad_interval(self):
        with pytest.raises(ValueError):
            TimeSeries([1.0], interval=0.0)
        with pytest.raises(ValueError):
            TimeSeries([1.0], interval=-6.0)

    def test_empty_allowed(self):
        assert len(TimeSeries([])) == 0

    def test_values_are_frozen(self):
        series = TimeSeries([1.0, 2.0])
        with pytest.raises(ValueError):
            series.values[0] = 9.0


class TestSpecAndTactic:
    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SlaSpec("bad", float("inf"))
        with pytest.raises(ValueError):
            SlaSpec("bad", 1.0, reward=-1.0)
        with pytest.raises(ValueError):
            SlaSpec("", 1.0)

    def test_spec_violation_directions(self):
        upper = SlaSpec("u", 0.7, direction=Direction.UPPER_BOUND)
        lower = SlaSpec("l", 0.7, direction=Direction.LOWER_BOUND)
        assert upper.violates(0.8) and not upper.violates(0.7)
        assert lower.violates(0.6) and not lower.violates(0.7)

    def test_tactic_validation(self):
        with pytest.raises(ValueError):
            Tactic("t", -1.0, 0.0)
        with pytest.raises(ValueError):
            Tactic("t", 1.0, 1.0, feature_names=())
        with pytest.raises(ValueError):
            Tactic("t", 1.0, 1.0, feature_names=("a", "a"))
