import json

import numpy as np
import pytest

from proadapt import (ArimaOrder, Direction, RegressionModel, SlaSpec, SpecAnalysis,
                      SpecStatus, TacticEstimate, TacticModels, Tactic, TimeSeries,
                      UtilityParams, WorkflowConfig, analyze_specification,
                      entries_to_json_lines, fit_arima, generate_trace,
                      make_cost_estimate, make_latency_estimate, rank_tactics,
                      to_regression_dataset, workflow_tick, fit_mra)

UPPER = SlaSpec("response_time", 0.7, direction=Direction.UPPER_BOUND,
                penalty=3.0, reward=10.0)


def ramp(start, step, n, interval=6.0):
    return TimeSeries(start + step * np.arange(n), interval=interval)


class TestAnalyzeSpecification:
    def test_flat_history_is_healthy(self):
        history = TimeSeries(np.full(60, 0.3), interval=6.0)
        analysis = analyze_specification(UPPER, history, horizon=5, risk_margin=0.1)
        assert analysis.status is SpecStatus.HEALTHY
        assert analysis.first_violation_step is None

    def test_ramp_toward_threshold_is_at_risk(self):
        # climbing 0.05 per six-second tick, currently at 0.65: the drift
        # forecast reaches the 0.63 risk band immediately
        history = ramp(0.50, 0.05, 4)
        padded = TimeSeries(np.concatenate([np.full(20, 0.50), history.values]),
                            interval=6.0)
        analysis = analyze_specification(UPPER, padded, horizon=3, risk_margin=0.1)
        assert analysis.status is SpecStatus.AT_RISK
        assert analysis.first_violation_step in (1, 2)

    def test_current_violation_dominates(self):
        values = np.concatenate([np.full(30, 0.4), [0.9]])
        analysis = analyze_specification(UPPER, TimeSeries(values, interval=6.0),
                                         horizon=5, risk_margin=0.1)
        assert analysis.status is SpecStatus.BROKEN
        assert analysis.first_violation_step is None

    def test_zero_margin_single_step_equals_forecast_violation(self):
        steep = TimeSeries(np.concatenate([np.full(15, 0.40),
                                           0.40 + 0.04 * np.arange(1, 8)]), interval=6.0)
        analysis = analyze_specification(UPPER, steep, horizon=1, risk_margin=0.0)
        assert analysis.status is SpecStatus.AT_RISK  # next value forecast > 0.7
        gentle = ramp(0.10, 0.001, 60)
        analysis = analyze_specification(UPPER, gentle, horizon=1, risk_margin=0.0)
        assert analysis.status is SpecStatus.HEALTHY

    def test_lower_bound_direction(self):
        spec = SlaSpec("throughput", 100.0, direction=Direction.LOWER_BOUND)
        falling = ramp(130.0, -1.0, 25)
        analysis = analyze_specification(spec, falling, horizon=10, risk_margin=0.0)
        assert analysis.status is SpecStatus.AT_RISK
        # forecasts 105, 104, ...: the first value strictly below 100 is step 7
        assert analysis.first_violation_step == 7

    def test_prefit_model_reused(self):
        history = ramp(0.30, 0.002, 80)
        model = fit_arima(history, ArimaOrder(1, 1, 0))
        later = TimeSeries(history.values + 0.2, interval=6.0)
        analysis = analyze_specification(UPPER, later, horizon=5, risk_margin=0.1,
                                         model=model)
        # parameters came from the old fit, origin from the new tail
        assert analysis.forecast_values[0] == pytest.approx(
            later.values[-1] + model.c + model.phi * 0.002, abs=1e-9)

    def test_validation(self):
        history = ramp(0.3, 0.0, 40)
        with pytest.raises(ValueError):
            analyze_specification(UPPER, history, horizon=0, risk_margin=0.1)
        with pytest.raises(ValueError):
            analyze_specification(UPPER, history, horizon=5, risk_margin=1.0)


class TestEstimates:
    def test_constant_history_predicts_constant(self):
        rows = np.column_stack([np.ones(50), np.random.default_rng(1).normal(size=50)])
        from proadapt import DesignMatrix, ResponseVector
        model = fit_mra(DesignMatrix(rows), ResponseVector(np.full(50, 4.2)))
        tactic = Tactic("t", 1.0, 1.0, feature_names=("intercept", "x1"))
        assert make_latency_estimate(tactic, [1.0, 0.3], model) == pytest.approx(4.2)

    def test_zero_weight_model(self):
        tactic = Tactic("t", 1.0, 1.0, feature_names=("intercept",))
        model = RegressionModel(weights=(0.0,))
        assert make_latency_estimate(tactic, [1.0], model) == 0.0
        assert make_cost_estimate(tactic, [1.0], model) == 0.0

    def test_peak_hour_beats_off_peak_for_same_lags(self):
        records = generate_trace(1440, seed=20)
        X, latency, energy = to_regression_dataset(records)
        latency_model = fit_mra(X, latency)
        cost_model = fit_mra(X, energy)
        tactic = Tactic("download", 3.0, 30.0, feature_names=X.column_names)
        base = list(X.rows[-1])
        sin_col = X.column_names.index("hour_sin")
        cos_col = X.column_names.index("hour_cos")

        def at_hour(hour):
            x = list(base)
            x[sin_col] = np.sin(2 * np.pi * hour / 24)
            x[cos_col] = np.cos(2 * np.pi * hour / 24)
            return x

        peak, trough = at_hour(20), at_hour(8)
        assert make_latency_estimate(tactic, peak, latency_model) > \
            make_latency_estimate(tactic, trough, latency_model)
        assert make_cost_estimate(tactic, peak, cost_model) > \
            make_cost_estimate(tactic, trough, cost_model)

    def test_missing_model_rejected(self):
        tactic = Tactic("t", 1.0, 1.0)
        with pytest.raises(ValueError):
            make_latency_estimate(tactic, [1.0], None)


def estimate(name, latency, cost, score):
    return TacticEstimate(name, latency, cost, score)


def at_risk_analysis(step=2, horizon=5):
    forecast = tuple(0.8 for _ in range(horizon))
    return SpecAnalysis("s", forecast, SpecStatus.AT_RISK, first_violation_step=step)


class TestRankTactics:
    def test_feasibility_dominates(self):
        # deadline is 2 ticks * 6 s = 12 s
        slow = estimate("slow", 60.0, 1.0, 100.0)
        fast = estimate("fast", 5.0, 9.0, 1.0)
        ranked = rank_tactics([slow, fast], at_risk_analysis(), tick_seconds=6.0)
        assert [e.tactic_name for e in ranked] == ["fast", "slow"]

    def test_utility_orders_within_group(self):
        a = estimate("a", 1.0, 5.0, 10.0)
        b = estimate("b", 1.0, 5.0, 7.0)
        ranked = rank_tactics([b, a], at_risk_analysis(), tick_seconds=6.0)
        assert [e.tactic_name for e in ranked] == ["a", "b"]

    def test_cost_breaks_utility_ties(self):
        cheap = estimate("cheap", 1.0, 5.0, 3.0)
        dear = estimate("dear", 1.0, 7.0, 3.0)
        ranked = rank_tactics([dear, cheap], at_risk_analysis(), tick_seconds=6.0)
        assert [e.tactic_name for e in ranked] == ["cheap", "dear"]

    def test_input_order_breaks_remaining_ties(self):
        first = estimate("first", 1.0, 5.0, 3.0)
        second = estimate("second", 1.0, 5.0, 3.0)
        ranked = rank_tactics([first, second], at_risk_analysis(), tick_seconds=6.0)
        assert [e.tactic_name for e in ranked] == ["first", "second"]

    def test_permutation_and_rescale_invariance(self):
        rng = np.random.default_rng(27)
        estimates = [estimate(f"t{i}", float(rng.uniform(0, 30)),
                              float(rng.uniform(0, 10)), float(rng.uniform(-5, 5)))
                     for i in range(8)]
        ranked = rank_tactics(estimates, at_risk_analysis(), tick_seconds=6.0)
        assert sorted(e.tactic_name for e in ranked) == sorted(e.tactic_name
                                                               for e in estimates)
        scaled = [estimate(e.tactic_name, e.predicted_latency, e.predicted_cost,
                           e.utility_score * 3.5) for e in estimates]
        rescaled = rank_tactics(scaled, at_risk_analysis(), tick_seconds=6.0)
        assert [e.tactic_name for e in rescaled] == [e.tactic_name for e in ranked]

    def test_broken_spec_leaves_no_lead_time(self):
        broken = SpecAnalysis("s", (0.9,), SpecStatus.BROKEN)
        instant = estimate("instant", 0.0, 1.0, 0.0)
        slow = estimate("slow", 0.5, 1.0, 10.0)
        ranked = rank_tactics([slow, instant], broken, tick_seconds=6.0)
        assert ranked[0].tactic_name == "instant"

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            rank_tactics([], at_risk_analysis(), tick_seconds=6.0)


class TickFixture:
    def __init__(self, n_tactics=3):
        self.spec_hot = SlaSpec("hot", 0.7, reward=10.0)
        self.spec_warm = SlaSpec("warm", 0.7, reward=7.0)
        self.spec_cool = SlaSpec("cool", 10.0, reward=1.0)
        rising = ramp(0.50, 0.01, 40).values
        flat = np.full(40, 0.3)
        self.histories = {
            "hot": TimeSeries(rising, interval=6.0),
            "warm": TimeSeries(rising * 0.99, interval=6.0),
            "cool": TimeSeries(flat, interval=6.0),
        }
        self.tactics = [Tactic(f"t{i}", 1.0, 1.0, feature_names=("intercept",))
                        for i in range(n_tactics)]
        self.registry = {t.name: TacticModels(RegressionModel(weights=(float(i + 1),)),
                                              RegressionModel(weights=(float(i + 2),)))
                         for i, t in enumerate(self.tactics)}
        self.features = {t.name: (1.0,) for t in self.tactics}

    def run(self, specs, config=None):
        return workflow_tick(specs, self.histories, self.tactics, self.registry,
                             self.features, config)


class TestWorkflowTick:
    def test_healthy_specs_produce_no_estimates(self):
        fx = TickFixture()
        entries = fx.run([fx.spec_cool])
        assert entries[0].analysis.status is SpecStatus.HEALTHY
        assert entries[0].estimates == ()

    def test_at_risk_spec_estimates_every_tactic(self):
        fx = TickFixture(n_tactics=3)
        entries = fx.run([fx.spec_hot])
        assert entries[0].analysis.status in (SpecStatus.AT_RISK, SpecStatus.BROKEN)
        assert len(entries[0].estimates) == 3

    def test_specs_processed_in_reward_order(self):
        fx = TickFixture()
        entries = fx.run([fx.spec_warm, fx.spec_hot])
        assert [e.spec_name for e in entries] == ["hot", "warm"]

    def test_pure_function_of_inputs(self):
        fx = TickFixture()
        specs = [fx.spec_hot, fx.spec_cool]
        assert fx.run(specs) == fx.run(specs)

    def test_per_spec_errors_are_isolated(self):
        fx = TickFixture()
        missing = SlaSpec("absent", 0.7, reward=5.0)
        entries = fx.run([fx.spec_cool, missing])
        by_name = {e.spec_name: e for e in entries}
        assert by_name["absent"].error is not None
        assert by_name["cool"].error is None
        assert by_name["cool"].analysis is not None

    def test_duplicate_spec_names_rejected(self):
        fx = TickFixture()
        with pytest.raises(ValueError):
            fx.run([fx.spec_hot, SlaSpec("hot", 0.9, reward=2.0)])

    def test_utility_params_score_tactics(self):
        fx = TickFixture(n_tactics=2)
        params = UtilityParams(tau=60.0, rate=10.0, response_time=0.5, target=0.7,
                               max_rate=20.0, dimmer=0.5, reward_optional=2.0,
                               reward_mandatory=1.0, cost=1.0)
        config = WorkflowConfig(utility_params=params)
        entries = fx.run([fx.spec_hot], config)
        scores = [e.utility_score for e in entries[0].estimates]
        assert all(s > 0 for s in scores)
        # cheaper predicted cost means higher utility, so ranking follows it
        costs = [e.predicted_cost for e in entries[0].estimates]
        assert costs == sorted(costs)

    def test_json_lines_round_trip(self):
        fx = TickFixture(n_tactics=2)
        entries = fx.run([fx.spec_hot, fx.spec_cool])
        lines = entries_to_json_lines(entries).strip().split("\n")
        assert len(lines) == 2
        decoded = [json.loads(line) for line in lines]
        assert decoded[0]["name"] == "hot"
        assert {"name", "status", "first_violation_step", "forecast",
                "tactics"} <= decoded[0].keys()
        assert [t["rank"] for t in decoded[0]["tactics"]] == [1, 2]
