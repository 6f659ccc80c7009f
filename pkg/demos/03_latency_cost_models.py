"""Run-time latency and cost prediction from observed tactic executions.

Trains the least-squares model on emulated download records, inspects
what it learned, and runs the randomized 90/10 comparison against the
Bayesian ridge and the two volatility-unaware baselines.
"""

from proadapt import (generate_trace, run_predictor_experiments, summarize,
                      to_regression_dataset)

trace = generate_trace(duration_minutes=1440, seed=42)
X, latency, energy = to_regression_dataset(trace)
print(f"training data: {X.n} download observations, {X.m} features")
print(f"features: {', '.join(X.column_names)}")

for label, response, static in (("latency (s)", latency, 2.5),
                                ("energy (J)", energy, 30.0)):
    print(f"\n=== {label}, 50 randomized 90/10 experiments ===")
    reports = run_predictor_experiments(X, response, n_runs=50, seed=42,
                                        static_value=static)
    summary = summarize(reports)
    for name in ("mra", "brr", "baseline_mean", "baseline_static"):
        agg = summary.models[name]
        print(f"  {name:<16} mean rmse {agg.mean_rmse:8.4f}   "
              f"mean mae {agg.mean_mae:8.4f}")
    print(f"  regression beats the running mean in "
          f"{summary.wins[('mra', 'baseline_mean')]} of 50 runs and the "
          f"static value in {summary.wins[('mra', 'baseline_static')]} of 50")
    print(f"  regression vs Bayesian ridge: "
          f"{summary.wins[('mra', 'brr')]} wins / "
          f"{summary.wins[('brr', 'mra')]} losses (they nearly coincide on "
          f"well-conditioned data)")

print("\nBoth constant predictors ignore the diurnal swing and the recent "
      "history that the regression features carry, so their errors stay "
      "systematically larger.")
