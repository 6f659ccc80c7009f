"""Command-line entry point.

Three subcommands:

* ``generate``  - emulate a volatility trace and write it as CSV.
* ``replicate`` - run the four replication experiments (two-tactic cost
  impact, idle-energy forecasting, download latency/cost prediction, and
  the volatility-aware vs baseline comparison) and write rq1.csv-rq4.csv
  plus a summary table on stdout.
* ``monitor``   - slide a window over a recorded history, run the decision
  workflow each tick, and emit one JSON line per tick and spec.

Every command is deterministic under fixed flags and seed. Exit codes:
0 success, 1 validation/domain error, 2 IO/usage error. stdout carries
only data and summaries; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .arima import ArimaOrder, fit_arima
from .emulator import (EmulatorConfig, Mirror, Phase, SAMPLE_TACTIC_A, SAMPLE_TACTIC_B,
                       generate_trace, ingest_trace_csv, run_cost_impact_simulation,
                       to_idle_series, to_regression_dataset, write_trace_csv)
from .metrics import (BRR_MODEL, FORECAST_MODEL, MEAN_BASELINE, MRA_MODEL,
                      PERSISTENCE_MODEL, STATIC_BASELINE, ExperimentReport, Summary,
                      run_forecast_experiments, run_predictor_experiments, summarize,
                      write_reports_csv)
from .regression import fit_mra
from .types import Direction, SlaSpec, Tactic, TimeSeries
from .workflow import (TacticModels, WorkflowConfig, tick_entry_to_dict, workflow_tick)

DEFAULT_SEED = 42


def _subseed(seed: int, key: int) -> int:
    return int(np.random.SeedSequence([seed, key]).generate_state(1)[0])


def _print_model_table(summary: Summary, names: Sequence[str]) -> None:
    print(f"  {'model':<22}{'runs':>5}{'mean rmse':>12}{'min':>9}{'max':>9}"
          f"{'mean mae':>12}")
    for name in names:
        agg = summary.models[name]
        print(f"  {name:<22}{agg.runs:>5}{agg.mean_rmse:>12.4f}{agg.min_rmse:>9.4f}"
              f"{agg.max_rmse:>9.4f}{agg.mean_mae:>12.4f}")


def cmd_generate(args: argparse.Namespace) -> int:
    config = EmulatorConfig()
    records = generate_trace(args.minutes, args.seed, config)
    write_trace_csv(records, args.out)
    downloads = sum(1 for r in records if r.phase is Phase.DOWNLOAD)
    print(f"{len(records)} records ({downloads} downloads) written to {args.out}")
    return 0


def _rename(reports: Sequence[ExperimentReport], mapping: dict[str, str]
            ) -> list[ExperimentReport]:
    return [replace(r, model_name=mapping[r.model_name])
            for r in reports if r.model_name in mapping]


def cmd_replicate(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = EmulatorConfig()
    if args.trace:
        records = ingest_trace_csv(args.trace)
    else:
        records = generate_trace(args.minutes, _subseed(args.seed, 0), config)

    impact = run_cost_impact_simulation(SAMPLE_TACTIC_A, SAMPLE_TACTIC_B,
                                        args.runs, _subseed(args.seed, 1))
    rq1_lines = ["sample,tactic,overall_cost"]
    for tactic, costs in ((SAMPLE_TACTIC_A, impact.overall_costs_a),
                          (SAMPLE_TACTIC_B, impact.overall_costs_b)):
        rq1_lines += [f"{i},{tactic.name},{c:.17g}" for i, c in enumerate(costs)]
    (out_dir / "rq1.csv").write_text("\n".join(rq1_lines) + "\n",
                                     encoding="utf-8", newline="\n")

    idle = to_idle_series(records)
    forecast_reports = run_forecast_experiments(idle, args.runs, _subseed(args.seed, 2))
    write_reports_csv(forecast_reports, out_dir / "rq2.csv")

    X, latency, cost = to_regression_dataset(records)
    latency_reports = run_predictor_experiments(
        X, latency, args.runs, _subseed(args.seed, 3), static_value=args.static_latency)
    cost_reports = run_predictor_experiments(
        X, cost, args.runs, _subseed(args.seed, 4), static_value=args.static_cost)
    rq3 = (_rename(latency_reports, {MRA_MODEL: "mra_latency", BRR_MODEL: "brr_latency"})
           + _rename(cost_reports, {MRA_MODEL: "mra_cost", BRR_MODEL: "brr_cost"}))
    write_reports_csv(rq3, out_dir / "rq3.csv")
    rq4 = [r for r in latency_reports
           if r.model_name in (MRA_MODEL, MEAN_BASELINE, STATIC_BASELINE)]
    write_reports_csv(rq4, out_dir / "rq4.csv")

    print(f"experiment 1: overall cost of {args.runs} executions per tactic")
    for tactic, costs in ((SAMPLE_TACTIC_A, impact.overall_costs_a),
                          (SAMPLE_TACTIC_B, impact.overall_costs_b)):
        sd = float(np.std(costs, ddof=1)) if costs.size > 1 else 0.0
        print(f"  {tactic.name}: mean={float(np.mean(costs)):.3f} sd={sd:.3f} "
              f"p99={float(np.percentile(costs, 99)):.3f}")

    print(f"experiment 2: idle-energy forecasting over {args.runs} runs")
    s2 = summarize(forecast_reports)
    _print_model_table(s2, [FORECAST_MODEL, PERSISTENCE_MODEL])
    print(f"  wins: {FORECAST_MODEL} beats {PERSISTENCE_MODEL} in "
          f"{s2.wins[(FORECAST_MODEL, PERSISTENCE_MODEL)]} of "
          f"{s2.comparisons[(FORECAST_MODEL, PERSISTENCE_MODEL)]} runs")

    s_lat, s_cost = summarize(latency_reports), summarize(cost_reports)
    print(f"experiment 3: download latency/cost prediction over {args.runs} runs")
    print("  latency response:")
    _print_model_table(s_lat, [MRA_MODEL, BRR_MODEL])
    print("  cost response:")
    _print_model_table(s_cost, [MRA_MODEL, BRR_MODEL])
    print(f"  wins (latency): {MRA_MODEL} beats {BRR_MODEL} in "
          f"{s_lat.wins[(MRA_MODEL, BRR_MODEL)]} of "
          f"{s_lat.comparisons[(MRA_MODEL, BRR_MODEL)]} runs")

    print("experiment 4: volatility-aware prediction vs baselines (latency)")
    _print_model_table(s_lat, [MRA_MODEL, MEAN_BASELINE, STATIC_BASELINE])
    for baseline in (MEAN_BASELINE, STATIC_BASELINE):
        print(f"  wins: {MRA_MODEL} beats {baseline} in "
              f"{s_lat.wins[(MRA_MODEL, baseline)]} of "
              f"{s_lat.comparisons[(MRA_MODEL, baseline)]} runs")

    all_reports = forecast_reports + latency_reports + cost_reports
    failed = sum(1 for r in all_reports if r.error is not None)
    if failed:
        print(f"{failed} of {len(all_reports)} run/model scores failed", file=sys.stderr)
    if failed > 0.1 * len(all_reports):
        return 1
    return 0


def _load_specs(path: str) -> list[SlaSpec]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = raw if isinstance(raw, list) else [raw]
    specs = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise ValueError(f"spec file entry {i}: expected a JSON object")
        for field in ("name", "threshold"):
            if field not in entry:
                raise ValueError(f"spec file entry {i}: missing field '{field}'")
        direction_text = entry.get("direction", "upper")
        try:
            direction = Direction(direction_text)
        except ValueError:
            raise ValueError(f"spec file entry {i}: field 'direction' must be "
                             f"'upper' or 'lower', got {direction_text!r}") from None
        try:
            specs.append(SlaSpec(name=str(entry["name"]),
                                 threshold=float(entry["threshold"]),
                                 direction=direction,
                                 penalty=float(entry.get("penalty", 0.0)),
                                 reward=float(entry.get("reward", 0.0))))
        except (TypeError, ValueError) as exc:
            raise ValueError(f"spec file entry {i}: {exc}") from None
    return specs


def _load_history(path: str) -> TimeSeries:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        rows = list(reader)
    if not rows or rows[0] != ["value"]:
        raise ValueError("history file must start with a 'value' header")
    try:
        values = [float(row[0]) for row in rows[1:] if row]
    except ValueError as exc:
        raise ValueError(f"history file: {exc}") from None
    return TimeSeries(np.array(values))


def _load_tactic_context(tactics_path: str, trace_path: str | None):
    """Build tactics, trained models, and current feature vectors from a
    tactics JSON file plus the trace that supplies training data."""
    if not trace_path:
        raise ValueError("--tactics requires --trace for training data")
    raw = json.loads(Path(tactics_path).read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise ValueError("tactics file must hold a JSON list")
    records = ingest_trace_csv(trace_path)
    tactics, registry, features = [], {}, {}
    for i, entry in enumerate(raw):
        for field in ("name", "static_latency", "static_cost"):
            if field not in entry:
                raise ValueError(f"tactics file entry {i}: missing field '{field}'")
        subset = records
        if "mirror" in entry:
            try:
                mirror = Mirror(entry["mirror"])
            except ValueError:
                raise ValueError(f"tactics file entry {i}: unknown mirror "
                                 f"{entry['mirror']!r}") from None
            subset = [r for r in records
                      if r.phase is not Phase.DOWNLOAD or r.mirror is mirror]
        X, latency, cost = to_regression_dataset(subset)
        tactic = Tactic(name=str(entry["name"]),
                        static_latency=float(entry["static_latency"]),
                        static_cost=float(entry["static_cost"]),
                        feature_names=X.column_names)
        tactics.append(tactic)
        registry[tactic.name] = TacticModels(latency_model=fit_mra(X, latency),
                                             cost_model=fit_mra(X, cost))
        features[tactic.name] = tuple(X.rows[-1])
    return tactics, registry, features


def cmd_monitor(args: argparse.Namespace) -> int:
    specs = _load_specs(args.spec)
    history = _load_history(args.history)
    window = args.window
    if len(history) < window:
        raise ValueError(f"history has {len(history)} points but the window needs {window}")
    config = WorkflowConfig(horizon=args.horizon, risk_margin=args.risk_margin,
                            tick_seconds=args.tick_seconds)
    if args.tactics:
        tactics, registry, features = _load_tactic_context(args.tactics, args.trace)
    else:
        tactics, registry, features = [], {}, {}

    forecasters = {}
    order = ArimaOrder(1, 1, 0)
    for tick in range(len(history) - window + 1):
        values = history.values[tick:tick + window]
        series = TimeSeries(values, interval=history.interval)
        refit = tick == 0 or (args.refit_every > 0 and tick % args.refit_every == 0)
        if refit:
            forecasters = {spec.name: fit_arima(series, order) for spec in specs}
        entries = workflow_tick(specs, {s.name: series for s in specs}, tactics,
                                registry, features, config, forecasters=forecasters)
        for entry in entries:
            print(json.dumps({"tick": tick, **tick_entry_to_dict(entry)}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proadapt",
        description="Volatility-aware adaptation: trace emulation, replication "
                    "experiments, and SLA monitoring.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="emulate a volatility trace CSV")
    gen.add_argument("--minutes", type=int, default=1440,
                     help="trace duration in minutes (default 1440)")
    gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
    gen.add_argument("--out", required=True, help="output trace CSV path")
    gen.set_defaults(func=cmd_generate)

    rep = sub.add_parser("replicate", help="run the replication experiments")
    source = rep.add_mutually_exclusive_group(required=True)
    source.add_argument("--emulate", action="store_true",
                        help="generate the evaluation trace internally")
    source.add_argument("--trace", help="ingest an existing trace CSV instead")
    rep.add_argument("--minutes", type=int, default=1440,
                     help="emulated trace duration (default 1440)")
    rep.add_argument("--runs", type=int, default=50,
                     help="randomized experiments per question (default 50)")
    rep.add_argument("--seed", type=int, default=DEFAULT_SEED)
    rep.add_argument("--out-dir", default=".",
                     help="directory for rq1.csv..rq4.csv (default .)")
    rep.add_argument("--static-latency", type=float,
                     default=EmulatorConfig().nominal_latency_seconds,
                     help="design-time latency constant for the static baseline")
    rep.add_argument("--static-cost", type=float,
                     default=EmulatorConfig().nominal_energy_joules,
                     help="design-time cost constant for the static baseline")
    rep.set_defaults(func=cmd_replicate)

    mon = sub.add_parser("monitor", help="run the decision workflow over a history")
    mon.add_argument("--spec", required=True,
                     help="JSON file with one spec object or a list of them")
    mon.add_argument("--history", required=True,
                     help="CSV file with a 'value' header, one observation per line")
    mon.add_argument("--window", type=int, default=60,
                     help="sliding window length in observations (default 60)")
    mon.add_argument("--horizon", type=int, default=5,
                     help="forecast steps per tick (default 5)")
    mon.add_argument("--risk-margin", type=float, default=0.10,
                     help="fraction of the threshold treated as the risk band")
    mon.add_argument("--tick-seconds", type=float, default=6.0,
                     help="seconds between observations (default 6)")
    mon.add_argument("--refit-every", type=int, default=0,
                     help="refit the forecaster every K ticks (0 = fit once)")
    mon.add_argument("--tactics", help="optional tactics JSON for estimation")
    mon.add_argument("--trace", help="trace CSV that trains the tactic models")
    mon.set_defaults(func=cmd_monitor)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
