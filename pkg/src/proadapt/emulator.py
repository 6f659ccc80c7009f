"""Volatility trace emulation and ingestion.

The emulator stands in for a physical rig that repeatedly downloads a
fixed file from three mirrors at one-minute intervals while logging
latency and energy, interleaved with idle-power readings. Real traces in
the same CSV format can be ingested instead of emulated.

Generated volatility is invented but shaped plausibly: per-mirror base
latency scaled by an hourly diurnal multiplier and multiplicative
lognormal noise, with occasional additive spikes (the Germany mirror is
most spike-prone by default); download energy tracks latency; idle energy
drifts slowly with an autoregressive wobble. All draws come from one
seeded generator, so a (duration, seed, config) triple reproduces a trace
bit-for-bit. Latency/energy values are quantized to six decimals at
generation time, which makes the CSV round-trip exact.

Trace CSV format: header ``timestamp,mirror,phase,latency_seconds,energy_joules``;
mirror in {germany, massachusetts, ontario}; phase in {download, idle, grep};
reals with six decimal places; UTF-8; LF emitted, CRLF accepted.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .regression import DesignMatrix, ResponseVector
from .types import TimeSeries

__all__ = [
    "Mirror",
    "Phase",
    "TraceRecord",
    "LatencyShape",
    "TacticProfile",
    "SAMPLE_TACTIC_A",
    "SAMPLE_TACTIC_B",
    "MirrorSettings",
    "EmulatorConfig",
    "CostHistogram",
    "CostImpactResult",
    "TraceFormatError",
    "generate_trace",
    "sample_latency",
    "run_cost_impact_simulation",
    "trace_csv_text",
    "write_trace_csv",
    "ingest_trace_csv",
    "to_regression_dataset",
    "to_idle_series",
]

TRACE_HEADER = "timestamp,mirror,phase,latency_seconds,energy_joules"
LAG_WINDOW = 5          # prior same-mirror observations needed per feature row
HISTOGRAM_BIN_WIDTH = 5.0
DEFAULT_START_EPOCH = 1_600_041_600.0  # a midnight, so hour-of-day starts at 0


class Mirror(enum.Enum):
    GERMANY = "germany"
    MASSACHUSETTS = "massachusetts"
    ONTARIO = "ontario"


class Phase(enum.Enum):
    DOWNLOAD = "download"
    IDLE = "idle"
    GREP = "grep"


class TraceFormatError(ValueError):
    """Malformed or invariant-violating trace CSV content."""


@dataclass(frozen=True)
class TraceRecord:
    timestamp: float
    mirror: Mirror
    phase: Phase
    latency_seconds: float
    energy_joules: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.latency_seconds) and self.latency_seconds >= 0):
            raise ValueError("latency_seconds must be finite and >= 0")
        if not (math.isfinite(self.energy_joules) and self.energy_joules >= 0):
            raise ValueError("energy_joules must be finite and >= 0")
        if not math.isfinite(self.timestamp):
            raise ValueError("timestamp must be finite")


class LatencyShape(enum.Enum):
    NORMAL = "normal"
    POSITIVE_SKEW = "positive_skew"


@dataclass(frozen=True)
class TacticProfile:
    """Latency distribution and per-unit-latency cost of one sample tactic.

    For ``NORMAL`` the draws are Gaussian(mean, sd) truncated at zero. For
    ``POSITIVE_SKEW`` the draws are lognormal with the spread applied on
    the log scale (sigma = sd, mu = ln(mean) - sigma^2/2), so the mean is
    matched exactly and the right tail is heavy - the multiplicative kind
    of volatility that makes a nominally cheap tactic sporadically very
    expensive.
    """

    name: str
    cost_per_unit_latency: float
    shape: LatencyShape
    mean: float
    sd: float

    def __post_init__(self) -> None:
        if self.mean <= 0:
            raise ValueError("mean must be > 0")
        if self.sd <= 0:
            raise ValueError("sd must be > 0")
        if self.cost_per_unit_latency < 0:
            raise ValueError("cost_per_unit_latency must be >= 0")


SAMPLE_TACTIC_A = TacticProfile("tactic_a", cost_per_unit_latency=5.0,
                                shape=LatencyShape.POSITIVE_SKEW, mean=3.0, sd=0.5)
SAMPLE_TACTIC_B = TacticProfile("tactic_b", cost_per_unit_latency=7.0,
                                shape=LatencyShape.NORMAL, mean=3.0, sd=0.5)


@dataclass(frozen=True)
class MirrorSettings:
    base_latency_seconds: float
    spike_probability: float
    spike_scale_seconds: float

    def __post_init__(self) -> None:
        if self.base_latency_seconds <= 0:
            raise ValueError("base_latency_seconds must be > 0")
        if not 0.0 <= self.spike_probability <= 1.0:
            raise ValueError("spike_probability must lie in [0, 1]")
        if self.spike_scale_seconds < 0:
            raise ValueError("spike_scale_seconds must be >= 0")


def _default_mirrors() -> dict[Mirror, MirrorSettings]:
    return {
        Mirror.GERMANY: MirrorSettings(3.4, 0.06, 2.5),
        Mirror.MASSACHUSETTS: MirrorSettings(2.6, 0.015, 1.5),
        Mirror.ONTARIO: MirrorSettings(3.0, 0.02, 1.5),
    }


@dataclass(frozen=True)
class EmulatorConfig:
    """Knobs for the invented volatility mechanisms.

    ``nominal_latency_seconds`` / ``nominal_energy_joules`` are the
    design-time constants a volatility-unaware operator would have written
    down for the download tactic; they feed the static-value baseline and
    are deliberately not derived from the observed trace.
    """

    mirrors: Mapping[Mirror, MirrorSettings] = field(default_factory=_default_mirrors)
    diurnal_amplitude: float = 0.3
    diurnal_peak_hour: int = 20
    latency_noise_sigma: float = 0.12
    energy_per_latency_joules: float = 12.0
    energy_noise_sd: float = 0.8
    idle_base_joules: float = 5.0
    idle_drift_per_minute: float = 0.002
    idle_phi: float = 0.8
    idle_noise_sd: float = 0.02
    nominal_latency_seconds: float = 2.5
    nominal_energy_joules: float = 30.0
    start_epoch: float = DEFAULT_START_EPOCH

    def __post_init__(self) -> None:
        if not self.mirrors:
            raise ValueError("at least one mirror must be configured")
        if not 0.0 <= self.diurnal_amplitude < 1.0:
            raise ValueError("diurnal_amplitude must lie in [0, 1)")
        if self.latency_noise_sigma < 0 or self.energy_noise_sd < 0:
            raise ValueError("noise scales must be >= 0")
        if self.energy_per_latency_joules <= 0 or self.idle_base_joules <= 0:
            raise ValueError("energy parameters must be > 0")
        if not abs(self.idle_phi) < 1:
            raise ValueError("idle_phi must satisfy |phi| < 1")
        if self.idle_noise_sd < 0:
            raise ValueError("idle_noise_sd must be >= 0")
        if self.nominal_latency_seconds <= 0 or self.nominal_energy_joules <= 0:
            raise ValueError("nominal values must be > 0")


def _hour_of_day(timestamp: float) -> int:
    return int((timestamp % 86400.0) // 3600.0)


def diurnal_multiplier(hour: int, amplitude: float, peak_hour: int) -> float:
    """Hourly network-load multiplier: 1 + amplitude at the peak hour."""
    return 1.0 + amplitude * math.cos(2.0 * math.pi * (hour - peak_hour) / 24.0)


def generate_trace(duration_minutes: int, seed: int,
                   config: EmulatorConfig | None = None) -> list[TraceRecord]:
    """Emulate ``duration_minutes`` of operation: one download per mirror
    per minute plus an interleaved idle reading, deterministic per seed."""
    if duration_minutes < 1:
        raise ValueError("duration_minutes must be >= 1")
    cfg = config or EmulatorConfig()
    rng = np.random.default_rng(seed)
    mirrors = sorted(cfg.mirrors, key=lambda m: m.value)
    records: list[TraceRecord] = []
    idle_level = 0.0
    for minute in range(duration_minutes):
        t0 = cfg.start_epoch + 60.0 * minute
        hour = _hour_of_day(t0)
        diurnal = diurnal_multiplier(hour, cfg.diurnal_amplitude, cfg.diurnal_peak_hour)
        for slot, mirror in enumerate(mirrors):
            settings = cfg.mirrors[mirror]
            noise = math.exp(rng.normal(0.0, cfg.latency_noise_sigma))
            latency = settings.base_latency_seconds * diurnal * noise
            if rng.random() < settings.spike_probability:
                latency += rng.exponential(settings.spike_scale_seconds)
            energy = max(0.0, cfg.energy_per_latency_joules * latency
                         + rng.normal(0.0, cfg.energy_noise_sd))
            records.append(TraceRecord(
                timestamp=round(t0 + 5.0 + 15.0 * slot, 6),
                mirror=mirror,
                phase=Phase.DOWNLOAD,
                latency_seconds=round(latency, 6),
                energy_joules=round(energy, 6),
            ))
        idle_level = cfg.idle_phi * idle_level + rng.normal(0.0, cfg.idle_noise_sd)
        idle_energy = max(0.0, cfg.idle_base_joules
                          + cfg.idle_drift_per_minute * minute + idle_level)
        records.append(TraceRecord(
            timestamp=round(t0 + 50.0, 6),
            mirror=mirrors[0],
            phase=Phase.IDLE,
            latency_seconds=0.0,
            energy_joules=round(idle_energy, 6),
        ))
    return records


def sample_latency(profile: TacticProfile, seed: int, n: int) -> np.ndarray:
    """Draw ``n`` latencies from the profile's distribution, deterministically.

    Gaussian draws are truncated at zero by resampling (negligible at the
    default profiles); skewed draws are lognormal with mean matched exactly.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if profile.shape is LatencyShape.NORMAL:
        draws = rng.normal(profile.mean, profile.sd, n)
        while np.any(draws < 0):
            bad = draws < 0
            draws[bad] = rng.normal(profile.mean, profile.sd, int(bad.sum()))
        return draws
    sigma = profile.sd
    mu = math.log(profile.mean) - 0.5 * sigma * sigma
    return rng.lognormal(mu, sigma, n)


@dataclass(frozen=True)
class CostHistogram:
    """Shared-bin histogram of the two tactics' overall costs (bin width 5
    from zero, one count list per tactic)."""

    bin_edges: tuple[float, ...]
    counts_a: tuple[int, ...]
    counts_b: tuple[int, ...]


@dataclass(frozen=True)
class CostImpactResult:
    overall_costs_a: np.ndarray
    overall_costs_b: np.ndarray
    histogram: CostHistogram


def run_cost_impact_simulation(a: TacticProfile, b: TacticProfile,
                               n_runs: int, seed: int) -> CostImpactResult:
    """Repeatedly sample each tactic's latency and multiply by its cost.

    Builds the simulated "tactic execution" distributions whose spread
    shows what ignoring volatility costs: each sample is one execution's
    overall cost = sampled latency * cost per unit latency.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    seeds = [int(np.random.SeedSequence([seed, i]).generate_state(1)[0])
             for i in range(2)]
    costs_a = sample_latency(a, seeds[0], n_runs) * a.cost_per_unit_latency
    costs_b = sample_latency(b, seeds[1], n_runs) * b.cost_per_unit_latency
    top = float(max(costs_a.max(), costs_b.max()))
    n_bins = max(1, math.ceil(top / HISTOGRAM_BIN_WIDTH))
    edges = np.arange(n_bins + 1) * HISTOGRAM_BIN_WIDTH
    hist = CostHistogram(
        bin_edges=tuple(edges),
        counts_a=tuple(int(c) for c in np.histogram(costs_a, bins=edges)[0]),
        counts_b=tuple(int(c) for c in np.histogram(costs_b, bins=edges)[0]),
    )
    return CostImpactResult(costs_a, costs_b, hist)


def trace_csv_text(records: Sequence[TraceRecord]) -> str:
    lines = [TRACE_HEADER]
    for r in records:
        lines.append(f"{r.timestamp:.6f},{r.mirror.value},{r.phase.value},"
                     f"{r.latency_seconds:.6f},{r.energy_joules:.6f}")
    return "\n".join(lines) + "\n"


def write_trace_csv(records: Sequence[TraceRecord], path: str | Path) -> None:
    Path(path).write_text(trace_csv_text(records), encoding="utf-8", newline="\n")


def ingest_trace_csv(path: str | Path) -> list[TraceRecord]:
    """Parse and validate a trace CSV; errors name the offending line."""
    mirrors = {m.value: m for m in Mirror}
    phases = {p.value: p for p in Phase}
    records: list[TraceRecord] = []
    last_timestamp = -math.inf
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        for line_no, row in enumerate(reader, start=1):
            if line_no == 1:
                if ",".join(row) != TRACE_HEADER:
                    raise TraceFormatError(f"line 1: expected header '{TRACE_HEADER}'")
                continue
            if not row:
                continue
            if len(row) != 5:
                raise TraceFormatError(f"line {line_no}: expected 5 fields, got {len(row)}")
            ts_text, mirror_text, phase_text, latency_text, energy_text = row
            try:
                timestamp = float(ts_text)
                latency = float(latency_text)
                energy = float(energy_text)
            except ValueError as exc:
                raise TraceFormatError(f"line {line_no}: {exc}") from None
            if mirror_text not in mirrors:
                raise TraceFormatError(f"line {line_no}: unknown mirror '{mirror_text}'")
            if phase_text not in phases:
                raise TraceFormatError(f"line {line_no}: unknown phase '{phase_text}'")
            try:
                record = TraceRecord(timestamp, mirrors[mirror_text],
                                     phases[phase_text], latency, energy)
            except ValueError as exc:
                raise TraceFormatError(f"line {line_no}: {exc}") from None
            if record.timestamp <= last_timestamp:
                raise TraceFormatError(f"line {line_no}: timestamps must be "
                                       f"strictly increasing")
            last_timestamp = record.timestamp
            records.append(record)
    return records


def _downloads_in_order(records: Iterable[TraceRecord]) -> list[TraceRecord]:
    return sorted((r for r in records if r.phase is Phase.DOWNLOAD),
                  key=lambda r: r.timestamp)


def to_regression_dataset(records: Sequence[TraceRecord]
                          ) -> tuple[DesignMatrix, ResponseVector, ResponseVector]:
    """Turn download rows into (features, latency responses, energy responses).

    Features per row: intercept, the same mirror's lag-1 and lag-2
    latencies, the mean of its previous five latencies, the hour of day as
    cyclic sin/cos coordinates, and mirror membership dummies (first
    present mirror is the reference category, keeping the design full
    rank). Rows whose mirror lacks five prior observations are dropped.
    """
    downloads = _downloads_in_order(records)
    if len(downloads) < 8:
        raise ValueError(f"need at least 8 download records, got {len(downloads)}")
    present = sorted({r.mirror for r in downloads}, key=lambda m: m.value)
    dummy_mirrors = present[1:]
    names = ["intercept", "latency_lag1", "latency_lag2", "latency_mean5",
             "hour_sin", "hour_cos"] + [f"mirror_{m.value}" for m in dummy_mirrors]
    history: dict[Mirror, list[float]] = {m: [] for m in present}
    rows, latencies, energies = [], [], []
    for record in downloads:
        past = history[record.mirror]
        if len(past) >= LAG_WINDOW:
            hour = _hour_of_day(record.timestamp)
            angle = 2.0 * math.pi * hour / 24.0
            feature_row = [1.0, past[-1], past[-2],
                           float(np.mean(past[-LAG_WINDOW:])),
                           math.sin(angle), math.cos(angle)]
            feature_row += [1.0 if record.mirror is m else 0.0 for m in dummy_mirrors]
            rows.append(feature_row)
            latencies.append(record.latency_seconds)
            energies.append(record.energy_joules)
        past.append(record.latency_seconds)
    if not rows:
        raise ValueError("no download row has a complete lag window")
    return (DesignMatrix(np.array(rows), tuple(names)),
            ResponseVector(np.array(latencies)),
            ResponseVector(np.array(energies)))


def to_idle_series(records: Sequence[TraceRecord],
                   interval_seconds: float = 60.0) -> TimeSeries:
    """Idle-phase energy readings in timestamp order as a uniform series."""
    idle = sorted((r for r in records if r.phase is Phase.IDLE),
                  key=lambda r: r.timestamp)
    if not idle:
        raise ValueError("trace contains no idle records")
    return TimeSeries(np.array([r.energy_joules for r in idle]),
                      interval=interval_seconds)
