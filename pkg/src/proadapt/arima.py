"""Differenced first-order autoregressive forecasting.

The supported model family is ARIMA(p, d, 0) with p in {0, 1} and
d in {0, 1, 2}; the working configuration throughout the package is the
differenced first-order autoregressive model ARIMA(1, 1, 0).

Estimation is conditional least squares on the differenced series: the
regression of z_t on z_{t-1} (plus a constant) coincides with the Gaussian
maximum-likelihood estimate for pure AR models up to edge effects, has a
closed form, and is fully deterministic. A constant term is always
included so drift in the differenced data is captured.

``fit_arima`` and ``forecast`` are pure functions of their inputs and
``ArimaModel`` is immutable, so models can be shared across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .types import TimeSeries

__all__ = [
    "ArimaOrder",
    "ArimaModel",
    "ResidualDiagnostics",
    "FitError",
    "difference",
    "acf",
    "pacf",
    "fit_arima",
    "forecast",
    "check_residuals",
    "reanchor",
]

MIN_FIT_LENGTH = 10  # differenced observations needed before fitting


class FitError(ValueError):
    """Raised when a model cannot be estimated from the given series."""


@dataclass(frozen=True)
class ArimaOrder:
    """(p, d, q) with p autoregressive lags and d differencing passes.

    Orders outside p in {0, 1}, d in {0, 1, 2}, q = 0 construct fine but
    are rejected at fit time.
    """

    p: int = 1
    d: int = 1
    q: int = 0

    def __post_init__(self) -> None:
        if min(self.p, self.d, self.q) < 0:
            raise ValueError("order components must be non-negative")

    @property
    def supported(self) -> bool:
        return self.p in (0, 1) and self.d in (0, 1, 2) and self.q == 0


@dataclass(frozen=True)
class ArimaModel:
    """Fitted AR(1)-with-constant model on the ``order.d``-times differenced scale.

    ``last_observations`` holds the trailing ``d + p`` raw observations,
    which is exactly what ``forecast`` needs to rebuild the differencing
    ladder and seed the autoregression.
    """

    order: ArimaOrder
    phi: float
    c: float
    last_observations: tuple[float, ...]
    residual_variance: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "last_observations", tuple(self.last_observations))
        if len(self.last_observations) != self.order.d + self.order.p:
            raise ValueError("last_observations must hold exactly d + p values")
        if self.residual_variance < 0:
            raise ValueError("residual_variance must be >= 0")


@dataclass(frozen=True)
class ResidualDiagnostics:
    """In-sample residual summary: mean, lag-1 autocorrelation, and a
    white-noise flag using the conventional 2/sqrt(n) band."""

    mean: float
    lag1_autocorr: float
    threshold: float
    suspect: bool


def difference(series: TimeSeries, degree: int) -> TimeSeries:
    """Apply ``degree`` passes of adjacent differencing (y'_t = y_t - y_{t-1})."""
    if degree not in (0, 1, 2):
        raise ValueError("differencing degree must be 0, 1, or 2")
    if len(series) <= degree:
        raise ValueError(f"series of length {len(series)} is too short to difference "
                         f"{degree} time(s)")
    if degree == 0:
        return series
    return TimeSeries(np.diff(series.values, n=degree), interval=series.interval)


def acf(series: TimeSeries, max_lag: int) -> list[float]:
    """Sample autocorrelations r_1..r_max_lag.

    Uses the standard biased estimator: mean-centred lag-k covariance over
    the lag-0 covariance. Each value lies in [-1, 1].
    """
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    x = series.values
    n = x.size
    if n < max_lag + 2:
        raise ValueError("series too short for the requested number of lags")
    centered = x - x.mean()
    c0 = float(np.dot(centered, centered))
    if c0 == 0.0:
        raise ValueError("autocorrelation is undefined for a zero-variance series")
    return [float(np.dot(centered[:-k], centered[k:]) / c0) for k in range(1, max_lag + 1)]


def pacf(series: TimeSeries, max_lag: int) -> list[float]:
    """Partial autocorrelations via the Durbin-Levinson recursion on ``acf``."""
    r = acf(series, max_lag)
    partial = [r[0]]
    prev = np.array([r[0]])
    for k in range(2, max_lag + 1):
        rk = np.array(r[:k])
        num = r[k - 1] - float(np.dot(prev, rk[k - 2::-1]))
        den = 1.0 - float(np.dot(prev, rk[:k - 1]))
        phi_kk = num / den
        prev = np.append(prev - phi_kk * prev[::-1], phi_kk)
        partial.append(float(phi_kk))
    return partial


def _fit_ar1_cls(z: np.ndarray) -> tuple[float, float, np.ndarray]:
    """Conditional least squares for z_t = c + phi*z_{t-1} + e_t."""
    design = np.column_stack([np.ones(z.size - 1), z[:-1]])
    coef, *_ = np.linalg.lstsq(design, z[1:], rcond=None)
    c, phi = float(coef[0]), float(coef[1])
    residuals = z[1:] - design @ coef
    return c, phi, residuals


def fit_arima(series: TimeSeries, order: ArimaOrder) -> ArimaModel:
    """Difference ``series`` per ``order.d`` and fit the AR part by
    conditional least squares; p = 0 fits the mean-only model.

    Raises :class:`FitError` when the differenced series is shorter than
    ``MIN_FIT_LENGTH`` or the fitted coefficient is non-stationary
    (|phi| >= 1), and ``ValueError`` for unsupported orders.
    """
    if not order.supported:
        raise ValueError(f"unsupported order {order}: need p in {{0,1}}, "
                         f"d in {{0,1,2}}, q = 0")
    if len(series) <= order.d:
        raise FitError("series too short to difference")
    z = difference(series, order.d).values
    if z.size < MIN_FIT_LENGTH:
        raise FitError(f"need at least {MIN_FIT_LENGTH} differenced observations, "
                       f"got {z.size}")
    if order.p == 0:
        c = float(z.mean())
        residuals = z - c
        phi = 0.0
    else:
        c, phi, residuals = _fit_ar1_cls(z)
        if not math.isfinite(phi) or abs(phi) >= 1.0:
            raise FitError(f"fitted AR coefficient {phi!r} is not stationary")
    return ArimaModel(
        order=order,
        phi=phi,
        c=c,
        last_observations=tuple(series.tail(order.d + order.p)),
        residual_variance=float(np.mean(residuals**2)) if residuals.size else 0.0,
    )


def forecast(model: ArimaModel, horizon: int) -> list[float]:
    """Iterate the AR recursion on the differenced scale and integrate back.

    z_hat_{t+h} = c + phi * z_hat_{t+h-1}, seeded from the last observed
    differenced value; the forecasts are cumulative-summed onto the stored
    trailing observations to land on the original scale.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    d, p = model.order.d, model.order.p
    ladder = [np.asarray(model.last_observations, dtype=float)]
    for _ in range(d):
        ladder.append(np.diff(ladder[-1]))
    # heads[j] carries the running last value at differencing level j.
    heads = [float(level[-1]) for level in ladder[:d]]
    z_prev = float(ladder[d][-1]) if p == 1 else 0.0
    out = []
    for _ in range(horizon):
        z_hat = model.c + model.phi * z_prev if p == 1 else model.c
        z_prev = z_hat
        value = z_hat
        for j in range(d - 1, -1, -1):
            heads[j] += value
            value = heads[j]
        out.append(float(value))
    return out


def check_residuals(model: ArimaModel, series: TimeSeries) -> ResidualDiagnostics:
    """Recompute in-sample residuals for ``series`` (the fitting series)
    and flag suspected leftover structure when the lag-1 residual
    autocorrelation leaves the 2/sqrt(n) white-noise band."""
    z = difference(series, model.order.d).values
    if z.size < model.order.p + 3:
        raise ValueError("series too short to diagnose against this model")
    if model.order.p == 1:
        residuals = z[1:] - model.c - model.phi * z[:-1]
    else:
        residuals = z - model.c
    n = residuals.size
    centered = residuals - residuals.mean()
    c0 = float(np.dot(centered, centered))
    if c0 == 0.0:
        lag1 = 0.0  # perfect fit leaves nothing to correlate
    else:
        lag1 = float(np.dot(centered[:-1], centered[1:]) / c0)
    threshold = 2.0 / math.sqrt(n)
    return ResidualDiagnostics(
        mean=float(residuals.mean()),
        lag1_autocorr=lag1,
        threshold=threshold,
        suspect=abs(lag1) > threshold,
    )


def reanchor(model: ArimaModel, series: TimeSeries) -> ArimaModel:
    """Reuse fitted parameters but forecast from the tail of ``series``.

    Supports the fit-once deployment style: parameters are estimated on
    historical data and the forecast origin follows the live window.
    """
    needed = model.order.d + model.order.p
    if len(series) < needed:
        raise ValueError(f"series must hold at least {needed} observations")
    return replace(model, last_observations=tuple(series.tail(needed)))
