"""Polarization measurement and the sensitivity-analysis toolkit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares
from scipy.special import expit

from .core import Population, trace_variance

__all__ = [
    "polarization_1d",
    "polarization_trace",
    "LogisticFit",
    "fit_logistic",
    "logistic",
    "CellStats",
    "aggregate_sweep_cell",
]


def polarization_1d(positions) -> float:
    """Population variance sum(x^2)/N - (sum(x)/N)^2 of 1D positions in [0, 1].

    Uses the population (divide by N) convention; bounded by 0.25 for inputs
    inside the unit interval.
    """
    arr = np.asarray(positions, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError("positions must be nonempty")
    return trace_variance(arr.reshape(-1, 1))


def polarization_trace(pop: Population | np.ndarray) -> float:
    """Trace of the position covariance matrix: per-dimension variances summed.

    Reduces to polarization_1d exactly when D = 1.
    """
    positions = pop.positions if isinstance(pop, Population) else np.asarray(pop)
    return trace_variance(positions)


def logistic(x, a: float, k: float, x0: float):
    """Transition curve a / (1 + exp(-k (x - x0))), overflow-safe."""
    return a * expit(k * (np.asarray(x, dtype=np.float64) - x0))


@dataclass(frozen=True)
class LogisticFit:
    """Fitted transition curve. converged=False means do not trust the values."""

    a: float
    k: float
    x0: float
    rmse: float
    converged: bool


def _fit_once(xs, ys, start):
    def residuals(p):
        return logistic(xs, *p) - ys

    def jacobian(p):
        a, k, x0 = p
        s = expit(k * (xs - x0))
        ds = s * (1.0 - s)
        return np.column_stack((s, a * ds * (xs - x0), -a * ds * k))

    return least_squares(
        residuals,
        start,
        jac=jacobian,
        bounds=([1e-12, -np.inf, -np.inf], [np.inf, np.inf, np.inf]),
        method="trf",
        ftol=None,
        xtol=1e-9,
        gtol=1e-9,
        max_nfev=2000,
    )


def fit_logistic(xs, ys) -> LogisticFit:
    """Least-squares fit of (a, k, x0) with multi-start initialization.

    Starts place the midpoint at the 25th/50th/75th percentiles of x with the
    asymptote at max(y) and the growth-rate sign taken from the empirical
    slope; the best residual wins. Points are sorted by x internally so the
    result is exactly invariant to input ordering. Constant y data cannot
    define a transition and comes back with converged=False and k = 0.
    """
    xs = np.asarray(xs, dtype=np.float64).ravel()
    ys = np.asarray(ys, dtype=np.float64).ravel()
    if xs.size != ys.size or xs.size < 4:
        raise ValueError("need at least 4 (x, y) points")
    if np.unique(xs).size != xs.size:
        raise ValueError("x values must be distinct")
    order = np.argsort(xs)
    xs, ys = xs[order], ys[order]

    spread = float(np.ptp(ys))
    if spread <= 1e-12 * max(1.0, float(np.max(np.abs(ys)))):
        flat = float(np.mean(ys))
        rmse = float(np.sqrt(np.mean((ys - flat) ** 2)))
        return LogisticFit(a=flat, k=0.0, x0=float(np.median(xs)), rmse=rmse, converged=False)

    x_range = float(xs[-1] - xs[0])
    slope = np.polyfit(xs, ys, 1)[0]
    k_sign = 1.0 if slope >= 0 else -1.0
    a0 = max(float(np.max(ys)), 1e-9)

    best = None
    for x0_start in np.percentile(xs, [25, 50, 75]):
        for k_mag in (2.0, 10.0, 50.0):
            start = (a0, k_sign * k_mag / x_range, float(x0_start))
            res = _fit_once(xs, ys, start)
            rmse = float(np.sqrt(np.mean(res.fun**2)))
            if best is None or rmse < best[0]:
                best = (rmse, res)

    rmse, res = best
    a, k, x0 = (float(v) for v in res.x)
    return LogisticFit(a=a, k=k, x0=x0, rmse=rmse, converged=bool(res.status > 0))


@dataclass(frozen=True)
class CellStats:
    """Summary of one sweep cell's per-iteration final polarizations."""

    mean: float
    sd: float
    q1: float
    median: float
    q3: float
    whisker_lo: float  # lowest datum >= q1 - 1.5 IQR (Tukey's original rule)
    whisker_hi: float  # highest datum <= q3 + 1.5 IQR

    @property
    def quartiles(self) -> tuple[float, float, float]:
        return (self.q1, self.median, self.q3)


def aggregate_sweep_cell(final_variances) -> CellStats:
    """Mean, population sd, type-7 quartiles, and Tukey whisker positions."""
    data = np.asarray(final_variances, dtype=np.float64).ravel()
    if data.size == 0:
        raise ValueError("cell data must be nonempty")
    q1, median, q3 = np.percentile(data, [25, 50, 75])
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    return CellStats(
        mean=float(np.mean(data)),
        sd=float(np.std(data)),
        q1=float(q1),
        median=float(median),
        q3=float(q3),
        whisker_lo=float(np.min(data[data >= lo_fence])),
        whisker_hi=float(np.max(data[data <= hi_fence])),
    )
