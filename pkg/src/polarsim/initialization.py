"""Initial population construction.

All initializers return a Population whose positions lie inside [0, 1]^D and
whose preferred positions are a frozen copy of the initial ones. Normal
variants use rejection sampling to stay inside the space; the empirical
variant samples histogram bins by weight and jitters uniformly within the
chosen bin, which reproduces the histogram density exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import (
    ConfigError,
    EmpiricalInit,
    ExplicitInit,
    MultivariateNormalInit,
    NormalInit,
    SimConfig,
)
from .core import Population

REJECTION_CAP = 1000  # attempts per actor before declaring a misconfiguration

BUNDLED_HISTOGRAM = "ces2020_ideology"


class InitializationError(RuntimeError):
    """Sampling could not produce a valid population."""


@dataclass(frozen=True)
class HistogramSpec:
    """A 1D histogram over [0, 1]: strictly increasing bin edges plus weights."""

    bin_edges: tuple[float, ...]
    weights: tuple[float, ...]

    def validate(self) -> "HistogramSpec":
        edges = np.asarray(self.bin_edges, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        if edges.ndim != 1 or edges.size < 2:
            raise ConfigError("histogram.bin_edges: need at least two edges")
        if np.any(np.diff(edges) <= 0):
            raise ConfigError("histogram.bin_edges: must be strictly increasing")
        if edges[0] != 0.0 or edges[-1] != 1.0:
            raise ConfigError("histogram.bin_edges: must span [0, 1]")
        if weights.size != edges.size - 1:
            raise ConfigError("histogram.weights: need one weight per bin")
        if np.any(weights < 0):
            raise ConfigError("histogram.weights: must be nonnegative")
        if not weights.sum() > 0:
            raise ConfigError("histogram.weights: at least one must be positive")
        return self

    @classmethod
    def from_file(cls, path: str | Path) -> "HistogramSpec":
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"histogram file unreadable: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"histogram file: invalid JSON ({exc})") from None
        if not isinstance(raw, dict) or "bin_edges" not in raw or "weights" not in raw:
            raise ConfigError("histogram file: needs 'bin_edges' and 'weights' arrays")
        return cls(
            bin_edges=tuple(float(e) for e in raw["bin_edges"]),
            weights=tuple(float(w) for w in raw["weights"]),
        ).validate()


def load_bundled_histogram(name: str = BUNDLED_HISTOGRAM) -> HistogramSpec:
    """Load a histogram shipped with the package (see data/)."""
    path = Path(__file__).parent / "data" / f"{name}.json"
    return HistogramSpec.from_file(path)


def _rejection_sample(n, n_dims, means, sigma, rng) -> np.ndarray:
    out = np.empty((n, n_dims))
    for i in range(n):
        for attempt in range(REJECTION_CAP):
            candidate = rng.normal(means, sigma)
            if np.all(candidate >= 0.0) and np.all(candidate <= 1.0):
                out[i] = candidate
                break
        else:
            raise InitializationError(
                f"rejection sampling exceeded {REJECTION_CAP} attempts for one actor; "
                "mean/sigma place almost no mass inside [0, 1]"
            )
    return out


def init_normal(n: int, mean: float, sigma: float, rng: np.random.Generator) -> Population:
    """1D positions from Normal(mean, sigma), resampled until inside [0, 1]."""
    if sigma <= 0:
        raise ConfigError("initializer.sigma: must be positive")
    positions = _rejection_sample(n, 1, np.array([mean]), sigma, rng)
    return Population(positions, positions.copy())


def init_multivariate(
    n: int, means, diag_variance: float, rng: np.random.Generator
) -> Population:
    """Independent per-dimension normals, whole vectors resampled into [0, 1]^D."""
    means = np.asarray(means, dtype=np.float64)
    if diag_variance <= 0:
        raise ConfigError("initializer.variance: must be positive")
    positions = _rejection_sample(n, means.size, means, np.sqrt(diag_variance), rng)
    return Population(positions, positions.copy())


def init_empirical(n: int, hist: HistogramSpec, rng: np.random.Generator) -> Population:
    """Sample bins proportionally to weight, then uniformly within the bin."""
    hist.validate()
    edges = np.asarray(hist.bin_edges)
    weights = np.asarray(hist.weights, dtype=np.float64)
    cumulative = np.cumsum(weights / weights.sum())
    positions = np.empty((n, 1))
    for i in range(n):
        b = int(np.searchsorted(cumulative, rng.random(), side="right"))
        lo, hi = edges[b], edges[b + 1]
        positions[i, 0] = lo + rng.random() * (hi - lo)
    return Population(positions, positions.copy())


def init_explicit(positions) -> Population:
    """Use caller-provided positions verbatim."""
    arr = np.asarray(positions, dtype=np.float64)
    if arr.ndim != 2:
        raise ConfigError("initializer.positions: expected an (N, D) array")
    if np.any(arr < 0) or np.any(arr > 1):
        raise ConfigError("initializer.positions: values must be in [0, 1]")
    return Population(arr.copy(), arr.copy())


def initialize(cfg: SimConfig, rng: np.random.Generator) -> Population:
    """Build the initial population described by cfg, consuming draws from rng."""
    init = cfg.initializer
    if isinstance(init, NormalInit):
        return init_normal(cfg.n_actors, init.mean, init.sigma, rng)
    if isinstance(init, MultivariateNormalInit):
        return init_multivariate(cfg.n_actors, init.means, init.variance, rng)
    if isinstance(init, EmpiricalInit):
        if init.histogram == BUNDLED_HISTOGRAM:
            hist = load_bundled_histogram()
        else:
            hist = HistogramSpec.from_file(init.histogram)
        return init_empirical(cfg.n_actors, hist, rng)
    if isinstance(init, ExplicitInit):
        return init_explicit(init.positions)
    raise ConfigError("initializer: unknown kind")  # pragma: no cover
