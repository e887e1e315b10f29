"""Pair selection, interaction probability, attraction-repulsion updates, and
the step engine.

Dynamics per step, with the fixed random-draw order that makes a seed fully
determine a trajectory:

1. If the step falls inside a shock window, the scheduled actor is shifted and
   no random numbers are consumed.
2. Self-interest coin (only drawn when self_interest_prob > 0). On a hit, draw
   the active index and move that actor toward its preserved initial position;
   the interaction rules are skipped.
3. Active index, then passive index resampled until distinct. Indices come
   from floor(u * N) on a single uniform draw.
4. Interaction coin against (1/2)^delta, where delta is the exposure-weighted
   distance. The coin is drawn even when delta = 0 (probability 1).
5. Attraction vs repulsion. Under the step rule ("ar", equivalently steepness
   k = inf) the choice is deterministic from the raw Euclidean distance vs
   tolerance and consumes no draw. Under the stochastic rule with finite k, one
   repulsion coin is drawn. This is why "ar" and "sar" with k = inf produce
   stream-identical trajectories.

A failed interaction coin still completes the step: the step counter counts
actor activations, not position changes.

All state mutation happens on (N, D) float64 arrays confined to one engine;
independent engines never share state and may run concurrently.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .config import ConfigError, SimConfig

__all__ = [
    "Population",
    "StepKind",
    "StepOutcome",
    "TrajectoryRecord",
    "Engine",
    "engine_step",
    "interaction_probability",
    "interaction_probability_multi",
    "apply_ar",
    "sar_repulsion_probability",
    "trace_variance",
]


@dataclass
class Population:
    """Actor positions in [0, 1]^D plus each actor's frozen initial position."""

    positions: np.ndarray  # (N, D) float64
    preferred: np.ndarray  # (N, D) float64, never mutated after init

    def __post_init__(self) -> None:
        self.positions = np.ascontiguousarray(self.positions, dtype=np.float64)
        self.preferred = np.ascontiguousarray(self.preferred, dtype=np.float64)
        if self.positions.ndim != 2 or self.positions.shape != self.preferred.shape:
            raise ValueError("positions and preferred must share an (N, D) shape")

    @property
    def n_actors(self) -> int:
        return self.positions.shape[0]

    @property
    def n_dims(self) -> int:
        return self.positions.shape[1]

    def copy(self) -> "Population":
        return Population(self.positions.copy(), self.preferred.copy())


class StepKind(enum.IntEnum):
    NO_INTERACTION = 0
    ATTRACTED = 1
    REPULSED = 2
    SELF_INTEREST = 3
    SHOCK_APPLIED = 4


@dataclass(frozen=True)
class StepOutcome:
    """What a single engine step did: who was active and how they moved."""

    active_index: int
    kind: StepKind
    partner_index: int | None
    new_position: np.ndarray


@dataclass
class TrajectoryRecord:
    """Time series of (step, polarization) plus optional position snapshots."""

    steps: np.ndarray  # int64, ascending, starts at 0
    polarization: np.ndarray  # float64, same length
    snapshots: list[tuple[int, np.ndarray]] = field(default_factory=list)

    @property
    def final_polarization(self) -> float:
        return float(self.polarization[-1])


# -- compiled primitives -----------------------------------------------------


@njit(cache=True, nogil=True)
def _interaction_probability(distance, exposure):
    return 0.5 ** (distance / exposure)


@njit(cache=True, nogil=True)
def _weighted_distance(a, b, exposures):
    acc = 0.0
    for d in range(a.shape[0]):
        w = (a[d] - b[d]) / exposures[d]
        acc += w * w
    return math.sqrt(acc)


@njit(cache=True, nogil=True)
def _sar_repulsion_probability(distance, k, tolerance, n_dims):
    diameter = math.sqrt(n_dims)
    if distance <= 0.0:
        return 0.0
    if math.isinf(k):
        return 0.0 if distance <= tolerance else 1.0
    if distance >= diameter:
        return 1.0
    ratio = (diameter / distance - 1.0) / (diameter / tolerance - 1.0)
    return 1.0 / (1.0 + ratio**k)


@njit(cache=True, nogil=True)
def _trace_variance(positions):
    # Sum over dimensions of population variance, sum(x^2)/N - (sum(x)/N)^2.
    n, n_dims = positions.shape
    total = 0.0
    for d in range(n_dims):
        s = 0.0
        sq = 0.0
        for i in range(n):
            x = positions[i, d]
            s += x
            sq += x * x
        var = sq / n - (s / n) * (s / n)
        if var > 0.0:
            total += var
    return total


@njit(cache=True, nogil=True)
def _step(
    positions,
    preferred,
    exposures,
    tolerance,
    responsiveness,
    sar_k,
    self_interest_prob,
    shock_strength,
    shock_start,
    has_shock,
    step_index,
    rng,
):
    """Execute one step in place. Returns (kind, active_index, partner_index)."""
    n, n_dims = positions.shape

    if has_shock and shock_start <= step_index < shock_start + n:
        i = step_index - shock_start
        for d in range(n_dims):
            x = positions[i, d] + shock_strength[d]
            positions[i, d] = min(1.0, max(0.0, x))
        return 4, i, -1

    if self_interest_prob > 0.0 and rng.random() < self_interest_prob:
        i = int(rng.random() * n)
        for d in range(n_dims):
            x = positions[i, d] + responsiveness * (preferred[i, d] - positions[i, d])
            positions[i, d] = min(1.0, max(0.0, x))
        return 3, i, -1

    i = int(rng.random() * n)
    if n == 1:
        return 0, i, -1
    j = int(rng.random() * n)
    while j == i:
        j = int(rng.random() * n)

    dist_sq = 0.0
    weighted_sq = 0.0
    for d in range(n_dims):
        diff = positions[i, d] - positions[j, d]
        dist_sq += diff * diff
        w = diff / exposures[d]
        weighted_sq += w * w
    distance = math.sqrt(dist_sq)

    if rng.random() >= 0.5 ** math.sqrt(weighted_sq):
        return 0, i, j

    if math.isinf(sar_k):
        repulse = distance > tolerance
    else:
        p_rep = _sar_repulsion_probability(distance, sar_k, tolerance, n_dims)
        repulse = rng.random() < p_rep

    sign = -1.0 if repulse else 1.0
    for d in range(n_dims):
        x = positions[i, d] + sign * responsiveness * (positions[j, d] - positions[i, d])
        positions[i, d] = min(1.0, max(0.0, x))
    return (2 if repulse else 1), i, j


@njit(cache=True, nogil=True)
def _run(
    positions,
    preferred,
    exposures,
    tolerance,
    responsiveness,
    sar_k,
    self_interest_prob,
    shock_strength,
    shock_start,
    has_shock,
    start_step,
    n_steps,
    record_steps,
    record_out,
    snapshot_steps,
    snapshot_out,
    rng,
):
    """Run n_steps steps, filling polarization records and snapshots in place."""
    ri = 0
    si = 0
    for t in range(start_step, start_step + n_steps):
        _step(
            positions,
            preferred,
            exposures,
            tolerance,
            responsiveness,
            sar_k,
            self_interest_prob,
            shock_strength,
            shock_start,
            has_shock,
            t,
            rng,
        )
        completed = t + 1
        if ri < record_steps.shape[0] and completed == record_steps[ri]:
            record_out[ri] = _trace_variance(positions)
            ri += 1
        if si < snapshot_steps.shape[0] and completed == snapshot_steps[si]:
            for a in range(positions.shape[0]):
                for d in range(positions.shape[1]):
                    snapshot_out[si, a, d] = positions[a, d]
            si += 1


# -- public rule surface -------------------------------------------------------


def interaction_probability(distance: float, exposure: float) -> float:
    """Probability (1/2)^(distance/exposure) that two actors interact."""
    if exposure <= 0.0:
        raise ConfigError("exposure: must be positive")
    if distance < 0.0:
        raise ValueError("distance must be nonnegative")
    return float(_interaction_probability(distance, exposure))


def interaction_probability_multi(a, b, exposures) -> float:
    """Interaction probability (1/2)^delta with per-dimension halving distances.

    delta is the Euclidean distance after scaling each coordinate difference by
    its dimension's exposure; reduces to interaction_probability when D = 1.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    exposures = np.asarray(exposures, dtype=np.float64).ravel()
    if not (a.shape == b.shape == exposures.shape):
        raise ConfigError("exposure/position dimensions must agree")
    if np.any(exposures <= 0.0):
        raise ConfigError("exposure: every value must be positive")
    return float(0.5 ** _weighted_distance(a, b, exposures))


def apply_ar(active, passive, tolerance: float, responsiveness: float) -> np.ndarray:
    """Attraction-repulsion update of the active position, clamped to [0, 1].

    Within tolerance (Euclidean distance <= T) the active actor moves a
    fraction R of the displacement toward the passive one; beyond tolerance it
    moves the same fraction away. The passive position is never modified.
    """
    active = np.asarray(active, dtype=np.float64).ravel()
    passive = np.asarray(passive, dtype=np.float64).ravel()
    if active.shape != passive.shape:
        raise ConfigError("position dimensions must agree")
    distance = float(np.sqrt(np.sum((active - passive) ** 2)))
    sign = 1.0 if distance <= tolerance else -1.0
    moved = active + sign * responsiveness * (passive - active)
    return np.minimum(1.0, np.maximum(0.0, moved))


def sar_repulsion_probability(
    distance: float, k: float, tolerance: float, n_dims: int = 1
) -> float:
    """Probability that an interaction at the given distance repulses.

    The logistic-in-distance curve satisfies f(T) = 1/2 and f(sqrt(D)) = 1,
    and tends to 0 as the distance does; at d = 0 it returns 0 (the limit).
    k = inf gives the step function: 0 for d <= T, 1 beyond.
    """
    if not 0.0 < tolerance < math.sqrt(n_dims):
        raise ConfigError("tolerance: must be in (0, sqrt(D)) for the stochastic rule")
    if not k > 1.0:
        raise ConfigError("sar_steepness: must be > 1 (inf allowed)")
    if distance < 0.0 or distance > math.sqrt(n_dims):
        raise ValueError("distance must be in [0, sqrt(D)]")
    return float(_sar_repulsion_probability(distance, k, tolerance, n_dims))


def trace_variance(positions: np.ndarray) -> float:
    """Sum over dimensions of the population variance of an (N, D) array."""
    positions = np.ascontiguousarray(positions, dtype=np.float64)
    if positions.ndim != 2 or positions.shape[0] == 0:
        raise ValueError("positions must be a nonempty (N, D) array")
    return float(_trace_variance(positions))


# -- engine --------------------------------------------------------------------


def _kernel_args(cfg: SimConfig):
    exposures = np.asarray(cfg.exposure, dtype=np.float64)
    sar_k = cfg.sar_steepness if cfg.rule == "sar" else math.inf
    if cfg.shock is not None:
        shock_strength = np.asarray(cfg.shock.strength, dtype=np.float64)
        shock_start = cfg.shock.at_step
        has_shock = True
    else:
        shock_strength = np.zeros(cfg.n_dims)
        shock_start = 0
        has_shock = False
    return exposures, sar_k, shock_strength, shock_start, has_shock


class Engine:
    """Sequential step engine owning one population and one RNG stream.

    A run is strictly sequential; the engine makes no shared-state
    assumptions, so independent engines can run concurrently.
    """

    def __init__(
        self,
        cfg: SimConfig,
        population: Population,
        rng: np.random.Generator | None = None,
    ):
        cfg.validate()
        if population.n_actors != cfg.n_actors or population.n_dims != cfg.n_dims:
            raise ConfigError("population shape does not match config")
        self.cfg = cfg
        self.population = population
        self.rng = rng if rng is not None else np.random.default_rng(cfg.seed)
        self.step_count = 0
        self._args = _kernel_args(cfg)

    def step(self) -> StepOutcome:
        """Advance exactly one step; at most the active actor moves."""
        exposures, sar_k, shock_strength, shock_start, has_shock = self._args
        kind, active, partner = _step(
            self.population.positions,
            self.population.preferred,
            exposures,
            self.cfg.tolerance,
            self.cfg.responsiveness,
            sar_k,
            self.cfg.self_interest_prob,
            shock_strength,
            shock_start,
            has_shock,
            self.step_count,
            self.rng,
        )
        self.step_count += 1
        return StepOutcome(
            active_index=active,
            kind=StepKind(kind),
            partner_index=None if partner < 0 else partner,
            new_position=self.population.positions[active].copy(),
        )

    def run(
        self,
        n_steps: int,
        record_steps: np.ndarray | None = None,
        snapshot_steps: np.ndarray | None = None,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Advance n_steps through the compiled loop.

        record_steps/snapshot_steps are ascending arrays of completed-step
        counts strictly greater than the current step count. Returns the
        polarization records and the (len(snapshot_steps), N, D) snapshots.
        """
        exposures, sar_k, shock_strength, shock_start, has_shock = self._args
        if record_steps is None:
            record_steps = np.empty(0, dtype=np.int64)
        if snapshot_steps is None:
            snapshot_steps = np.empty(0, dtype=np.int64)
        record_out = np.empty(record_steps.shape[0], dtype=np.float64)
        snapshot_out = np.empty(
            (snapshot_steps.shape[0], self.population.n_actors, self.population.n_dims)
        )
        _run(
            self.population.positions,
            self.population.preferred,
            exposures,
            self.cfg.tolerance,
            self.cfg.responsiveness,
            sar_k,
            self.cfg.self_interest_prob,
            shock_strength,
            shock_start,
            has_shock,
            self.step_count,
            n_steps,
            np.asarray(record_steps, dtype=np.int64),
            record_out,
            np.asarray(snapshot_steps, dtype=np.int64),
            snapshot_out,
            self.rng,
        )
        self.step_count += n_steps
        return record_out, snapshot_out


def engine_step(
    population: Population, cfg: SimConfig, rng: np.random.Generator, step_index: int = 0
) -> StepOutcome:
    """One-shot step on a population; see the module docstring for draw order."""
    engine = Engine(cfg, population, rng)
    engine.step_count = step_index
    return engine.step()


def warmup() -> None:
    """Force JIT compilation of the kernels (useful before timing or threading)."""
    cfg = SimConfig(n_actors=2, max_steps=4, record_every=1)
    pop = Population(np.array([[0.4], [0.6]]), np.array([[0.4], [0.6]]))
    eng = Engine(cfg, pop)
    eng.run(4, np.array([4], dtype=np.int64), np.array([4], dtype=np.int64))
    sar_repulsion_probability(0.3, 4.0, 0.25, 1)
    interaction_probability_multi([0.1], [0.2], [0.1])
