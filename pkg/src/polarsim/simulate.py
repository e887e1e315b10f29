"""Run one full simulation from a config: initialize, step, record."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SimConfig
from .core import Engine, Population, TrajectoryRecord, trace_variance
from .initialization import initialize


@dataclass
class SimulationResult:
    config: SimConfig
    trajectory: TrajectoryRecord
    population: Population  # final state; .preferred still holds the initial one

    @property
    def final_polarization(self) -> float:
        return self.trajectory.final_polarization


def recording_steps(max_steps: int, record_every: int) -> np.ndarray:
    """Completed-step counts to record: 0, every record_every, and the end."""
    steps = [0]
    steps.extend(range(record_every, max_steps + 1, record_every))
    if steps[-1] != max_steps:
        steps.append(max_steps)
    return np.asarray(steps, dtype=np.int64)


def run_simulation(
    cfg: SimConfig,
    rng: np.random.Generator | None = None,
    population: Population | None = None,
) -> SimulationResult:
    """Execute cfg.max_steps steps from a fresh (or given) population.

    A single RNG stream seeded from cfg.seed drives both initialization and
    stepping, so the config alone reproduces the trajectory bit for bit.
    """
    cfg.validate()
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    if population is None:
        population = initialize(cfg, rng)

    record = recording_steps(cfg.max_steps, cfg.record_every)
    snaps = np.asarray(sorted(set(cfg.snapshot_steps)), dtype=np.int64)

    polarization = np.empty(record.shape[0])
    polarization[0] = trace_variance(population.positions)
    snapshots: list[tuple[int, np.ndarray]] = []
    if snaps.size and snaps[0] == 0:
        snapshots.append((0, population.positions.copy()))

    engine = Engine(cfg, population, rng)
    later_snaps = snaps[snaps > 0]
    recorded, snap_arr = engine.run(cfg.max_steps, record[1:], later_snaps)
    polarization[1:] = recorded
    snapshots.extend((int(s), snap_arr[i]) for i, s in enumerate(later_snaps))

    trajectory = TrajectoryRecord(
        steps=record, polarization=polarization, snapshots=snapshots
    )
    return SimulationResult(config=cfg, trajectory=trajectory, population=population)
