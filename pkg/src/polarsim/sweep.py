"""Parameter-grid execution with the shared-seed-list protocol.

A sweep derives one seed per iteration from the master seed and reuses that
seed list in every cell, so differences between cells are attributable to the
parameters alone. Each (cell, iteration) run is independent; the harness
schedules them over a thread pool (the compiled step loop releases the GIL)
and assembles results in canonical cell order, making output bytes identical
for any worker count.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from concurrent.futures import ThreadPoolExecutor

from .config import ConfigError, SimConfig
from .core import TrajectoryRecord, warmup
from .metrics import CellStats, aggregate_sweep_cell
from .simulate import run_simulation

AXIS_PARAMETERS = (
    "tolerance",
    "responsiveness",
    "exposure",
    "self_interest_prob",
    "sar_steepness",
    "shock_strength",
    "shock_at_step",
    "n_actors",
)


def derive_seed_list(master_seed: int, iterations: int) -> list[int]:
    """One run seed per iteration, a pure function of the master seed."""
    if iterations < 1:
        raise ConfigError("iterations: must be >= 1")
    rng = np.random.default_rng(master_seed)
    return [int(s) for s in rng.integers(0, 2**63, size=iterations, dtype=np.uint64)]


def apply_axis(cfg: SimConfig, name: str, value) -> SimConfig:
    """Return cfg with one swept parameter replaced."""
    if name in ("tolerance", "responsiveness", "self_interest_prob"):
        return cfg.replace(**{name: float(value)})
    if name == "sar_steepness":
        if cfg.rule != "sar":
            raise ConfigError("sar_steepness axis requires rule='sar' in the base config")
        return cfg.replace(sar_steepness=float(value))
    if name == "exposure":
        return cfg.replace(exposure=float(value))
    if name.startswith("exposure_"):
        try:
            dim = int(name.split("_", 1)[1])
        except ValueError:
            raise ConfigError(f"unknown sweep parameter {name!r}") from None
        if not 0 <= dim < cfg.n_dims:
            raise ConfigError(f"{name}: dimension index out of range")
        exposure = list(cfg.exposure)
        exposure[dim] = float(value)
        return cfg.replace(exposure=tuple(exposure))
    if name == "shock_strength":
        if cfg.shock is None:
            raise ConfigError("shock_strength axis requires a [shock] block in the base config")
        strength = (float(value),) * cfg.n_dims
        return cfg.replace(shock=type(cfg.shock)(strength=strength, at_step=cfg.shock.at_step))
    if name == "shock_at_step":
        if cfg.shock is None:
            raise ConfigError("shock_at_step axis requires a [shock] block in the base config")
        return cfg.replace(shock=type(cfg.shock)(strength=cfg.shock.strength, at_step=int(value)))
    if name == "n_actors":
        return cfg.replace(n_actors=int(value))
    raise ConfigError(
        f"unknown sweep parameter {name!r}; valid: {', '.join(AXIS_PARAMETERS)} "
        "or exposure_<dim>"
    )


@dataclass(frozen=True)
class SweepSpec:
    """A 1- or 2-axis parameter grid over a base configuration."""

    base: SimConfig
    axes: tuple[tuple[str, tuple[float, ...]], ...]
    iterations: int = 20
    master_seed: int = 0

    def validate(self) -> "SweepSpec":
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError("axes: a sweep needs 1 or 2 axes")
        if self.iterations < 1:
            raise ConfigError("iterations: must be >= 1")
        for name, values in self.axes:
            if not values:
                raise ConfigError(f"axis {name!r}: needs at least one value")
        self.base.validate()
        return self

    @property
    def cells(self) -> list[tuple[float, ...]]:
        """Axis-value tuples in canonical (row-major) order."""
        grids = [values for _, values in self.axes]
        return [tuple(c) for c in itertools.product(*grids)]

    def cell_config(self, cell: tuple[float, ...], seed: int) -> SimConfig:
        cfg = self.base
        for (name, _), value in zip(self.axes, cell):
            cfg = apply_axis(cfg, name, value)
        return cfg.replace(
            seed=seed,
            record_every=max(1, cfg.max_steps),
            snapshot_steps=(),
        )

    def to_dict(self) -> dict:
        return {
            "base": self.base.to_dict(),
            "axes": [{"parameter": n, "values": list(v)} for n, v in self.axes],
            "iterations": self.iterations,
            "master_seed": self.master_seed,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "SweepSpec":
        if "base" not in raw or "axes" not in raw:
            raise ConfigError("sweep config: needs 'base' and 'axes'")
        axes = []
        for ax in raw["axes"]:
            if "parameter" not in ax:
                raise ConfigError("sweep axis: needs a 'parameter' name")
            if "values" in ax:
                values = tuple(float(v) for v in ax["values"])
            elif {"start", "stop", "step"} <= set(ax):
                start, stop, step = (float(ax[k]) for k in ("start", "stop", "step"))
                count = int(round((stop - start) / step)) + 1
                values = tuple(round(start + i * step, 12) for i in range(count))
            else:
                raise ConfigError("sweep axis: needs 'values' or start/stop/step")
            axes.append((str(ax["parameter"]), values))
        return cls(
            base=SimConfig.from_dict(raw["base"]),
            axes=tuple(axes),
            iterations=int(raw.get("iterations", 20)),
            master_seed=int(raw.get("master_seed", 0)),
        ).validate()


@dataclass
class SweepResult:
    """Per-cell, per-iteration final polarizations plus the shared seed list."""

    spec: SweepSpec
    cells: list[tuple[float, ...]]
    finals: np.ndarray  # (n_cells, iterations)
    seed_list: list[int]
    aggregates: list[CellStats] = field(init=False)

    def __post_init__(self) -> None:
        self.aggregates = [aggregate_sweep_cell(row) for row in self.finals]

    def cell_values(self, cell: tuple[float, ...]) -> np.ndarray:
        return self.finals[self.cells.index(cell)]

    def axis_means(self) -> tuple[np.ndarray, np.ndarray]:
        """(axis values, mean finals) for single-axis sweeps."""
        if len(self.spec.axes) != 1:
            raise ValueError("axis_means is defined for single-axis sweeps")
        xs = np.array([c[0] for c in self.cells])
        means = self.finals.mean(axis=1)
        return xs, means


def _run_cell_iteration(args) -> float:
    spec, cell, seed = args
    try:
        cfg = spec.cell_config(cell, seed)
    except ConfigError as exc:
        raise ConfigError(f"cell {cell}: {exc}") from None
    return run_simulation(cfg).final_polarization


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Execute every (cell, iteration) run; deterministic for any worker count."""
    spec.validate()
    seeds = derive_seed_list(spec.master_seed, spec.iterations)
    cells = spec.cells
    jobs = [(spec, cell, seed) for cell in cells for seed in seeds]

    # Fail fast on a bad cell before burning compute on the grid.
    for cell in cells:
        try:
            spec.cell_config(cell, seeds[0])
        except ConfigError as exc:
            raise ConfigError(f"cell {cell}: {exc}") from None

    warmup()  # compile once, outside the pool
    if workers is not None and workers < 1:
        raise ConfigError("workers: must be >= 1")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        finals = list(pool.map(_run_cell_iteration, jobs))

    arr = np.asarray(finals).reshape(len(cells), spec.iterations)
    return SweepResult(spec=spec, cells=cells, finals=arr, seed_list=seeds)


# -- CSV emission ----------------------------------------------------------------

SWEEP_HEADER = "axis1,axis2,iteration,seed,final_polarization"
AGGREGATE_HEADER = "axis1,axis2,mean,sd,q1,median,q3"
TIMESERIES_HEADER = "step,polarization"


def _fmt(x: float) -> str:
    return repr(float(x))


def write_sweep_csv(result: SweepResult, path: str | Path) -> Path:
    """Raw per-iteration rows in canonical cell order."""
    lines = [SWEEP_HEADER]
    two_axis = len(result.spec.axes) == 2
    for cell, row in zip(result.cells, result.finals):
        a1 = _fmt(cell[0])
        a2 = _fmt(cell[1]) if two_axis else ""
        for it, value in enumerate(row):
            lines.append(f"{a1},{a2},{it},{result.seed_list[it]},{_fmt(value)}")
    return _write_lines(path, lines)


def write_aggregate_csv(result: SweepResult, path: str | Path) -> Path:
    """One row per cell with mean, sd, and type-7 quartiles."""
    lines = [AGGREGATE_HEADER]
    two_axis = len(result.spec.axes) == 2
    for cell, stats in zip(result.cells, result.aggregates):
        a1 = _fmt(cell[0])
        a2 = _fmt(cell[1]) if two_axis else ""
        lines.append(
            f"{a1},{a2},{_fmt(stats.mean)},{_fmt(stats.sd)},"
            f"{_fmt(stats.q1)},{_fmt(stats.median)},{_fmt(stats.q3)}"
        )
    return _write_lines(path, lines)


def write_timeseries_csv(trajectory: TrajectoryRecord, path: str | Path) -> Path:
    lines = [TIMESERIES_HEADER]
    for step, value in zip(trajectory.steps, trajectory.polarization):
        lines.append(f"{int(step)},{_fmt(value)}")
    return _write_lines(path, lines)


def write_snapshot_csv(trajectory: TrajectoryRecord, path: str | Path) -> Path:
    """All recorded snapshots, one row per (step, actor)."""
    if not trajectory.snapshots:
        raise ValueError("trajectory has no snapshots")
    n_dims = trajectory.snapshots[0][1].shape[1]
    header = "step,actor," + ",".join(f"dim{d}" for d in range(n_dims))
    lines = [header]
    for step, positions in trajectory.snapshots:
        for actor, row in enumerate(positions):
            coords = ",".join(_fmt(x) for x in row)
            lines.append(f"{step},{actor},{coords}")
    return _write_lines(path, lines)


def _write_lines(path: str | Path, lines: Sequence[str]) -> Path:
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path
