"""Experiment presets that regenerate each published figure's underlying data.

Every preset pins the exact grid, iteration count, and step horizon stated in
its figure's caption. Time-series figures come out as one CSV per curve (same
seed across curves, as in the originals); sweep figures come out as raw plus
aggregate CSVs, with logistic-fit CSVs where the figure reports transitions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .config import EmpiricalInit, MultivariateNormalInit, Shock, SimConfig
from .initialization import BUNDLED_HISTOGRAM
from .sweep import SweepSpec, derive_seed_list


@dataclass(frozen=True)
class CurveJob:
    """One seeded run whose time series (and snapshots) get written out."""

    name: str
    cfg: SimConfig


@dataclass(frozen=True)
class SweepJob:
    """One grid sweep; fit=True also emits a logistic fit of the axis means."""

    name: str
    spec: SweepSpec
    fit: bool = False


@dataclass(frozen=True)
class Preset:
    figure_id: str
    description: str
    curves: tuple[CurveJob, ...] = field(default=())
    sweeps: tuple[SweepJob, ...] = field(default=())


def grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    count = int(round((stop - start) / step)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))


def _fmt_value(v: float) -> str:
    if math.isinf(v):
        return "inf"
    return f"{v:g}"


PRESET_IDS = (
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9",
    "figS1", "figS2", "figS4", "figS5", "figS6", "figS7",
)


def build_preset(
    figure_id: str,
    seed: int = 0,
    max_steps: int | None = None,
    iterations: int | None = None,
) -> Preset:
    """Assemble a preset; max_steps/iterations override every job (smoke runs)."""
    if figure_id not in PRESET_IDS:
        raise KeyError(figure_id)
    preset = _BUILDERS[figure_id](seed)
    if max_steps is not None or iterations is not None:
        preset = _override(preset, max_steps, iterations)
    return preset


def _curve_cfg(base: SimConfig, max_steps: int, seed: int, **changes) -> SimConfig:
    cfg = base.replace(max_steps=max_steps, record_every=max(1, max_steps // 1000))
    return cfg.replace(seed=seed, **changes) if changes else cfg.replace(seed=seed)


def _curves(
    figure_id: str,
    base: SimConfig,
    param: str,
    values,
    max_steps: int,
    seed: int,
    label: str,
    snapshot_for=(),
    snapshot_steps=(),
) -> tuple[CurveJob, ...]:
    from .sweep import apply_axis

    run_seed = derive_seed_list(seed, 1)[0]
    jobs = []
    for v in values:
        cfg = apply_axis(base, param, v)
        snaps = snapshot_steps if v in snapshot_for else ()
        cfg = _curve_cfg(cfg, max_steps, run_seed, snapshot_steps=snaps)
        jobs.append(CurveJob(name=f"{figure_id}_{label}{_fmt_value(v)}", cfg=cfg))
    return tuple(jobs)


def _base_2d() -> SimConfig:
    return SimConfig(
        n_dims=2,
        exposure=(0.1, 0.1),
        initializer=MultivariateNormalInit(means=(0.5, 0.5), variance=0.04),
    )


def _fig1(seed: int) -> Preset:
    return Preset(
        "fig1",
        "Polarization over time for tolerance 0.05..0.95",
        curves=_curves("fig1", SimConfig(), "tolerance", grid(0.05, 0.95, 0.1),
                       2_500_000, seed, "T"),
    )


def _fig2(seed: int) -> Preset:
    return Preset(
        "fig2",
        "Position snapshots over time for tolerance 0.25 vs 0.35",
        curves=_curves(
            "fig2", SimConfig(), "tolerance", (0.25, 0.35), 2_500_000, seed, "T",
            snapshot_for=(0.25, 0.35),
            snapshot_steps=(0, 100_000, 1_000_000, 2_500_000),
        ),
    )


def _fig3(seed: int) -> Preset:
    spec = SweepSpec(
        base=SimConfig(max_steps=1_000_000),
        axes=(("tolerance", grid(0.05, 1.0, 0.05)),
              ("responsiveness", grid(0.05, 1.0, 0.05))),
        iterations=20,
        master_seed=seed,
    )
    return Preset("fig3", "Final polarization over the tolerance x responsiveness grid",
                  sweeps=(SweepJob("fig3", spec),))


def _fig4(seed: int) -> Preset:
    spec = SweepSpec(
        base=SimConfig(max_steps=2_000_000),
        axes=(("tolerance", grid(0.05, 1.0, 0.05)),
              ("exposure", grid(0.05, 0.5, 0.05))),
        iterations=20,
        master_seed=seed,
    )
    return Preset("fig4", "Final polarization over the tolerance x exposure grid",
                  sweeps=(SweepJob("fig4", spec),))


def _fig5(seed: int) -> Preset:
    return Preset(
        "fig5",
        "Polarization over time at tolerance 0.3 for exposure 0.05..0.5",
        curves=_curves("fig5", SimConfig(tolerance=0.3), "exposure",
                       grid(0.05, 0.5, 0.05), 2_500_000, seed, "E"),
    )


def _fig6(seed: int) -> Preset:
    return Preset(
        "fig6",
        "2D runs: first-dimension exposure 0.1, second varied 0.05..0.5",
        curves=_curves(
            "fig6", _base_2d(), "exposure_1", grid(0.05, 0.5, 0.05),
            2_500_000, seed, "E2",
            snapshot_for=(0.05, 0.4), snapshot_steps=(2_500_000,),
        ),
    )


def _fig7(seed: int) -> Preset:
    return Preset(
        "fig7",
        "Polarization over time for self-interest 0..10%",
        curves=_curves(
            "fig7", SimConfig(), "self_interest_prob", grid(0.0, 0.10, 0.01),
            2_500_000, seed, "P",
            snapshot_for=(0.0, 0.01, 0.1), snapshot_steps=(0, 2_500_000),
        ),
    )


def _fig8(seed: int) -> Preset:
    base = SimConfig(shock=Shock(strength=(0.0,), at_step=500_000))
    return Preset(
        "fig8",
        "Shock at step 500k with strength 0..0.8, single shared seed",
        curves=_curves(
            "fig8", base, "shock_strength", grid(0.0, 0.8, 0.05),
            2_500_000, seed, "D",
            snapshot_for=(0.1, 0.4, 0.8),
            snapshot_steps=(500_000, 501_000, 2_500_000),
        ),
    )


def _fig9(seed: int) -> Preset:
    spec = SweepSpec(
        base=SimConfig(max_steps=2_000_000, shock=Shock(strength=(0.0,), at_step=100_000)),
        axes=(("shock_strength", grid(0.0, 0.8, 0.05)),
              ("shock_at_step", grid(100_000, 900_000, 100_000))),
        iterations=20,
        master_seed=seed,
    )
    return Preset("fig9", "Final polarization over shock strength x shock step",
                  sweeps=(SweepJob("fig9", spec),))


def _figS1(seed: int) -> Preset:
    empirical = SimConfig(initializer=EmpiricalInit(histogram=BUNDLED_HISTOGRAM))
    sweep_axis = (("tolerance", grid(0.05, 1.0, 0.05)),)
    normal_spec = SweepSpec(base=SimConfig(max_steps=1_000_000), axes=sweep_axis,
                            iterations=20, master_seed=seed)
    empirical_spec = SweepSpec(base=empirical.replace(max_steps=1_000_000),
                               axes=sweep_axis, iterations=20, master_seed=seed)
    return Preset(
        "figS1",
        "Empirical-histogram initialization vs the normal default",
        curves=_curves("figS1", empirical, "tolerance", grid(0.05, 0.95, 0.1),
                       2_500_000, seed, "T"),
        sweeps=(SweepJob("figS1_normal", normal_spec),
                SweepJob("figS1_empirical", empirical_spec)),
    )


def _figS2(seed: int) -> Preset:
    ks = (2.0, 4.0, 8.0, 16.0, 32.0, 64.0, math.inf)
    base = SimConfig(rule="sar", sar_steepness=2.0)
    spec = SweepSpec(
        base=base.replace(max_steps=1_500_000),
        axes=(("sar_steepness", ks),),
        iterations=20,
        master_seed=seed,
    )
    return Preset(
        "figS2",
        "Stochastic attraction-repulsion for steepness 2..64 and the step rule",
        curves=_curves("figS2", base, "sar_steepness", ks, 1_500_000, seed, "k"),
        sweeps=(SweepJob("figS2_final", spec),),
    )


def _figS4(seed: int) -> Preset:
    def spec(param, values, steps):
        return SweepSpec(base=SimConfig(max_steps=steps),
                         axes=((param, values),), iterations=20, master_seed=seed)

    return Preset(
        "figS4",
        "Single-axis sensitivity sweeps with logistic transition fits",
        sweeps=(
            SweepJob("figS4_T", spec("tolerance", grid(0.05, 1.0, 0.05), 1_000_000), fit=True),
            SweepJob("figS4_R", spec("responsiveness", grid(0.05, 1.0, 0.05), 1_000_000), fit=True),
            SweepJob("figS4_E", spec("exposure", grid(0.05, 0.5, 0.05), 2_000_000), fit=True),
        ),
    )


def _figS5(seed: int) -> Preset:
    spec = SweepSpec(
        base=_base_2d().replace(max_steps=1_000_000),
        axes=(("tolerance", grid(0.05, 1.4, 0.05)),
              ("responsiveness", grid(0.05, 1.0, 0.05))),
        iterations=20,
        master_seed=seed,
    )
    return Preset("figS5", "2D tolerance x responsiveness grid",
                  sweeps=(SweepJob("figS5", spec),))


def _figS6(seed: int) -> Preset:
    spec = SweepSpec(
        base=_base_2d().replace(max_steps=2_000_000),
        axes=(("exposure_0", grid(0.05, 0.5, 0.05)),
              ("exposure_1", grid(0.05, 0.5, 0.05))),
        iterations=20,
        master_seed=seed,
    )
    return Preset("figS6", "2D per-dimension exposure grid",
                  sweeps=(SweepJob("figS6", spec),))


def _figS7(seed: int) -> Preset:
    spec = SweepSpec(
        base=SimConfig(max_steps=2_000_000),
        axes=(("tolerance", grid(0.05, 0.95, 0.1)),
              ("self_interest_prob", grid(0.0, 1.0, 0.05))),
        iterations=20,
        master_seed=seed,
    )
    return Preset("figS7", "Tolerance x self-interest grid",
                  sweeps=(SweepJob("figS7", spec),))


_BUILDERS = {
    "fig1": _fig1, "fig2": _fig2, "fig3": _fig3, "fig4": _fig4, "fig5": _fig5,
    "fig6": _fig6, "fig7": _fig7, "fig8": _fig8, "fig9": _fig9,
    "figS1": _figS1, "figS2": _figS2, "figS4": _figS4,
    "figS5": _figS5, "figS6": _figS6, "figS7": _figS7,
}


def _override(preset: Preset, max_steps: int | None, iterations: int | None) -> Preset:
    curves = []
    for job in preset.curves:
        cfg = job.cfg
        if max_steps is not None:
            snaps = tuple(s for s in cfg.snapshot_steps if s <= max_steps)
            shock = cfg.shock
            if shock is not None and shock.at_step > max_steps - cfg.n_actors:
                shock = Shock(strength=shock.strength,
                              at_step=max(1, max_steps // 2 - cfg.n_actors))
            cfg = cfg.replace(max_steps=max_steps, snapshot_steps=snaps, shock=shock,
                              record_every=max(1, max_steps // 1000))
        curves.append(CurveJob(job.name, cfg))
    sweeps = []
    for job in preset.sweeps:
        spec = job.spec
        base = spec.base
        if max_steps is not None:
            shock = base.shock
            if shock is not None and shock.at_step > max_steps - base.n_actors:
                shock = Shock(strength=shock.strength,
                              at_step=max(1, max_steps // 2 - base.n_actors))
            base = base.replace(max_steps=max_steps, shock=shock)
        axes = spec.axes
        if max_steps is not None and any(n == "shock_at_step" for n, _ in axes):
            limit = float(max(1, max_steps - base.n_actors))
            axes = tuple(
                (n, tuple(min(v, limit) for v in vals)) if n == "shock_at_step" else (n, vals)
                for n, vals in axes
            )
        spec = SweepSpec(
            base=base,
            axes=axes,
            iterations=iterations if iterations is not None else spec.iterations,
            master_seed=spec.master_seed,
        )
        sweeps.append(SweepJob(job.name, spec, job.fit))
    return Preset(preset.figure_id, preset.description, tuple(curves), tuple(sweeps))
