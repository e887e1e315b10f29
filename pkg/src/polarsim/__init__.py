"""Attraction-repulsion opinion dynamics: engine, sweeps, metrics, CLI."""

from .config import (
    ConfigError,
    EmpiricalInit,
    ExplicitInit,
    MultivariateNormalInit,
    NormalInit,
    Shock,
    SimConfig,
    load_config,
)
from .core import (
    Engine,
    Population,
    StepKind,
    StepOutcome,
    TrajectoryRecord,
    apply_ar,
    engine_step,
    interaction_probability,
    interaction_probability_multi,
    sar_repulsion_probability,
)
from .initialization import (
    HistogramSpec,
    InitializationError,
    init_empirical,
    init_multivariate,
    init_normal,
    initialize,
    load_bundled_histogram,
)
from .interventions import ShockState, self_interest_move, shock_step
from .metrics import (
    CellStats,
    LogisticFit,
    aggregate_sweep_cell,
    fit_logistic,
    logistic,
    polarization_1d,
    polarization_trace,
)
from .simulate import SimulationResult, run_simulation
from .sweep import SweepResult, SweepSpec, derive_seed_list, run_sweep

__version__ = "0.1.0"
