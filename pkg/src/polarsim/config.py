"""Run configuration: parameter container, validation, and file ingestion.

Config files are TOML (hand-written) or JSON (machine round-trip, e.g. the
config echo inside a run manifest). Keys mirror the model's parameter names:
n_actors, n_dims, tolerance, responsiveness, exposure, rule, sar_steepness,
self_interest_prob, max_steps, record_every, snapshot_steps, seed, plus
[initializer] and [shock] blocks.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Union

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib


class ConfigError(ValueError):
    """A configuration value is out of range, malformed, or inconsistent."""


def _as_float_tuple(value, n: int, what: str) -> tuple[float, ...]:
    """Broadcast a scalar to n dims, or check an n-length sequence."""
    if isinstance(value, (int, float)):
        return (float(value),) * n
    vals = tuple(float(v) for v in value)
    if len(vals) != n:
        raise ConfigError(f"{what}: expected {n} values, got {len(vals)}")
    return vals


@dataclass(frozen=True)
class NormalInit:
    """Truncated 1D normal: rejection-sample Normal(mean, sigma) into [0, 1]."""

    mean: float = 0.5
    sigma: float = 0.2


@dataclass(frozen=True)
class MultivariateNormalInit:
    """Independent per-dimension normals, rejection-sampled into [0, 1]^D."""

    means: tuple[float, ...] = (0.5, 0.5)
    variance: float = 0.04


@dataclass(frozen=True)
class EmpiricalInit:
    """Sample from a histogram file (bin choice by weight, uniform in-bin)."""

    histogram: str = ""


@dataclass(frozen=True)
class ExplicitInit:
    """Use the given positions verbatim (one row per actor)."""

    positions: tuple[tuple[float, ...], ...] = ()


Initializer = Union[NormalInit, MultivariateNormalInit, EmpiricalInit, ExplicitInit]


@dataclass(frozen=True)
class Shock:
    """One-time shift of every actor by `strength`, ceiling-clamped at 1.

    The shift is spread over N consecutive steps, one actor per step, starting
    once `at_step` steps have completed. A snapshot taken at step `at_step`
    therefore shows the pre-shock state.
    """

    strength: tuple[float, ...]
    at_step: int


@dataclass(frozen=True)
class SimConfig:
    """Full parameterization of one simulation run.

    Defaults are the model's standard table: N=100 actors, one dimension,
    Normal(0.5, 0.2) initial positions, exposure 0.1, tolerance 0.25,
    responsiveness 0.25.
    """

    n_actors: int = 100
    n_dims: int = 1
    tolerance: float = 0.25
    responsiveness: float = 0.25
    exposure: tuple[float, ...] = (0.1,)
    rule: str = "ar"  # "ar" | "sar"
    sar_steepness: float = math.inf
    initializer: Initializer = NormalInit()
    self_interest_prob: float = 0.0
    shock: Shock | None = None
    max_steps: int = 1_000_000
    record_every: int = 1000
    snapshot_steps: tuple[int, ...] = ()
    seed: int = 0

    def validate(self) -> "SimConfig":
        """Raise ConfigError naming the offending field; return self when valid."""
        if self.n_actors < 1:
            raise ConfigError("n_actors: must be a positive integer")
        if self.n_dims < 1:
            raise ConfigError("n_dims: must be a positive integer")
        max_tol = math.sqrt(self.n_dims)
        if not 0.0 <= self.tolerance <= max_tol:
            raise ConfigError(
                f"tolerance: must be in [0, sqrt(D)] = [0, {max_tol:.6g}]"
            )
        if not 0.0 < self.responsiveness <= 1.0:
            raise ConfigError("responsiveness: must be in (0, 1]")
        if len(self.exposure) != self.n_dims:
            raise ConfigError(
                f"exposure: expected {self.n_dims} values, got {len(self.exposure)}"
            )
        if any(e <= 0.0 for e in self.exposure):
            raise ConfigError("exposure: every value must be positive")
        if self.rule not in ("ar", "sar"):
            raise ConfigError("rule: must be 'ar' or 'sar'")
        if self.rule == "sar" and not self.sar_steepness > 1.0:
            raise ConfigError("sar_steepness: must be > 1 (inf allowed)")
        if not 0.0 <= self.self_interest_prob <= 1.0:
            raise ConfigError("self_interest_prob: must be in [0, 1]")
        if self.max_steps < 0:
            raise ConfigError("max_steps: must be >= 0")
        if self.record_every < 1:
            raise ConfigError("record_every: must be >= 1")
        for s in self.snapshot_steps:
            if not 0 <= s <= self.max_steps:
                raise ConfigError(f"snapshot_steps: step {s} outside [0, max_steps]")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed: must be a 64-bit unsigned integer")
        if self.shock is not None:
            if len(self.shock.strength) != self.n_dims:
                raise ConfigError("shock.strength: length must equal n_dims")
            if any(not 0.0 <= d <= 1.0 for d in self.shock.strength):
                raise ConfigError("shock.strength: values must be in [0, 1]")
            if self.shock.at_step < 1:
                raise ConfigError("shock.at_step: must be a positive integer")
            if self.shock.at_step > self.max_steps - self.n_actors:
                raise ConfigError(
                    "shock.at_step: shock would be truncated "
                    "(need at_step <= max_steps - n_actors)"
                )
        self._validate_initializer()
        return self

    def _validate_initializer(self) -> None:
        init = self.initializer
        if isinstance(init, NormalInit):
            if self.n_dims != 1:
                raise ConfigError("initializer: normal initializer requires n_dims=1")
            if not 0.0 <= init.mean <= 1.0:
                raise ConfigError("initializer.mean: must be in [0, 1]")
            if init.sigma <= 0.0:
                raise ConfigError("initializer.sigma: must be positive")
        elif isinstance(init, MultivariateNormalInit):
            if len(init.means) != self.n_dims:
                raise ConfigError("initializer.means: length must equal n_dims")
            if any(not 0.0 <= m <= 1.0 for m in init.means):
                raise ConfigError("initializer.means: values must be in [0, 1]")
            if init.variance <= 0.0:
                raise ConfigError("initializer.variance: must be positive")
        elif isinstance(init, EmpiricalInit):
            if self.n_dims != 1:
                raise ConfigError("initializer: empirical initializer requires n_dims=1")
            if not init.histogram:
                raise ConfigError("initializer.histogram: path required")
        elif isinstance(init, ExplicitInit):
            if len(init.positions) != self.n_actors:
                raise ConfigError(
                    "initializer.positions: need one position per actor"
                )
            for pos in init.positions:
                if len(pos) != self.n_dims:
                    raise ConfigError("initializer.positions: dimension mismatch")
                if any(not 0.0 <= x <= 1.0 for x in pos):
                    raise ConfigError("initializer.positions: values must be in [0, 1]")
        else:  # pragma: no cover
            raise ConfigError("initializer: unknown kind")

    def replace(self, **changes: Any) -> "SimConfig":
        """Copy with fields changed (exposure scalars broadcast), validated."""
        if "exposure" in changes:
            n = changes.get("n_dims", self.n_dims)
            changes["exposure"] = _as_float_tuple(changes["exposure"], n, "exposure")
        if "snapshot_steps" in changes:
            changes["snapshot_steps"] = tuple(int(s) for s in changes["snapshot_steps"])
        return dataclasses.replace(self, **changes).validate()

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        """JSON-ready echo of every field (inf encoded as the string 'inf')."""
        d: dict[str, Any] = {
            "n_actors": self.n_actors,
            "n_dims": self.n_dims,
            "tolerance": self.tolerance,
            "responsiveness": self.responsiveness,
            "exposure": list(self.exposure),
            "rule": self.rule,
            "sar_steepness": "inf" if math.isinf(self.sar_steepness) else self.sar_steepness,
            "self_interest_prob": self.self_interest_prob,
            "max_steps": self.max_steps,
            "record_every": self.record_every,
            "snapshot_steps": list(self.snapshot_steps),
            "seed": self.seed,
            "initializer": _initializer_to_dict(self.initializer),
        }
        if self.shock is not None:
            d["shock"] = {
                "strength": list(self.shock.strength),
                "at_step": self.shock.at_step,
            }
        return d

    @classmethod
    def from_dict(cls, raw: dict) -> "SimConfig":
        """Build and validate a config from parsed TOML/JSON data."""
        if not isinstance(raw, dict):
            raise ConfigError("config: expected a table/object at top level")
        known = {
            "n_actors", "n_dims", "tolerance", "responsiveness", "exposure",
            "rule", "sar_steepness", "self_interest_prob", "max_steps",
            "record_every", "snapshot_steps", "seed", "initializer", "shock",
        }
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")

        kw: dict[str, Any] = {}
        try:
            for key in ("n_actors", "n_dims", "max_steps", "record_every", "seed"):
                if key in raw:
                    kw[key] = int(raw[key])
            for key in ("tolerance", "responsiveness", "self_interest_prob"):
                if key in raw:
                    kw[key] = float(raw[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config: bad numeric value ({exc})") from None

        n_dims = kw.get("n_dims", 1)
        if "exposure" in raw:
            kw["exposure"] = _as_float_tuple(raw["exposure"], n_dims, "exposure")
        else:
            kw["exposure"] = (0.1,) * n_dims
        if "rule" in raw:
            kw["rule"] = str(raw["rule"]).lower()
        if "sar_steepness" in raw:
            kw["sar_steepness"] = _parse_float_or_inf(raw["sar_steepness"], "sar_steepness")
        if "snapshot_steps" in raw:
            kw["snapshot_steps"] = tuple(int(s) for s in raw["snapshot_steps"])
        if "initializer" in raw:
            kw["initializer"] = _initializer_from_dict(raw["initializer"], n_dims)
        elif n_dims > 1:
            kw["initializer"] = MultivariateNormalInit(means=(0.5,) * n_dims)
        if "shock" in raw and raw["shock"] is not None:
            block = raw["shock"]
            if not isinstance(block, dict) or "at_step" not in block or "strength" not in block:
                raise ConfigError("shock: needs 'strength' and 'at_step'")
            kw["shock"] = Shock(
                strength=_as_float_tuple(block["strength"], n_dims, "shock.strength"),
                at_step=int(block["at_step"]),
            )
        return cls(**kw).validate()


def _parse_float_or_inf(value, what: str) -> float:
    if isinstance(value, str):
        if value.lower() in ("inf", "infinity"):
            return math.inf
        raise ConfigError(f"{what}: bad value {value!r}")
    return float(value)


def _initializer_to_dict(init: Initializer) -> dict:
    if isinstance(init, NormalInit):
        return {"kind": "normal", "mean": init.mean, "sigma": init.sigma}
    if isinstance(init, MultivariateNormalInit):
        return {
            "kind": "multivariate_normal",
            "means": list(init.means),
            "variance": init.variance,
        }
    if isinstance(init, EmpiricalInit):
        return {"kind": "empirical", "histogram": init.histogram}
    return {"kind": "explicit", "positions": [list(p) for p in init.positions]}


def _initializer_from_dict(raw: dict, n_dims: int) -> Initializer:
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError("initializer: needs a 'kind' key")
    kind = str(raw["kind"]).lower()
    if kind == "normal":
        return NormalInit(
            mean=float(raw.get("mean", 0.5)), sigma=float(raw.get("sigma", 0.2))
        )
    if kind == "multivariate_normal":
        means = raw.get("means", (0.5,) * n_dims)
        return MultivariateNormalInit(
            means=tuple(float(m) for m in means),
            variance=float(raw.get("variance", 0.04)),
        )
    if kind == "empirical":
        return EmpiricalInit(histogram=str(raw.get("histogram", "")))
    if kind == "explicit":
        positions = raw.get("positions", ())
        return ExplicitInit(
            positions=tuple(tuple(float(x) for x in p) for p in positions)
        )
    raise ConfigError(f"initializer.kind: unknown kind {kind!r}")


def load_config(path: str | Path) -> SimConfig:
    """Read a run config from a .toml or .json file."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"config file unreadable: {exc}") from None
    if path.suffix.lower() == ".json":
        try:
            raw = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})") from None
    else:
        try:
            raw = tomllib.loads(data.decode("utf-8"))
        except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"config: invalid TOML ({exc})") from None
    return SimConfig.from_dict(raw)
