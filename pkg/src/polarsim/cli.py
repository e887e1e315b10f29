"""Command-line entry point.

Subcommands: run (one simulation), sweep (a parameter grid), preset (regenerate
a published figure's data), fit (logistic transition fit of a single-axis
sweep CSV). Exit codes: 0 success, 2 configuration error, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .config import ConfigError, SimConfig, load_config
from .metrics import fit_logistic
from .presets import PRESET_IDS, Preset, build_preset
from .simulate import run_simulation
from .sweep import (
    SweepSpec,
    run_sweep,
    write_aggregate_csv,
    write_snapshot_csv,
    write_sweep_csv,
    write_timeseries_csv,
)

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

FIT_HEADER = "a,k,x0,rmse,converged"


def _resolve_workers(args) -> int | None:
    if getattr(args, "workers", None):
        return args.workers
    env = os.environ.get("POLARSIM_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError("POLARSIM_WORKERS: must be an integer") from None
    return None  # executor default: available parallelism


def _apply_overrides(cfg: SimConfig, args) -> SimConfig:
    """Flag > file > defaults."""
    changes = {}
    for field in (
        "seed", "max_steps", "record_every", "n_actors",
        "tolerance", "responsiveness", "exposure", "self_interest_prob",
    ):
        value = getattr(args, field, None)
        if value is not None:
            changes[field] = value
    return cfg.replace(**changes) if changes else cfg


def _write_manifest(out_dir: Path, payload: dict, artifacts: list[Path], t0: float) -> Path:
    for path in artifacts:
        if not path.exists() or path.stat().st_size == 0:
            raise OSError(f"artifact missing or empty: {path}")
    payload = dict(payload)
    payload["tool"] = "polarsim"
    payload["version"] = __version__
    payload["artifacts"] = [str(p.relative_to(out_dir)) for p in artifacts]
    payload["duration_seconds"] = round(time.perf_counter() - t0, 3)
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path


def _run_one(cfg: SimConfig, out_dir: Path, stem: str) -> list[Path]:
    result = run_simulation(cfg)
    artifacts = [write_timeseries_csv(result.trajectory, out_dir / f"{stem}_timeseries.csv")]
    if result.trajectory.snapshots:
        artifacts.append(
            write_snapshot_csv(result.trajectory, out_dir / f"{stem}_snapshots.csv")
        )
    return artifacts


def cmd_run(args) -> int:
    t0 = time.perf_counter()
    cfg = _apply_overrides(load_config(args.config), args)
    out_dir = _ensure_dir(args.output)
    artifacts = _run_one(cfg, out_dir, "run")
    _write_manifest(out_dir, {"command": "run", "config": cfg.to_dict()}, artifacts, t0)
    print(f"run complete: {len(artifacts)} artifact(s) in {out_dir}")
    return EXIT_OK


def load_sweep_config(path: str | Path) -> SweepSpec:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"sweep config unreadable: {exc}") from None
    if path.suffix.lower() == ".json":
        try:
            raw = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"sweep config: invalid JSON ({exc})") from None
    else:
        try:
            raw = tomllib.loads(data.decode("utf-8"))
        except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"sweep config: invalid TOML ({exc})") from None
    return SweepSpec.from_dict(raw)


def cmd_sweep(args) -> int:
    t0 = time.perf_counter()
    spec = load_sweep_config(args.config)
    out_dir = _ensure_dir(args.output)
    result = run_sweep(spec, workers=_resolve_workers(args))
    artifacts = [
        write_sweep_csv(result, out_dir / "sweep.csv"),
        write_aggregate_csv(result, out_dir / "aggregate.csv"),
    ]
    _write_manifest(out_dir, {"command": "sweep", "sweep": spec.to_dict()}, artifacts, t0)
    print(f"sweep complete: {len(result.cells)} cells x {spec.iterations} iterations")
    return EXIT_OK


def _write_fit_csv(fit, path: Path) -> Path:
    row = f"{fit.a!r},{fit.k!r},{fit.x0!r},{fit.rmse!r},{str(fit.converged).lower()}"
    path.write_text(FIT_HEADER + "\n" + row + "\n")
    return path


def _execute_preset(preset: Preset, out_dir: Path, workers) -> list[Path]:
    artifacts: list[Path] = []
    for job in preset.curves:
        artifacts.extend(_run_one(job.cfg, out_dir, job.name))
    for job in preset.sweeps:
        result = run_sweep(job.spec, workers=workers)
        artifacts.append(write_sweep_csv(result, out_dir / f"{job.name}_sweep.csv"))
        artifacts.append(write_aggregate_csv(result, out_dir / f"{job.name}_aggregate.csv"))
        if job.fit:
            xs, means = result.axis_means()
            fit = fit_logistic(xs, means)
            artifacts.append(_write_fit_csv(fit, out_dir / f"{job.name}_fit.csv"))
    return artifacts


def cmd_preset(args) -> int:
    t0 = time.perf_counter()
    presets = []
    for figure_id in args.figure_ids:
        try:
            presets.append(
                build_preset(figure_id, seed=args.seed,
                             max_steps=args.max_steps, iterations=args.iterations)
            )
        except KeyError:
            raise ConfigError(
                f"unknown figure id {figure_id!r}; valid ids: {', '.join(PRESET_IDS)}"
            ) from None
    out_dir = _ensure_dir(args.output)
    workers = _resolve_workers(args)
    artifacts: list[Path] = []
    echo = {}
    for preset in presets:
        print(f"[{preset.figure_id}] {preset.description}")
        produced = _execute_preset(preset, out_dir, workers)
        artifacts.extend(produced)
        echo[preset.figure_id] = {
            "description": preset.description,
            "artifacts": [str(p.relative_to(out_dir)) for p in produced],
        }
    _write_manifest(out_dir, {"command": "preset", "presets": echo}, artifacts, t0)
    print(f"preset data written to {out_dir}")
    return EXIT_OK


def read_single_axis_sweep(path: str | Path) -> tuple[list[float], list[float]]:
    """Mean final polarization per axis value from a raw sweep CSV."""
    by_value: dict[float, list[float]] = {}
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            fields = reader.fieldnames or []
            required = {"axis1", "axis2", "final_polarization"}
            if not required <= set(fields):
                missing = sorted(required - set(fields))
                raise ConfigError(f"sweep CSV: missing column(s) {', '.join(missing)}")
            for row in reader:
                if row["axis2"]:
                    raise ConfigError("fit expects a single-axis sweep CSV (axis2 is populated)")
                by_value.setdefault(float(row["axis1"]), []).append(
                    float(row["final_polarization"])
                )
    except OSError as exc:
        raise ConfigError(f"sweep CSV unreadable: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"sweep CSV: bad value ({exc})") from None
    if not by_value:
        raise ConfigError("sweep CSV: no data rows")
    xs = sorted(by_value)
    means = [sum(by_value[x]) / len(by_value[x]) for x in xs]
    return xs, means


def cmd_fit(args) -> int:
    xs, means = read_single_axis_sweep(args.sweep_csv)
    fit = fit_logistic(xs, means)
    print(
        f"a={fit.a:.6g} k={fit.k:.6g} x0={fit.x0:.6g} "
        f"rmse={fit.rmse:.3e} converged={fit.converged}"
    )
    if not fit.converged:
        print("warning: fit did not converge; values are not trustworthy", file=sys.stderr)
    if args.output:
        out_dir = _ensure_dir(args.output)
        _write_fit_csv(fit, out_dir / "fit.csv")
    return EXIT_OK


def _ensure_dir(path: str | Path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarsim",
        description="Attraction-repulsion opinion dynamics simulator",
    )
    parser.add_argument("--version", action="version", version=f"polarsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one simulation from a config file")
    run.add_argument("config", help="run config (.toml or .json)")
    run.add_argument("-o", "--output", default="out", help="output directory")
    run.add_argument("--seed", type=int)
    run.add_argument("--max-steps", dest="max_steps", type=int)
    run.add_argument("--record-every", dest="record_every", type=int)
    run.add_argument("--n-actors", dest="n_actors", type=int)
    run.add_argument("--tolerance", type=float)
    run.add_argument("--responsiveness", type=float)
    run.add_argument("--exposure", type=float)
    run.add_argument("--self-interest-prob", dest="self_interest_prob", type=float)
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="run a parameter-grid sweep")
    sweep.add_argument("config", help="sweep config (.toml or .json)")
    sweep.add_argument("-o", "--output", default="out", help="output directory")
    sweep.add_argument("--workers", type=int, help="thread count (default: all cores)")
    sweep.set_defaults(func=cmd_sweep)

    preset = sub.add_parser("preset", help="regenerate a figure's underlying data")
    preset.add_argument("figure_ids", nargs="+", metavar="figure_id",
                        help=f"one or more of: {', '.join(PRESET_IDS)}")
    preset.add_argument("-o", "--output", default="out", help="output directory")
    preset.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    preset.add_argument("--workers", type=int)
    preset.add_argument("--max-steps", dest="max_steps", type=int,
                        help="override every job's horizon (smoke runs)")
    preset.add_argument("--iterations", type=int,
                        help="override sweep iteration counts (smoke runs)")
    preset.set_defaults(func=cmd_preset)

    fit = sub.add_parser("fit", help="logistic fit of a single-axis sweep CSV")
    fit.add_argument("sweep_csv", help="raw sweep CSV emitted by sweep/preset")
    fit.add_argument("-o", "--output", default=None, help="also write fit.csv here")
    fit.set_defaults(func=cmd_fit)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
