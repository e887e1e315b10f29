import time

import numpy as np
import pytest

from polarsim.config import ConfigError, Shock, SimConfig
from polarsim.simulate import run_simulation
from polarsim.sweep import (
    SweepSpec,
    apply_axis,
    derive_seed_list,
    run_sweep,
    write_aggregate_csv,
    write_snapshot_csv,
    write_sweep_csv,
    write_timeseries_csv,
)


class TestSeedList:
    def test_deterministic(self):
        assert derive_seed_list(42, 20) == derive_seed_list(42, 20)

    def test_master_seeds_differ(self):
        assert derive_seed_list(1, 10) != derive_seed_list(2, 10)

    def test_no_collisions_at_20(self):
        seeds = derive_seed_list(42, 20)
        assert len(set(seeds)) == 20

    def test_prefix_stability(self):
        # seed j is the same regardless of how many iterations are requested
        assert derive_seed_list(7, 20)[:5] == derive_seed_list(7, 5)


class TestApplyAxis:
    def test_scalar_fields(self):
        cfg = SimConfig()
        assert apply_axis(cfg, "tolerance", 0.4).tolerance == 0.4
        assert apply_axis(cfg, "responsiveness", 0.9).responsiveness == 0.9
        assert apply_axis(cfg, "self_interest_prob", 0.1).self_interest_prob == 0.1

    def test_exposure_broadcasts(self):
        cfg = SimConfig.from_dict({"n_dims": 2, "exposure": 0.1})
        assert apply_axis(cfg, "exposure", 0.3).exposure == (0.3, 0.3)
        assert apply_axis(cfg, "exposure_1", 0.5).exposure == (0.1, 0.5)

    def test_shock_axes(self):
        cfg = SimConfig(shock=Shock(strength=(0.0,), at_step=100_000))
        assert apply_axis(cfg, "shock_strength", 0.4).shock.strength == (0.4,)
        assert apply_axis(cfg, "shock_at_step", 200_000).shock.at_step == 200_000

    def test_shock_axis_without_shock_block(self):
        with pytest.raises(ConfigError, match="shock"):
            apply_axis(SimConfig(), "shock_strength", 0.4)

    def test_sar_axis_requires_sar_rule(self):
        with pytest.raises(ConfigError, match="rule"):
            apply_axis(SimConfig(), "sar_steepness", 4.0)

    def test_unknown_parameter_lists_valid_names(self):
        with pytest.raises(ConfigError, match="tolerance"):
            apply_axis(SimConfig(), "tollerance", 0.4)


def tiny_spec(**kw) -> SweepSpec:
    defaults = dict(
        base=SimConfig(max_steps=5_000),
        axes=(("tolerance", (0.1, 0.6)),),
        iterations=3,
        master_seed=5,
    )
    defaults.update(kw)
    return SweepSpec(**defaults)


class TestRunSweep:
    def test_zero_steps_returns_initial_variance(self):
        spec = tiny_spec(base=SimConfig(max_steps=0), iterations=1,
                         axes=(("tolerance", (0.05,)),))
        result = run_sweep(spec)
        cfg = spec.cell_config((0.05,), result.seed_list[0])
        expected = run_simulation(cfg).final_polarization
        assert result.finals[0, 0] == expected

    def test_shape_and_cell_order(self):
        spec = tiny_spec(axes=(("tolerance", (0.1, 0.6)), ("responsiveness", (0.25, 0.5))))
        result = run_sweep(spec)
        assert result.cells == [(0.1, 0.25), (0.1, 0.5), (0.6, 0.25), (0.6, 0.5)]
        assert result.finals.shape == (4, 3)

    def test_same_iteration_same_seed_across_cells(self):
        spec = tiny_spec()
        result = run_sweep(spec)
        assert result.seed_list == derive_seed_list(5, 3)
        # directly rerun one iteration of each cell with the shared seed
        for c, cell in enumerate(result.cells):
            cfg = spec.cell_config(cell, result.seed_list[1])
            assert run_simulation(cfg).final_polarization == result.finals[c, 1]

    def test_worker_count_does_not_change_output_bytes(self, tmp_path):
        spec = tiny_spec(iterations=4)
        paths = []
        for w, workers in enumerate((1, 8)):
            result = run_sweep(spec, workers=workers)
            paths.append(write_sweep_csv(result, tmp_path / f"sweep{w}.csv"))
            write_aggregate_csv(result, tmp_path / f"agg{w}.csv")
        assert paths[0].read_bytes() == paths[1].read_bytes()
        assert (tmp_path / "agg0.csv").read_bytes() == (tmp_path / "agg1.csv").read_bytes()

    def test_repeat_sweep_bitwise_identical(self):
        spec = tiny_spec()
        a = run_sweep(spec)
        b = run_sweep(spec)
        assert np.array_equal(a.finals, b.finals)
        assert a.seed_list == b.seed_list

    def test_bad_cell_identified(self):
        spec = tiny_spec(axes=(("tolerance", (0.1, 3.0)),))
        with pytest.raises(ConfigError, match=r"cell \(3.0,\)"):
            run_sweep(spec)

    def test_tolerance_phase_ends(self):
        # low tolerance polarizes, high tolerance converges
        spec = SweepSpec(
            base=SimConfig(max_steps=1_000_000),
            axes=(("tolerance", (0.05, 0.95)),),
            iterations=20,
            master_seed=11,
        )
        result = run_sweep(spec)
        means = result.finals.mean(axis=1)
        assert means[0] > 0.2
        assert means[1] < 0.01

    def test_wall_clock_roughly_linear_in_steps(self):
        def timed(steps):
            cfg = SimConfig(max_steps=steps, record_every=steps, seed=2)
            run_simulation(cfg)  # warm
            t0 = time.perf_counter()
            run_simulation(cfg)
            return time.perf_counter() - t0

        short = timed(1_000_000)
        long = timed(4_000_000)
        assert 2.0 <= long / short <= 8.0  # 4x steps within a factor of 2 of 4x time


class TestCsvWriters:
    def test_sweep_csv_schema(self, tmp_path):
        result = run_sweep(tiny_spec(iterations=2))
        lines = write_sweep_csv(result, tmp_path / "s.csv").read_text().splitlines()
        assert lines[0] == "axis1,axis2,iteration,seed,final_polarization"
        first = lines[1].split(",")
        assert first[0] == "0.1" and first[1] == "" and first[2] == "0"
        assert int(first[3]) == result.seed_list[0]

    def test_two_axis_sweep_csv_fills_axis2(self, tmp_path):
        spec = tiny_spec(axes=(("tolerance", (0.1,)), ("responsiveness", (0.5,))),
                         iterations=1)
        lines = write_sweep_csv(run_sweep(spec), tmp_path / "s.csv").read_text().splitlines()
        assert lines[1].split(",")[:2] == ["0.1", "0.5"]

    def test_aggregate_csv_schema(self, tmp_path):
        result = run_sweep(tiny_spec(iterations=2))
        lines = write_aggregate_csv(result, tmp_path / "a.csv").read_text().splitlines()
        assert lines[0] == "axis1,axis2,mean,sd,q1,median,q3"
        assert len(lines) == 1 + len(result.cells)

    def test_timeseries_csv(self, tmp_path):
        res = run_simulation(SimConfig(max_steps=2000, record_every=1000, seed=1))
        lines = write_timeseries_csv(res.trajectory, tmp_path / "t.csv").read_text().splitlines()
        assert lines[0] == "step,polarization"
        assert [row.split(",")[0] for row in lines[1:]] == ["0", "1000", "2000"]

    def test_snapshot_csv_headers_by_dimension(self, tmp_path):
        res1 = run_simulation(SimConfig(max_steps=100, snapshot_steps=(0, 100), seed=1))
        path1 = write_snapshot_csv(res1.trajectory, tmp_path / "s1.csv")
        assert path1.read_text().splitlines()[0] == "step,actor,dim0"

        cfg2 = SimConfig.from_dict(
            {"n_dims": 2, "max_steps": 100, "snapshot_steps": [100], "seed": 1}
        )
        res2 = run_simulation(cfg2)
        path2 = write_snapshot_csv(res2.trajectory, tmp_path / "s2.csv")
        lines = path2.read_text().splitlines()
        assert lines[0] == "step,actor,dim0,dim1"
        assert len(lines) == 1 + 100

    def test_snapshotless_trajectory_rejected(self, tmp_path):
        res = run_simulation(SimConfig(max_steps=10, seed=1))
        with pytest.raises(ValueError, match="snapshots"):
            write_snapshot_csv(res.trajectory, tmp_path / "s.csv")
