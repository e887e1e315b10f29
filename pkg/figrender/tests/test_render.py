"""Golden tests: every plot kind renders producer CSVs; schemas are enforced.

polarsim (the data producer) is used here as a test fixture generator and as
the oracle for the Tukey whisker criterion; the renderer itself only ever
touches the CSV files.
"""

import numpy as np
import pytest

from figrender.cli import main
from figrender.io import SchemaError, read_columns
from figrender.plots import Style, render, tukey_box_stats

from polarsim.config import SimConfig
from polarsim.metrics import aggregate_sweep_cell, fit_logistic, logistic
from polarsim.simulate import run_simulation
from polarsim.sweep import (
    SweepSpec,
    run_sweep,
    write_aggregate_csv,
    write_snapshot_csv,
    write_sweep_csv,
    write_timeseries_csv,
)


@pytest.fixture(scope="session")
def data(tmp_path_factory):
    """Small but schema-exact producer outputs for every renderer input."""
    root = tmp_path_factory.mktemp("csvs")
    out = {}

    ts_paths = []
    for i, tol in enumerate((0.2, 0.6)):
        cfg = SimConfig(tolerance=tol, max_steps=2000, record_every=100,
                        snapshot_steps=(0, 2000), seed=3)
        res = run_simulation(cfg)
        ts_paths.append(str(write_timeseries_csv(res.trajectory, root / f"ts{i}.csv")))
        if i == 0:
            out["snapshot1d"] = str(write_snapshot_csv(res.trajectory, root / "snap1.csv"))
    out["timeseries"] = ts_paths

    cfg2d = SimConfig.from_dict(
        {"n_dims": 2, "max_steps": 1500, "snapshot_steps": [1500], "seed": 5}
    )
    res2d = run_simulation(cfg2d)
    out["snapshot2d"] = str(write_snapshot_csv(res2d.trajectory, root / "snap2.csv"))

    two_axis = run_sweep(SweepSpec(
        base=SimConfig(max_steps=1000),
        axes=(("tolerance", (0.1, 0.5, 0.9)), ("responsiveness", (0.25, 0.75))),
        iterations=2, master_seed=1,
    ))
    out["aggregate2"] = str(write_aggregate_csv(two_axis, root / "agg2.csv"))

    one_axis = run_sweep(SweepSpec(
        base=SimConfig(max_steps=2000),
        axes=(("tolerance", (0.1, 0.3, 0.5, 0.7, 0.9)),),
        iterations=8, master_seed=2,
    ))
    out["sweep1"] = str(write_sweep_csv(one_axis, root / "sweep1.csv"))
    out["one_axis_result"] = one_axis

    xs, means = one_axis.axis_means()
    fit = fit_logistic(xs, means)
    fit_path = root / "fit.csv"
    fit_path.write_text(
        "a,k,x0,rmse,converged\n"
        f"{fit.a!r},{fit.k!r},{fit.x0!r},{fit.rmse!r},{str(fit.converged).lower()}\n"
    )
    out["fit"] = str(fit_path)

    header_only = root / "empty.csv"
    header_only.write_text("step,polarization\n")
    out["header_only"] = str(header_only)
    return out


JOBS = [
    ("timeseries", "timeseries"),
    ("heatmap", "aggregate2"),
    ("histogram", "snapshot1d"),
    ("histogram2d", "snapshot2d"),
    ("boxplot", "sweep1"),
]


class TestEveryKindRenders:
    @pytest.mark.parametrize("kind,key", JOBS)
    def test_kind_renders_nonempty_image(self, kind, key, data, tmp_path):
        inputs = data[key] if isinstance(data[key], list) else [data[key]]
        path = render(kind, inputs, tmp_path / f"{kind}.png", Style())
        assert path.stat().st_size > 1000

    def test_fitcurve_renders(self, data, tmp_path):
        path = render("fitcurve", [data["sweep1"], data["fit"]],
                      tmp_path / "fit.png", Style())
        assert path.stat().st_size > 1000

    def test_rendering_is_deterministic(self, data, tmp_path):
        a = render("timeseries", data["timeseries"], tmp_path / "a.png", Style())
        b = render("timeseries", data["timeseries"], tmp_path / "b.png", Style())
        assert a.read_bytes() == b.read_bytes()

    def test_inputs_never_mutated(self, data, tmp_path):
        before = open(data["sweep1"], "rb").read()
        render("boxplot", [data["sweep1"]], tmp_path / "bp.png", Style())
        assert open(data["sweep1"], "rb").read() == before


class TestSchemaEnforcement:
    def test_header_only_rejected(self, data, tmp_path):
        with pytest.raises(SchemaError, match="header only"):
            render("timeseries", [data["header_only"]], tmp_path / "x.png", Style())

    def test_missing_column_named(self, data, tmp_path):
        with pytest.raises(SchemaError, match="polarization"):
            render("timeseries", [data["sweep1"]], tmp_path / "x.png", Style())

    def test_heatmap_rejects_single_axis_sweep_aggregate(self, data, tmp_path):
        from polarsim.sweep import write_aggregate_csv

        path = tmp_path / "agg1.csv"
        write_aggregate_csv(data["one_axis_result"], path)
        with pytest.raises(SchemaError, match="axis2"):
            render("heatmap", [str(path)], tmp_path / "x.png", Style())

    def test_histogram2d_requires_second_dimension(self, data, tmp_path):
        with pytest.raises(SchemaError, match="dim1"):
            render("histogram2d", [data["snapshot1d"]], tmp_path / "x.png", Style())

    def test_non_numeric_cell_named(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("step,polarization\n0,abc\n")
        with pytest.raises(SchemaError, match="polarization"):
            read_columns(bad, ("step", "polarization"))

    def test_unknown_kind_rejected(self, data, tmp_path):
        with pytest.raises(SchemaError, match="unknown plot kind"):
            render("violin", [data["sweep1"]], tmp_path / "x.png", Style())


class TestTukeyWhiskers:
    def test_whiskers_match_producer_aggregates(self, data):
        result = data["one_axis_result"]
        for row in result.finals:
            stats = tukey_box_stats(row)
            oracle = aggregate_sweep_cell(row)
            assert stats["whislo"] == pytest.approx(oracle.whisker_lo, abs=1e-9)
            assert stats["whishi"] == pytest.approx(oracle.whisker_hi, abs=1e-9)
            assert stats["q1"] == pytest.approx(oracle.q1, abs=1e-9)
            assert stats["med"] == pytest.approx(oracle.median, abs=1e-9)
            assert stats["q3"] == pytest.approx(oracle.q3, abs=1e-9)

    def test_whiskers_stop_at_extreme_data_within_fences(self):
        values = np.array([0.10, 0.11, 0.12, 0.13, 0.14, 0.9])
        stats = tukey_box_stats(values)
        assert stats["whishi"] < 0.9  # the outlier is beyond the upper fence


class TestCli:
    def test_cli_renders(self, data, tmp_path, capsys):
        out = tmp_path / "o.png"
        code = main(["timeseries", *data["timeseries"], str(out),
                     "--labels", "low,high", "--title", "demo"])
        assert code == 0 and out.exists()

    def test_cli_schema_error_exit_2(self, data, tmp_path, capsys):
        code = main(["timeseries", data["header_only"], str(tmp_path / "o.png")])
        assert code == 2
        assert "header only" in capsys.readouterr().err

    def test_cli_needs_input_and_output(self, data, capsys):
        assert main(["timeseries", data["header_only"]]) == 2

    def test_cli_io_error_exit_3(self, data, tmp_path):
        target = tmp_path / "missing_dir" / "o.png"
        code = main(["timeseries", *data["timeseries"], str(target)])
        assert code == 3

    def test_fitcurve_cli(self, data, tmp_path):
        out = tmp_path / "fit.png"
        assert main(["fitcurve", data["sweep1"], data["fit"], str(out)]) == 0
        assert out.stat().st_size > 1000
