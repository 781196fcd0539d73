import subprocess
import sys

import numpy as np
import pytest

from cvqkd_figures import FigureSpec, SchemaError, render
from cvqkd_figures.cli import main


def run_producer(args):
    proc = subprocess.run(
        [sys.executable, "-m", "mimo_cvqkd.cli", *args], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr


@pytest.fixture(scope="module")
def sweep_csv(tmp_path_factory):
    path = str(tmp_path_factory.mktemp("data") / "sweep.csv")
    run_producer(
        ["sweep-loss", "--loss-start", "0", "--loss-stop", "12", "--loss-step", "3",
         "--opt-grid", "8", "--out", path]
    )
    return path


@pytest.fixture(scope="module")
def region_csv(tmp_path_factory):
    path = str(tmp_path_factory.mktemp("data") / "region.csv")
    run_producer(
        ["xi-region", "--T", "0.1", "--grid", "9", "--opt-grid", "4", "--out", path]
    )
    return path


class TestLossCurves:
    def test_renders_five_series(self, sweep_csv, tmp_path):
        out = str(tmp_path / "sweep.png")
        fig = render(FigureSpec(sweep_csv, "loss_curves", out, log_scale_y=True))
        ax = fig.axes[0]
        assert len(ax.get_lines()) == 5
        assert ax.get_yscale() == "log"
        assert (tmp_path / "sweep.png").exists()

    def test_linear_scale_default(self, sweep_csv, tmp_path):
        out = str(tmp_path / "sweep_lin.png")
        fig = render(FigureSpec(sweep_csv, "loss_curves", out))
        assert fig.axes[0].get_yscale() == "linear"


class TestRegionSurface:
    def test_renders_with_blank_inadmissible_cells(self, region_csv, tmp_path):
        out = str(tmp_path / "region.png")
        fig = render(FigureSpec(region_csv, "region_surface", out))
        mesh = fig.axes[0].collections[0]
        values = mesh.get_array()
        assert np.ma.is_masked(values) and values.mask.any()
        assert values.count() > 0
        assert (tmp_path / "region.png").exists()


class TestErrors:
    def test_schema_mismatch_names_columns(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("foo,bar\n1,2\n")
        out = str(tmp_path / "bad.png")
        with pytest.raises(SchemaError, match="loss_db"):
            render(FigureSpec(str(bad), "loss_curves", out))
        assert not (tmp_path / "bad.png").exists()

    def test_wrong_kind_for_csv(self, sweep_csv, tmp_path):
        with pytest.raises(SchemaError, match="xi_re"):
            render(FigureSpec(sweep_csv, "region_surface", str(tmp_path / "x.png")))

    def test_empty_csv(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("loss_db,T,skr_a,skr_b,skr_c,skr_d,skr_e,v_a1_opt,v_a2_opt\n")
        out = tmp_path / "empty.png"
        with pytest.raises(SchemaError, match="no data rows"):
            render(FigureSpec(str(empty), "loss_curves", str(out)))
        assert not out.exists()

    def test_unknown_kind(self, tmp_path):
        with pytest.raises(ValueError):
            FigureSpec("x.csv", "pie_chart", "x.png")


class TestCli:
    def test_exit_codes(self, sweep_csv, tmp_path):
        out = str(tmp_path / "cli.png")
        assert main(["loss_curves", "--in", sweep_csv, "--out", out, "--logy"]) == 0
        bad = tmp_path / "bad.csv"
        bad.write_text("foo\n1\n")
        assert main(["loss_curves", "--in", str(bad), "--out", out]) == 1
