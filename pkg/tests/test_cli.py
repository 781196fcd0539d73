import csv
import os
import subprocess
import sys

import pytest

from mimo_cvqkd.cli import (
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    UsageError,
    main,
    parse_config_file,
    resolve_config,
)

FAST = ["--opt-grid", "6"]


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestConfigParsing:
    def test_defaults(self):
        config = resolve_config(["sweep-loss"])
        assert config.beta == 0.95
        assert config.xi_b1 == 0.001 and config.xi_b2 == 0.001
        assert config.budget == 9.4
        assert (config.loss_start, config.loss_stop, config.loss_step) == (0.0, 35.0, 1.0)

    def test_config_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("beta = 0.9\nxi_b1 = 0.002  # comment\n\n")
        config = resolve_config(["sweep-loss", "--config", str(cfg)])
        assert config.beta == 0.9
        assert config.xi_b1 == 0.002

    def test_flag_overrides_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("beta=0.95\n")
        config = resolve_config(["sweep-loss", "--config", str(cfg), "--beta", "0.9"])
        assert config.beta == 0.9

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("bogus=1\n")
        with pytest.raises(UsageError, match="unknown key"):
            parse_config_file(str(cfg))

    def test_malformed_number_rejected(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("beta=fast\n")
        with pytest.raises(UsageError, match="malformed"):
            parse_config_file(str(cfg))

    def test_beta_out_of_range(self):
        with pytest.raises(UsageError):
            resolve_config(["sweep-loss", "--beta", "1.2"])

    def test_missing_command(self):
        with pytest.raises(UsageError):
            resolve_config([])


class TestExitCodes:
    def test_usage_error_exit_1(self, capsys):
        assert main(["sweep-loss", "--beta", "1.2"]) == EXIT_USAGE
        assert "beta" in capsys.readouterr().err

    def test_unknown_flag_exit_1(self, capsys):
        assert main(["sweep-loss", "--frobnicate", "1"]) == EXIT_USAGE

    def test_unwritable_output_exit_2(self, tmp_path, capsys):
        out = str(tmp_path / "no_such_dir" / "out.csv")
        code = main(["single-point", "--T", "0.5", "--out", out])
        assert code == EXIT_IO


class TestSweepLossCommand:
    def test_row_count_and_header(self, tmp_path):
        out = str(tmp_path / "sweep.csv")
        code = main(["sweep-loss", "--loss-start", "3", "--loss-stop", "6",
                     "--loss-step", "1", "--out", out] + FAST)
        assert code == EXIT_OK
        rows = read_csv(out)
        assert rows[0] == ["loss_db", "T", "skr_a", "skr_b", "skr_c", "skr_d",
                           "skr_e", "v_a1_opt", "v_a2_opt"]
        assert len(rows) == 1 + 4
        assert all(len(r) == len(rows[0]) for r in rows)

    def test_byte_identical_reruns(self, tmp_path):
        args = ["sweep-loss", "--loss-start", "5", "--loss-stop", "6",
                "--loss-step", "1"] + FAST
        out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        assert main(args + ["--out", out1]) == EXIT_OK
        assert main(args + ["--out", out2]) == EXIT_OK
        assert open(out1, "rb").read() == open(out2, "rb").read()

    def test_values_nonnegative(self, tmp_path):
        out = str(tmp_path / "sweep.csv")
        main(["sweep-loss", "--loss-start", "8", "--loss-stop", "9",
              "--loss-step", "1", "--out", out] + FAST)
        for row in read_csv(out)[1:]:
            assert all(float(x) >= 0.0 for x in row[2:7])


class TestXiRegionCommand:
    def test_grid_rows(self, tmp_path):
        out = str(tmp_path / "region.csv")
        code = main(["xi-region", "--T", "0.1", "--grid", "5", "--out", out,
                     "--opt-grid", "4"])
        assert code == EXIT_OK
        rows = read_csv(out)
        assert rows[0] == ["xi_re", "xi_im", "admissible", "skr"]
        assert len(rows) == 1 + 25

    def test_skr_blank_iff_inadmissible(self, tmp_path):
        out = str(tmp_path / "region.csv")
        main(["xi-region", "--T", "0.1", "--grid", "5", "--out", out,
              "--opt-grid", "4"])
        for row in read_csv(out)[1:]:
            assert row[2] in ("true", "false")
            assert (row[3] == "") == (row[2] == "false")


class TestOptimizePowerCommand:
    def test_single_row(self, tmp_path):
        out = str(tmp_path / "opt.csv")
        code = main(["optimize-power", "--T", "0.2", "--scenario", "full_mimo",
                     "--out", out] + FAST)
        assert code == EXIT_OK
        rows = read_csv(out)
        assert len(rows) == 2
        header, row = rows
        assert float(row[header.index("skr")]) > 0.0


class TestSinglePointCommand:
    def test_reports_all_scenarios(self, tmp_path):
        out = str(tmp_path / "pt.csv")
        code = main(["single-point", "--T", "0.1", "--v-a1", "5.7",
                     "--v-a2", "5.7", "--out", out])
        assert code == EXIT_OK
        header, row = read_csv(out)
        full = float(row[header.index("skr_full_mimo")])
        mux = float(row[header.index("skr_multiplexed")])
        # at this point crosstalk noise kills the independently reconciled pairs
        assert full > 0.0
        assert 0.0 <= mux < full


def test_console_entry_point(tmp_path):
    out = str(tmp_path / "pt.csv")
    proc = subprocess.run(
        [sys.executable, "-m", "mimo_cvqkd.cli", "single-point", "--T", "0.5",
         "--out", out],
        capture_output=True,
    )
    assert proc.returncode == 0
    assert os.path.exists(out)
