"""Command-line interface: parameter sweeps written as deterministic CSV.

Subcommands: sweep-loss, xi-region, optimize-power, single-point. Flags
override values from an optional flat key=value config file. Exit codes:
0 success, 1 usage error, 2 output I/O error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, fields
from typing import Optional, Sequence

import numpy as np

from . import keyrates
from .channel import NoiseModel, covariance_from_noise_params, uniform_crosstalk_channel
from .gaussian import UnphysicalStateError
from .optimizer import (
    SCENARIOS,
    PowerBudget,
    SweepParams,
    optimize_power,
    scan_xi_region,
    sweep_loss,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors with exit code 1."""

    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    """Resolved run parameters; defaults follow the reference operating point."""

    command: str = ""
    t: float = 0.1
    loss_start: float = 0.0
    loss_stop: float = 35.0
    loss_step: float = 1.0
    xi_b1: float = 0.001
    xi_b2: float = 0.001
    xi_re: float = 0.0
    xi_im: float = 0.0
    beta: float = 0.95
    budget: float = 9.4
    per_mode_cap: Optional[float] = None
    grid: int = 41
    opt_grid: int = 64
    v_a1: float = 5.7
    v_a2: float = 5.7
    scenario: str = "full_mimo"
    out: str = "out.csv"

    def validate(self):
        if not (0.0 < self.beta <= 1.0):
            raise UsageError(f"beta must be in (0, 1], got {self.beta}")
        if not (0.0 < self.t <= 1.0):
            raise UsageError(f"T must be in (0, 1], got {self.t}")
        if self.budget <= 0.0:
            raise UsageError("budget must be positive")
        if self.xi_b1 < 0.0 or self.xi_b2 < 0.0:
            raise UsageError("excess noise must be >= 0")
        if self.grid < 3:
            raise UsageError("grid must be at least 3")
        if self.opt_grid < 2:
            raise UsageError("opt-grid must be at least 2")
        if self.v_a1 < 1.0 or self.v_a2 < 1.0:
            raise UsageError("modulation variances must be >= 1 SNU")
        if self.scenario not in SCENARIOS:
            raise UsageError(f"scenario must be one of {', '.join(SCENARIOS)}")
        if not (0.0 <= self.loss_start <= self.loss_stop <= 60.0):
            raise UsageError("loss range must lie within [0, 60] dB")
        if self.loss_step <= 0.0:
            raise UsageError("loss step must be positive")

    def power_budget(self) -> PowerBudget:
        return PowerBudget(self.budget, self.per_mode_cap)


_CONFIG_KEYS = {f.name for f in fields(RunConfig)} - {"command"}
_FLOAT_KEYS = _CONFIG_KEYS - {"grid", "opt_grid", "scenario", "out"}


def parse_config_file(path: str) -> dict:
    """Parse a flat key=value config file; unknown keys are rejected."""
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}")
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        if key in ("scenario", "out"):
            values[key] = value
        elif key in ("grid", "opt_grid"):
            try:
                values[key] = int(value)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: malformed integer {value!r}")
        else:
            try:
                values[key] = float(value)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: malformed number {value!r}")
    return values


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--out", help="output CSV path")
    parser.add_argument("--xi-b1", type=float, dest="xi_b1")
    parser.add_argument("--xi-b2", type=float, dest="xi_b2")
    parser.add_argument("--beta", type=float)
    parser.add_argument("--budget", type=float, help="total power budget (SNU)")
    parser.add_argument("--per-mode-cap", type=float, dest="per_mode_cap")
    parser.add_argument("--opt-grid", type=int, dest="opt_grid",
                        help="coarse grid size for the power optimizer")


def build_parser() -> _Parser:
    parser = _Parser(prog="mimo-cvqkd", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("sweep-loss", help="scenario key rates over a loss grid")
    _add_common(p)
    p.add_argument("--loss-start", type=float, dest="loss_start")
    p.add_argument("--loss-stop", type=float, dest="loss_stop")
    p.add_argument("--loss-step", type=float, dest="loss_step")

    p = sub.add_parser("xi-region", help="scan the correlated-noise plane")
    _add_common(p)
    p.add_argument("--T", type=float, dest="t")
    p.add_argument("--grid", type=int)

    p = sub.add_parser("optimize-power", help="optimize the power allocation")
    _add_common(p)
    p.add_argument("--T", type=float, dest="t")
    p.add_argument("--xi-re", type=float, dest="xi_re")
    p.add_argument("--xi-im", type=float, dest="xi_im")
    p.add_argument("--scenario", choices=SCENARIOS)

    p = sub.add_parser("single-point", help="key rates at fixed modulation")
    _add_common(p)
    p.add_argument("--T", type=float, dest="t")
    p.add_argument("--xi-re", type=float, dest="xi_re")
    p.add_argument("--xi-im", type=float, dest="xi_im")
    p.add_argument("--v-a1", type=float, dest="v_a1")
    p.add_argument("--v-a2", type=float, dest="v_a2")
    return parser


def resolve_config(argv: Sequence[str]) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        raise UsageError("missing command")
    config = RunConfig(command=args.command)
    if getattr(args, "config", None):
        for key, value in parse_config_file(args.config).items():
            setattr(config, key, value)
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            setattr(config, key, value)
    config.validate()
    return config


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _rows_sweep_loss(config: RunConfig) -> tuple:
    params = SweepParams(
        xi_b1=config.xi_b1, xi_b2=config.xi_b2, beta=config.beta,
        budget=config.power_budget(), opt_grid=config.opt_grid,
    )
    points = sweep_loss(config.loss_start, config.loss_stop, config.loss_step, params)
    header = ["loss_db", "T", "skr_a", "skr_b", "skr_c", "skr_d", "skr_e",
              "v_a1_opt", "v_a2_opt"]
    rows = [
        [p.loss_db, p.transmissivity, p.skr_a, p.skr_b, p.skr_c, p.skr_d,
         p.skr_e, p.v_a1_opt, p.v_a2_opt]
        for p in points
    ]
    return header, rows


def _rows_xi_region(config: RunConfig) -> tuple:
    points = scan_xi_region(
        config.t, config.xi_b1, config.xi_b2, config.beta,
        config.power_budget(), config.grid,
        opt_grid=min(config.opt_grid, 16),
    )
    header = ["xi_re", "xi_im", "admissible", "skr"]
    rows = [[p.xi_re, p.xi_im, p.admissible, p.skr] for p in points]
    return header, rows


def _rows_optimize_power(config: RunConfig) -> tuple:
    h = uniform_crosstalk_channel(config.t)
    noise = NoiseModel(config.xi_b1, config.xi_b2, complex(config.xi_re, config.xi_im))
    v1, v2, bd = optimize_power(
        h, noise, config.beta, config.power_budget(), config.scenario,
        grid=config.opt_grid,
    )
    header = ["T", "scenario", "v_a1_opt", "v_a2_opt", "mutual_info", "holevo", "skr"]
    return header, [[config.t, config.scenario, v1, v2, bd.mutual_info, bd.holevo, bd.skr]]


def _rows_single_point(config: RunConfig) -> tuple:
    h = uniform_crosstalk_channel(config.t)
    noise = NoiseModel(config.xi_b1, config.xi_b2, complex(config.xi_re, config.xi_im))
    gamma = covariance_from_noise_params(h, config.v_a1, config.v_a2, noise)
    best_pair, best = keyrates.skr_selection_best(gamma, config.beta)
    mux = keyrates.skr_multiplexed(gamma, config.beta)
    full = keyrates.skr_full_mimo(gamma, config.beta)
    header = ["T", "v_a1", "v_a2", "best_pair", "skr_selection", "skr_multiplexed",
              "mutual_info_full", "holevo_full", "skr_full_mimo"]
    row = [config.t, config.v_a1, config.v_a2, f"{best_pair[0]}:{best_pair[1]}",
           best.skr, mux, full.mutual_info, full.holevo, full.skr]
    return header, [row]


_RUNNERS = {
    "sweep-loss": _rows_sweep_loss,
    "xi-region": _rows_xi_region,
    "optimize-power": _rows_optimize_power,
    "single-point": _rows_single_point,
}


def run(config: RunConfig) -> int:
    try:
        header, rows = _RUNNERS[config.command](config)
    except (UnphysicalStateError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    try:
        with open(config.out, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError as exc:
        print(f"cannot write {config.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = resolve_config(sys.argv[1:] if argv is None else list(argv))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
