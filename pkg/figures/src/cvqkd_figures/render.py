"""Render static figures from the key-rate CSV files.

Two figure kinds are supported:

- ``loss_curves``: secret key rate versus channel loss in dB, one labelled
  curve per scenario (a)-(e), optionally log-scaled on y.
- ``region_surface``: heatmap of the key rate over the complex
  correlated-noise plane; inadmissible grid cells are left blank.

Every plotted point comes straight from the CSV; inadmissible rows are never
interpolated over.
"""

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

LOSS_COLUMNS = ("loss_db", "skr_a", "skr_b", "skr_c", "skr_d", "skr_e")
REGION_COLUMNS = ("xi_re", "xi_im", "admissible", "skr")
SCENARIO_LABELS = {
    "skr_a": "(a) selection",
    "skr_b": "(b) multiplexed",
    "skr_c": "(c) SVD subchannel",
    "skr_d": "(d) full MIMO",
    "skr_e": "(e) full MIMO, correlated noise",
}
FIGURE_KINDS = ("region_surface", "loss_curves")


class SchemaError(ValueError):
    """The CSV columns do not match the expected schema."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str
    figure_kind: str
    output_image: str
    log_scale_y: bool = False

    def __post_init__(self):
        if self.figure_kind not in FIGURE_KINDS:
            raise ValueError(
                f"figure_kind must be one of {FIGURE_KINDS}, got {self.figure_kind!r}"
            )


def _read_rows(path, required):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(
                f"{path}: missing column(s) {', '.join(missing)}; "
                f"found columns: {', '.join(header) or '(none)'}"
            )
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _loss_curves(rows, log_scale_y):
    loss = np.array([float(r["loss_db"]) for r in rows])
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for column, label in SCENARIO_LABELS.items():
        skr = np.array([float(r[column]) for r in rows])
        if log_scale_y:
            # a log axis cannot show exact zeros; drop them rather than fake
            # a floor value
            keep = skr > 0.0
            ax.plot(loss[keep], skr[keep], marker=".", label=label)
        else:
            ax.plot(loss, skr, marker=".", label=label)
    if log_scale_y:
        ax.set_yscale("log")
    ax.set_xlabel("channel loss (dB)")
    ax.set_ylabel("secret key rate (bits/use)")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return fig


def _region_surface(rows):
    res = np.array(sorted({float(r["xi_re"]) for r in rows}))
    ims = np.array(sorted({float(r["xi_im"]) for r in rows}))
    grid = np.full((ims.size, res.size), np.nan)
    re_index = {v: i for i, v in enumerate(res)}
    im_index = {v: i for i, v in enumerate(ims)}
    for r in rows:
        if r["admissible"] == "true" and r["skr"] != "":
            grid[im_index[float(r["xi_im"])], re_index[float(r["xi_re"])]] = float(
                r["skr"]
            )

    fig, ax = plt.subplots(figsize=(6.5, 5.5))
    mesh = ax.pcolormesh(res, ims, np.ma.masked_invalid(grid), shading="nearest")
    fig.colorbar(mesh, ax=ax, label="secret key rate (bits/use)")
    ax.set_xlabel("Re correlated excess noise")
    ax.set_ylabel("Im correlated excess noise")
    ax.set_aspect("equal")
    return fig


def render(spec: FigureSpec):
    """Build the figure for *spec*, save it to ``spec.output_image``.

    Returns the matplotlib Figure. Raises SchemaError before any file is
    written if the CSV is empty or its columns do not match the kind.
    """
    if spec.figure_kind == "loss_curves":
        rows = _read_rows(spec.input_csv, LOSS_COLUMNS)
        fig = _loss_curves(rows, spec.log_scale_y)
    else:
        rows = _read_rows(spec.input_csv, REGION_COLUMNS)
        fig = _region_surface(rows)
    fig.savefig(spec.output_image, bbox_inches="tight")
    return fig
