#!/usr/bin/env python3
"""Render figures from the experiment CSV tables.

Reads only the published CSV schemas and never recomputes distances or
bounds. Three figure kinds:

  scaling        log-log median curve with a shaded min-max band and dashed
                 reference lines of slope -1/2 and -3/5 anchored at the
                 largest-size median (input: scaling_agg.csv, optionally the
                 per-trial scaling.csv as a scatter underlay)
  degree_scatter 3-D scatter over the block-probability triplet, colored by
                 the median distance (input: degree_sweep_agg.csv)
  stub_sweep     median and 0.95-quantile curves with a min-max band over
                 the stubbornness grid (input: stub_sweep_agg.csv)

Usage:
    python plots/render.py --kind scaling --in scaling_agg.csv \
        --raw scaling.csv --out fig1.png

Rendering is deterministic: fixed figure sizes, no jitter.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

SCALING_COLUMNS = ("n", "count", "median", "q95", "min", "max", "eps_bar_n")
RAW_SCALING_COLUMNS = ("n", "trial", "seed", "dist", "failed")
DEGREE_COLUMNS = ("p_s", "p_r", "p_sr", "count", "median")
STUB_COLUMNS = ("theta", "count", "median", "q95", "min", "max")

FIGURE_SIZE = (7.0, 5.0)


class SchemaError(ValueError):
    """The CSV does not match the published schema for this figure kind."""


def read_table(path: str | Path, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    """Load the required columns of a CSV as float arrays, validating the schema."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        for column in required:
            if column not in fields:
                raise SchemaError(f"{path}: missing column {column!r}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return {
        column: np.array([float(row[column]) for row in rows]) for column in required
    }


def render_scaling(agg_path, raw_path=None):
    table = read_table(agg_path, SCALING_COLUMNS)
    keep = table["count"] > 0
    if not keep.any():
        raise SchemaError(f"{agg_path}: every group is empty")
    n = table["n"][keep]
    median = table["median"][keep]

    fig, ax = plt.subplots(figsize=FIGURE_SIZE)
    if raw_path is not None:
        raw = read_table(raw_path, RAW_SCALING_COLUMNS)
        ok = raw["failed"] == 0
        ax.plot(raw["n"][ok], raw["dist"][ok], linestyle="none", marker=".",
                color="lightcoral", markersize=3, alpha=0.6, label="trials")
    ax.fill_between(n, table["min"][keep], table["max"][keep],
                    color="red", alpha=0.2, label="range")
    ax.plot(n, median, color="gray", marker="o", label="median")
    anchor_n, anchor_median = n[-1], median[-1]
    for slope, color in ((-0.5, "orange"), (-0.6, "steelblue")):
        ax.plot(n, anchor_median * (n / anchor_n) ** slope, linestyle="--",
                color=color, label=f"slope {slope}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("network size n")
    ax.set_ylabel("distance between influence matrices")
    ax.legend()
    fig.tight_layout()
    return fig


def render_degree_scatter(agg_path):
    table = read_table(agg_path, DEGREE_COLUMNS)
    fig = plt.figure(figsize=FIGURE_SIZE)
    ax = fig.add_subplot(projection="3d")
    points = ax.scatter(
        table["p_s"], table["p_r"], table["p_sr"],
        c=table["median"], cmap="viridis", s=40,
    )
    ax.set_xlabel("p_s")
    ax.set_ylabel("p_r")
    ax.set_zlabel("p_sr")
    fig.colorbar(points, ax=ax, label="median distance", shrink=0.7)
    return fig


def render_stub_sweep(agg_path):
    table = read_table(agg_path, STUB_COLUMNS)
    keep = table["count"] > 0
    if not keep.any():
        raise SchemaError(f"{agg_path}: every group is empty")
    theta = table["theta"][keep]
    fig, ax = plt.subplots(figsize=FIGURE_SIZE)
    ax.fill_between(theta, table["min"][keep], table["max"][keep],
                    color="red", alpha=0.2, label="range")
    ax.plot(theta, table["median"][keep], color="gray", marker="o", label="median")
    ax.plot(theta, table["q95"][keep], color="blue", label="0.95-quantile")
    ax.set_xlabel("stubbornness theta")
    ax.set_ylabel("distance between influence matrices")
    ax.legend()
    fig.tight_layout()
    return fig


_RENDERERS = {
    "scaling": render_scaling,
    "degree_scatter": render_degree_scatter,
    "stub_sweep": render_stub_sweep,
}


def render(kind: str, table_path, out_path, raw_path=None):
    if kind == "scaling":
        fig = render_scaling(table_path, raw_path)
    else:
        fig = _RENDERERS[kind](table_path)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return Path(out_path)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--kind", required=True, choices=sorted(_RENDERERS))
    parser.add_argument("--in", dest="table", required=True, help="aggregate CSV")
    parser.add_argument("--raw", help="per-trial CSV underlay (scaling only)")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        render(args.kind, args.table, args.out, raw_path=args.raw)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
