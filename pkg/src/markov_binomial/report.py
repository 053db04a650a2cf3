"""Figure rendering for the report subcommand.

Renders the PMF and the (a, b) shape-region map as PNG files, writing the
CSV/JSON data they display alongside, so every figure can be regenerated or
re-plotted from its delimited twin.  Kept separate from the data-only
subcommands; importing this module pulls in matplotlib.
"""
from __future__ import annotations

import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.colors import ListedColormap
from matplotlib.patches import Patch

from .chain import ChainParams
from .moments import moment_report, report_to_json
from .pmf import Pmf, pmf, pmf_to_csv
from .shape import RegionGrid, Shape, classify_region, region_to_csv

__all__ = ["render_pmf_figure", "render_region_figure", "write_report"]

_CLASS_ORDER = [
    Shape.DECREASING,
    Shape.INCREASING,
    Shape.STRICTLY_UNIMODAL,
    Shape.BIMODAL_LEFT,
    Shape.BIMODAL_RIGHT,
    Shape.TRIMODAL,
]

_CLASS_COLORS = ["#c6dbef", "#9ecae1", "#4292c6", "#fdae6b", "#e6550d", "#31a354"]


def render_pmf_figure(p: Pmf, path: str) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(range(p.n + 1), p.values, marker=".", markersize=3, linewidth=0.8)
    ax.set_xlabel("j")
    ax.set_ylabel(f"P(K_n = j{'' if p.kind == 'full' else ' | Y_n = ' + p.kind[-1]})")
    ax.set_title(f"n={p.n} a={p.params.a:g} b={p.params.b:g}"
                 f" nu_F={p.params.nu_F:g} ({p.kind})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_region_figure(grid: RegionGrid, path: str) -> None:
    index = {shape: i for i, shape in enumerate(_CLASS_ORDER)}
    g = grid.grid_size
    # image rows are b (vertical axis), columns a
    data = [[index[grid.cells[i][j].shape] for i in range(g)] for j in range(g)]
    fig, ax = plt.subplots(figsize=(6, 5.5))
    ax.imshow(data, origin="lower", extent=(0.0, 1.0, 0.0, 1.0),
              cmap=ListedColormap(_CLASS_COLORS), vmin=-0.5,
              vmax=len(_CLASS_ORDER) - 0.5, interpolation="nearest")
    present = {grid.cells[i][j].shape for i in range(g) for j in range(g)}
    handles = [Patch(color=_CLASS_COLORS[index[s]], label=s.value)
               for s in _CLASS_ORDER if s in present]
    ax.legend(handles=handles, loc="upper right", fontsize=8, framealpha=0.9)
    ax.set_xlabel("a")
    ax.set_ylabel("b")
    nu_txt = grid.nu_spec if isinstance(grid.nu_spec, str) else f"{grid.nu_spec:g}"
    ax.set_title(f"PMF shape, n={grid.n}, nu={nu_txt}, grid={g}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_report(params: ChainParams, n: int, out_dir: str, grid_size: int,
                 nu_spec: float | str) -> list[str]:
    """Render PMF and region figures with their data files; returns paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []

    p = pmf(params, n)
    csv_path = os.path.join(out_dir, "pmf.csv")
    with open(csv_path, "w") as fh:
        fh.write(pmf_to_csv(p))
    paths.append(csv_path)
    png_path = os.path.join(out_dir, "pmf.png")
    render_pmf_figure(p, png_path)
    paths.append(png_path)

    moments_path = os.path.join(out_dir, "moments.json")
    doc = {
        "params": {"a": params.a, "b": params.b, "nu_F": params.nu_F},
        "report": json.loads(report_to_json(moment_report(params, n))),
    }
    with open(moments_path, "w") as fh:
        fh.write(json.dumps(doc) + "\n")
    paths.append(moments_path)

    grid = classify_region(n, nu_spec, grid_size)
    region_csv = os.path.join(out_dir, "region.csv")
    with open(region_csv, "w") as fh:
        fh.write(region_to_csv(grid))
    paths.append(region_csv)
    region_png = os.path.join(out_dir, "region.png")
    render_region_figure(grid, region_png)
    paths.append(region_png)

    return paths
