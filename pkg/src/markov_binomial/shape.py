"""Shape analysis of PMFs: log-concavity, modes, and the peak classifier.

For n >= 4 the interior f_n(1..n-1) is always log-concave, so it holds at
most one peak; extra peaks can only sit at the endpoints j = 0 and j = n.
Whether they do is decided entirely by six boundary values:

    left dip   LD: f(0) > f(1) <= f(2)
    right dip  RD: f(n-2) >= f(n-1) < f(n)

LD and RD together give three separated peaks (trimodal); exactly one gives
a bimodal shape with the extra peak on that side; neither leaves a unimodal
shape, refined by where the mode sits (index 0, index n, or interior).
Comparisons are exact float comparisons with no epsilon; a margin (the
smallest pairwise gap among the six values) is reported so near-ties can be
re-decided in exact rational arithmetic.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .chain import make_params
from .pmf import Pmf, pmf

__all__ = [
    "Shape",
    "ShapeClass",
    "ModeSet",
    "RegionGrid",
    "is_log_concave",
    "modes",
    "classify",
    "classify_values",
    "classify_region",
    "region_to_csv",
    "region_to_json",
]


class Shape(str, Enum):
    DECREASING = "decreasing"
    INCREASING = "increasing"
    STRICTLY_UNIMODAL = "unimodal"
    BIMODAL_LEFT = "bimodal_left"
    BIMODAL_RIGHT = "bimodal_right"
    TRIMODAL = "trimodal"


@dataclass(frozen=True)
class ShapeClass:
    """Classification outcome plus the values and margin that decided it."""

    shape: Shape
    boundary_values: tuple[float, float, float, float, float, float]
    margin: float


@dataclass(frozen=True)
class ModeSet:
    """All argmax positions of a sequence, under exact equality."""

    indices: tuple[int, ...]


def is_log_concave(seq: Sequence[float], strict: bool = False) -> bool:
    """Check x[i-1] x[i+1] <= x[i]^2 (strict: <) at every interior index.

    The comparison is evaluated in ratio form, (x[i-1]/x[i]) (x[i+1]/x[i])
    against 1, so sequences that dip toward the underflow floor are not
    flattened into fake ties by x^2 underflowing to zero.  Strict mode only
    tests indices with x[i] > 0.
    """
    x = np.asarray(seq, dtype=float)
    if x.size and x.min() < 0.0:
        raise ValueError("log-concavity needs nonnegative entries")
    for i in range(1, x.size - 1):
        if x[i] > 0.0:
            r = (x[i - 1] / x[i]) * (x[i + 1] / x[i])
            if (r >= 1.0) if strict else (r > 1.0):
                return False
        elif not strict:
            # x[i] = 0 demands a zero neighbor
            if x[i - 1] > 0.0 and x[i + 1] > 0.0:
                return False
    return True


def modes(seq: Sequence[float]) -> ModeSet:
    """Indices attaining the maximum, under exact float equality."""
    x = np.asarray(seq, dtype=float)
    if x.size == 0:
        raise ValueError("empty sequence has no mode")
    return ModeSet(indices=tuple(int(i) for i in np.flatnonzero(x == x.max())))


def _peak_runs(values: Sequence) -> list[tuple[int, int]]:
    """Maximal plateaus that are local maxima, as (start, end) inclusive."""
    n = len(values) - 1
    runs = []
    i = 0
    while i <= n:
        j = i
        while j < n and values[j + 1] == values[i]:
            j += 1
        left_lower = i == 0 or values[i - 1] < values[i]
        right_lower = j == n or values[j + 1] < values[j]
        if left_lower and right_lower:
            runs.append((i, j))
        i = j + 1
    return runs


def _small_n_shape(values: Sequence) -> Shape:
    # n <= 3: the six boundary indices collide, so count peaks directly
    n = len(values) - 1
    runs = _peak_runs(values)
    if len(runs) == 1:
        start, end = runs[0]
        if start == 0:
            return Shape.DECREASING
        if end == n:
            return Shape.INCREASING
        return Shape.STRICTLY_UNIMODAL
    if len(runs) >= 3:
        return Shape.TRIMODAL
    has_left = runs[0][0] == 0
    has_right = runs[-1][1] == n
    if has_left and has_right:
        # peaks at both boundaries: label by the side of the secondary
        # peak, i.e. the one the interior climbs away from, mirroring
        # what the six-value comparisons decide for n >= 4
        return Shape.BIMODAL_LEFT if values[1] <= values[2] else Shape.BIMODAL_RIGHT
    return Shape.BIMODAL_RIGHT if has_right else Shape.BIMODAL_LEFT


def classify_values(values: Sequence) -> ShapeClass:
    """Classify a PMF given as a raw sequence (floats or exact rationals).

    All decisions are comparisons, so the same code path serves float and
    Fraction inputs; only the reported boundary values and margin are
    converted to float.
    """
    n = len(values) - 1
    if n < 1:
        raise ValueError("need at least two entries")
    idx = (0, min(1, n), min(2, n), max(n - 2, 0), max(n - 1, 0), n)
    boundary = tuple(float(values[i]) for i in idx)
    if n <= 3:
        margin = min(abs(float(values[i + 1]) - float(values[i]))
                     for i in range(n))
        return ShapeClass(shape=_small_n_shape(values), boundary_values=boundary,
                          margin=margin)

    f0, f1, f2 = values[0], values[1], values[2]
    g2, g1, g0 = values[n - 2], values[n - 1], values[n]
    margin = float(min(
        abs(f0 - f1), abs(f1 - f2), abs(f0 - f2),
        abs(g2 - g1), abs(g1 - g0), abs(g2 - g0),
    ))
    left_dip = f0 > f1 and f1 <= f2
    right_dip = g2 >= g1 and g1 < g0
    if left_dip and right_dip:
        shape = Shape.TRIMODAL
    elif left_dip:
        shape = Shape.BIMODAL_LEFT
    elif right_dip:
        shape = Shape.BIMODAL_RIGHT
    else:
        mx = max(values)
        mode_idx = [i for i, v in enumerate(values) if v == mx]
        if 0 in mode_idx:
            shape = Shape.DECREASING
        elif n in mode_idx:
            shape = Shape.INCREASING
        else:
            shape = Shape.STRICTLY_UNIMODAL
    return ShapeClass(shape=shape, boundary_values=boundary, margin=margin)


def classify(p: Pmf) -> ShapeClass:
    return classify_values(p.values)


@dataclass(frozen=True)
class RegionGrid:
    """Shape classes at the cell centers of a G x G grid over (a, b)."""

    n: int
    grid_size: int
    nu_spec: float | str
    cells: list  # cells[i][j] classifies a = (i+.5)/G, b = (j+.5)/G


def classify_region(n: int, nu_spec: float | str, grid_size: int) -> RegionGrid:
    """Classify the PMF at every grid cell center in the open unit square.

    nu_spec is either a fixed nu_F or the token "stationary", which sets
    nu = pi(a, b) cell by cell.  Cells are independent; the grid is filled
    row-major in a, so the result never depends on evaluation order.
    """
    if grid_size < 2:
        raise ValueError(f"grid_size must be >= 2, got {grid_size}")
    stationary = isinstance(nu_spec, str)
    if stationary and nu_spec != "stationary":
        raise ValueError(f"nu_spec must be a number or 'stationary', got {nu_spec!r}")
    cells = []
    for i in range(grid_size):
        a = (i + 0.5) / grid_size
        row = []
        for j in range(grid_size):
            b = (j + 0.5) / grid_size
            nu_F = b / (a + b) if stationary else float(nu_spec)
            row.append(classify(pmf(make_params(a, b, nu_F), n)))
        cells.append(row)
    return RegionGrid(n=n, grid_size=grid_size, nu_spec=nu_spec, cells=cells)


def region_to_csv(grid: RegionGrid) -> str:
    nu_txt = grid.nu_spec if isinstance(grid.nu_spec, str) else f"{grid.nu_spec:.17g}"
    lines = [
        f"# n={grid.n} nu={nu_txt} grid={grid.grid_size}",
        "a,b,class",
    ]
    g = grid.grid_size
    for i in range(g):
        a = (i + 0.5) / g
        for j in range(g):
            b = (j + 0.5) / g
            lines.append(f"{a:.17g},{b:.17g},{grid.cells[i][j].shape.value}")
    return "\n".join(lines) + "\n"


def region_to_json(grid: RegionGrid) -> str:
    return json.dumps(
        {
            "n": grid.n,
            "grid": grid.grid_size,
            "nu": grid.nu_spec,
            "classes": [[c.shape.value for c in row] for row in grid.cells],
        }
    )
