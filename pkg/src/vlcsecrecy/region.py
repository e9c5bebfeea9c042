"""Insecure-region maps over the receiver plane.

Bob is fixed and Eve is swept over a grid of cell centres.  A cell is
insecure when Eve's normalized gain beats Bob's; everywhere else the chosen
upper bound is reported (clamped at zero).
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

import numpy as np

from .avg_bounds import AvgConstraints, upper_bound_avg
from .peak_bounds import PeakConstraints, upper_bound_peak
from .scenario import LinkGains, PdParams, Position, channel_gain, channel_gain_grid

BOUNDS = ("avg_upper", "peak_upper")


@dataclass(frozen=True)
class FloorGrid:
    x_range: tuple[float, float]
    y_range: tuple[float, float]
    nx: int
    ny: int
    z: float = 0.0

    def __post_init__(self) -> None:
        if self.nx < 2 or self.ny < 2:
            raise ValueError(f"grid needs at least 2x2 cells, got {self.nx}x{self.ny}")
        for name in ("x_range", "y_range"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
                raise ValueError(f"{name} must be an increasing finite pair, got {(lo, hi)!r}")

    @property
    def dx(self) -> float:
        return (self.x_range[1] - self.x_range[0]) / self.nx

    @property
    def dy(self) -> float:
        return (self.y_range[1] - self.y_range[0]) / self.ny

    @property
    def xs(self) -> np.ndarray:
        return self.x_range[0] + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def ys(self) -> np.ndarray:
        return self.y_range[0] + (np.arange(self.ny) + 0.5) * self.dy


@dataclass(frozen=True)
class RegionMap:
    """Per-cell bound values (nats, clamped at 0) and the insecure mask, both ``[ix, iy]``."""

    grid: FloorGrid
    values: np.ndarray
    insecure_mask: np.ndarray


def insecure_region(
    alice: Position,
    bob: Position,
    pd: PdParams,
    sigma_b: float,
    sigma_e: float,
    grid: FloorGrid,
    bound: str,
    constraints: AvgConstraints | PeakConstraints,
    threads: int = 1,
) -> RegionMap:
    """Sweep Eve over ``grid`` and evaluate the selected upper bound per cell.

    Rows are computed independently (optionally on ``threads`` workers) and
    reassembled in grid order, so the result does not depend on scheduling.
    """
    if bound not in BOUNDS:
        raise ValueError(f"bound must be one of {BOUNDS}, got {bound!r}")
    if bound == "avg_upper" and not isinstance(constraints, AvgConstraints):
        raise TypeError("avg_upper needs AvgConstraints")
    if bound == "peak_upper" and not isinstance(constraints, PeakConstraints):
        raise TypeError("peak_upper needs PeakConstraints")
    if not (sigma_b > 0.0 and sigma_e > 0.0):
        raise ValueError("noise standard deviations must be positive")

    h_b = channel_gain(alice, bob, pd)
    h_e = channel_gain_grid(alice, grid.xs, grid.ys, grid.z, pd)
    secure = h_b * sigma_e >= h_e * sigma_b
    mask = ~secure
    if h_b == 0.0:
        mask = np.ones_like(mask)
        secure = ~mask
    evaluate = upper_bound_avg if bound == "avg_upper" else upper_bound_peak

    def row(i: int) -> np.ndarray:
        out = np.zeros(grid.ny)
        for j in range(grid.ny):
            if secure[i, j]:
                v = evaluate(LinkGains(h_b, float(h_e[i, j])), constraints, sigma_b, sigma_e)
                out[j] = max(0.0, v)
        return out

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, range(grid.nx)))
    else:
        rows = [row(i) for i in range(grid.nx)]
    return RegionMap(grid=grid, values=np.vstack(rows), insecure_mask=mask)


def disc_predicate(alice: Position, bob: Position, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Analytic insecure disc for equal noise: Eve strictly closer to the nadir than Bob."""
    r_bob2 = (bob.x - alice.x) ** 2 + (bob.y - alice.y) ** 2
    r2 = (np.asarray(xs)[:, None] - alice.x) ** 2 + (np.asarray(ys)[None, :] - alice.y) ** 2
    return r2 < r_bob2


def write_region_rows(m: RegionMap, fh: TextIO) -> None:
    """Write ``x,y,bound_nats,insecure`` rows, x-major, 9 significant digits."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["x", "y", "bound_nats", "insecure"])
    for i, x in enumerate(m.grid.xs):
        for j, y in enumerate(m.grid.ys):
            w.writerow([f"{x:.9g}", f"{y:.9g}", f"{m.values[i, j]:.9g}", int(m.insecure_mask[i, j])])


def export_region_csv(m: RegionMap, path: str | Path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            write_region_rows(m, fh)
    except OSError as exc:
        raise OSError(f"cannot write region CSV to {path}: {exc}") from exc
