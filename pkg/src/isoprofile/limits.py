"""Limits of monotone families of sampled functions.

A non-increasing sequence of continuous non-decreasing functions converges
to a right-continuous limit, which need not be left-continuous.  Everything
here works on samples; a passing check says the samples are consistent with
continuity along the probe sequence, nothing more.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

ROW_TOL = 1e-12


@dataclass
class MonotoneFamily:
    """Rows f_1, ..., f_m sampled on a common increasing grid."""

    x_grid: np.ndarray
    rows: np.ndarray
    tol: float = ROW_TOL

    def __post_init__(self):
        self.x_grid = np.asarray(self.x_grid, dtype=float)
        self.rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if self.rows.shape[1] != self.x_grid.size:
            raise ValueError(f"rows have {self.rows.shape[1]} columns, grid has {self.x_grid.size} points")
        if np.any(np.diff(self.x_grid) <= 0):
            raise ValueError("x_grid must be strictly increasing")
        if not np.all(np.isfinite(self.rows)):
            raise ValueError("rows contain non-finite values")
        inc = np.diff(self.rows, axis=1)
        if np.any(inc < -self.tol):
            i, j = np.argwhere(inc < -self.tol)[0]
            raise ValueError(f"row {i + 1} decreases between x = {self.x_grid[j]} and {self.x_grid[j + 1]}")
        dec = np.diff(self.rows, axis=0)
        if np.any(dec > self.tol):
            i, j = np.argwhere(dec > self.tol)[0]
            raise ValueError(f"f_{i + 2} > f_{i + 1} at x = {self.x_grid[j]}")

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    @classmethod
    def from_function(cls, f: Callable[[int, np.ndarray], np.ndarray], x_grid, m: int):
        x_grid = np.asarray(x_grid, dtype=float)
        return cls(x_grid, np.array([f(i, x_grid) for i in range(1, m + 1)]))

    @classmethod
    def from_csv(cls, path) -> "MonotoneFamily":
        """First non-comment row holds the grid, each further row one f_i."""
        with open(path, newline="") as fh:
            data = [[float(c) for c in row] for row in csv.reader(fh)
                    if row and not row[0].lstrip().startswith("#")]
        if len(data) < 2:
            raise ValueError("need a grid row and at least one function row")
        return cls(np.array(data[0]), np.array(data[1:]))


@dataclass
class SampledFunction:
    x: np.ndarray
    y: np.ndarray
    tail: Optional[np.ndarray] = None
    flagged: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    def __call__(self, x):
        """Value at grid points (exact match required)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = np.searchsorted(self.x, x)
        idx = np.clip(idx, 0, self.x.size - 1)
        if not np.allclose(self.x[idx], x, rtol=0, atol=1e-14 * max(1.0, float(np.abs(self.x).max()))):
            raise KeyError("point is not on the sampling grid")
        return self.y[idx]


def pointwise_limit(fam: MonotoneFamily, tail_tolerance: float = 1e-6) -> SampledFunction:
    """Last row as the limit, with the Cauchy tail |f_m - f_{m-1}| per point."""
    last = fam.rows[-1]
    tail = np.abs(last - fam.rows[-2]) if fam.m > 1 else np.zeros_like(last)
    return SampledFunction(fam.x_grid.copy(), last.copy(), tail, tail > tail_tolerance)


def remark_family(i: int, x):
    """1 on [0, inf), 1 + i x on [-1/i, 0], 0 below: continuous, non-decreasing, decreasing in i."""
    if i < 1:
        raise ValueError("index must be >= 1")
    x = np.asarray(x, dtype=float)
    out = np.clip(1.0 + i * x, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def remark_limit(x):
    """Characteristic function of [0, inf)."""
    x = np.asarray(x, dtype=float)
    out = (x >= 0).astype(float)
    return float(out) if out.ndim == 0 else out


@dataclass
class ContinuityCheck:
    side: str
    x0: float
    value: float
    probes: list
    gaps: list
    limit_gap: float
    tol: float
    passed: bool

    @property
    def gap(self) -> float:
        return self.gaps[-1]

    def to_json(self) -> dict:
        return {"side": self.side, "x0": self.x0, "value": self.value, "probes": self.probes,
                "gaps": self.gaps, "final_gap": self.gap, "limit_gap": self.limit_gap,
                "tol": self.tol, "pass": self.passed}


def default_probes(h0: float = 0.5, k_max: int = 12) -> list:
    return [h0 * 2.0 ** -k for k in range(0, k_max + 1)]


def extrapolated_gap(gaps: Sequence[float]) -> float:
    """Limit of the gap sequence by Aitken's delta-squared on its last three terms.

    Falls back to the last gap unless the tail is strictly decreasing with
    non-degenerate second difference.  Geometric decay c 2^-k (a Lipschitz g)
    extrapolates to 0; a jump keeps its size.
    """
    g = [float(x) for x in gaps]
    if len(g) < 3:
        return g[-1]
    a, b, c = g[-3:]
    d2 = c - 2 * b + a
    if not (a > b > c) or abs(d2) <= 1e-15 * max(abs(a), 1e-300):
        return c
    return abs(c - (c - b) ** 2 / d2)


def _continuity(g, x0, probes, side, tol, rule):
    probes = [float(h) for h in probes]
    if any(h <= 0 for h in probes) or any(b >= a for a, b in zip(probes, probes[1:])):
        raise ValueError("probe radii must be positive and decreasing")
    if rule not in ("extrapolated", "final"):
        raise ValueError(f"unknown rule {rule!r}")
    sign = 1.0 if side == "right" else -1.0
    g0 = float(g(x0))
    gaps = [abs(float(g(x0 + sign * h)) - g0) for h in probes]
    limit = extrapolated_gap(gaps)
    scaled = tol * max(1.0, abs(g0))
    measure = limit if rule == "extrapolated" else gaps[-1]
    return ContinuityCheck(side, float(x0), g0, probes, gaps, limit, scaled, measure <= scaled)


def right_continuity_check(g: Callable, x0: float, probes: Optional[Sequence[float]] = None,
                           tol: float = 1e-6, rule: str = "extrapolated") -> ContinuityCheck:
    """Is g(x0 + h_k) -> g(x0) along the decreasing probes h_k?

    ``rule="extrapolated"`` compares the extrapolated limit of the gaps with
    tol * max(1, |g(x0)|); ``rule="final"`` uses the gap at the smallest probe.
    """
    return _continuity(g, x0, default_probes() if probes is None else probes, "right", tol, rule)


def left_continuity_check(g: Callable, x0: float, probes: Optional[Sequence[float]] = None,
                          tol: float = 1e-6, rule: str = "extrapolated") -> ContinuityCheck:
    return _continuity(g, x0, default_probes() if probes is None else probes, "left", tol, rule)


def remark_report(m: int = 1000, n_grid: int = 1000, x0: float = 0.0) -> dict:
    """Right continuity passes and left continuity fails for the step limit at 0.

    The sampled limit is compared with the indicator of [0, inf) at grid
    points outside (-1/m, 0), where every f_i with i >= m already agrees.
    """
    grid = np.linspace(-1.0, 1.0, n_grid)
    fam = MonotoneFamily.from_function(remark_family, grid, m)
    lim = pointwise_limit(fam)
    right = right_continuity_check(remark_limit, x0)
    left = left_continuity_check(remark_limit, x0)
    off = (grid > -1.0 / m) & (grid < 0)
    agree = bool(np.array_equal(lim.y[~off], remark_limit(grid[~off])))
    return {
        "family": "remark",
        "m": m,
        "grid_points": n_grid,
        "window_points": int(off.sum()),
        "limit_matches_indicator": agree,
        "right": right.to_json(),
        "left": left.to_json(),
        "pass": agree and right.passed and not left.passed and math.isclose(left.gap, 1.0),
    }


def load_family(path) -> MonotoneFamily:
    return MonotoneFamily.from_csv(Path(path))
