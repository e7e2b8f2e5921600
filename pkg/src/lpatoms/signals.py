"""Built-in test signals for experiments and the CLI.

All are real, compactly supported grid signals: a gaussian bump, a
triangle, a smoothed plateau (two cubic smoothstep ramps), and a seeded
random piecewise-constant signal on dyadic breakpoints. Parameters are
expressed in the coordinates of the target grid.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .numerics import Grid, Signal


def gaussian_bump(grid: Grid, center: float | None = None, width: float | None = None,
                  cutoff: float | None = None) -> Signal:
    """exp(-((x - center)/width)^2) with defaults filling the grid.

    ``cutoff`` truncates to exact zero beyond that many widths from the
    center (tail < 1e-7 for cutoff 4), giving genuinely compact support
    for domain-adapted runs."""
    x = grid.points()
    span = grid.n * grid.h
    c = center if center is not None else grid.x0 + span / 2.0
    w = width if width is not None else span / 8.0
    vals = np.exp(-(((x - c) / w) ** 2))
    if cutoff is not None:
        vals = np.where(np.abs(x - c) <= cutoff * w, vals, 0.0)
    return Signal(grid, vals)


def triangle(grid: Grid, center: float | None = None, halfwidth: float | None = None) -> Signal:
    """Unit-height hat: max(0, 1 - |x - center| / halfwidth)."""
    x = grid.points()
    span = grid.n * grid.h
    c = center if center is not None else grid.x0 + span / 2.0
    hw = halfwidth if halfwidth is not None else span / 4.0
    return Signal(grid, np.maximum(0.0, 1.0 - np.abs(x - c) / hw))


def _smoothstep(u: np.ndarray) -> np.ndarray:
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def smoothed_step(grid: Grid, rise: float | None = None, fall: float | None = None,
                  ramp: float | None = None) -> Signal:
    """Plateau running from a cubic up-ramp at ``rise`` to a down-ramp
    at ``fall``, each of width ``ramp`` (compact support, C^1)."""
    x = grid.points()
    span = grid.n * grid.h
    r = rise if rise is not None else grid.x0 + 0.2 * span
    f = fall if fall is not None else grid.x0 + 0.7 * span
    w = ramp if ramp is not None else 0.1 * span
    if not (r + w <= f):
        raise ParameterError("ramps overlap: need rise + ramp <= fall")
    vals = _smoothstep((x - r) / w) - _smoothstep((x - f) / w)
    return Signal(grid, vals)


def random_piecewise(grid: Grid, pieces: int = 16, seed: int = 0) -> Signal:
    """Seeded uniform[-1, 1] values on ``pieces`` equal subintervals of
    the grid span (dyadic counts keep breakpoints on grid points)."""
    if pieces < 1:
        raise ParameterError("need at least one piece")
    rng = np.random.default_rng(seed)
    levels = rng.uniform(-1.0, 1.0, pieces)
    idx = np.minimum((np.arange(grid.n) * pieces) // grid.n, pieces - 1)
    return Signal(grid, levels[idx])


BUILTIN_SIGNALS = {
    "bump": gaussian_bump,
    "triangle": triangle,
    "smoothstep": smoothed_step,
    "piecewise": random_piecewise,
}


def make_signal(name: str, grid: Grid, seed: int = 0) -> Signal:
    if name not in BUILTIN_SIGNALS:
        raise ParameterError(
            f"unknown signal {name!r}; choose from {sorted(BUILTIN_SIGNALS)}"
        )
    if name == "piecewise":
        return random_piecewise(grid, seed=seed)
    return BUILTIN_SIGNALS[name](grid)
