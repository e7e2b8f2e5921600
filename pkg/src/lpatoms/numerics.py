"""Grids, L^p quasi-norms, quasi-metrics and periodization.

All signals live on uniform 1-D grids and are implicitly zero outside
their grid. Integrals use the left-endpoint rectangle rule, which is
exact for piecewise-constant integrands whose breakpoints are grid
points. Every object here is immutable after construction and every
operation is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError, InvalidSignalError, ParameterError

#: relative tolerance used when comparing grid geometry
_GRID_RTOL = 1e-9


@dataclass(frozen=True)
class Grid:
    """Uniform grid x_i = x0 + i*h, i = 0..n-1."""

    x0: float
    h: float
    n: int

    def __post_init__(self):
        if not (self.h > 0):
            raise ParameterError(f"grid step must be positive, got {self.h}")
        if self.n < 1:
            raise ParameterError(f"grid needs at least one point, got n={self.n}")

    @property
    def hi(self) -> float:
        """Right end of the covered half-open interval [x0, x0 + n*h)."""
        return self.x0 + self.n * self.h

    def points(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.n)

    def index_of(self, x: float) -> int:
        """Nearest grid index to x (may fall outside 0..n-1)."""
        return int(round((x - self.x0) / self.h))

    @staticmethod
    def over(lo: float, hi: float, h: float) -> "Grid":
        """Grid covering [lo, hi) with step h."""
        n = int(round((hi - lo) / h))
        return Grid(lo, h, max(n, 1))


@dataclass(frozen=True)
class Signal:
    """Complex- or real-valued samples on a uniform grid, zero outside."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.n,):
            raise InvalidSignalError(
                f"value array of shape {v.shape} does not match grid size {self.grid.n}"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidSignalError("signal contains non-finite samples")
        object.__setattr__(self, "values", v)

    def __add__(self, other: "Signal") -> "Signal":
        _require_same_grid(self, other)
        return _unchecked(self.grid, self.values + other.values)

    def __sub__(self, other: "Signal") -> "Signal":
        _require_same_grid(self, other)
        return _unchecked(self.grid, self.values - other.values)

    def __mul__(self, scalar) -> "Signal":
        return _unchecked(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def support_range(self, tol: float = 0.0) -> tuple[float, float] | None:
        """Interval [x_lo, x_hi) spanned by samples with |value| > tol,
        or None for an identically zero signal."""
        idx = np.nonzero(np.abs(self.values) > tol)[0]
        if idx.size == 0:
            return None
        g = self.grid
        return (g.x0 + idx[0] * g.h, g.x0 + (idx[-1] + 1) * g.h)


def _unchecked(grid: Grid, values: np.ndarray) -> Signal:
    """Internal constructor skipping the finite-value scan (hot loops)."""
    sig = object.__new__(Signal)
    object.__setattr__(sig, "grid", grid)
    object.__setattr__(sig, "values", values)
    return sig


def _require_same_grid(f: Signal, g: Signal):
    a, b = f.grid, g.grid
    if a.n != b.n or abs(a.h - b.h) > _GRID_RTOL * a.h or abs(a.x0 - b.x0) > _GRID_RTOL * max(1.0, abs(a.x0)):
        raise GridMismatchError("signals live on different grids")


@dataclass(frozen=True)
class LatticeConfig:
    """Scale/shift lattice: dilations a^j (a > 1, j >= 1), translation
    step b > 0, quasi-norm exponent p in (0, 1]."""

    p: float
    a: float = 2.0
    b: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0):
            raise ParameterError(f"p must lie in (0, 1], got {self.p}")
        if not (self.a > 1.0):
            raise ParameterError(f"dilation base must exceed 1, got {self.a}")
        if not (self.b > 0.0):
            raise ParameterError(f"translation step must be positive, got {self.b}")


def _check_p(p: float):
    if not (0.0 < p <= 1.0):
        raise ParameterError(f"p must lie in (0, 1], got {p}")


def lp_power(f: Signal, p: float) -> float:
    """Rectangle-rule value of the quasi-norm power: integral of |f|^p.

    This is the distance d_p(f, 0) of the quasi-metric; it equals
    ||f||_p^p up to quadrature error.
    """
    _check_p(p)
    v = f.values
    if not np.all(np.isfinite(v)):
        raise InvalidSignalError("signal contains non-finite samples")
    return float(f.grid.h * np.sum(np.abs(v) ** p))


def lp_norm(f: Signal, p: float) -> float:
    """The quasi-norm itself, lp_power(f, p) ** (1/p)."""
    return lp_power(f, p) ** (1.0 / p)


def dp_distance(f: Signal, g: Signal, p: float) -> float:
    """Quasi-metric d_p(f, g) = integral of |f - g|^p.

    The grids must share the same step and be offset by an integer
    number of steps; the difference is formed on the union range with
    zero extension.
    """
    _check_p(p)
    diff = signal_difference(f, g)
    return lp_power(diff, p)


def signal_difference(f: Signal, g: Signal) -> Signal:
    """f - g on the union grid (zero extension outside each signal)."""
    gf, gg = f.grid, g.grid
    if abs(gf.h - gg.h) > _GRID_RTOL * gf.h:
        raise GridMismatchError(f"grid steps differ: {gf.h} vs {gg.h}")
    h = gf.h
    shift = (gg.x0 - gf.x0) / h
    k = round(shift)
    if abs(shift - k) > 1e-6:
        raise GridMismatchError("grid offsets are not an integer number of steps apart")
    if k == 0 and gf.n == gg.n:
        return _unchecked(gf, f.values - g.values)
    lo = min(0, k)
    hi = max(gf.n, k + gg.n)
    dtype = np.result_type(f.values.dtype, g.values.dtype)
    out = np.zeros(hi - lo, dtype=dtype)
    out[-lo: gf.n - lo] = f.values
    out[k - lo: k - lo + gg.n] -= g.values
    return _unchecked(Grid(gf.x0 + lo * h, h, hi - lo), out)


def periodize(psi, cfg: LatticeConfig, m: int, grid_cell: Grid) -> Signal:
    """Lattice-periodized synthesizer on one period cell.

    Returns the (b*m)-periodic sum  b*m * sum_k psi(x - b*m*k)  sampled
    on ``grid_cell``, whose span must equal one period b*m. The sum is
    truncated to the translates whose support meets the cell, which is
    exact for compactly supported families and controlled by the decay
    cutoff otherwise.
    """
    from .dictionary import eval_synthesizer, support_interval

    if m < 1:
        raise ParameterError(f"periodization multiplier must be >= 1, got {m}")
    period = cfg.b * m
    span = grid_cell.n * grid_cell.h
    if abs(span - period) > 1e-9 * period:
        raise ParameterError(
            f"cell grid spans {span}, expected one period {period}"
        )
    lo, hi = support_interval(psi)
    x = grid_cell.points()
    k_lo = int(np.floor((x[0] - hi) / period))
    k_hi = int(np.ceil((x[-1] - lo) / period))
    acc = np.zeros(grid_cell.n, dtype=complex)
    for k in range(k_lo, k_hi + 1):
        acc = acc + eval_synthesizer(psi, x - period * k)
    if np.max(np.abs(acc.imag)) == 0.0:
        acc = acc.real
    return _unchecked(grid_cell, period * acc)
