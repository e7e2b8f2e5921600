import numpy as np
import pytest

from lpatoms.errors import GridMismatchError, InvalidSignalError, ParameterError
from lpatoms.numerics import (
    Grid,
    LatticeConfig,
    Signal,
    dp_distance,
    lp_power,
    periodize,
    signal_difference,
)
from lpatoms.dictionary import haar, indicator, normalized_indicator, step_difference


def test_grid_validation():
    with pytest.raises(ParameterError):
        Grid(0.0, -1.0, 4)
    with pytest.raises(ParameterError):
        Grid(0.0, 0.5, 0)
    g = Grid.over(0.0, 1.0, 1 / 256)
    assert g.n == 256 and g.hi == pytest.approx(1.0)


def test_signal_rejects_nonfinite():
    g = Grid.over(0, 1, 1 / 8)
    with pytest.raises(InvalidSignalError):
        Signal(g, np.array([0, 1, np.nan, 0, 0, 0, 0, 0.0]))
    with pytest.raises(InvalidSignalError):
        Signal(g, np.ones(4))


def test_lp_power_zero_and_constant():
    g = Grid.over(0, 1, 1 / 64)
    assert lp_power(Signal(g, np.zeros(64)), 0.5) == 0.0
    # rectangle rule is exact for constants
    assert lp_power(Signal(g, np.ones(64)), 0.5) == pytest.approx(1.0, abs=1e-15)


def test_lp_power_singularity_converges_to_antiderivative():
    # oracle: integral_0^1 x^(-1/4) dx = 4/3 exactly
    exact = 4.0 / 3.0
    errs = []
    for k in (8, 10, 12, 14):
        g = Grid.over(0, 1, 2.0 ** -k)
        x = g.points()
        vals = np.where(x > 0, np.where(x > 0, x, 1.0) ** -0.5, 0.0)
        errs.append(abs(lp_power(Signal(g, vals), 0.5) - exact))
    assert errs == sorted(errs, reverse=True)
    assert errs[-1] < 5e-3


def test_lp_power_scaling_homogeneity():
    rng = np.random.default_rng(1)
    g = Grid.over(-1, 1, 1 / 128)
    f = Signal(g, rng.standard_normal(g.n) + 1j * rng.standard_normal(g.n))
    for p in (0.3, 0.5, 1.0):
        for t in (0.25, 3.0, -2.0, 1j):
            assert lp_power(t * f, p) == pytest.approx(abs(t) ** p * lp_power(f, p), rel=1e-12)


def test_dp_distance_basics():
    g = Grid.over(0, 2, 1 / 256)
    f = Signal(g, np.sin(g.points()))
    assert dp_distance(f, f, 0.5) == 0.0
    z = Signal(g, np.zeros(g.n))
    assert dp_distance(f, z, 0.5) == pytest.approx(lp_power(f, 0.5))


def test_dp_distance_indicator_geometry():
    # 1_[0,1) vs 1_[0,2) differ by 1_[1,2): d_p = 1 exactly on aligned grids
    h = 1 / 256
    g1 = Grid.over(0, 1, h)
    g2 = Grid.over(0, 2, h)
    f = Signal(g1, np.ones(g1.n))
    g = Signal(g2, np.ones(g2.n))
    assert dp_distance(f, g, 0.5) == pytest.approx(1.0, abs=1e-12)
    assert dp_distance(g, f, 0.5) == pytest.approx(1.0, abs=1e-12)


def test_dp_distance_rejects_mismatched_grids():
    f = Signal(Grid.over(0, 1, 1 / 64), np.ones(64))
    g = Signal(Grid.over(0, 1, 1 / 128), np.ones(128))
    with pytest.raises(GridMismatchError):
        dp_distance(f, g, 0.5)
    shifted = Signal(Grid(0.3 / 64, 1 / 64, 64), np.ones(64))
    with pytest.raises(GridMismatchError):
        dp_distance(f, shifted, 0.5)


def test_signal_difference_zero_extends():
    h = 1 / 32
    f = Signal(Grid.over(0, 1, h), np.ones(32))
    g = Signal(Grid.over(0.5, 1.5, h), np.full(32, 2.0))
    d = signal_difference(f, g)
    assert d.grid.x0 == pytest.approx(0.0)
    assert d.grid.n == 48
    x = d.grid.points()
    assert np.all(d.values[x < 0.5 - 1e-12] == 1.0)
    assert np.all(d.values[(x > 0.5) & (x < 1.0 - 1e-12)] == -1.0)
    assert np.all(d.values[x > 1.0] == -2.0)


def test_p_triangle_inequality_random():
    rng = np.random.default_rng(7)
    g = Grid.over(-1, 1, 1 / 128)
    for p in (0.25, 0.5, 0.75, 1.0):
        for _ in range(25):
            f, gg, h = (Signal(g, rng.standard_normal(g.n)) for _ in range(3))
            lhs = dp_distance(f, h, p)
            rhs = dp_distance(f, gg, p) + dp_distance(gg, h, p)
            assert lhs <= rhs * (1 + 1e-9)


def test_periodize_normalized_indicator_is_one():
    cfg = LatticeConfig(p=0.5, b=1.0)
    cell = Grid.over(0, 1, 1 / 512)
    P = periodize(normalized_indicator(1.0), cfg, 1, cell)
    assert np.max(np.abs(P.values - 1.0)) < 1e-12


def test_periodize_haar_is_haar_on_cell():
    cfg = LatticeConfig(p=0.5)
    cell = Grid.over(0, 1, 1 / 512)
    P = periodize(haar(), cfg, 1, cell)
    x = cell.points()
    expected = np.where(x < 0.5, 1.0, -1.0)
    assert np.max(np.abs(P.values - expected)) == 0.0


def test_periodize_step_difference_multipliers():
    cfg = LatticeConfig(p=0.5)
    cell1 = Grid.over(0, 1, 1 / 512)
    P1 = periodize(step_difference(), cfg, 1, cell1)
    assert np.max(np.abs(P1.values)) == 0.0
    cell2 = Grid.over(0, 2, 1 / 512)
    P2 = periodize(step_difference(), cfg, 2, cell2)
    x = cell2.points()
    expected = 2.0 * np.where(x < 1.0, 1.0, -1.0)
    assert np.max(np.abs(P2.values - expected)) == 0.0


def test_periodize_mass_bounded_by_translate_sum():
    # one-cell mass of the periodization is at most b^p times the sum of
    # the translated masses (p-th powers move inside sums)
    cfg = LatticeConfig(p=0.5, b=1.0)
    cell = Grid.over(0, 1, 1 / 512)
    psi = indicator(0.0, 2.0, amplitude=0.7)
    P = periodize(psi, cfg, 1, cell)
    lhs = lp_power(P, cfg.p)
    x = cell.points()
    rhs = 0.0
    from lpatoms.dictionary import eval_synthesizer

    for k in range(-3, 4):
        rhs += lp_power(Signal(cell, eval_synthesizer(psi, x - k)), cfg.p)
    assert lhs <= cfg.b ** cfg.p * rhs + 1e-12


def test_periodize_rejects_wrong_cell_span():
    cfg = LatticeConfig(p=0.5)
    with pytest.raises(ParameterError):
        periodize(haar(), cfg, 2, Grid.over(0, 1, 1 / 64))


def test_lattice_config_validation():
    with pytest.raises(ParameterError):
        LatticeConfig(p=0.0)
    with pytest.raises(ParameterError):
        LatticeConfig(p=0.5, a=1.0)
    with pytest.raises(ParameterError):
        LatticeConfig(p=0.5, b=0.0)
    with pytest.raises(ParameterError):
        LatticeConfig(p=1.5)
