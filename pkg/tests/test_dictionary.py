import numpy as np
import pytest

from lpatoms.dictionary import (
    Atom,
    SynthesizerSpec,
    atom_support,
    bspline,
    cell_mass,
    eval_atom,
    eval_synthesizer,
    haar,
    indicator,
    integral,
    mexican_hat,
    normalized_indicator,
    power_singular,
    second_difference,
    step_difference,
    support_interval,
    table,
)
from lpatoms.errors import NoAnalyticMassError, ParameterError
from lpatoms.numerics import Grid, LatticeConfig, Signal, lp_power, periodize


def test_family_point_values():
    assert eval_synthesizer(haar(), 0.25) == 1.0
    assert eval_synthesizer(haar(), 0.75) == -1.0
    assert eval_synthesizer(haar(), 1.5) == 0.0
    assert eval_synthesizer(mexican_hat(), 0.0) == pytest.approx(1.0)
    assert eval_synthesizer(power_singular(0.5), 0.25) == pytest.approx(2.0)
    assert eval_synthesizer(power_singular(0.5), 0.0) == 0.0
    assert eval_synthesizer(step_difference(), 1.5) == -1.0
    assert eval_synthesizer(second_difference(), -0.5) == 1.0
    assert eval_synthesizer(second_difference(), 0.5) == -2.0


def test_bspline_partition_of_unity():
    for order in (0, 1, 2, 3):
        spec = bspline(order)
        x = np.linspace(5.0, 6.0, 17)  # arbitrary window
        total = sum(eval_synthesizer(spec, x - k) for k in range(-2, 12))
        assert np.allclose(total, 1.0, atol=1e-12)


def test_amplitude_scaling():
    spec = indicator(0, 1, amplitude=1.5)
    assert eval_synthesizer(spec, 0.5) == 1.5
    assert spec.scaled(2.0).amplitude == 3.0


def test_support_metadata_matches_samples():
    rng = np.random.default_rng(2)
    for spec in (haar(), step_difference(), second_difference(), bspline(2),
                 power_singular(0.7), indicator(-0.5, 0.25)):
        lo, hi = support_interval(spec)
        x = rng.uniform(lo - 3, hi + 3, 500)
        vals = eval_synthesizer(spec, x)
        outside = (x < lo) | (x >= hi)
        assert np.all(vals[outside] == 0)


def test_atom_evaluation_and_normalization_exact_case():
    cfg = LatticeConfig(p=0.5, a=2.0, b=1.0)
    atom = Atom(1, 0, indicator(0, 1), cfg)
    # a^(j/p) = 4; support shrinks to [0, 1/2)
    assert eval_atom(atom, 0.25) == pytest.approx(4.0)
    assert eval_atom(atom, 0.75) == 0.0
    g = Grid.over(-1, 2, 2.0 ** -12)
    av = Signal(g, eval_atom(atom, g.points()))
    assert lp_power(av, 0.5) == pytest.approx(1.0, abs=1e-12)


def test_atom_normalization_across_families():
    # quadrature oracle: the atom quasi-norm equals the synthesizer's
    rng = np.random.default_rng(9)
    cfg = LatticeConfig(p=0.5, a=2.0, b=1.0)
    h = 2.0 ** -13
    for spec in (haar(), indicator(0, 1), bspline(2), step_difference()):
        lo, hi = support_interval(spec)
        base_grid = Grid.over(lo - 0.5, hi + 0.5, h)
        base = lp_power(Signal(base_grid, eval_synthesizer(spec, base_grid.points())), cfg.p)
        for _ in range(25):
            j = int(rng.integers(1, 6))
            k = int(rng.integers(-8, 8))
            alo, ahi = atom_support(Atom(j, k, spec, cfg))
            grid = Grid.over(alo - 0.25, ahi + 0.25, h / 2 ** j)
            mass = lp_power(Signal(grid, eval_atom(Atom(j, k, spec, cfg), grid.points())), cfg.p)
            assert mass == pytest.approx(base, rel=5e-3)


def test_atom_support_arithmetic():
    cfg = LatticeConfig(p=0.5, a=2.0, b=1.0)
    atom = Atom(3, 5, haar(), cfg)
    lo, hi = atom_support(atom)
    assert lo == pytest.approx(5 / 8)
    assert hi == pytest.approx(6 / 8)
    x = np.linspace(lo - 0.5, hi + 0.5, 2001)
    vals = eval_atom(atom, x)
    nz = x[np.abs(vals) > 0]
    assert nz.min() >= lo - 1e-12 and nz.max() <= hi + 1e-12


def test_cell_mass_closed_forms():
    assert cell_mass(indicator(0.25, 0.75), 0.5, (0, 1)) == pytest.approx(0.5)
    assert cell_mass(haar(), 0.7, (0, 1)) == pytest.approx(1.0)
    # antiderivative oracle: integral_0^1 x^(-beta p) = 1/(1 - beta p)
    beta, p = 0.5, 0.5
    assert cell_mass(power_singular(beta), p, (0, 1)) == pytest.approx(1 / (1 - beta * p))
    with pytest.raises(NoAnalyticMassError):
        cell_mass(mexican_hat(), 0.5, (0, 1))


def test_cell_mass_vs_quadrature_for_singular():
    beta, p = 0.6, 0.5
    exact = cell_mass(power_singular(beta), p, (0, 1))
    g = Grid.over(0, 1, 2.0 ** -16)
    approx = lp_power(Signal(g, eval_synthesizer(power_singular(beta), g.points())), p)
    assert approx == pytest.approx(exact, rel=2e-3)


def test_power_singular_lp_validation():
    spec = power_singular(1.5)
    spec.check_in_lp(0.5)  # 1.5 < 2 fine
    with pytest.raises(ParameterError):
        spec.check_in_lp(0.8)  # needs beta < 1.25
    with pytest.raises(ParameterError):
        power_singular(-1.0)


def test_mexican_hat_periodization_nontrivial():
    # the hat integrates to zero but its lattice periodization does not
    # vanish: its Fourier coefficients are gaussian-damped but nonzero
    cfg = LatticeConfig(p=0.5)
    cell = Grid.over(0, 1, 1 / 4096)
    P = periodize(mexican_hat(), cfg, 1, cell)
    assert np.max(np.abs(P.values)) > 1e-8


def test_integral_values():
    assert integral(indicator(0, 2)) == pytest.approx(2.0)
    assert integral(haar()) == 0.0
    assert integral(step_difference()) == 0.0
    assert integral(mexican_hat()) == 0.0
    assert integral(power_singular(0.5)) == pytest.approx(2.0)
    assert integral(bspline(3)) == pytest.approx(1.0)


def test_table_family_lookup():
    g = Grid.over(0, 1, 1 / 4)
    sig = Signal(g, np.array([1.0, 2.0, 3.0, 4.0]))
    spec = table(sig)
    assert eval_synthesizer(spec, 0.1) == 1.0
    assert eval_synthesizer(spec, 0.9) == 4.0
    assert eval_synthesizer(spec, 1.1) == 0.0


def test_spec_json_round_trip():
    for spec in (haar(amplitude=1.5), power_singular(0.6), indicator(-1, 2)):
        again = SynthesizerSpec.from_json(spec.to_json())
        assert again.family == spec.family
        x = np.linspace(-2, 3, 101)
        assert np.array_equal(eval_synthesizer(again, x), eval_synthesizer(spec, x))


def test_normalized_indicator_has_unit_integral():
    for b in (0.5, 1.0, 2.0):
        assert integral(normalized_indicator(b)) == pytest.approx(1.0)
