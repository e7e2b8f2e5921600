import numpy as np
import pytest

from lpatoms.stretch import (
    check_holder_lemma,
    check_lipschitz_lemma,
    theta,
    theta_inv,
)


def test_theta_fixed_points_and_identity():
    for p in (0.3, 0.5, 1.0):
        assert theta(0.0, p) == 0.0
        assert theta(0.0 + 0.0j, p) == 0.0
    z = 1.3 - 0.7j
    assert theta(z, 1.0) == pytest.approx(z)


def test_theta_real_values():
    assert theta(4.0, 0.5) == pytest.approx(2.0)
    assert theta(-4.0, 0.5) == pytest.approx(-2.0)
    assert theta_inv(2.0, 0.5) == pytest.approx(4.0)
    assert theta_inv(0.0, 0.5) == 0.0


def test_theta_modulus_and_argument():
    rng = np.random.default_rng(3)
    z = rng.standard_normal(200) + 1j * rng.standard_normal(200)
    for p in (0.3, 0.5, 0.9):
        w = theta(z, p)
        assert np.allclose(np.abs(w), np.abs(z) ** p, rtol=1e-13)
        assert np.allclose(np.angle(w), np.angle(z), atol=1e-13)


def test_theta_is_odd_and_monotone_in_modulus():
    rng = np.random.default_rng(5)
    z = rng.standard_normal(100) + 1j * rng.standard_normal(100)
    for p in (0.25, 0.6, 1.0):
        assert np.array_equal(theta(-z, p), -theta(z, p))
        r = np.sort(np.abs(rng.standard_normal(50)))
        m = np.abs(theta(r, p))
        assert np.all(np.diff(m) > 0)


def test_round_trip_accuracy():
    rng = np.random.default_rng(11)
    z = rng.standard_normal(10_000) + 1j * rng.standard_normal(10_000)
    for p in (0.3, 0.5, 0.9):
        back = theta_inv(theta(z, p), p)
        assert np.max(np.abs(back - z) / np.abs(z)) < 1e-12


def test_holder_equality_case():
    # at p = 1/2 the pair (1, -1) saturates: |theta(1)-theta(-1)| = 2 = 2^(1/2) * 2^(1/2)
    assert check_holder_lemma(1.0, -1.0, 0.5)
    assert abs(theta(1.0, 0.5) - theta(-1.0, 0.5)) == pytest.approx(
        2.0 ** 0.5 * abs(1.0 - (-1.0)) ** 0.5
    )


def test_lipschitz_simple_case():
    # p = 1/2, w = 1, z = 0: |theta_inv(1)| = 1 <= 2 * 1 * 1
    assert check_lipschitz_lemma(1.0, 0.0, 0.5)


def test_lemmas_on_random_pairs():
    rng = np.random.default_rng(17)
    n = 100_000
    w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    for p in (0.25, 0.5, 0.75, 1.0):
        assert np.all(check_holder_lemma(w, z, p))
        assert np.all(check_lipschitz_lemma(w, z, p))


def test_lemmas_trivial_pairs():
    for p in (0.25, 1.0):
        assert check_holder_lemma(0.7 + 0.1j, 0.7 + 0.1j, p)
        assert check_lipschitz_lemma(-2.0, -2.0, p)
