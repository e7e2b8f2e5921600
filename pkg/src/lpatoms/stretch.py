"""The radial stretch z -> |z|^(p-1) z and its continuity estimates.

The stretch turns an L^p signal (possibly not locally integrable) into
an L^1 one before analysis and is undone afterwards. Its modulus map is
|z| -> |z|^p, the argument is preserved, and the inverse is the same
map with exponent 1/p. Both continuity inequalities used downstream are
exposed as executable checks with a small additive slack, since they
are tight at isolated points.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError

#: additive slack absorbing rounding in the inequality checks
LEMMA_SLACK = 1e-12


def _check_p(p: float):
    if not (0.0 < p <= 1.0):
        raise ParameterError(f"p must lie in (0, 1], got {p}")


def theta(z, p: float):
    """Radial stretch |z|^(p-1) z; maps 0 to 0 by continuity.

    Accepts scalars or arrays, real or complex; real input stays real.
    """
    _check_p(p)
    z = np.asarray(z)
    r = np.abs(z)
    if np.iscomplexobj(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(r > 0, r ** (p - 1.0) * z, 0.0 + 0.0j)
    else:
        out = np.sign(z) * r ** p
    return out if out.ndim else out[()]

def theta_inv(w, p: float):
    """Inverse stretch: the radial map with exponent 1/p."""
    _check_p(p)
    w = np.asarray(w)
    r = np.abs(w)
    q = 1.0 / p
    if np.iscomplexobj(w):
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(r > 0, r ** (q - 1.0) * w, 0.0 + 0.0j)
    else:
        out = np.sign(w) * r ** q
    return out if out.ndim else out[()]


def holder_bound(w, z, p: float):
    """Right-hand side 2^(1-p) |w-z|^p of the stretch modulus estimate."""
    return 2.0 ** (1.0 - p) * np.abs(np.asarray(w) - np.asarray(z)) ** p


def check_holder_lemma(w, z, p: float):
    """Does |theta(w) - theta(z)| <= 2^(1-p) |w-z|^p hold (with slack)?

    Vectorized: array inputs give an array of booleans.
    """
    lhs = np.abs(theta(w, p) - theta(z, p))
    ok = lhs <= holder_bound(w, z, p) + LEMMA_SLACK
    return bool(ok) if np.ndim(ok) == 0 else ok


def lipschitz_bound(w, z, p: float):
    """Right side (1/p) |w-z| max(|w|,|z|)^((1-p)/p) of the inverse estimate."""
    w = np.asarray(w)
    z = np.asarray(z)
    return (1.0 / p) * np.abs(w - z) * np.maximum(np.abs(w), np.abs(z)) ** ((1.0 - p) / p)


def check_lipschitz_lemma(w, z, p: float):
    """Does the local Lipschitz estimate for the inverse stretch hold?"""
    lhs = np.abs(theta_inv(w, p) - theta_inv(z, p))
    ok = lhs <= lipschitz_bound(w, z, p) + LEMMA_SLACK
    return bool(ok) if np.ndim(ok) == 0 else ok
