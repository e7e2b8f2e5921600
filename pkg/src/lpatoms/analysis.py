"""Nonlinear analysis operators and quasi-interpolation.

The scale-j analysis of a signal f stretches it radially, integrates it
against the translated analyzer windows, and unstretches the results:

    (T_j f)_k = b * theta_inv( integral Theta f(x) conj(phi(a^j x - b k)) dx )

For p = 1 this is plain linear cell averaging; for p < 1 it is
nonlinear and defined even when f is not locally integrable. The
pointwise sampler U_j replaces the window average by the sample at the
cell origin; the two agree in the small-cell limit for continuous f.

Composing one analysis step with one synthesis step gives the
quasi-interpolant S_j T_j f, whose distance to f tends (as j grows) to
the admissibility defect of the synthesizer times d_p(f, 0).
"""

from __future__ import annotations

import numpy as np

from .dictionary import SynthesizerSpec, as_piecewise, eval_synthesizer, support_interval
from .errors import UnsupportedAnalyzerError
from .numerics import Grid, LatticeConfig, Signal
from .stretch import theta, theta_inv
from .synthesis import CoeffSeq, DEFAULT_OVERSAMPLE, _check_resolution, synthesize_scale

#: cell sample count used to bound sup |P phi| for non-closed-form analyzers
_SUP_GRID = 1024


def sup_periodization_abs(phi: SynthesizerSpec, cfg: LatticeConfig) -> float:
    """sup of the periodization of |phi| over one cell.

    Exact for piecewise-constant analyzers; otherwise the maximum over a
    dense cell grid (built-in analyzers are piecewise smooth).
    """
    pw = as_piecewise(phi)
    b = cfg.b
    if pw is not None:
        breaks, vals = pw
        edges = np.unique(np.concatenate([breaks, np.arange(0.0, b + 1e-9, b)]) % b)
        probe = np.concatenate([edges + 1e-12, edges + b / (2 * _SUP_GRID)])
    else:
        probe = np.linspace(0.0, b, _SUP_GRID, endpoint=False)
    lo, hi = support_interval(phi)
    k_lo = int(np.floor((0.0 - hi) / b)) - 1
    k_hi = int(np.ceil((b - lo) / b)) + 1
    acc = np.zeros(probe.size)
    for k in range(k_lo, k_hi + 1):
        acc += np.abs(eval_synthesizer(phi, probe - b * k))
    val = b * float(acc.max())
    if not np.isfinite(val) or val == 0.0:
        raise UnsupportedAnalyzerError("analyzer has unbounded or trivial periodization")
    return val


def holder_constant(p: float, b: float, sup_pabs_phi: float) -> float:
    """Explicit constant in the local Hoelder continuity estimate of the
    analysis operator: 2^(p(1-p)) p^(-p) b^(p-1) sup|P phi|."""
    return 2.0 ** (p * (1.0 - p)) * p ** (-p) * b ** (p - 1.0) * sup_pabs_phi


def _analyzer_is_cell_indicator(phi: SynthesizerSpec, cfg: LatticeConfig) -> bool:
    """Indicator windows of exactly one translation cell tile the line,
    enabling the O(n) cumulative-sum path."""
    if phi.family != "indicator":
        return False
    lo, hi = phi.params["lo"], phi.params["hi"]
    return abs((hi - lo) - cfg.b) < 1e-12 * cfg.b


def analyze_scale(f: Signal, j: int, phi: SynthesizerSpec, cfg: LatticeConfig) -> CoeffSeq:
    """Scale-j analysis coefficients of f as a level-j CoeffSeq.

    Only shifts whose analyzer window meets the support of f are
    examined; exact zeros are dropped.
    """
    if j < 1:
        raise ValueError(f"scale index must be >= 1, got j={j}")
    if not _bounded_with_bounded_periodization(phi):
        raise UnsupportedAnalyzerError(
            f"analyzer family {phi.family!r} is unbounded; analysis needs "
            "a bounded analyzer with bounded periodization"
        )
    out = CoeffSeq(cfg.p)
    rng = f.support_range()
    if rng is None:
        return out
    xlo, xhi = rng
    aj = cfg.a ** j
    lo, hi = support_interval(phi)
    k_lo = int(np.floor((aj * xlo - hi) / cfg.b)) + 1
    k_hi = int(np.ceil((aj * xhi - lo) / cfg.b)) - 1
    g = f.grid
    tf = theta(f.values, cfg.p)
    if _analyzer_is_cell_indicator(phi, cfg):
        amp = np.conj(phi.amplitude)
        ks = np.arange(k_lo, k_hi + 1, dtype=np.int64)
        edges = (phi.params["lo"] + cfg.b * np.arange(k_lo, k_hi + 2, dtype=float)) / aj
        idx = np.ceil((edges - g.x0) / g.h - 1e-9).astype(np.int64)
        idx = np.clip(idx, 0, g.n)
        cs = np.concatenate([[0.0], np.cumsum(tf)]) if not np.iscomplexobj(tf) \
            else np.concatenate([[0.0 + 0.0j], np.cumsum(tf)])
        sums = (cs[idx[1:]] - cs[idx[:-1]]) * (g.h * amp)
    else:
        ks = np.arange(k_lo, k_hi + 1, dtype=np.int64)
        sums = np.zeros(ks.size, dtype=complex if np.iscomplexobj(tf) or not _is_real_analyzer(phi) else float)
        x = g.points()
        for m, k in enumerate(ks.tolist()):
            wlo = (lo + cfg.b * k) / aj
            whi = (hi + cfg.b * k) / aj
            i0 = max(0, int(np.ceil((wlo - g.x0) / g.h - 1e-9)))
            i1 = min(g.n, int(np.ceil((whi - g.x0) / g.h - 1e-9)))
            if i1 <= i0:
                continue
            w = np.conj(eval_synthesizer(phi, aj * x[i0:i1] - cfg.b * k))
            sums[m] = g.h * np.sum(tf[i0:i1] * w)
    coeffs = cfg.b * theta_inv(sums, cfg.p)
    out.set_level(j, ks, np.asarray(coeffs, dtype=complex), accumulate=False)
    return out


def _is_real_analyzer(phi: SynthesizerSpec) -> bool:
    from .dictionary import is_real

    return is_real(phi)


def _bounded_with_bounded_periodization(phi: SynthesizerSpec) -> bool:
    from .dictionary import is_bounded

    return is_bounded(phi)


def sample_pointwise(f: Signal, j: int, cfg: LatticeConfig) -> CoeffSeq:
    """Pointwise sampler:  (U_j f)_k = a^(-j/p) * b * f(a^(-j) b k),
    with nearest-grid-point lookup."""
    out = CoeffSeq(cfg.p)
    g = f.grid
    aj = cfg.a ** j
    k_lo = int(np.ceil(g.x0 * aj / cfg.b - 1e-9))
    k_hi = int(np.floor((g.hi - g.h) * aj / cfg.b + 1e-9))
    if k_hi < k_lo:
        return out
    ks = np.arange(k_lo, k_hi + 1, dtype=np.int64)
    idx = np.round((ks * cfg.b / aj - g.x0) / g.h).astype(np.int64)
    idx = np.clip(idx, 0, g.n - 1)
    vals = aj ** (-1.0 / cfg.p) * cfg.b * f.values[idx]
    out.set_level(j, ks, np.asarray(vals, dtype=complex), accumulate=False)
    return out


def analysis_metric(f: Signal, jmax: int, phi: SynthesizerSpec, cfg: LatticeConfig,
                    oversample: int = DEFAULT_OVERSAMPLE) -> float:
    """max over j = 1..jmax of the l^p quasi-norm of T_j f."""
    from .synthesis import coeff_lp_power

    _check_resolution(f.grid, cfg, jmax, oversample)
    best = 0.0
    for j in range(1, jmax + 1):
        c = analyze_scale(f, j, phi, cfg)
        best = max(best, coeff_lp_power(c) ** (1.0 / cfg.p))
    return best


def quasi_interp(f: Signal, j: int, psi: SynthesizerSpec, phi: SynthesizerSpec,
                 cfg: LatticeConfig, oversample: int = DEFAULT_OVERSAMPLE) -> Signal:
    """One-scale reconstruction S_j T_j f on the grid of f."""
    c = analyze_scale(f, j, phi, cfg)
    return synthesize_scale(c, j, psi, cfg, f.grid, oversample=oversample)
