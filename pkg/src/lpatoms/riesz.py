"""Single-scale stability: piece systems, lower Riesz constants,
injectivity scans and empirical two-sided bounds.

At a fixed scale the translates psi_{j,k} form a p-Riesz basis for
their span exactly when the cell pieces of psi are linearly independent
in a quantified way and no modulated periodization vanishes. Both
ingredients are made executable here: the lower constant is estimated
by multi-start minimization on the l^p unit sphere of the piece
coefficients (an upper estimate of the true minimum, reported as such),
and injectivity is probed through the decay pattern of the Fourier
transform along the dual lattice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .dictionary import (
    SynthesizerSpec,
    cell_mass,
    eval_synthesizer,
    has_compact_support,
    support_interval,
)
from .errors import NoAnalyticMassError, UnsupportedSynthesizerError
from .numerics import Grid, LatticeConfig, Signal, _unchecked, lp_power
from .synthesis import CoeffSeq, coeff_lp_power, synthesize_scale

#: relative singular-value threshold declaring a piece dependent
RANK_TOL = 1e-8
#: default cell sample count for piece systems
PIECE_GRID = 4096
#: detection threshold for the injectivity scan
INJECTIVITY_TOL = 1e-6


@dataclass
class PieceSystem:
    """Cell-restricted translates of a compactly supported synthesizer.

    pieces[l] holds the samples of psi on [b*l, b*(l+1)) translated back
    to the cell [0, b). The independent subset M spans all pieces with
    coefficient matrix T (identity rows on M), certified by the singular
    values of the selected sample matrix.
    """

    cell: Grid
    pieces: np.ndarray                 # (L, n) samples
    M: list                            # indices of the independent pieces
    T: np.ndarray                      # (L, |M|) representation coefficients
    singular_values: np.ndarray = field(default_factory=lambda: np.array([]))

    @property
    def L(self) -> int:
        return self.pieces.shape[0]

    def combination(self, v) -> np.ndarray:
        """Cell samples of sum_m v_m psi^(m) for coefficients on M."""
        return np.tensordot(np.asarray(v), self.pieces[self.M], axes=(0, 0))

    def to_json(self) -> str:
        import json

        return json.dumps({
            "cell": {"x0": self.cell.x0, "h": self.cell.h, "n": self.cell.n},
            "independent": [int(m) for m in self.M],
            "T_re": np.real(self.T).tolist(),
            "T_im": np.imag(self.T).tolist(),
            "singular_values": [float(s) for s in self.singular_values],
        }, sort_keys=True)


def split_pieces(psi: SynthesizerSpec, cfg: LatticeConfig,
                 cell_points: int = PIECE_GRID) -> PieceSystem:
    """Cut psi into cell pieces and select a maximal independent set.

    Greedy in the shift order: a piece is dependent when its least
    squares representation in the already-selected pieces leaves a
    relative residual below the rank threshold.
    """
    if not has_compact_support(psi):
        raise UnsupportedSynthesizerError("piece systems need compact support")
    lo, hi = support_interval(psi)
    if lo < -1e-12:
        raise UnsupportedSynthesizerError(
            "piece systems assume support in [0, L*b); shift the synthesizer"
        )
    b = cfg.b
    L = max(1, int(np.ceil(hi / b - 1e-12)))
    cell = Grid(0.0, b / cell_points, cell_points)
    x = cell.points()
    pieces = np.stack([eval_synthesizer(psi, x + b * ell) for ell in range(L)])
    scale = float(np.max(np.abs(pieces)))
    if scale == 0.0:
        raise UnsupportedSynthesizerError("synthesizer vanishes on its support")

    M: list[int] = []
    rows = []
    for ell in range(L):
        piece = pieces[ell]
        if np.max(np.abs(piece)) <= RANK_TOL * scale:
            rows.append(np.zeros(0))
            continue
        if M:
            basis = pieces[M].T
            coef, *_ = np.linalg.lstsq(basis, piece, rcond=None)
            resid = piece - basis @ coef
            if np.linalg.norm(resid) <= RANK_TOL * np.linalg.norm(piece):
                rows.append(coef)
                continue
        M.append(ell)
        rows.append(None)  # identity row, filled below
    T = np.zeros((L, len(M)), dtype=pieces.dtype if np.iscomplexobj(pieces) else float)
    for ell, coef in enumerate(rows):
        if coef is None:
            T[ell, M.index(ell)] = 1.0
        elif coef.size:
            T[ell, : coef.size] = coef
    svals = np.linalg.svd(pieces[M].T, compute_uv=False) if M else np.array([])
    system = PieceSystem(cell=cell, pieces=pieces, M=M, T=T, singular_values=svals)
    _verify_reconstruction(psi, cfg, system)
    return system


def _verify_reconstruction(psi, cfg, system: PieceSystem):
    """Summing the translated pieces must reproduce psi at cell points."""
    b = cfg.b
    x = system.cell.points()
    for ell in range(system.L):
        direct = eval_synthesizer(psi, x + b * ell)
        if np.max(np.abs(direct - system.pieces[ell])) > 1e-12 * max(1.0, np.max(np.abs(direct))):
            raise AssertionError("piece reconstruction identity violated")


def cell_norm_power(system: PieceSystem, v, p: float) -> float:
    """d_p mass over the cell of the piece combination given by v."""
    w = system.combination(v)
    return float(system.cell.h * np.sum(np.abs(w) ** p))


def _sphere_normalize(v, p: float):
    mass = np.sum(np.abs(v) ** p)
    return v / mass ** (1.0 / p)


def lower_riesz_constant(system: PieceSystem, p: float, restarts: int = 64,
                         seed: int = 0) -> float:
    """Estimated minimum of the combination quasi-norm on the l^p unit
    sphere of piece coefficients.

    Multi-start coordinate descent with magnitude and phase moves,
    re-projecting onto the sphere after every move. The result is an
    upper estimate of the true minimum (global optimality is not
    certified); single-piece systems are exact.
    """
    nm = len(system.M)
    if nm == 0:
        raise UnsupportedSynthesizerError("no independent pieces")
    if nm == 1:
        return cell_norm_power(system, np.ones(1), p) ** (1.0 / p)

    rng = np.random.default_rng(seed)

    def objective(v):
        return cell_norm_power(system, v, p)

    best_val = np.inf
    starts = [np.ones(nm, dtype=complex)]
    starts += [e for e in np.eye(nm, dtype=complex)]
    while len(starts) < restarts:
        starts.append(rng.standard_normal(nm) + 1j * rng.standard_normal(nm))
    for v0 in starts[:restarts]:
        v = _sphere_normalize(np.asarray(v0, dtype=complex), p)
        val = objective(v)
        step = 0.5
        for _ in range(200):
            improved = False
            for m in range(nm):
                base = v[m]
                cands = [base * (1.0 + step), base * (1.0 - step),
                         base * np.exp(1j * step), base * np.exp(-1j * step),
                         base + step, base - step]
                for cand in cands:
                    trial = v.copy()
                    trial[m] = cand
                    trial = _sphere_normalize(trial, p)
                    tval = objective(trial)
                    if tval < val - 1e-15:
                        v, val = trial, tval
                        improved = True
            if not improved:
                step *= 0.5
                if step < 1e-5:
                    break
        best_val = min(best_val, val)
    return best_val ** (1.0 / p)


class InjectivityScan(NamedTuple):
    ok: bool
    worst_xi: float
    worst_value: float


def fourier_transform(psi: SynthesizerSpec, freqs, samples: int = 1 << 14):
    """psi_hat(nu) = integral psi(x) exp(-2 pi i nu x) dx by quadrature
    on the support."""
    lo, hi = support_interval(psi)
    h = (hi - lo) / samples
    x = lo + h * np.arange(samples)
    vals = eval_synthesizer(psi, x)
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    phase = np.exp(-2j * np.pi * freqs[:, None] * x[None, :])
    return h * (phase @ vals)


def injectivity_scan(psi: SynthesizerSpec, cfg: LatticeConfig,
                     xi_count: int = 64, ell_max: int = 8) -> InjectivityScan:
    """Probe whether every modulated periodization is nontrivial.

    For each xi in a uniform grid over one dual cell [0, 1/b), the scan
    takes the largest |psi_hat| along the shifted dual lattice
    ell/b - xi, |ell| <= ell_max; these are the Fourier coefficients of
    the modulated periodization. A minimum below the threshold flags a
    (near-)kernel direction at the reported xi.
    """
    b = cfg.b
    xis = np.arange(xi_count) / (xi_count * b)
    ells = np.arange(-ell_max, ell_max + 1)
    freqs = (ells[None, :] / b) - xis[:, None]
    ft = fourier_transform(psi, freqs.ravel()).reshape(freqs.shape)
    energy = np.max(np.abs(ft), axis=1)
    i = int(np.argmin(energy))
    return InjectivityScan(bool(energy[i] > INJECTIVITY_TOL), float(xis[i]), float(energy[i]))


def modulated_sequence(xi: float, width: int, cfg: LatticeConfig, j: int) -> CoeffSeq:
    """Truncated modulated shifts s_k = exp(2 pi i xi b k), k < width:
    the near-kernel witness when the scan fails at xi."""
    ks = np.arange(width, dtype=np.int64)
    vals = np.exp(2j * np.pi * xi * cfg.b * ks)
    if xi == 0.0:
        vals = np.ones(width)
    out = CoeffSeq(cfg.p)
    out.set_level(j, ks, vals.astype(complex), accumulate=False)
    return out


def scale_ratio(s: CoeffSeq, j: int, psi: SynthesizerSpec, cfg: LatticeConfig,
                oversample: int = 8) -> float:
    """||S_j s||_p / ||s||_{l^p} on a grid sized to the atoms involved."""
    ks, _ = s.level_arrays(j)
    lo, hi = support_interval(psi)
    aj = cfg.a ** j
    glo = (lo + cfg.b * ks.min()) / aj
    ghi = (hi + cfg.b * ks.max()) / aj
    h = cfg.b / (aj * oversample)
    grid = Grid.over(glo, ghi, h)
    sig = synthesize_scale(s, j, psi, cfg, grid, oversample=oversample)
    return lp_power(sig, cfg.p) ** (1.0 / cfg.p) / coeff_lp_power(s) ** (1.0 / cfg.p)


def empirical_riesz_bounds(psi: SynthesizerSpec, cfg: LatticeConfig, j: int,
                           trials: int = 200, seed: int = 0,
                           width_max: int = 32, oversample: int = 8):
    """(ratio_min, ratio_max) of ||S_j s||_p / ||s||_{l^p} over random
    finitely supported complex Gaussian sequences."""
    rng = np.random.default_rng(seed)
    lo_ratio, hi_ratio = np.inf, 0.0
    for _ in range(trials):
        w = int(rng.integers(1, width_max + 1))
        vals = (rng.standard_normal(w) + 1j * rng.standard_normal(w)) / np.sqrt(2.0)
        s = CoeffSeq(cfg.p)
        s.set_level(j, np.arange(w, dtype=np.int64), vals, accumulate=False)
        r = scale_ratio(s, j, psi, cfg, oversample=oversample)
        lo_ratio = min(lo_ratio, r)
        hi_ratio = max(hi_ratio, r)
    return lo_ratio, hi_ratio


def quasi_norm_power(psi: SynthesizerSpec, p: float, samples: int = 1 << 16) -> float:
    """||psi||_p^p, exact for families with closed cell mass, otherwise
    by fine-grid quadrature on the support."""
    lo, hi = support_interval(psi)
    try:
        return cell_mass(psi, p, (lo, hi))
    except NoAnalyticMassError:
        h = (hi - lo) / samples
        x = lo + h * np.arange(samples)
        return float(h * np.sum(np.abs(eval_synthesizer(psi, x)) ** p))


def jia_energy_scan(system: PieceSystem, xi_count: int = 256):
    """Minimum over the dual cell of sum_m |tau_m(xi)|^2, where tau_m is
    the trigonometric polynomial of representation coefficients.

    Positivity of this minimum is the quantitative independence
    diagnostic behind the lower Riesz bound; a (near-)zero signals a
    kernel direction."""
    xis = np.arange(xi_count) / xi_count
    ells = np.arange(system.T.shape[0])
    phases = np.exp(2j * np.pi * xis[:, None] * ells[None, :])
    taus = phases @ system.T          # (xi_count, |M|)
    energy = np.sum(np.abs(taus) ** 2, axis=1)
    i = int(np.argmin(energy))
    return float(energy[i]), float(xis[i])
