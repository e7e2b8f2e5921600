"""Coefficient sequences and the affine synthesis operators.

CoeffSeq models a finitely supported doubly-indexed sequence c_{j,k}
(j >= 1 a scale, k an integer shift). Internally each scale holds a
sorted integer shift array plus a value array, so million-entry
sequences from deep decompositions stay cheap; the mapping API treats
it as a sparse map from (j, k) to complex.

The synthesis operator sums c_{j,k} * a^(j/p) psi(a^j x - b k) over the
nonzero entries. A grid that cannot resolve the finest requested scale
raises instead of aliasing. When the shift lattice at a scale lands
exactly on grid points (the usual dyadic situation) all atoms of that
scale share one sampled profile and are scattered in vectorized form;
otherwise each atom is evaluated directly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dictionary import SynthesizerSpec, eval_synthesizer, support_interval
from .errors import ParameterError, ResolutionError
from .numerics import Grid, LatticeConfig, Signal, _unchecked

#: minimum number of grid points per translation cell b * a^(-j)
DEFAULT_OVERSAMPLE = 8


class CoeffSeq:
    """Sparse doubly-indexed coefficient sequence with l^p quasi-norm."""

    def __init__(self, p: float, entries=None):
        if not (0.0 < p <= 1.0):
            raise ParameterError(f"p must lie in (0, 1], got {p}")
        self.p = p
        self._levels: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        if entries:
            for (j, k), v in (entries.items() if isinstance(entries, dict) else entries):
                self.add(j, k, v)

    # -- construction ------------------------------------------------------
    def add(self, j: int, k: int, value):
        """Accumulate ``value`` at (j, k); repeated keys sum."""
        if j < 1:
            raise ParameterError(f"scale index must be >= 1, got j={j}")
        self.set_level(j, np.array([k]), np.array([value], dtype=complex), accumulate=True)

    def set_level(self, j: int, ks: np.ndarray, values: np.ndarray, accumulate: bool = True):
        """Install a whole scale-j slice in one shot (vectorized)."""
        ks = np.asarray(ks, dtype=np.int64)
        values = np.asarray(values, dtype=complex)
        keep = values != 0
        ks, values = ks[keep], values[keep]
        if ks.size == 0:
            return
        if j in self._levels and accumulate:
            k0, v0 = self._levels[j]
            ks = np.concatenate([k0, ks])
            values = np.concatenate([v0, values])
        if ks.size > 1 and np.all(np.diff(ks) > 0):
            uk, uv = ks, values
        else:
            uk, inv = np.unique(ks, return_inverse=True)
            uv = np.zeros(uk.size, dtype=complex)
            np.add.at(uv, inv, values)
        keep = uv != 0
        if np.any(keep):
            self._levels[j] = (uk[keep], uv[keep])
        else:
            self._levels.pop(j, None)

    def scaled(self, factor) -> "CoeffSeq":
        out = CoeffSeq(self.p)
        for j, (ks, vs) in self._levels.items():
            out._levels[j] = (ks.copy(), vs * factor)
        return out

    def merge(self, other: "CoeffSeq"):
        """Accumulate all entries of ``other`` into this sequence."""
        for j, (ks, vs) in other._levels.items():
            self.set_level(j, ks, vs, accumulate=True)

    def remap_shifts(self, multiplier: int) -> "CoeffSeq":
        """Entry at (j, k) moves to (j, multiplier * k); quasi-norm unchanged."""
        out = CoeffSeq(self.p)
        for j, (ks, vs) in self._levels.items():
            out._levels[j] = (ks * multiplier, vs.copy())
        return out

    # -- access ------------------------------------------------------------
    def levels(self):
        return sorted(self._levels)

    def level_arrays(self, j: int):
        """(shift array, value array) of scale j; empty arrays if absent."""
        if j not in self._levels:
            return np.array([], dtype=np.int64), np.array([], dtype=complex)
        ks, vs = self._levels[j]
        return ks, vs

    def restrict_level(self, j: int) -> "CoeffSeq":
        out = CoeffSeq(self.p)
        if j in self._levels:
            ks, vs = self._levels[j]
            out._levels[j] = (ks.copy(), vs.copy())
        return out

    def get(self, j: int, k: int) -> complex:
        ks, vs = self.level_arrays(j)
        i = np.searchsorted(ks, k)
        if i < ks.size and ks[i] == k:
            return complex(vs[i])
        return 0.0

    def items(self):
        for j in self.levels():
            ks, vs = self._levels[j]
            for k, v in zip(ks.tolist(), vs.tolist()):
                yield (j, k), v

    def __len__(self):
        return sum(ks.size for ks, _ in self._levels.values())

    def __eq__(self, other):
        if not isinstance(other, CoeffSeq):
            return NotImplemented
        if self.levels() != other.levels():
            return False
        return all(
            np.array_equal(self._levels[j][0], other._levels[j][0])
            and np.array_equal(self._levels[j][1], other._levels[j][1])
            for j in self.levels()
        )

    def max_level(self):
        return max(self._levels) if self._levels else None

    # -- serialization -----------------------------------------------------
    def to_jsonl(self) -> str:
        """One JSON object per nonzero entry, sorted by (j, k)."""
        lines = []
        for (j, k), v in self.items():
            lines.append(json.dumps({"j": int(j), "k": int(k), "re": v.real, "im": v.imag}))
        return "\n".join(lines) + ("\n" if lines else "")

    @staticmethod
    def from_jsonl(text: str, p: float) -> "CoeffSeq":
        out = CoeffSeq(p)
        js, ks, res, ims = [], [], [], []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            js.append(obj["j"]); ks.append(obj["k"])
            res.append(obj["re"]); ims.append(obj["im"])
        js = np.asarray(js, dtype=np.int64)
        vals = np.asarray(res, dtype=float) + 1j * np.asarray(ims, dtype=float)
        ks = np.asarray(ks, dtype=np.int64)
        for j in np.unique(js):
            sel = js == j
            out.set_level(int(j), ks[sel], vals[sel])
        return out


def coeff_lp_power(c: CoeffSeq) -> float:
    """sum |c_{j,k}|^p: the l^p quasi-norm raised to the p-th power."""
    total = 0.0
    for j in c.levels():
        _, vs = c.level_arrays(j)
        total += float(np.sum(np.abs(vs) ** c.p))
    return total


def coeff_lp_norm(c: CoeffSeq) -> float:
    return coeff_lp_power(c) ** (1.0 / c.p)


# ---------------------------------------------------------------------------
# synthesis

def max_resolved_scale(grid: Grid, cfg: LatticeConfig, oversample: int = DEFAULT_OVERSAMPLE) -> int:
    """Largest j whose translation cell b * a^(-j) spans >= oversample points."""
    jmax = int(np.floor(np.log(cfg.b / (oversample * grid.h)) / np.log(cfg.a)))
    return jmax


def _check_resolution(grid: Grid, cfg: LatticeConfig, j: int, oversample: int):
    if cfg.b * cfg.a ** (-j) < oversample * grid.h * (1.0 - 1e-12):
        raise ResolutionError(
            f"scale j={j} needs h <= {cfg.b * cfg.a ** (-j) / oversample:.3e} "
            f"(oversample {oversample}), grid has h={grid.h:.3e}"
        )


def _needs_complex(c: CoeffSeq, psi: SynthesizerSpec, levels) -> bool:
    if np.imag(psi.amplitude) != 0:
        return True
    if psi.family == "table" and np.iscomplexobj(psi.params["signal"].values):
        return True
    for j in levels:
        _, vs = c.level_arrays(j)
        if vs.size and np.max(np.abs(vs.imag)) > 0:
            return True
    return False


def synthesize(c: CoeffSeq, psi: SynthesizerSpec, cfg: LatticeConfig, out_grid: Grid,
               oversample: int = DEFAULT_OVERSAMPLE) -> Signal:
    """Evaluate Sc = sum c_{j,k} psi_{j,k} on ``out_grid``."""
    psi.check_in_lp(cfg.p)
    jmax = c.max_level()
    if jmax is not None:
        _check_resolution(out_grid, cfg, jmax, oversample)
    use_complex = _needs_complex(c, psi, c.levels())
    out = np.zeros(out_grid.n, dtype=complex if use_complex else float)
    for j in c.levels():
        ks, vs = c.level_arrays(j)
        if not use_complex:
            vs = vs.real
        _add_scale(out, out_grid, psi, cfg, j, ks, vs)
    return _unchecked(out_grid, out)


def synthesize_scale(s: CoeffSeq, j: int, psi: SynthesizerSpec, cfg: LatticeConfig,
                     out_grid: Grid, oversample: int = DEFAULT_OVERSAMPLE) -> Signal:
    """S_j s = sum_k s_k psi_{j,k}; ``s`` may hold other scales, which
    are ignored."""
    psi.check_in_lp(cfg.p)
    _check_resolution(out_grid, cfg, j, oversample)
    ks, vs = s.level_arrays(j)
    use_complex = _needs_complex(s, psi, [j])
    out = np.zeros(out_grid.n, dtype=complex if use_complex else float)
    if not use_complex:
        vs = vs.real
    _add_scale(out, out_grid, psi, cfg, j, ks, vs)
    return _unchecked(out_grid, out)


def _add_scale(out: np.ndarray, grid: Grid, psi: SynthesizerSpec, cfg: LatticeConfig,
               j: int, ks: np.ndarray, vs: np.ndarray):
    if ks.size == 0:
        return
    aj = cfg.a ** j
    norm = aj ** (1.0 / cfg.p)
    lo, hi = support_interval(psi)
    stride = cfg.b / (aj * grid.h)
    start = (lo / aj - grid.x0) / grid.h  # fractional grid index of atom k=0 start
    aligned = abs(stride - round(stride)) < 1e-9 and abs(start - round(start)) < 1e-6
    if aligned and ks.size > 1:
        _add_scale_aligned(out, grid, psi, cfg, j, ks, vs, norm, int(round(stride)))
    else:
        x = None
        for k, v in zip(ks.tolist(), vs.tolist()):
            alo = (lo + cfg.b * k) / aj
            ahi = (hi + cfg.b * k) / aj
            i0 = max(0, int(np.ceil((alo - grid.x0) / grid.h - 1e-9)))
            i1 = min(grid.n, int(np.ceil((ahi - grid.x0) / grid.h - 1e-9)))
            if i1 <= i0:
                continue
            if x is None:
                x = grid.points()
            out[i0:i1] += (v * norm) * eval_synthesizer(psi, aj * x[i0:i1] - cfg.b * k)


def _add_scale_aligned(out: np.ndarray, grid: Grid, psi: SynthesizerSpec, cfg: LatticeConfig,
                       j: int, ks: np.ndarray, vs: np.ndarray, norm: float, stride: int):
    """All atoms of the scale share one sampled profile; scatter-add it."""
    aj = cfg.a ** j
    lo, hi = support_interval(psi)
    base = (lo + cfg.b * ks.astype(float)) / aj
    i0 = np.round((base - grid.x0) / grid.h).astype(np.int64)
    width = int(round((hi - lo) / (aj * grid.h)))
    width = max(width, 1)
    rel = grid.x0 + (i0[0] + np.arange(width)) * grid.h
    profile = norm * eval_synthesizer(psi, aj * rel - cfg.b * ks[0])
    if np.iscomplexobj(profile) and not np.iscomplexobj(out):
        profile = profile.real
    interior = (i0 >= 0) & (i0 + width <= grid.n)
    if np.any(interior):
        idx = i0[interior, None] + np.arange(width)[None, :]
        np.add.at(out, idx.ravel(), (vs[interior, None] * profile[None, :]).ravel())
    # boundary atoms: clip the overhang
    for m in np.nonzero(~interior)[0]:
        a = i0[m]
        lo_i, hi_i = max(0, a), min(grid.n, a + width)
        if hi_i <= lo_i:
            continue
        out[lo_i:hi_i] += vs[m] * profile[lo_i - a: hi_i - a]
