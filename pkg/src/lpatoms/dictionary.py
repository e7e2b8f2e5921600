"""Closed-form synthesizer/analyzer families and normalized atoms.

A SynthesizerSpec is a pointwise-evaluable description of a generating
function psi together with the metadata the admissibility machinery
needs: support, integrability, boundedness, sign, and (when available)
an exact piecewise-constant representation. The atom at scale j and
shift k is  a^(j/p) * psi(a^j x - b k),  normalized so its quasi-norm
equals that of psi for every (j, k).

Families
--------
indicator(lo, hi)        amp * 1_[lo, hi)
haar                     amp on [0, 1/2), -amp on [1/2, 1)
step_difference          amp on [0, 1), -amp on [1, 2)
second_difference        eta(x+1) - 2 eta(x) + eta(x-1), eta an inner profile
bspline(order)           cardinal B-spline on knots 0..order+1 (partition of unity)
power_singular(beta)     amp * x^(-beta) on (0, 1); needs beta < 1/p to lie in L^p
mexican_hat              amp * (1 - x^2) exp(-x^2/2), truncated to |x| <= 12
table(signal)            sample-and-hold lookup of an arbitrary grid signal
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import BSpline

from .errors import (
    NoAnalyticMassError,
    ParameterError,
    UnsupportedSynthesizerError,
)
from .numerics import Grid, LatticeConfig, Signal

#: |x| beyond which the Mexican hat is treated as zero (tail < 1e-12)
MEXICAN_HAT_CUTOFF = 12.0

_FAMILIES = (
    "indicator",
    "haar",
    "step_difference",
    "second_difference",
    "bspline",
    "power_singular",
    "mexican_hat",
    "table",
)


@dataclass(frozen=True)
class SynthesizerSpec:
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}")
        _validate_params(self.family, self.params)

    @property
    def amplitude(self) -> complex:
        amp = self.params.get("amplitude", 1.0)
        return complex(amp) if isinstance(amp, complex) else float(amp)

    def scaled(self, factor) -> "SynthesizerSpec":
        """Same shape with the amplitude multiplied by ``factor``."""
        params = dict(self.params)
        params["amplitude"] = self.amplitude * factor
        return replace(self, params=params)

    def check_in_lp(self, p: float):
        """Raise unless the family lies in L^p for this exponent."""
        if self.family == "power_singular" and not (self.params["beta"] < 1.0 / p):
            raise ParameterError(
                f"power_singular needs beta < 1/p; got beta={self.params['beta']}, p={p}"
            )

    def to_json(self) -> str:
        lo, hi = support_interval(self)
        support = "decay" if self.family == "mexican_hat" else [lo, hi]
        params = {k: v for k, v in self.params.items() if k != "signal"}
        if "signal" in self.params:
            sig = self.params["signal"]
            params["signal"] = {
                "x0": sig.grid.x0,
                "h": sig.grid.h,
                "re": [float(v) for v in np.real(sig.values)],
                "im": [float(v) for v in np.imag(sig.values)],
            }
        return json.dumps(
            {"family": self.family, "params": params, "support": support},
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "SynthesizerSpec":
        obj = json.loads(text)
        params = dict(obj.get("params", {}))
        if "signal" in params:
            raw = params["signal"]
            vals = np.asarray(raw["re"], dtype=float) + 1j * np.asarray(raw["im"], dtype=float)
            if np.max(np.abs(vals.imag), initial=0.0) == 0.0:
                vals = vals.real
            params["signal"] = Signal(Grid(raw["x0"], raw["h"], len(vals)), vals)
        return SynthesizerSpec(obj["family"], params)


def _validate_params(family: str, params: dict):
    if family == "indicator":
        lo = params.setdefault("lo", 0.0)
        hi = params.setdefault("hi", 1.0)
        if not (hi > lo):
            raise ParameterError(f"indicator needs hi > lo, got [{lo}, {hi})")
    elif family == "bspline":
        order = params.setdefault("order", 1)
        if order < 0:
            raise ParameterError("bspline order must be >= 0")
    elif family == "power_singular":
        beta = params.get("beta")
        if beta is None or not (beta > 0):
            raise ParameterError("power_singular needs beta > 0")
    elif family == "second_difference":
        profile = params.setdefault("profile", "indicator")
        if profile not in ("indicator", "hat"):
            raise ParameterError(f"unknown inner profile {profile!r}")
    elif family == "table":
        if "signal" not in params:
            raise ParameterError("table family needs a 'signal' parameter")


# ---------------------------------------------------------------------------
# construction helpers

def indicator(lo: float = 0.0, hi: float = 1.0, amplitude: float = 1.0) -> SynthesizerSpec:
    return SynthesizerSpec("indicator", {"lo": lo, "hi": hi, "amplitude": amplitude})


def normalized_indicator(b: float = 1.0) -> SynthesizerSpec:
    """b^{-1} 1_[0,b): the canonical analyzer, unit integral, unit cell."""
    return indicator(0.0, b, amplitude=1.0 / b)


def haar(amplitude: float = 1.0) -> SynthesizerSpec:
    return SynthesizerSpec("haar", {"amplitude": amplitude})


def step_difference(amplitude: float = 1.0) -> SynthesizerSpec:
    return SynthesizerSpec("step_difference", {"amplitude": amplitude})


def second_difference(profile: str = "indicator", amplitude: float = 1.0) -> SynthesizerSpec:
    return SynthesizerSpec("second_difference", {"profile": profile, "amplitude": amplitude})


def bspline(order: int = 1, amplitude: float = 1.0) -> SynthesizerSpec:
    return SynthesizerSpec("bspline", {"order": order, "amplitude": amplitude})


def power_singular(beta: float, amplitude: float = 1.0) -> SynthesizerSpec:
    return SynthesizerSpec("power_singular", {"beta": beta, "amplitude": amplitude})


def mexican_hat(amplitude: float = 1.0) -> SynthesizerSpec:
    return SynthesizerSpec("mexican_hat", {"amplitude": amplitude})


def table(signal: Signal, amplitude: float = 1.0) -> SynthesizerSpec:
    return SynthesizerSpec("table", {"signal": signal, "amplitude": amplitude})


def by_name(name: str, **kwargs) -> SynthesizerSpec:
    """Build a family from its CLI name plus keyword parameters."""
    builders = {
        "indicator": indicator,
        "normalized_indicator": normalized_indicator,
        "haar": haar,
        "step_difference": step_difference,
        "second_difference": second_difference,
        "bspline": bspline,
        "power": power_singular,
        "power_singular": power_singular,
        "mexican_hat": mexican_hat,
    }
    if name not in builders:
        raise ParameterError(f"unknown synthesizer name {name!r}")
    return builders[name](**kwargs)


# ---------------------------------------------------------------------------
# evaluation

def eval_synthesizer(spec: SynthesizerSpec, x):
    """Pointwise value psi(x); vectorized over array input.

    The singular family returns 0 at x = 0 (a measure-zero point).
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    fam = spec.family
    p = spec.params
    if fam == "indicator":
        out = np.where((x >= p["lo"]) & (x < p["hi"]), 1.0, 0.0)
    elif fam == "haar":
        out = np.where((x >= 0) & (x < 0.5), 1.0, 0.0) - np.where((x >= 0.5) & (x < 1.0), 1.0, 0.0)
    elif fam == "step_difference":
        out = np.where((x >= 0) & (x < 1.0), 1.0, 0.0) - np.where((x >= 1.0) & (x < 2.0), 1.0, 0.0)
    elif fam == "second_difference":
        eta = _inner_profile(p["profile"])
        out = eta(x + 1.0) - 2.0 * eta(x) + eta(x - 1.0)
    elif fam == "bspline":
        order = p["order"]
        if order == 0:
            out = np.where((x >= 0) & (x < 1.0), 1.0, 0.0)
        else:
            basis = BSpline.basis_element(np.arange(order + 2, dtype=float), extrapolate=False)
            out = basis(x)
            out = np.where(np.isfinite(out), out, 0.0)
    elif fam == "power_singular":
        beta = p["beta"]
        inside = (x > 0) & (x < 1.0)
        with np.errstate(divide="ignore", over="ignore"):
            out = np.where(inside, np.where(x > 0, x, 1.0) ** (-beta), 0.0)
    elif fam == "mexican_hat":
        out = np.where(np.abs(x) <= MEXICAN_HAT_CUTOFF, (1.0 - x * x) * np.exp(-x * x / 2.0), 0.0)
    elif fam == "table":
        sig = p["signal"]
        g = sig.grid
        idx = np.floor((x - g.x0) / g.h).astype(int)
        inside = (idx >= 0) & (idx < g.n)
        out = np.where(inside, sig.values[np.clip(idx, 0, g.n - 1)], 0.0)
    else:  # pragma: no cover
        raise UnsupportedSynthesizerError(fam)
    out = out * spec.amplitude
    return out[0] if scalar else out


def _inner_profile(name: str):
    if name == "indicator":
        return lambda x: np.where((x >= 0) & (x < 1.0), 1.0, 0.0)
    return lambda x: np.maximum(0.0, 1.0 - np.abs(2.0 * x - 1.0))  # hat on [0, 1]


def support_interval(spec: SynthesizerSpec) -> tuple[float, float]:
    """Interval outside which the family evaluates to zero.

    For the Mexican hat this is the decay truncation window.
    """
    fam = spec.family
    p = spec.params
    if fam == "indicator":
        return (p["lo"], p["hi"])
    if fam in ("haar", "power_singular"):
        return (0.0, 1.0)
    if fam == "step_difference":
        return (0.0, 2.0)
    if fam == "second_difference":
        return (-1.0, 2.0)
    if fam == "bspline":
        return (0.0, p["order"] + 1.0)
    if fam == "mexican_hat":
        return (-MEXICAN_HAT_CUTOFF, MEXICAN_HAT_CUTOFF)
    if fam == "table":
        g = p["signal"].grid
        return (g.x0, g.hi)
    raise UnsupportedSynthesizerError(fam)  # pragma: no cover


def has_compact_support(spec: SynthesizerSpec) -> bool:
    return spec.family != "mexican_hat"


def is_real(spec: SynthesizerSpec) -> bool:
    if spec.family == "table" and np.iscomplexobj(spec.params["signal"].values):
        return False
    return np.imag(spec.amplitude) == 0.0


def is_nonnegative(spec: SynthesizerSpec) -> bool:
    """True when the family takes no negative values (real amplitude >= 0)."""
    if not is_real(spec) or np.real(spec.amplitude) < 0:
        return False
    if spec.family in ("indicator", "power_singular", "bspline"):
        return True
    if spec.family == "table":
        return bool(np.all(np.real(spec.params["signal"].values) >= 0))
    return False


def is_bounded(spec: SynthesizerSpec) -> bool:
    return spec.family != "power_singular"


def is_integrable(spec: SynthesizerSpec) -> bool:
    """Membership in L^1 (known per family)."""
    if spec.family == "power_singular":
        return spec.params["beta"] < 1.0
    return True


def integral(spec: SynthesizerSpec) -> complex:
    """Exact integral of psi over the line, for integrable families."""
    if not is_integrable(spec):
        raise UnsupportedSynthesizerError("family is not integrable")
    fam = spec.family
    p = spec.params
    amp = spec.amplitude
    if fam == "indicator":
        return amp * (p["hi"] - p["lo"])
    if fam in ("haar", "step_difference", "second_difference", "mexican_hat"):
        return 0.0 * amp
    if fam == "bspline":
        return amp * 1.0
    if fam == "power_singular":
        return amp / (1.0 - p["beta"])
    if fam == "table":
        sig = p["signal"]
        return amp * complex(sig.grid.h * np.sum(sig.values))
    raise UnsupportedSynthesizerError(fam)  # pragma: no cover


def as_piecewise(spec: SynthesizerSpec):
    """Exact piecewise-constant representation (breaks, values) with
    len(breaks) = len(values) + 1, or None when the family is not
    piecewise constant. Amplitude included."""
    amp = spec.amplitude
    fam = spec.family
    p = spec.params
    if fam == "indicator":
        return np.array([p["lo"], p["hi"]]), np.array([amp])
    if fam == "haar":
        return np.array([0.0, 0.5, 1.0]), np.array([amp, -amp])
    if fam == "step_difference":
        return np.array([0.0, 1.0, 2.0]), np.array([amp, -amp])
    if fam == "bspline" and p["order"] == 0:
        return np.array([0.0, 1.0]), np.array([amp])
    if fam == "second_difference" and p["profile"] == "indicator":
        return np.array([-1.0, 0.0, 1.0, 2.0]), np.array([amp, -2.0 * amp, amp])
    return None


# ---------------------------------------------------------------------------
# atoms

@dataclass(frozen=True)
class Atom:
    """psi_{j,k}(x) = a^(j/p) psi(a^j x - b k)."""

    j: int
    k: int
    base: SynthesizerSpec
    cfg: LatticeConfig

    def __post_init__(self):
        if self.j < 1:
            raise ParameterError(f"scale index must be >= 1, got j={self.j}")
        self.base.check_in_lp(self.cfg.p)


def eval_atom(atom: Atom, x):
    cfg = atom.cfg
    aj = cfg.a ** atom.j
    scale = aj ** (1.0 / cfg.p)
    return scale * eval_synthesizer(atom.base, aj * np.asarray(x, dtype=float) - cfg.b * atom.k)


def atom_support(atom: Atom) -> tuple[float, float]:
    lo, hi = support_interval(atom.base)
    aj = atom.cfg.a ** atom.j
    return ((lo + atom.cfg.b * atom.k) / aj, (hi + atom.cfg.b * atom.k) / aj)


def cell_mass(spec: SynthesizerSpec, p: float, interval: tuple[float, float]) -> float:
    """Exact integral of |psi|^p over ``interval`` for families with a
    closed antiderivative. Used as the singularity-safe oracle where
    the rectangle rule degrades."""
    if not (0.0 < p <= 1.0):
        raise ParameterError(f"p must lie in (0, 1], got {p}")
    lo, hi = interval
    if hi < lo:
        raise ParameterError("interval endpoints out of order")
    pw = as_piecewise(spec)
    if pw is not None:
        breaks, vals = pw
        total = 0.0
        for i, v in enumerate(vals):
            seg = max(0.0, min(hi, breaks[i + 1]) - max(lo, breaks[i]))
            total += seg * abs(v) ** p
        return total
    if spec.family == "power_singular":
        beta = spec.params["beta"]
        if beta * p >= 1.0:
            raise NoAnalyticMassError("beta * p >= 1: |psi|^p is not integrable")
        a = min(max(lo, 0.0), 1.0)
        b = min(max(hi, 0.0), 1.0)
        if b <= a:
            return 0.0
        e = 1.0 - beta * p
        return abs(spec.amplitude) ** p * (b ** e - a ** e) / e
    raise NoAnalyticMassError(f"no closed-form mass for family {spec.family!r}")
