"""Batch experiment front-end.

Subcommands: check, decompose, quasi-interp, tachev, riesz. All
randomized routines are seeded (default 0) and all delimited output is
written deterministically, so identical invocations produce identical
bytes. CSV/JSON are the data interface; --plot additionally renders PNG
figures next to them.

Exit codes: 0 success, 2 usage or malformed configuration, 3
mathematical failure (inadmissible synthesizer, contraction failure,
unresolved scales).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import report
from .analysis import quasi_interp
from .conditions import (
    find_lambda,
    periodization_profile,
    sufficient_conditions,
    tachev_classify,
)
from .decomposer import decompose, decompose_adapted, decompose_undersynth
from .dictionary import SynthesizerSpec, by_name, normalized_indicator
from .errors import (
    AdaptationFailureError,
    ContractionFailureError,
    InadmissibleSynthesizerError,
    LpatomsError,
    ParameterError,
    ResolutionError,
)
from .numerics import Grid, LatticeConfig, Signal, dp_distance, lp_power
from .riesz import (
    empirical_riesz_bounds,
    injectivity_scan,
    jia_energy_scan,
    lower_riesz_constant,
    split_pieces,
)
from .signals import make_signal
from .synthesis import max_resolved_scale

_USAGE_ERRORS = (ParameterError, ValueError, KeyError, OSError, json.JSONDecodeError)
_MATH_ERRORS = (
    InadmissibleSynthesizerError,
    ContractionFailureError,
    AdaptationFailureError,
    ResolutionError,
)

DEFAULT_GRID = "-4:4:15"


def _parse_grid(text: str) -> Grid:
    try:
        lo_s, hi_s, log2n_s = text.split(":")
        lo, hi, log2n = float(lo_s), float(hi_s), int(log2n_s)
    except Exception as exc:
        raise ParameterError(f"bad grid spec {text!r}; expected lo:hi:log2n") from exc
    if hi <= lo or log2n < 1 or log2n > 26:
        raise ParameterError(f"bad grid spec {text!r}")
    n = 1 << log2n
    return Grid(lo, (hi - lo) / n, n)


def _parse_synth(args, which: str = "synth") -> SynthesizerSpec:
    text = getattr(args, which)
    if text is None:
        if which == "analyzer":
            return None
        raise ParameterError("--synth is required")
    if text.strip().startswith("{"):
        return SynthesizerSpec.from_json(text)
    if text.endswith(".json"):
        with open(text) as fh:
            return SynthesizerSpec.from_json(fh.read())
    kwargs = {}
    if args.beta is not None:
        kwargs["beta"] = args.beta
    if args.order is not None:
        kwargs["order"] = args.order
    if args.scale is not None:
        kwargs["amplitude"] = args.scale
    if text == "indicator" and (args.lo is not None or args.hi is not None):
        kwargs["lo"] = args.lo if args.lo is not None else 0.0
        kwargs["hi"] = args.hi if args.hi is not None else 1.0
    if text == "normalized_indicator":
        return normalized_indicator(args.b)
    return by_name(text, **kwargs)


def _read_signal_csv(path: str) -> Signal:
    xs, res, ims = [], [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ParameterError(f"signal rows need x,re,im; got {line!r}")
            xs.append(float(parts[0]))
            res.append(float(parts[1]))
            ims.append(float(parts[2]))
    if len(xs) < 2:
        raise ParameterError("signal file needs at least two samples")
    x = np.asarray(xs)
    steps = np.diff(x)
    h = float(steps[0])
    if h <= 0 or np.max(np.abs(steps - h)) > 1e-9 * h:
        raise ParameterError("signal grid is not uniform")
    vals = np.asarray(res, dtype=float)
    if np.max(np.abs(ims), initial=0.0) > 0:
        vals = vals + 1j * np.asarray(ims)
    return Signal(Grid(float(x[0]), h, len(xs)), vals)


def _write(outdir, name, text):
    if outdir is None:
        sys.stdout.write(text)
        return None
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, name)
    with open(path, "w") as fh:
        fh.write(text)
    return path


def _load_input_signal(args, grid: Grid) -> Signal:
    if args.input:
        return _read_signal_csv(args.input)
    return make_signal(args.signal, grid, seed=args.seed)


# ---------------------------------------------------------------------------
# subcommands

def cmd_check(args) -> int:
    psi = _parse_synth(args)
    cfg = LatticeConfig(p=args.p, a=args.a, b=args.b)
    rep = sufficient_conditions(psi, cfg)
    text = rep.to_json() + "\n"
    path = _write(args.out, "check.json", text)
    if path:
        print(f"wrote {path}")
        print(f"sigma={rep.sigma:.6g} admissible={rep.admissible}")
    if args.plot:
        if args.out is None:
            raise ParameterError("--plot needs --out")
        profile = periodization_profile(psi, cfg)
        print("wrote", report.check_figure(profile, cfg.p, rep.lambda_star, args.out))
    return 0 if rep.admissible else 3


def cmd_decompose(args) -> int:
    psi = _parse_synth(args)
    cfg = LatticeConfig(p=args.p, a=args.a, b=args.b)
    grid = _parse_grid(args.grid)
    f = _load_input_signal(args, grid)
    phi = _parse_synth(args, "analyzer")
    kwargs = dict(
        phi=phi, sigma_prime=args.sigma_prime, tol_rel=args.tol,
        max_iter=args.max_iter, oversample=args.oversample,
    )
    if args.jmax is not None:
        kwargs["j_max"] = args.jmax
    if args.undersynth:
        kwargs.pop("phi")
        result = decompose_undersynth(f, psi, cfg, **kwargs)
    elif args.adapt_domain:
        omega = _parse_domain(args.adapt_domain)
        result = decompose_adapted(f, omega, psi, cfg, **kwargs)
    else:
        result = decompose(f, psi, cfg, **kwargs)
    print(
        f"converged in {result.iterations} iterations: residual "
        f"{result.residual_power:.3e} (target {result.tol_rel:.1e} * "
        f"{result.input_power:.6g}), coeff mass {result.coeff_power:.6g} "
        f"<= bound {result.bound:.6g}, entries {len(result.coeffs)}"
    )
    if result.multiplier > 1:
        print(f"under-synthesis multiplier beta={result.multiplier}")
    _write(args.out, "decompose_header.json", result.header_json() + "\n")
    _write(args.out, "coefficients.jsonl", result.coeffs.to_jsonl())
    _write(args.out, "decompose_trace.csv", result.trace_csv())
    if args.plot:
        if args.out is None:
            raise ParameterError("--plot needs --out")
        print("wrote", report.decomposition_figure(result, args.out))
    return 0


def _parse_domain(text: str):
    comps = []
    for part in text.split(","):
        lo_s, hi_s = part.split(":")
        comps.append((float(lo_s), float(hi_s)))
    return comps


def cmd_quasi_interp(args) -> int:
    psi = _parse_synth(args)
    cfg = LatticeConfig(p=args.p, a=args.a, b=args.b)
    grid = _parse_grid(args.grid)
    f = _load_input_signal(args, grid)
    phi = _parse_synth(args, "analyzer") or normalized_indicator(cfg.b)
    j_lo, j_hi = (int(v) for v in args.j_range.split(":"))
    if j_lo < 1 or j_hi < j_lo:
        raise ParameterError(f"bad scale range {args.j_range!r}")
    jmax_grid = max_resolved_scale(grid, cfg, args.oversample)
    if j_hi > jmax_grid:
        raise ResolutionError(
            f"scale range up to {j_hi} exceeds grid capacity {jmax_grid}"
        )
    sigma = periodization_profile(psi, cfg).defect(1.0, cfg.p)
    dpf = lp_power(f, cfg.p)
    rows = []
    for j in range(j_lo, j_hi + 1):
        rec = quasi_interp(f, j, psi, phi, cfg, oversample=args.oversample)
        rows.append((j, dp_distance(rec, f, cfg.p), sigma * dpf))
    lines = ["j,e_j,sigma_target"]
    for j, e, tgt in rows:
        lines.append(f"{j},{e!r},{tgt!r}")
    _write(args.out, "quasi_interp.csv", "\n".join(lines) + "\n")
    if args.plot:
        if args.out is None:
            raise ParameterError("--plot needs --out")
        print("wrote", report.quasi_interp_figure(rows, sigma * dpf, args.out))
    return 0


def cmd_tachev(args) -> int:
    betas = _parse_value_grid(args.beta_grid)
    if betas.size == 0:
        raise ParameterError("empty beta grid")
    ts = _parse_value_grid(args.t_grid, geometric=True) if args.t_grid else None
    rows = []
    for beta in betas:
        cls = tachev_classify(float(beta), args.p, t_grid=ts)
        label = "boundary" if cls.numeric_boundary else (
            "admissible" if cls.min_F < 1.0 else "inadmissible")
        rows.append({
            "beta": float(beta), "p": args.p, "min_F": cls.min_F,
            "min_t": cls.min_t, "classification": label,
            "analytic": cls.label, "threshold": cls.threshold,
        })
    lines = ["beta,p,min_t_F,classification"]
    for r in rows:
        lines.append(f"{r['beta']!r},{r['p']!r},{r['min_F']!r},{r['classification']}")
    _write(args.out, "tachev.csv", "\n".join(lines) + "\n")
    if args.plot:
        if args.out is None:
            raise ParameterError("--plot needs --out")
        print("wrote", report.tachev_figure(rows, args.out))
    return 0


def _parse_value_grid(text: str, geometric: bool = False) -> np.ndarray:
    if text is None:
        return np.array([])
    if ":" in text:
        lo_s, hi_s, n_s = text.split(":")
        lo, hi, n = float(lo_s), float(hi_s), int(n_s)
        if n < 1:
            raise ParameterError(f"empty grid {text!r}")
        if geometric:
            return np.geomspace(lo, hi, n)
        return np.linspace(lo, hi, n)
    vals = np.array([float(v) for v in text.split(",") if v.strip()])
    if vals.size == 0:
        raise ParameterError(f"empty grid {text!r}")
    return vals


def cmd_riesz(args) -> int:
    psi = _parse_synth(args)
    cfg = LatticeConfig(p=args.p, a=args.a, b=args.b)
    js = [int(v) for v in args.j.split(",")]
    if not js or min(js) < 1:
        raise ParameterError(f"bad scale list {args.j!r}")
    system = split_pieces(psi, cfg)
    c_est = lower_riesz_constant(system, cfg.p, restarts=args.restarts, seed=args.seed)
    scan = injectivity_scan(psi, cfg)
    min_energy, _ = jia_energy_scan(system)
    rows = []
    for j in js:
        lo_r, hi_r = empirical_riesz_bounds(
            psi, cfg, j, trials=args.trials, seed=args.seed,
            oversample=args.oversample,
        )
        rows.append({
            "p": cfg.p, "j": j, "C_estimate": c_est,
            "ratio_min": lo_r, "ratio_max": hi_r,
            "min_xi_energy": min_energy,
        })
    lines = ["p,j,C_estimate,ratio_min,ratio_max,min_xi_energy"]
    for r in rows:
        lines.append(
            f"{r['p']!r},{r['j']},{r['C_estimate']!r},{r['ratio_min']!r},"
            f"{r['ratio_max']!r},{r['min_xi_energy']!r}"
        )
    _write(args.out, "riesz.csv", "\n".join(lines) + "\n")
    _write(args.out, "pieces.json", system.to_json() + "\n")
    if not scan.ok:
        print(
            f"injectivity scan FAILED at xi={scan.worst_xi:.6g} "
            f"(energy {scan.worst_value:.3e}); lower bound not certified"
        )
    if args.plot:
        if args.out is None:
            raise ParameterError("--plot needs --out")
        print("wrote", report.riesz_figure(rows, args.out))
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_common(sp):
    sp.add_argument("--synth", help="family name, inline JSON, or path to a .json spec")
    sp.add_argument("--analyzer", default=None, help="analyzer spec (default: normalized cell indicator)")
    sp.add_argument("--p", type=float, required=True, help="quasi-norm exponent in (0, 1]")
    sp.add_argument("--a", type=float, default=2.0, help="dilation base (default 2)")
    sp.add_argument("--b", type=float, default=1.0, help="translation step (default 1)")
    sp.add_argument("--beta", type=float, default=None, help="power-family exponent")
    sp.add_argument("--order", type=int, default=None, help="B-spline order")
    sp.add_argument("--scale", type=float, default=None, help="synthesizer amplitude")
    sp.add_argument("--lo", type=float, default=None, help="indicator left endpoint")
    sp.add_argument("--hi", type=float, default=None, help="indicator right endpoint")
    sp.add_argument("--grid", default=DEFAULT_GRID, help="signal grid lo:hi:log2n (default %(default)s)")
    sp.add_argument("--oversample", type=int, default=8, help="grid points per translation cell")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None, help="output directory (default: stdout)")
    sp.add_argument("--plot", action="store_true", help="render PNG figures beside the CSV (needs --out)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lpatoms",
        description="Affine synthesis and atomic decomposition experiments on L^p, 0 < p <= 1",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("check", help="admissibility report for a synthesizer")
    _add_common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("decompose", help="constructive atomic decomposition")
    _add_common(sp)
    sp.add_argument("--signal", default="bump", help="built-in signal name")
    sp.add_argument("--input", default=None, help="CSV signal file (x,re,im rows)")
    sp.add_argument("--sigma-prime", dest="sigma_prime", type=float, default=None)
    sp.add_argument("--tol", type=float, default=1e-3, help="relative d_p tolerance")
    sp.add_argument("--max-iter", dest="max_iter", type=int, default=200)
    sp.add_argument("--jmax", type=int, default=None)
    sp.add_argument("--adapt-domain", dest="adapt_domain", default=None,
                    help="restrict atom supports to lo:hi[,lo:hi...]")
    sp.add_argument("--undersynth", action="store_true",
                    help="allow a coarsened shift lattice when the periodization vanishes")
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("quasi-interp", help="one-scale reconstruction error sweep")
    _add_common(sp)
    sp.add_argument("--signal", default="bump")
    sp.add_argument("--input", default=None)
    sp.add_argument("--j-range", dest="j_range", default="1:8", help="scales lo:hi")
    sp.set_defaults(func=cmd_quasi_interp)

    sp = sub.add_parser("tachev", help="singular-family admissibility sweep")
    _add_common(sp)
    sp.add_argument("--beta-grid", dest="beta_grid", required=True,
                    help="lo:hi:count or comma-separated exponents")
    sp.add_argument("--t-grid", dest="t_grid", default=None,
                    help="lo:hi:count geometric sweep (default 1:1e4:200)")
    sp.set_defaults(func=cmd_tachev)

    sp = sub.add_parser("riesz", help="single-scale stability report")
    _add_common(sp)
    sp.add_argument("--j", default="1", help="comma-separated scales")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--restarts", type=int, default=64)
    sp.set_defaults(func=cmd_riesz)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except _MATH_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except _USAGE_ERRORS as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2
    except LpatomsError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
