"""Figure rendering for the CLI report paths.

Each helper takes the rows already written to CSV/JSON and draws one
PNG next to them. Figures are a convenience view; the delimited files
remain the data interface.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
}


def _save(fig, outdir: str, name: str) -> str:
    path = os.path.join(outdir, name)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def decomposition_figure(result, outdir: str) -> str:
    """Residual decay (log scale) against the geometric certificate."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ms = [row[0] for row in result.scale_trace]
        rs = [row[2] for row in result.scale_trace]
        ax.semilogy(ms, rs, "o-", label="residual d_p mass")
        cert = result.input_power * result.sigma_prime ** (1 + np.arange(len(ms)))
        ax.semilogy(ms, cert, "--", label=f"sigma'={result.sigma_prime:.3g} decay")
        ax2 = ax.twinx()
        ax2.plot(ms, [row[1] for row in result.scale_trace], "s-", color="tab:red", alpha=0.5)
        ax2.set_ylabel("scale j", color="tab:red")
        ax2.grid(False)
        ax.set_xlabel("iteration m")
        ax.set_ylabel("d_p(0, y_m)")
        ax.legend(loc="upper right")
        ax.set_title("open-mapping iteration")
        return _save(fig, outdir, "decompose_trace.png")


def quasi_interp_figure(rows, sigma_target: float, outdir: str) -> str:
    """Reconstruction error e_j per scale with the defect asymptote."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        js = [r[0] for r in rows]
        es = [r[1] for r in rows]
        ax.semilogy(js, es, "o-", label="d_p(S_j T_j f, f)")
        if sigma_target > 0:
            ax.axhline(sigma_target, ls="--", color="tab:orange",
                       label="defect * d_p(0, f)")
        ax.set_xlabel("scale j")
        ax.set_ylabel("error (d_p)")
        ax.legend()
        ax.set_title("quasi-interpolation convergence")
        return _save(fig, outdir, "quasi_interp.png")


def tachev_figure(rows, outdir: str) -> str:
    """min_t F against the exponent with the sharp threshold marked."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        betas = [r["beta"] for r in rows]
        mins = [r["min_F"] for r in rows]
        p = rows[0]["p"] if rows else 0.5
        ax.plot(betas, mins, "o-", label="min_t F(t)")
        ax.axhline(1.0, color="k", lw=0.8)
        ax.axvline(2.0 / (p + 1.0), ls="--", color="tab:red", label="threshold 2/(p+1)")
        ax.set_xlabel("singularity exponent")
        ax.set_ylabel("min_t F(t)")
        ax.legend()
        ax.set_title(f"admissibility of x^(-beta) on the cell, p={p}")
        return _save(fig, outdir, "tachev.png")


def riesz_figure(rows, outdir: str) -> str:
    """Empirical ratio band per scale plus the constant estimate."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        js = [r["j"] for r in rows]
        ax.fill_between(js, [r["ratio_min"] for r in rows], [r["ratio_max"] for r in rows],
                        alpha=0.3, label="empirical ratio range")
        ax.plot(js, [r["C_estimate"] for r in rows], "o--", label="lower-constant estimate")
        ax.set_xlabel("scale j")
        ax.set_ylabel("||S_j s||_p / ||s||_p")
        ax.legend()
        ax.set_title("single-scale stability")
        return _save(fig, outdir, "riesz.png")


def check_figure(profile, p: float, lam_star, outdir: str) -> str:
    """Defect as a function of a real scaling sweep around the optimum."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        mag = abs(complex(lam_star))
        center = mag if mag > 0 else 1.0
        lams = np.linspace(0.0, 3.0 * center, 160)[1:]
        sign = 1.0 if np.real(complex(lam_star)) >= 0 else -1.0
        vals = [profile.defect(sign * l, p) for l in lams]
        ax.plot(sign * lams, vals, label="defect sigma(lambda)")
        ax.axhline(1.0, color="k", lw=0.8)
        ax.axvline(np.real(complex(lam_star)), ls="--", color="tab:red", label="best lambda")
        ax.set_xlabel("lambda (real section)")
        ax.set_ylabel("sigma")
        ax.legend()
        ax.set_title("admissibility defect")
        return _save(fig, outdir, "check_defect.png")
