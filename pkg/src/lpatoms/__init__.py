"""Affine synthesis, nonlinear analysis and atomic decomposition on
L^p(R) for exponents 0 < p <= 1.

The package provides:

* quasi-norm numerics on uniform grids (``numerics``),
* the radial stretch and its continuity estimates (``stretch``),
* closed-form synthesizer families and normalized atoms (``dictionary``),
* the synthesis operators with their boundedness certificate (``synthesis``),
* nonlinear analysis, pointwise sampling and quasi-interpolation (``analysis``),
* admissibility defects, sufficient conditions, the singular-family
  threshold, under-synthesis multipliers and the path identity
  (``conditions``),
* the constructive open-mapping decomposition with norm certificates
  (``decomposer``),
* single-scale p-Riesz diagnostics (``riesz``),
* built-in test signals, figure rendering and a batch CLI.
"""

from .numerics import (
    Grid,
    LatticeConfig,
    Signal,
    dp_distance,
    lp_norm,
    lp_power,
    periodize,
    signal_difference,
)
from .stretch import check_holder_lemma, check_lipschitz_lemma, theta, theta_inv
from .dictionary import (
    Atom,
    SynthesizerSpec,
    atom_support,
    by_name,
    cell_mass,
    eval_atom,
    eval_synthesizer,
    haar,
    indicator,
    mexican_hat,
    normalized_indicator,
    power_singular,
    second_difference,
    step_difference,
    support_interval,
    table,
)
from .dictionary import bspline as bspline_family
from .synthesis import (
    CoeffSeq,
    coeff_lp_norm,
    coeff_lp_power,
    max_resolved_scale,
    synthesize,
    synthesize_scale,
)
from .analysis import (
    analysis_metric,
    analyze_scale,
    holder_constant,
    quasi_interp,
    sample_pointwise,
    sup_periodization_abs,
)
from .conditions import (
    AdmissibilityReport,
    bite_sigma,
    find_lambda,
    path_demo,
    periodization_profile,
    sufficient_conditions,
    tachev_F,
    tachev_classify,
    undersynth_multiplier,
)
from .decomposer import (
    DecompositionResult,
    atomic_ratio,
    contraction_step,
    decompose,
    decompose_adapted,
    decompose_undersynth,
)
from .riesz import (
    PieceSystem,
    empirical_riesz_bounds,
    injectivity_scan,
    jia_energy_scan,
    lower_riesz_constant,
    modulated_sequence,
    split_pieces,
)
from .signals import gaussian_bump, make_signal, random_piecewise, smoothed_step, triangle

__version__ = "0.1.0"
