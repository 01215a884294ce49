"""Numerical laboratory for the semilinear fractional heat-wave equation.

Evaluates Mittag-Leffler functions, applies the diffusion-wave propagator
spectrally on periodic boxes, solves the mild-solution integral equation by
Picard iteration and causal time marching, estimates Morrey and
Besov-Morrey norms, and runs quantitative checks of the scaling theory
(decay rates, symmetry and self-similarity preservation, asymptotic
equivalence) at desk scale.
"""

from .accel import USING_NUMBA, backend_name
from .analysis import (
    DecayFit,
    DerivedExponents,
    asymptotic_equivalence_check,
    beta_identity_check,
    decay_fit,
    decay_fit_curve,
    homogeneous_data,
    linear_decay_curve,
    self_similarity_check,
    symmetry_check,
    validate_params,
)
from .errors import (
    BlowUpError,
    ConsistencyError,
    DomainError,
    FitWindowError,
    ModuloPolynomialsError,
    MultiplierError,
    NonconvergenceError,
    PreconditionError,
)
from .grid import (
    BoxGrid,
    GridFunction,
    SpectralField,
    apply_multiplier,
    apply_signed_permutation,
    apply_symbol,
    dealias,
    forward,
    fractional_symbol,
    hermitian_defect,
    inverse,
    read_grid_function,
    write_grid_function,
)
from .norms import (
    LPPartition,
    NormReport,
    SpaceParams,
    ball_radii_int,
    besov_morrey_norm,
    check_holder,
    lp_block,
    morrey_norm,
    sobolev_morrey_norm,
    write_norm_reports,
    xqp_norm,
)
from .propagator import (
    PropagatorContext,
    duhamel_multiplier,
    kernel_sample_1d,
    linear_propagate,
    ml_symbol,
    smalltime_pairing_check,
)
from .solver import (
    ModelParams,
    PicardReport,
    TimeGrid,
    Trajectory,
    continuous_dependence_check,
    duhamel_term,
    duhamel_weight_table,
    march_solve,
    nonlinearity_eval,
    picard_solve,
)
from .special import (
    MLParams,
    beta_fn,
    gamma,
    l_alpha,
    ml_one,
    ml_one_with_path,
    ml_two,
    symbol_bound_scan,
)

__version__ = "0.1.0"
