"""Pseudo-spectral toolkit for the inviscid buoyancy-coupled system.

Subpackages:
    spectral         periodic-grid field arithmetic and multipliers
    littlewood_paley dyadic decomposition, Besov/Hoelder norms, paraproducts
    transport        linear advection solver (RK4, pseudo-spectral)
    boussinesq       coupled solver, iteration scheme, blow-up monitor
    harness          empirical-constant reports and existence-time formulas
    fileio, cli      artifact output and the command-line front end
"""

from .spectral import (
    Grid,
    SpectralField,
    VectorField,
    make_grid,
    transform,
    inverse_transform,
    derivative,
    dealias,
    grad_inv_laplacian_div,
    grad_inv_laplacian_partial,
    leray_project,
    linf_norm,
    lp_norm,
)
from .littlewood_paley import (
    DyadicPartition,
    BesovReport,
    build_partition,
    block,
    low_pass,
    holder_norm,
    besov_norm,
    homogeneous_besov_norm,
    bony_decompose,
    commutator,
    bernstein_report,
    compute_a0,
)
from .transport import TransportProblem, CFLViolation, step, solve
from .boussinesq import (
    BoussinesqState,
    MonitorRecord,
    IterationRecord,
    pressure_gradient,
    direct_step,
    run_direct,
    iterate_scheme,
    blowup_integral,
    continuation_check,
    synthesize_holder_field,
    synthesize_divfree_velocity,
    uniqueness_probe,
)
from .harness import (
    CorpusSpec,
    EstimateReport,
    ThresholdReport,
    ThresholdDomainError,
    verify,
    compute_thresholds,
    contraction_report,
    blowup_envelope_check,
)

__version__ = "0.1.0"
