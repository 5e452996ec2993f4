"""Decay of a harmonic oscillator coupled to a continuum bath.

Resonance-pole location by analytic continuation, exact survival
amplitudes by two independent routes, a finite-bath eigensolver oracle,
and the reduced density matrix with its rate-equation limits.
"""

from .density import (
    DensityMatrix2,
    OscillatorState,
    equilibrium,
    lindblad_solution,
    lindblad_trajectory,
    pauli_residual,
    reduced_density,
)
from .errors import (
    AmplitudeOutOfRange,
    BranchCutHit,
    ConfigError,
    CrossoverNotBracketed,
    DensityInvariantViolated,
    DualMethodMismatch,
    EigensolveFailure,
    GridTooCoarse,
    InvalidDiscretization,
    NegativeFrequency,
    NoConvergence,
    NonPositiveParameter,
    NotNormalized,
    OnCut,
    OrderingViolated,
    OscBathError,
    OscillationUnderResolved,
    PoleInUpperHalfPlane,
    PoleOnRay,
    PositivityViolated,
    QuadratureFailure,
    WindowBeforeCrossover,
)
from .model import (
    ModelParams,
    QuadConfig,
    build_model,
    spectral_moment,
    spectral_weight,
    spectral_weight_analytic,
    spectral_weight_derivative,
)
from .oracle import DiscreteBath, Scheme, discretize, energy_drift, oracle_amplitude, recurrence_time
from .selfenergy import (
    Resonance,
    Sheet,
    SheetPoint,
    Side,
    alpha,
    alpha_boundary,
    find_resonance,
    grid_refine_resonance,
    perturbative_resonance,
    principal_value,
)
from .survival import (
    DEFAULT_RAY_ANGLE,
    AmplitudeSeries,
    Method,
    PhaseReport,
    ZenoFit,
    amplitude_pole_background,
    amplitude_spectral,
    crossover_times,
    exponential_rate_fit,
    hybrid_time_grid,
    khalfin_exponent,
    sum_rule,
    survival_probability,
    zeno_slope,
)

__version__ = "0.1.0"

__all__ = [
    "ModelParams", "QuadConfig", "build_model", "spectral_weight",
    "spectral_weight_analytic", "spectral_weight_derivative", "spectral_moment",
    "Sheet", "Side", "SheetPoint", "Resonance", "alpha", "alpha_boundary",
    "principal_value", "perturbative_resonance", "find_resonance",
    "grid_refine_resonance",
    "Method", "AmplitudeSeries", "PhaseReport", "ZenoFit", "hybrid_time_grid",
    "amplitude_spectral", "amplitude_pole_background", "survival_probability",
    "zeno_slope", "khalfin_exponent", "crossover_times", "sum_rule",
    "exponential_rate_fit", "DEFAULT_RAY_ANGLE",
    "Scheme", "DiscreteBath", "discretize", "oracle_amplitude", "energy_drift",
    "recurrence_time",
    "OscillatorState", "DensityMatrix2", "reduced_density", "lindblad_solution",
    "lindblad_trajectory", "pauli_residual", "equilibrium",
    "OscBathError", "NonPositiveParameter", "PositivityViolated",
    "NegativeFrequency", "BranchCutHit", "OnCut", "QuadratureFailure",
    "NoConvergence", "PoleInUpperHalfPlane", "OscillationUnderResolved",
    "PoleOnRay", "GridTooCoarse", "WindowBeforeCrossover",
    "CrossoverNotBracketed", "InvalidDiscretization", "EigensolveFailure",
    "NotNormalized", "AmplitudeOutOfRange", "ConfigError", "DualMethodMismatch",
    "OrderingViolated", "DensityInvariantViolated",
]
