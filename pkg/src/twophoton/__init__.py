"""Steady states of the two-photon driven, two-photon damped oscillator.

Four independent routes to the same stationary observables: mean-field
fixed points, stochastic truncated-Wigner trajectories, an effective
thermal-equilibrium description, and the exact solution in closed form.
The package exists to compute them, cross-validate them against each
other, and extract the critical scaling at the delta = g transition.
"""
from .model import (
    METHODS,
    ComplexAmplitude,
    ModelParams,
    ObservableSet,
    QuadratureState,
    amplitude_to_quadratures,
    energy_gap,
    observables_from_quadrature_moments,
    quadratures_to_amplitude,
)
from .specfun import (
    HypergeometricSpec,
    SeriesResult,
    complex_gamma,
    hermite,
    hyp_pfq,
    pfq,
)
from .semiclassical import (
    DivergenceError,
    SteadyStateBranch,
    drift,
    evolve,
    semiclassical_observables,
    steady_states,
)
from .exact import (
    ExactObservables,
    default_grid_half_width,
    exact_observables,
    exact_reduced_wigner,
    exact_wigner,
    exact_wigner_grid,
    grid_moment,
    reduced_wigner_profile,
    series_diagnostics,
    wigner_axis,
)
from .equilibrium import (
    AuxiliaryVelocity,
    EffectiveEquilibrium,
    boltzmann_observables,
    boltzmann_wigner,
    critical_closed_forms,
    critical_g2_x_only,
    effective_equilibrium,
    effective_potential,
    moment,
    reduced_wigner,
)
from .langevin import (
    SCHEMES,
    SYSTEMS,
    EnsembleResult,
    MomentEstimate,
    NoiseRealization,
    TrajectoryConfig,
    default_config,
    ito_stratonovich_drift_correction,
    run_ensemble,
    run_ensemble_detailed,
    simulate_trajectory,
    step_ito,
    step_quadrature,
    step_reduced_critical,
    step_stratonovich,
)
from .criticality import (
    REFERENCE_EXPONENTS,
    ExponentFit,
    ScalingExponents,
    ScalingPoint,
    ScalingReport,
    fit_exponent,
    scale_params,
    verify_reduced_model_scaling,
)
from .selfcheck import CheckResult, SelfCheckReport, run_selfcheck
from ._kernels import active_backend, available_backends

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "METHODS",
    "ModelParams",
    "ComplexAmplitude",
    "QuadratureState",
    "ObservableSet",
    "amplitude_to_quadratures",
    "quadratures_to_amplitude",
    "observables_from_quadrature_moments",
    "energy_gap",
    "HypergeometricSpec",
    "SeriesResult",
    "pfq",
    "hyp_pfq",
    "complex_gamma",
    "hermite",
    "SteadyStateBranch",
    "DivergenceError",
    "steady_states",
    "semiclassical_observables",
    "drift",
    "evolve",
    "ExactObservables",
    "exact_observables",
    "series_diagnostics",
    "default_grid_half_width",
    "wigner_axis",
    "exact_wigner",
    "exact_wigner_grid",
    "grid_moment",
    "exact_reduced_wigner",
    "reduced_wigner_profile",
    "EffectiveEquilibrium",
    "AuxiliaryVelocity",
    "effective_equilibrium",
    "effective_potential",
    "reduced_wigner",
    "boltzmann_wigner",
    "moment",
    "critical_g2_x_only",
    "critical_closed_forms",
    "boltzmann_observables",
    "SCHEMES",
    "SYSTEMS",
    "TrajectoryConfig",
    "MomentEstimate",
    "NoiseRealization",
    "EnsembleResult",
    "default_config",
    "step_ito",
    "step_stratonovich",
    "ito_stratonovich_drift_correction",
    "step_quadrature",
    "step_reduced_critical",
    "run_ensemble",
    "run_ensemble_detailed",
    "simulate_trajectory",
    "ScalingExponents",
    "ExponentFit",
    "ScalingPoint",
    "ScalingReport",
    "REFERENCE_EXPONENTS",
    "scale_params",
    "fit_exponent",
    "verify_reduced_model_scaling",
    "CheckResult",
    "SelfCheckReport",
    "run_selfcheck",
    "active_backend",
    "available_backends",
]
