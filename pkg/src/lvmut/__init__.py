"""N-genotype competition dynamics with mutation.

Simulation, equilibrium solvers, entropy and Lyapunov diagnostics, and
spectral convergence certificates for the coupled logistic system

    dv_i/dt = v_i (r_i - Psi_i(v)/K) + sum_j mu_ij (v_j - v_i).
"""
from .analysis import (
    PerturbationRow,
    PerturbationTable,
    RateReport,
    SpectralGapReport,
    StabilityReport,
    convergence_rate,
    global_stability_experiment,
    perturbation_sweep,
    spectral_gap,
)
from .dynamics import (
    EnvelopePair,
    Trajectory,
    closed_form_uniform_linear,
    integrate,
    logistic_envelopes,
    positivity_floor,
)
from .entropy import (
    Decomposition,
    EntropyKernel,
    EntropyReport,
    decompose,
    dissipation,
    entropy_value,
    identity_residual,
    lyapunov_descent,
)
from .equilibrium import (
    EquilibriumResult,
    HomotopyConfig,
    Method,
    equilibrium_homotopy,
    equilibrium_uniform,
    residual,
)
from .errors import LvmutError
from .linalg import (
    PerronResult,
    SymmetricSpectrum,
    expm_action,
    is_irreducible,
    is_positive_definite,
    perron_eigenpair,
    solve_linear,
    symmetric_spectrum,
)
from .model import (
    CoercivityParams,
    CrowdingLinear,
    HypothesisReport,
    Model,
    Perturbed,
    UniformLinear,
    build_model,
    coercivity_params,
    crowding_linear,
    growth_mutation_matrix,
    interaction_gradient,
    interaction_values,
    is_fitness_weighted,
    mutation_symmetric,
    offdiagonal_mutation,
    perturbed,
    point_mutation_matrix,
    rhs,
    uniform_linear,
    validate,
)
from .presets import Preset, catalog, get_preset, preset_names

__version__ = "0.1.0"

__all__ = [
    "CoercivityParams",
    "CrowdingLinear",
    "Decomposition",
    "EntropyKernel",
    "EntropyReport",
    "EnvelopePair",
    "EquilibriumResult",
    "HomotopyConfig",
    "HypothesisReport",
    "LvmutError",
    "Method",
    "Model",
    "PerronResult",
    "Perturbed",
    "PerturbationRow",
    "PerturbationTable",
    "Preset",
    "RateReport",
    "SpectralGapReport",
    "StabilityReport",
    "SymmetricSpectrum",
    "Trajectory",
    "UniformLinear",
    "build_model",
    "catalog",
    "closed_form_uniform_linear",
    "coercivity_params",
    "convergence_rate",
    "crowding_linear",
    "decompose",
    "dissipation",
    "entropy_value",
    "equilibrium_homotopy",
    "equilibrium_uniform",
    "expm_action",
    "get_preset",
    "global_stability_experiment",
    "growth_mutation_matrix",
    "identity_residual",
    "integrate",
    "interaction_gradient",
    "interaction_values",
    "is_fitness_weighted",
    "is_irreducible",
    "is_positive_definite",
    "logistic_envelopes",
    "lyapunov_descent",
    "mutation_symmetric",
    "offdiagonal_mutation",
    "perron_eigenpair",
    "perturbation_sweep",
    "perturbed",
    "point_mutation_matrix",
    "positivity_floor",
    "preset_names",
    "residual",
    "rhs",
    "solve_linear",
    "spectral_gap",
    "symmetric_spectrum",
    "uniform_linear",
    "validate",
]
