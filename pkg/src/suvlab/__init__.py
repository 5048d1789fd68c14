"""Stochastic collapse dynamics for two-state systems and the associated
phase-space transport: noise fields, trajectory integrators, Monte Carlo
Born-rule statistics, and Wigner-function experiments."""

__version__ = "0.1.0"

from .bloch import (BlochState, StateVector, born_weights, from_state_vector,
                    renormalize, sigma_z_expectation, to_state_vector)
from .dynamics import (FixedPointReport, IntegratorConfig, SuvParams, Trajectory,
                       classify_fixed_points, evolve_state_vector,
                       evolve_trajectory, flow_field, rabi_evolution,
                       sigma_z_series, theta_drift, theta_series)
from .ensemble import (BornTest, EnsembleConfig, EnsembleResult,
                       born_statistics_test, frozen_noise_exit_probability,
                       gj_ratio_sweep, martingale_check, run_ensemble,
                       scaling_sweep, tau_sweep)
from .noise import (ConstantField, NoiseKind, NoisePath, OrnsteinUhlenbeck,
                    WhiteNoise, autocorrelation, sample_constant, sample_ou,
                    sample_path, sample_white)
from .wigner import (CrystalParams, PhaseGrid, WignerField, cfl_timestep,
                     compute_wigner, evolve_wigner, gaussian_wigner,
                     limit_experiment, localization_widths, marginals,
                     phase_space_moments, quantum_correction, wigner_mass)

__all__ = [
    "__version__",
    "BlochState", "StateVector", "born_weights", "from_state_vector",
    "renormalize", "sigma_z_expectation", "to_state_vector",
    "FixedPointReport", "IntegratorConfig", "SuvParams", "Trajectory",
    "classify_fixed_points", "evolve_state_vector", "evolve_trajectory",
    "flow_field", "rabi_evolution", "sigma_z_series", "theta_drift",
    "theta_series",
    "BornTest", "EnsembleConfig", "EnsembleResult", "born_statistics_test",
    "frozen_noise_exit_probability", "gj_ratio_sweep", "martingale_check",
    "run_ensemble", "scaling_sweep", "tau_sweep",
    "ConstantField", "NoiseKind", "NoisePath", "OrnsteinUhlenbeck", "WhiteNoise",
    "autocorrelation", "sample_constant", "sample_ou", "sample_path",
    "sample_white",
    "CrystalParams", "PhaseGrid", "WignerField", "cfl_timestep", "compute_wigner",
    "evolve_wigner", "gaussian_wigner", "limit_experiment",
    "localization_widths", "marginals", "phase_space_moments",
    "quantum_correction", "wigner_mass",
]
