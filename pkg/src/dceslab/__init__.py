"""Dynamical-Casimir observables of time-modulated polar-dielectric slabs."""

from .materials import (
    DipoleLimitWarning,
    LorentzMaterial,
    ModulationPulse,
    delta_chi,
    permittivity_bg,
    pulse_spectrum,
    pulse_time,
    resonance_freq_sq,
    sic,
)
from .slab import (
    DispersionMap,
    LosslessPoleError,
    SlabGeometry,
    dispersion_map,
    interface_r,
    reflection_slab,
    surface_mode_closed_form,
    surface_mode_freq,
)
from .quadrature import (
    AdaptiveConverged,
    HardCutoff,
    IntegralResult,
    QuadratureSpec,
    convergence_scan,
    integrate_finite,
    integrate_semi_infinite,
)
from .emission import (
    CutoffRow,
    EmissionConfig,
    IntegrandMap,
    RatePoint,
    SpectrumResult,
    cutoff_study,
    decay_rate_factor,
    default_omega_grid,
    emission_spectrum,
    integrand_map,
    pair_emission_spectral_rate,
    pair_integrand,
)
from .config import ConfigError, ScenarioConfig, parse_config, serialize
from .runner import NumericError, run_scenario

__version__ = "0.1.0"
