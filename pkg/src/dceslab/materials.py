"""Constitutive response of a time-modulated polar dielectric.

Single-oscillator Lorentz model with an optional wavevector-dependent
resonance (spatial dispersion), the two-frequency susceptibility created
by a weak Gaussian-windowed modulation of the resonance frequency, and
the modulation pulse itself together with its closed-form spectrum.

All evaluation functions accept scalars or numpy arrays (broadcasting)
and are pure: no shared mutable state.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

C_LIGHT = 299_792_458.0  # m/s

# Dipole-approximation validity scale: wavenumbers comparable to 2*pi over
# the Bohr radius probe sub-atomic structure and the slab response model
# stops being meaningful there.
BOHR_RADIUS = 5.29e-11  # m
DIPOLE_Q_LIMIT = 2.0 * np.pi / BOHR_RADIUS  # rad/m

# SiC parameter set used throughout the bundled presets.
SIC_EPS_INF = 6.7
SIC_OMEGA_P = 1.049e14  # rad/s
SIC_OMEGA_0 = 1.49e14  # rad/s
SIC_GAMMA = 8.97e11  # rad/s
SIC_BETA = 1.539e6  # m/s


class DipoleLimitWarning(UserWarning):
    """Requested wavenumber lies beyond the dipole-approximation scale."""


@dataclass(frozen=True)
class LorentzMaterial:
    """Static parameters of the polar dielectric.

    Parameters
    ----------
    eps_inf : float
        High-frequency permittivity (>= 1).
    omega_p : float
        Plasma frequency / oscillator strength [rad/s] (>= 0; zero turns
        the oscillator off and leaves the bare ``eps_inf`` background).
    omega_0 : float
        Transverse-optical resonance frequency [rad/s].
    gamma : float
        Damping rate [rad/s].
    beta : float
        Nonlocality velocity [m/s]; ``beta = 0`` selects the local model.
    """

    eps_inf: float
    omega_p: float
    omega_0: float
    gamma: float
    beta: float = 0.0

    def __post_init__(self):
        if not self.omega_0 > 0:
            raise ValueError("omega_0 must be > 0")
        if self.omega_p < 0:
            raise ValueError("omega_p must be >= 0")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.eps_inf < 1:
            raise ValueError("eps_inf must be >= 1")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")

    @property
    def is_local(self) -> bool:
        return self.beta == 0.0


@dataclass(frozen=True)
class ModulationPulse:
    """Gaussian-windowed harmonic modulation of the resonance frequency.

    The resonance is driven as ``omega_0 -> omega_0 * (1 + delta_omega *
    f(t))`` with ``f(t) = cos(Omega t) exp(-t^2 / 2 T^2)``.
    """

    delta_omega: float
    Omega: float  # carrier frequency [rad/s]
    T: float  # Gaussian temporal width [s]

    def __post_init__(self):
        if abs(self.delta_omega) > 0.2:
            raise ValueError(
                "|delta_omega| > 0.2 is outside the perturbative regime"
            )
        if not self.Omega > 0:
            raise ValueError("Omega must be > 0")
        if not self.T > 0:
            raise ValueError("T must be > 0")


def sic(beta: float = SIC_BETA) -> LorentzMaterial:
    """SiC material; pass ``beta=0.0`` for the local model."""
    return LorentzMaterial(
        eps_inf=SIC_EPS_INF,
        omega_p=SIC_OMEGA_P,
        omega_0=SIC_OMEGA_0,
        gamma=SIC_GAMMA,
        beta=beta,
    )


def _as_float(x):
    """Return a float array view of x, preserving scalar-ness for output."""
    return np.asarray(x, dtype=float)


def _scalar_or_array(x):
    return np.asarray(x).item() if np.ndim(x) == 0 else x


def warn_if_beyond_dipole_limit(q) -> None:
    """Emit DipoleLimitWarning when any wavenumber exceeds 2*pi/a_Bohr."""
    if np.any(_as_float(q) > DIPOLE_Q_LIMIT):
        warnings.warn(
            "wavenumber exceeds the dipole-approximation scale 2*pi/a_0 "
            f"= {DIPOLE_Q_LIMIT:.3e} rad/m; results there are not physical",
            DipoleLimitWarning,
            stacklevel=3,
        )


def resonance_freq_sq(mat: LorentzMaterial, q):
    """Wavevector-shifted squared resonance frequency [rad^2/s^2].

    Returns ``omega_0^2 - beta^2 q^2``; negative values at large ``q`` are
    allowed (the resonance disappears and the response flattens).
    """
    q = _as_float(q)
    if np.any(q < 0):
        raise ValueError("q must be >= 0")
    return _scalar_or_array(mat.omega_0**2 - mat.beta**2 * q**2)


def permittivity_bg(mat: LorentzMaterial, omega, q=0.0):
    """Background (unmodulated) relative permittivity.

    eps_bg(omega, q) = eps_inf * (1 + omega_p^2 /
                       (omega_0^2(q) - omega^2 - i gamma omega))

    with ``omega_0^2(q) = omega_0^2 - beta^2 q^2``.  For ``beta = 0`` this
    is the ordinary local Lorentz model for every ``q``.  Negative
    frequencies are rejected; callers extend by the Hermitian symmetry
    ``eps(-omega) = conj(eps(omega))``.
    """
    omega = _as_float(omega)
    q = _as_float(q)
    if np.any(omega < 0):
        raise ValueError("omega must be >= 0; use eps(-w) = conj(eps(w))")
    if np.any(q < 0):
        raise ValueError("q must be >= 0")
    warn_if_beyond_dipole_limit(q)
    den = resonance_freq_sq(mat, q) - omega**2 - 1j * mat.gamma * omega
    return _scalar_or_array(mat.eps_inf * (1.0 + mat.omega_p**2 / den))


def delta_chi(
    mat: LorentzMaterial,
    pulse: ModulationPulse,
    omega,
    omega_prime,
    q=0.0,
):
    """Two-frequency modulation susceptibility (dimension: seconds).

    Couples an input frequency ``omega_prime`` to an output ``omega``
    through the pulse spectrum evaluated at the frequency transfer
    ``omega_prime - omega``:

        delta_chi = -eps_inf * omega_0^2 omega_p^2 delta_omega
                    * F(omega_prime - omega)
                    / ((omega_0^2(q) - omega_prime^2 - i gamma omega_prime)
                       * (omega_0^2(q) - omega^2 - i gamma omega))

    The ``eps_inf`` prefactor keeps the modulated response consistent with
    the eps_inf-scaled background model.  Both frequency arguments may be
    negative; the damping terms then flip sign by direct substitution,
    which leaves ``|delta_chi|`` unchanged.
    """
    omega = _as_float(omega)
    omega_prime = _as_float(omega_prime)
    q = _as_float(q)
    if np.any(q < 0):
        raise ValueError("q must be >= 0")
    warn_if_beyond_dipole_limit(q)
    w0q_sq = mat.omega_0**2 - mat.beta**2 * q**2
    den_out = w0q_sq - omega**2 - 1j * mat.gamma * omega
    den_in = w0q_sq - omega_prime**2 - 1j * mat.gamma * omega_prime
    num = (
        -mat.eps_inf
        * mat.omega_0**2
        * mat.omega_p**2
        * pulse.delta_omega
        * pulse_spectrum(pulse, omega_prime - omega)
    )
    return _scalar_or_array(num / (den_in * den_out))


def pulse_time(pulse: ModulationPulse, t):
    """Modulation profile f(t) = cos(Omega t) exp(-t^2 / 2 T^2)."""
    t = _as_float(t)
    return _scalar_or_array(
        np.cos(pulse.Omega * t) * np.exp(-(t**2) / (2.0 * pulse.T**2))
    )


def pulse_spectrum(pulse: ModulationPulse, omega):
    """Closed-form spectrum of the pulse, F(w) = int f(t) e^{i w t} dt.

    F(w) = T sqrt(2 pi) / 2 * [exp(-T^2 (w - Omega)^2 / 2)
                               + exp(-T^2 (w + Omega)^2 / 2)]

    Real and even in ``omega``.  Far from the two carrier lobes the value
    underflows smoothly to zero.
    """
    omega = _as_float(omega)
    T = pulse.T
    lobes = np.exp(-0.5 * (T * (omega - pulse.Omega)) ** 2) + np.exp(
        -0.5 * (T * (omega + pulse.Omega)) ** 2
    )
    return _scalar_or_array(0.5 * T * np.sqrt(2.0 * np.pi) * lobes)
