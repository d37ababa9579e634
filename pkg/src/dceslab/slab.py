"""Quasistatic p-polarized optics of a vacuum-clad dielectric slab.

The reflection coefficient is the electrostatic (near-field) slab form
with the wavevector-dependent permittivity substituted into the local
formula; spatial dispersion enters only through eps(omega, q).  Surface
modes are defined by the lossless resonance condition eps = -1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .materials import LorentzMaterial, permittivity_bg, _as_float, _scalar_or_array


class LosslessPoleError(ArithmeticError):
    """Interface response evaluated exactly on the lossless eps = -1 pole."""


@dataclass(frozen=True)
class SlabGeometry:
    """Slab thicknesses [m]: total ``d_s`` and modulated layer ``d``."""

    d_s: float
    d: float

    def __post_init__(self):
        if not 0 < self.d <= self.d_s:
            raise ValueError("require 0 < d <= d_s")


@dataclass(frozen=True)
class DispersionMap:
    """|R_p| sampled on an (omega, q) grid; rows follow omega_grid."""

    omega_grid: np.ndarray  # [rad/s]
    q_grid: np.ndarray  # [rad/m]
    values: np.ndarray  # |R_p|, shape (len(omega_grid), len(q_grid))

    def __post_init__(self):
        if self.values.shape != (len(self.omega_grid), len(self.q_grid)):
            raise ValueError("values shape does not match grids")
        if np.any(self.values < 0):
            raise ValueError("|R_p| values must be >= 0")


def interface_r(eps):
    """Quasistatic single-interface coefficient r = (eps - 1)/(eps + 1)."""
    eps = np.asarray(eps, dtype=complex)
    if np.any(eps == -1.0):
        raise LosslessPoleError(
            "eps = -1 exactly: lossless surface resonance, keep gamma > 0"
        )
    return _scalar_or_array((eps - 1.0) / (eps + 1.0))


def reflection_slab(mat: LorentzMaterial, geom: SlabGeometry, omega, q):
    """Quasistatic p-polarized reflection coefficient of the slab.

    R_p(omega, q) = r (1 - e^{-2 q d_s}) / (1 - r^2 e^{-2 q d_s})

    with r built from the (possibly q-dependent) background permittivity.
    Vanishes at q -> 0 and tends to the half-space value r for
    q d_s >> 1.
    """
    omega = _as_float(omega)
    q = _as_float(q)
    if np.any(omega <= 0) or np.any(q <= 0):
        raise ValueError("omega and q must be > 0")
    r = interface_r(permittivity_bg(mat, omega, q))
    damp = np.exp(-2.0 * q * geom.d_s)
    return _scalar_or_array(r * (1.0 - damp) / (1.0 - r**2 * damp))


def dispersion_map(
    mat: LorentzMaterial,
    geom: SlabGeometry,
    omega_grid,
    q_grid,
) -> DispersionMap:
    """Sample |R_p| on the outer product of the two grids."""
    omega_grid = _as_float(omega_grid)
    q_grid = _as_float(q_grid)
    for name, grid in (("omega_grid", omega_grid), ("q_grid", q_grid)):
        if grid.ndim != 1 or len(grid) == 0:
            raise ValueError(f"{name} must be a non-empty 1-D array")
        if np.any(grid <= 0):
            raise ValueError(f"{name} must be positive")
        if np.any(np.diff(grid) <= 0):
            raise ValueError(f"{name} must be strictly increasing")
    values = np.abs(
        reflection_slab(mat, geom, omega_grid[:, None], q_grid[None, :])
    )
    return DispersionMap(omega_grid=omega_grid, q_grid=q_grid, values=values)


def surface_mode_closed_form(mat: LorentzMaterial, q):
    """Closed-form lossless surface-mode frequency, NaN where absent.

    Root of eps_inf (1 + omega_p^2 / (omega_0^2(q) - omega^2)) = -1:

        omega^2 = omega_0^2 - beta^2 q^2
                  + eps_inf omega_p^2 / (1 + eps_inf)
    """
    q = _as_float(q)
    w_sq = (
        mat.omega_0**2
        - mat.beta**2 * q**2
        + mat.eps_inf * mat.omega_p**2 / (1.0 + mat.eps_inf)
    )
    return _scalar_or_array(np.sqrt(np.where(w_sq > 0, w_sq, np.nan)))


def surface_mode_freq(mat: LorentzMaterial, q: float):
    """Lossless surface-mode frequency [rad/s] at wavenumber ``q``.

    Solves eps_bg(omega, q) = -1 on the real axis with the damping set to
    zero, then cross-checks the numeric root against the closed form.
    Returns None when no surface mode exists (large ``q`` in the nonlocal
    model).
    """
    q = float(q)
    if q < 0:
        raise ValueError("q must be >= 0")
    if mat.omega_p == 0:
        return None  # eps = eps_inf >= 1 never crosses -1
    w0q_sq = mat.omega_0**2 - mat.beta**2 * q**2
    closed_sq = w0q_sq + mat.eps_inf * mat.omega_p**2 / (1.0 + mat.eps_inf)
    if closed_sq <= 0:
        return None
    closed = np.sqrt(closed_sq)

    def resonance(w):
        return mat.eps_inf * (1.0 + mat.omega_p**2 / (w0q_sq - w * w)) + 1.0

    # eps + 1 is strictly increasing in omega on the branch above the pole,
    # from -inf at the pole to eps_inf + 1 > 0 at infinity; the root sits
    # well above the pole (closed^2 - pole^2 is the fixed mode shift), so a
    # small offset keeps the bracket strictly inside the branch.
    pole = np.sqrt(w0q_sq) if w0q_sq > 0 else 0.0
    lo = pole * (1.0 + 1e-12) + 1e-9 * closed
    hi = 2.0 * closed + pole
    if resonance(lo) >= 0 or resonance(hi) <= 0:
        return None
    root = brentq(resonance, lo, hi, xtol=1e-3, rtol=1e-15)
    if abs(root - closed) > 1e-6 * closed:
        raise ArithmeticError(
            f"surface-mode root {root!r} disagrees with closed form {closed!r}"
        )
    return float(root)
