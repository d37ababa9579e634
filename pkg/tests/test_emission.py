"""Pair-generation kernel, spectra, decay factor, cutoff behavior."""

import numpy as np
import pytest

from dceslab.emission import (
    EmissionConfig,
    cutoff_study,
    decay_rate_factor,
    default_omega_grid,
    emission_spectrum,
    integrand_map,
    pair_emission_spectral_rate,
    pair_integrand,
)
from dceslab.materials import C_LIGHT, ModulationPulse, delta_chi, sic
from dceslab.quadrature import (
    AdaptiveConverged,
    HardCutoff,
    QuadratureSpec,
    convergence_scan,
)
from dceslab.slab import SlabGeometry, reflection_slab

SIC = sic()
SIC_LOCAL = sic(beta=0.0)
W0 = SIC.omega_0
Q_UNIT = W0 / C_LIGHT
GEOM = SlabGeometry(d_s=100e-9, d=10e-9)
PULSE = ModulationPulse(delta_omega=0.01, Omega=2.2 * W0, T=80e-15)


def make_cfg(model="nonlocal", policy=None, rel_tol=1e-4, pulse=PULSE):
    mat = SIC_LOCAL if model == "local" else SIC
    if policy is None:
        policy = AdaptiveConverged()
    spec = QuadratureSpec(rel_tol=rel_tol, cutoff_policy=policy)
    return EmissionConfig(
        material=mat, pulse=pulse, geometry=GEOM, quadrature=spec,
        model_tag=model,
    )


class TestConfig:
    def test_model_tag_consistency(self):
        with pytest.raises(ValueError):
            EmissionConfig(SIC, PULSE, GEOM, QuadratureSpec(), "local")
        with pytest.raises(ValueError):
            EmissionConfig(SIC_LOCAL, PULSE, GEOM, QuadratureSpec(), "nonlocal")
        with pytest.raises(ValueError):
            EmissionConfig(SIC, PULSE, GEOM, QuadratureSpec(), "bogus")


class TestPairIntegrand:
    def test_zero_modulation(self):
        pulse = ModulationPulse(delta_omega=0.0, Omega=2.2 * W0, T=80e-15)
        cfg = make_cfg(pulse=pulse)
        assert pair_integrand(cfg, 1.2 * W0, W0, 1e7) == 0.0

    def test_vanishes_at_small_q(self):
        cfg = make_cfg()
        mid = pair_integrand(cfg, 1.2 * W0, W0, 50 * Q_UNIT)
        tiny = pair_integrand(cfg, 1.2 * W0, W0, 1e-4 * Q_UNIT)
        # q (1 - e^{-2qd})^2 ~ q^3 at small q
        assert tiny < 1e-12 * mid

    def test_symmetric_in_frequency_pair(self):
        cfg = make_cfg()
        rng = np.random.default_rng(11)
        for _ in range(15):
            w = W0 * rng.uniform(0.85, 1.35)
            wp = W0 * rng.uniform(0.85, 1.35)
            q = rng.uniform(1e6, 4e8)
            a = pair_integrand(cfg, w, wp, q)
            b = pair_integrand(cfg, wp, w, q)
            assert a == pytest.approx(b, rel=1e-12)

    def test_matches_public_operation_composition(self):
        """Independent assembly from delta_chi and reflection_slab."""
        cfg = make_cfg()
        rng = np.random.default_rng(5)
        for _ in range(10):
            w = W0 * rng.uniform(0.85, 1.35)
            wp = W0 * rng.uniform(0.85, 1.35)
            q = rng.uniform(1e6, 4e8)
            chi = delta_chi(SIC, PULSE, w, -wp, q)
            manual = (
                abs(chi) ** 2
                / (16 * np.pi**3)
                * q
                * (1 - np.exp(-2 * q * GEOM.d)) ** 2
                * reflection_slab(SIC, GEOM, wp, q).imag
                * reflection_slab(SIC, GEOM, w, q).imag
            )
            assert pair_integrand(cfg, w, wp, q) == pytest.approx(
                manual, rel=1e-10
            )

    def test_nonnegative(self):
        cfg = make_cfg()
        grid = pair_integrand(
            cfg,
            1.2 * W0,
            np.linspace(0.8, 1.4, 21)[:, None] * W0,
            np.geomspace(1, 2000, 21)[None, :] * Q_UNIT,
        )
        assert np.all(grid >= 0)


class TestIntegrandMap:
    def test_local_map_grows_with_q(self):
        cfg = make_cfg("local", HardCutoff(630 * Q_UNIT))
        wp = np.linspace(0.8 * W0, 1.4 * W0, 90)
        q = np.geomspace(Q_UNIT, 630 * Q_UNIT, 80)
        imap = integrand_map(cfg, 1.2 * W0, wp, q)
        i, j = np.unravel_index(np.argmax(imap.values), imap.values.shape)
        assert j == len(q) - 1  # strongest at the largest wavenumber
        assert abs(wp[i] / W0 - 1.0) < 0.05 or abs(wp[i] / W0 - 1.2) < 0.05

    def test_nonlocal_map_vanishes_at_large_q(self):
        cfg = make_cfg()
        wp = np.linspace(0.8 * W0, 1.4 * W0, 90)
        q = np.geomspace(Q_UNIT, 2000 * Q_UNIT, 90)
        imap = integrand_map(cfg, 1.2 * W0, wp, q)
        i, j = np.unravel_index(np.argmax(imap.values), imap.values.shape)
        assert q[j] < 630 * Q_UNIT  # interior maximum
        assert imap.values[:, -1].max() < 1e-6 * imap.values[i, j]

    def test_zero_oscillator_map(self):
        from dceslab.materials import LorentzMaterial

        mat = LorentzMaterial(eps_inf=1.0, omega_p=0.0, omega_0=W0, gamma=1e12)
        cfg = EmissionConfig(mat, PULSE, GEOM, QuadratureSpec(), "local")
        wp = np.linspace(0.8 * W0, 1.4 * W0, 12)
        q = np.geomspace(Q_UNIT, 100 * Q_UNIT, 12)
        imap = integrand_map(cfg, 1.2 * W0, wp, q)
        assert np.all(imap.values == 0)

    def test_argmax_matches_scalar_scan_oracle(self):
        cfg = make_cfg()
        wp = np.linspace(0.9 * W0, 1.3 * W0, 25)
        q = np.geomspace(5 * Q_UNIT, 400 * Q_UNIT, 25)
        imap = integrand_map(cfg, 1.2 * W0, wp, q)
        brute = np.array(
            [[pair_integrand(cfg, 1.2 * W0, w, qq) for qq in q] for w in wp]
        )
        assert np.unravel_index(np.argmax(imap.values), imap.values.shape) == (
            np.unravel_index(np.argmax(brute), brute.shape)
        )


class TestKernelIntegral:
    def test_local_hard_cutoff_growth(self):
        cfg = make_cfg("local")
        f = lambda q: pair_integrand(cfg, 1.2 * W0, W0, q)
        q_c = 1e4 * Q_UNIT
        table = convergence_scan(
            f, [q_c, 2 * q_c, 4 * q_c], QuadratureSpec(rel_tol=1e-7)
        )
        r1 = table[1][1] / table[0][1]
        r2 = table[2][1] / table[1][1]
        assert 3.5 < r1 < 4.5
        assert 3.5 < r2 < 4.5

    def test_nonlocal_plateau_beyond_transparency(self):
        cfg = make_cfg()
        f = lambda q: pair_integrand(cfg, 1.2 * W0, W0, q)
        q0 = 10 * W0 / SIC.beta
        table = convergence_scan(
            f, [q0, 2 * q0, 4 * q0], QuadratureSpec(rel_tol=1e-7)
        )
        assert abs(table[1][1] - table[0][1]) / table[0][1] < 1e-3
        assert abs(table[2][1] - table[1][1]) / table[1][1] < 1e-3


class TestSpectralRate:
    def test_zero_modulation(self):
        pulse = ModulationPulse(delta_omega=0.0, Omega=2.2 * W0, T=80e-15)
        pt = pair_emission_spectral_rate(make_cfg(pulse=pulse), 1.1 * W0)
        assert pt.rate == 0.0
        assert pt.converged

    def test_delta_omega_squared_scaling(self):
        def rate(d):
            pulse = ModulationPulse(delta_omega=d, Omega=2.2 * W0, T=80e-15)
            return pair_emission_spectral_rate(
                make_cfg(pulse=pulse), 1.1 * W0
            ).rate

        assert rate(2e-3) / rate(1e-3) == pytest.approx(4.0, rel=1e-6)

    def test_local_adaptive_flags_divergence(self):
        cfg = make_cfg("local")  # adaptive policy
        for u in (0.9, 1.1, 1.3):
            pt = pair_emission_spectral_rate(cfg, u * W0)
            assert pt.q_divergent
            assert not pt.converged

    def test_nonlocal_converges_within_transparency_scale(self):
        cfg = make_cfg()
        for u in (0.9, 1.1, 1.3):
            pt = pair_emission_spectral_rate(cfg, u * W0)
            assert pt.converged and not pt.q_divergent
            assert pt.effective_q_max <= 50 * W0 / SIC.beta

    def test_rate_normalization(self):
        pt = pair_emission_spectral_rate(make_cfg(), 1.1 * W0)
        assert pt.rate == pytest.approx(
            pt.spectral_probability / PULSE.T, rel=1e-12
        )


class TestDecayFactor:
    def test_kernel_identity_with_pair_rate(self):
        cfg = make_cfg()
        value, point = decay_rate_factor(cfg, 1.2 * W0)
        pt = pair_emission_spectral_rate(cfg, 1.2 * W0)
        assert value == pytest.approx(pt.spectral_probability, rel=1e-12)

    def test_zero_modulation(self):
        pulse = ModulationPulse(delta_omega=0.0, Omega=2.2 * W0, T=80e-15)
        value, _ = decay_rate_factor(make_cfg(pulse=pulse), 1.2 * W0)
        assert value == 0.0

    def test_divergence_semantics(self):
        value, point = decay_rate_factor(make_cfg("local"), 1.2 * W0)
        assert point.q_divergent
        val_nl, point_nl = decay_rate_factor(make_cfg(), 1.2 * W0)
        assert point_nl.converged and val_nl > 0


class TestSpectrum:
    def test_arrays_and_nonnegativity(self):
        cfg = make_cfg(rel_tol=1e-3)
        grid = default_omega_grid(SIC, n=24, lo_over_omega0=1.0,
                                  hi_over_omega0=1.3)
        res = emission_spectrum(cfg, grid)
        assert len(res.rate) == len(grid)
        assert np.all(res.rate >= 0)
        assert res.metadata["model"] == "nonlocal"
        assert res.metadata["all_converged"]

    def test_grid_validation(self):
        cfg = make_cfg(rel_tol=1e-3)
        with pytest.raises(ValueError):
            emission_spectrum(cfg, np.array([2.0, 1.0]) * W0)

    def test_default_grid_clusters_near_peaks(self):
        grid = default_omega_grid(SIC, n=400) / W0
        assert grid[0] >= 0.8 and grid[-1] <= 1.4
        assert np.all(np.diff(grid) > 0)
        # resolution near both peaks is much finer than the base grid
        for peak in (1.0, 1.1964):
            near = np.abs(grid - peak)
            assert near.min() < 1e-3


class TestCutoffStudy:
    def test_local_growth_and_nonlocal_plateau(self):
        cutoffs = [630 * Q_UNIT * (2**k) for k in range(5)]
        rows_l = cutoff_study(
            make_cfg("local", rel_tol=1e-3), 1.2 * W0, cutoffs
        )
        rates_l = [r.rate for r in rows_l]
        assert rates_l[-1] / rates_l[0] > 10
        # ratio approaches 4 per doubling once well into the linear tail
        assert 3.0 < rates_l[-1] / rates_l[-2] < 5.0
        rows_n = cutoff_study(make_cfg(rel_tol=1e-3), 1.2 * W0, cutoffs[-3:])
        rates_n = [r.rate for r in rows_n]
        assert abs(rates_n[-1] - rates_n[0]) / rates_n[0] < 1e-3

    def test_rejects_unordered(self):
        with pytest.raises(ValueError):
            cutoff_study(make_cfg(), 1.2 * W0, [2.0, 1.0])
