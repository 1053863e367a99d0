"""
Tests for closed-form spectra, velocity autocorrelations and MSDs.
"""

import math

import numpy as np
import pytest

from rheobrown.core import spectra
from rheobrown.core.curves import Normalization, TimeCurve
from rheobrown.core.media import (
    CANONICAL_CONTEXT,
    HarmonicTrap,
    Hydrodynamic,
    PhysicalContext,
    Subdiffusive,
    Viscous,
    canonical_medium,
    medium_keys,
)

X = np.logspace(-2, 2, 81)

SI = PhysicalContext.from_density(kT=4.11e-21, N=3, R=0.5e-6, rho_p=1050.0)


class TestNormalizedForms:
    """Test the normalized closed forms."""

    def test_viscous_half_power(self):
        """Test the corner value 1/2 at w tau = 1."""
        assert spectra.normalized_viscous(1.0) == pytest.approx(0.5, rel=1e-15)

    def test_maxwell_at_resonance(self):
        """Test the Maxwell value at w tau = w_R tau = 2."""
        assert spectra.normalized_maxwell(2.0, 2.0) == pytest.approx(0.25, rel=1e-14)

    def test_trap_peak(self):
        """Test the trap spectrum peaks at exactly one at resonance."""
        for w in (0.5, 1.0, 2.0, 5.0):
            assert spectra.normalized_trap(w, w) == pytest.approx(1.0, rel=1e-14)
        assert spectra.normalized_trap(0.0, 1.0) == 0.0
        assert spectra.normalized_trap(0.0, 0.0) == 1.0

    def test_jeffreys_limits(self):
        """Test xi = 0 is Maxwell and the DC value is 1/(1 + xi)."""
        np.testing.assert_allclose(
            spectra.normalized_jeffreys(X, 3.0, 0.0), spectra.normalized_maxwell(X, 3.0), rtol=1e-14
        )
        assert spectra.normalized_jeffreys(0.0, 3.0, 0.5) == pytest.approx(1.0 / 1.5)

    def test_subdiffusive_alpha_one(self):
        """Test alpha = 1 collapses onto the viscous spectrum."""
        np.testing.assert_allclose(
            spectra.normalized_subdiffusive(X, 1.0), spectra.normalized_viscous(X), rtol=1e-12
        )
        assert spectra.normalized_subdiffusive(0.0, 1.0) == 1.0

    def test_subdiffusive_tail(self):
        """Test the high-frequency slope -(3 - alpha)."""
        x = np.array([1e3, 1e4])
        values = spectra.normalized_subdiffusive(x, 0.5)
        assert math.log10(values[1] / values[0]) == pytest.approx(-2.5, abs=1e-3)

    def test_hydrodynamic_dc(self):
        """Test the DC value 1/gamma."""
        assert spectra.normalized_hydrodynamic(0.0, 0.46) == pytest.approx(1.0 / 0.46)

    def test_hydrodynamic_tail(self):
        """Test the w^-3/2 high-frequency decay."""
        x = np.array([1e6, 1e7])
        values = spectra.normalized_hydrodynamic(x, 0.46)
        assert math.log10(values[1] / values[0]) == pytest.approx(-1.5, abs=1e-2)


class TestMasterFormula:
    """Test the fluidity spectrum against the closed forms."""

    @pytest.mark.parametrize("key", medium_keys())
    def test_master_equals_closed(self, key):
        """Test N kT/(3 pi R) Re(phi) equals S_ref times the normalized form."""
        medium = canonical_medium(key, omegaR_tau=2.0, xi=0.5, alpha=0.5, gamma=0.55)
        omega = X / medium.time_scale
        np.testing.assert_allclose(
            spectra.psd_master(medium, omega), spectra.psd_closed(medium, omega), rtol=1e-10
        )

    def test_si_viscous(self):
        """Test an SI viscous fluid against its closed form."""
        medium = Viscous(SI, eta=8.9e-4)
        omega = X / medium.tau
        psd = spectra.psd_viscous(SI, 8.9e-4, omega)
        np.testing.assert_allclose(spectra.psd_master(medium, omega), psd, rtol=1e-10)
        expected = SI.psd_prefactor / 8.9e-4 / (1.0 + (omega * medium.tau) ** 2)
        np.testing.assert_allclose(psd, expected, rtol=1e-12)

    def test_jeffreys_dc(self):
        """Test the Jeffreys DC value uses the total viscosity."""
        value = spectra.psd_jeffreys(CANONICAL_CONTEXT, 1.0, 2.0, 1.0, 0.0)
        assert value == pytest.approx(CANONICAL_CONTEXT.psd_prefactor / 3.0)

    def test_si_trap_peak(self):
        """Test the trap spectrum vanishes at DC and reaches N kT/(3 pi R eta) at w_R."""
        medium = HarmonicTrap(SI, G=1e-3, eta=8.9e-4)
        assert spectra.psd_trap(SI, 1e-3, 8.9e-4, 0.0) == 0.0
        peak = spectra.psd_trap(SI, 1e-3, 8.9e-4, medium.omega_R)
        assert peak == pytest.approx(SI.psd_prefactor / 8.9e-4, rel=1e-9)

    def test_si_maxwell_dc(self):
        """Test the Maxwell DC value is the viscous one."""
        value = spectra.psd_maxwell(SI, 171.0, 1e-3, 0.0)
        assert value == pytest.approx(spectra.psd_viscous(SI, 1e-3, 0.0), rel=1e-12)

    def test_si_subdiffusive_tail(self):
        """Test the springpot spectrum decays as w^-(3 - alpha)."""
        medium = Subdiffusive(SI, mu_alpha=1e-5, alpha=0.5)
        omega = np.logspace(3, 5, 9) / medium.lam
        psd = spectra.psd_subdiffusive(SI, 1e-5, 0.5, omega)
        slope = np.polyfit(np.log(omega), np.log(psd), 1)[0]
        assert slope == pytest.approx(-2.5, abs=0.01)

    def test_si_hydrodynamic_tail(self):
        """Test the hydrodynamic spectrum decays as w^-3/2."""
        medium = Hydrodynamic(SI, eta=8.9e-4, rho_f=1000.0, rho_p=1050.0)
        omega = np.logspace(6, 8, 9) / medium.lam
        psd = spectra.psd_hydrodynamic(SI, 8.9e-4, 1000.0, 1050.0, omega)
        slope = np.polyfit(np.log(omega), np.log(psd), 1)[0]
        assert slope == pytest.approx(-1.5, abs=0.01)

    def test_hydrodynamic_dc(self):
        """Test memory leaves the viscous DC value unchanged."""
        medium = canonical_medium("hydrodynamic", gamma=0.46)
        value = spectra.psd_closed(medium, 0.0)
        assert value == pytest.approx(medium.ctx.psd_prefactor / medium.eta, rel=1e-12)

    def test_spectrum_curve(self):
        """Test normalized curves carry their groups."""
        curve = spectra.spectrum_curve(canonical_medium("maxwell", omegaR_tau=2.0), X, normalized=True)
        assert curve.normalization is Normalization.NORMALIZED
        assert curve.metadata["medium"] == "maxwell"
        assert curve.metadata["omegaR_tau"] == pytest.approx(2.0)
        assert curve.is_physical


class TestTimeDomain:
    """Test VACFs and MSDs."""

    def test_viscous_vacf(self):
        """Test C(0) = N kT/m and exponential decay."""
        assert spectra.vacf_viscous(SI, 8.9e-4, 0.0) == pytest.approx(3 * 4.11e-21 / SI.m)
        tau = Viscous(SI, 8.9e-4).tau
        ratio = spectra.vacf_viscous(SI, 8.9e-4, tau) / spectra.vacf_viscous(SI, 8.9e-4, 0.0)
        assert ratio == pytest.approx(math.exp(-1.0))

    def test_viscous_transform(self):
        """Test twice the real part of the analytic transform is the spectrum."""
        omega = X / Viscous(SI, 8.9e-4).tau
        transform = spectra.vacf_viscous_transform(SI, 8.9e-4, omega)
        np.testing.assert_allclose(
            2.0 * transform.real, spectra.psd_viscous(SI, 8.9e-4, omega), rtol=1e-12
        )

    def test_viscous_msd_regimes(self):
        """Test ballistic and diffusive limits of the Ornstein MSD."""
        ctx = CANONICAL_CONTEXT
        assert spectra.msd_viscous(ctx, 1.0, 1e-4) == pytest.approx(1e-8, rel=1e-3)
        t = 1e4
        assert spectra.msd_viscous(ctx, 1.0, t) == pytest.approx(2.0 * (t - 1.0), rel=1e-12)

    def test_msd_from_network_viscous(self):
        """Test the correspondence principle reproduces the Ornstein MSD."""
        medium = canonical_medium("viscous")
        t = np.linspace(0.0, 10.0, 11)
        curve = spectra.msd_from_network(medium, t)
        np.testing.assert_allclose(curve.values, spectra.msd_viscous(medium.ctx, 1.0, t), rtol=1e-12)

    def test_msd_from_network_trap_plateau(self):
        """Test the trap MSD saturates at 2 N kT/(6 pi R G)."""
        medium = canonical_medium("trap", omegaR_tau=1.0)
        curve = spectra.msd_from_network(medium, [50.0, 60.0])
        plateau = 2.0 * spectra.stationary_position_variance(medium)
        np.testing.assert_allclose(curve.values, plateau, rtol=1e-2)

    def test_vacf_from_msd(self):
        """Test half the second derivative of the MSD recovers the VACF."""
        ctx = CANONICAL_CONTEXT
        h = 1e-3
        t = np.arange(5001) * h
        vacf = spectra.vacf_from_msd(TimeCurve(t, spectra.msd_viscous(ctx, 1.0, t)))
        mask = (t >= 0.1) & (t <= 5.0)
        np.testing.assert_allclose(
            vacf.values[mask], spectra.vacf_viscous(ctx, 1.0, t[mask]), rtol=1e-4
        )

    def test_vacf_from_msd_needs_samples(self):
        """Test fewer than four samples are rejected."""
        t = np.arange(3) * 0.1
        with pytest.raises(ValueError):
            spectra.vacf_from_msd(TimeCurve(t, t))


class TestHydrodynamicVacf:
    """Test the VACF with hydrodynamic memory."""

    @pytest.mark.parametrize("gamma", [0.2, 0.46, 2.0])
    def test_initial_value(self, gamma):
        """Test C(0) = N kT/M for real and complex roots."""
        medium = canonical_medium("hydrodynamic", gamma=gamma)
        value = spectra.vacf_hydrodynamic(medium.ctx, medium.eta, medium.rho_f, medium.rho_p, 0.0)
        assert value == pytest.approx(spectra.mean_square_velocity(medium), rel=1e-10)

    def test_long_time_tail(self):
        """Test the t^-3/2 tail."""
        medium = canonical_medium("hydrodynamic", gamma=0.46)
        t = np.array([1e4, 1e5])
        values = spectra.vacf_hydrodynamic(medium.ctx, medium.eta, medium.rho_f, medium.rho_p, t)
        assert np.all(values > 0.0)
        assert math.log10(values[1] / values[0]) == pytest.approx(-1.5, abs=0.05)

    def test_roots_positive_real_part(self):
        """Test both roots lie in the right half-plane."""
        for gamma in (0.2, 0.46):
            a, b = spectra.hydrodynamic_roots(canonical_medium("hydrodynamic", gamma=gamma))
            assert np.real(a) > 0.0 and np.real(b) > 0.0


class TestSumRules:
    """Test numeric transforms and equipartition."""

    def test_cosine_transform(self):
        """Test the transform of exp(-t) is 2/(1 + w^2)."""
        omega = np.array([0.0, 0.1, 1.0, 10.0])
        values = spectra.cosine_transform(lambda s: math.exp(-s), omega, 1.0)
        np.testing.assert_allclose(values, 2.0 / (1.0 + omega**2), rtol=1e-6)

    def test_viscous_equipartition(self):
        """Test the integrated spectrum is pi N kT/m."""
        medium = canonical_medium("viscous")
        integral = spectra.equipartition_integral(medium)
        assert integral == pytest.approx(spectra.equipartition_target(medium), rel=5e-3)

    def test_position_variance(self):
        """Test the stationary variance of a trap and its absence for fluids."""
        assert spectra.stationary_position_variance(canonical_medium("trap", omegaR_tau=2.0)) == (
            pytest.approx(0.25)
        )
        assert spectra.stationary_position_variance(canonical_medium("viscous")) is None
