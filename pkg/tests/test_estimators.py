"""
Tests for spectral and time-domain estimators.
"""

import math

import numpy as np
import pytest

from rheobrown.core import spectra
from rheobrown.core.curves import TimeCurve
from rheobrown.core.estimators import (
    WelchConfig,
    ensemble_msd,
    ensemble_vacf,
    loglog_slope,
    mean_square_velocity,
    psd_from_vacf,
    stationarity_check,
    welch_psd,
)
from rheobrown.core.exceptions import ConfigError, ParameterError
from rheobrown.core.media import canonical_medium
from rheobrown.core.simkit import Ensemble, SimConfig, simulate


def _white_ensemble(n_traj=16, n_steps=8192, dt=0.01, seed=0):
    rng = np.random.default_rng(seed)
    velocities = rng.standard_normal((n_traj, n_steps, 1))
    positions = np.cumsum(velocities, axis=1) * dt
    return Ensemble(dt, positions, velocities, canonical_medium("viscous"), seed)


def _ballistic_ensemble(n_steps=200, dt=0.1):
    positions = (np.arange(n_steps) * dt).reshape(1, n_steps, 1)
    velocities = np.ones_like(positions)
    return Ensemble(dt, positions, velocities, canonical_medium("viscous"), 0)


class TestWelch:
    """Test the averaged periodogram and its convention."""

    def test_white_noise_level(self):
        """Test unit white noise at step dt has the two-sided level dt."""
        ensemble = _white_ensemble()
        psd = welch_psd(ensemble, WelchConfig(256))
        interior = psd.values[1:-1]
        assert np.mean(interior) == pytest.approx(0.01, rel=0.02)
        assert psd.stderr is not None
        assert psd.omega[-1] == pytest.approx(math.pi / 0.01)

    def test_viscous_ensemble(self):
        """Test a simulated viscous ensemble against the closed spectrum."""
        medium = canonical_medium("viscous")
        ensemble = simulate(SimConfig(medium, 0.05, 8192, n_traj=64, seed=11))
        psd = welch_psd(ensemble, WelchConfig(1024))
        band = (psd.omega >= 0.2) & (psd.omega <= 3.0)
        ratio = psd.values[band] / spectra.psd_closed(medium, psd.omega[band])
        assert np.median(ratio) == pytest.approx(1.0, abs=0.1)

    def test_segment_too_long(self):
        """Test a segment longer than the series."""
        with pytest.raises(ConfigError):
            welch_psd(_white_ensemble(n_steps=128), WelchConfig(256))

    def test_config_validation(self):
        """Test segment length and overlap bounds."""
        with pytest.raises(ConfigError):
            WelchConfig(1)
        with pytest.raises(ConfigError):
            WelchConfig(256, overlap=0.95)

    def test_unknown_field(self):
        """Test only velocity and position spectra exist."""
        with pytest.raises(ParameterError):
            welch_psd(_white_ensemble(n_steps=512), WelchConfig(256), field="force")


class TestCorrelations:
    """Test VACF and MSD estimators."""

    def test_white_vacf(self):
        """Test white noise decorrelates after one step."""
        vacf = ensemble_vacf(_white_ensemble(n_steps=4096), max_lag=8)
        assert vacf.values[0] == pytest.approx(1.0, abs=0.02)
        np.testing.assert_allclose(vacf.values[1:], 0.0, atol=0.02)
        assert vacf.t[1] == pytest.approx(0.01)

    def test_ballistic_msd(self):
        """Test x = t gives MSD = t^2 with and without time averaging."""
        ensemble = _ballistic_ensemble()
        expected = (np.arange(51) * 0.1) ** 2
        plain = ensemble_msd(ensemble, max_lag=50)
        averaged = ensemble_msd(ensemble, time_average=True, max_lag=50)
        np.testing.assert_allclose(plain.values, expected, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(averaged.values, expected, rtol=1e-6, atol=1e-9)

    def test_max_lag_bounds(self):
        """Test lags beyond the series are rejected."""
        with pytest.raises(ParameterError):
            ensemble_msd(_ballistic_ensemble(), max_lag=500)
        with pytest.raises(ParameterError):
            ensemble_vacf(_ballistic_ensemble(), max_lag=-1)

    def test_psd_from_vacf(self):
        """Test the trapezoidal transform of exp(-t)."""
        t = np.arange(40001) * 1e-3
        vacf = TimeCurve(t, np.exp(-t))
        omega = np.array([0.1, 1.0, 10.0])
        psd = psd_from_vacf(vacf, omega)
        np.testing.assert_allclose(psd.values, 2.0 / (1.0 + omega**2), rtol=1e-3)

    def test_mean_square_velocity(self):
        """Test <v^2> of unit white noise."""
        estimate = mean_square_velocity(_white_ensemble(n_steps=4096))
        assert estimate.value == pytest.approx(1.0, abs=0.02)
        assert estimate.stderr > 0.0


class TestStationarity:
    """Test the disjoint-origin VACF comparison."""

    def test_stationary(self):
        """Test white noise passes."""
        report = stationarity_check(_white_ensemble(), n_origins=4)
        assert report.passed
        assert report.n_origins == 4

    def test_single_origin(self):
        """Test one window is trivially stationary."""
        report = stationarity_check(_white_ensemble(n_steps=256), n_origins=1)
        assert report.passed and report.discrepancy == 0.0

    def test_variance_jump(self):
        """Test a noise level that triples halfway fails."""
        ensemble = _white_ensemble()
        ensemble.velocities[:, 4096:] *= 3.0
        report = stationarity_check(ensemble, n_origins=2)
        assert not report.passed
        assert report.discrepancy == pytest.approx(8.0, rel=0.1)

    def test_needs_trajectories(self):
        """Test one trajectory cannot give standard errors."""
        with pytest.raises(ParameterError):
            stationarity_check(_white_ensemble(n_traj=1), n_origins=2)


class TestSlope:
    """Test log-log fits."""

    def test_power_law(self):
        """Test the exponent of t^2."""
        t = np.logspace(0, 2, 20)
        assert loglog_slope(t, t**2, 1.0, 100.0) == pytest.approx(2.0, rel=1e-10)

    def test_empty_window(self):
        """Test a window without samples."""
        t = np.logspace(0, 2, 20)
        with pytest.raises(ParameterError):
            loglog_slope(t, t, 1e3, 1e4)
