"""
Tests for the verification suites.
"""

import math

import pytest

from rheobrown.core import spectra, verifier
from rheobrown.core.exceptions import ParameterError, VerificationError
from rheobrown.core.media import medium_keys


class TestLimitsSuite:
    """Test the closed-form limit checks."""

    def test_all_pass(self):
        """Test every limit check passes."""
        results = verifier.run_suite("limits")
        assert results["failed"] == 0
        assert results["passed"] == len(results["checks"])
        names = [check["name"] for check in results["checks"]]
        for key in medium_keys():
            assert f"master_equivalence[{key}]" in names

    def test_broken_closed_form_fails(self, monkeypatch):
        """Test a perturbed Maxwell closed form is caught."""
        original = spectra.normalized_maxwell
        monkeypatch.setattr(
            "rheobrown.core.spectra.normalized_maxwell", lambda x, w: 1.01 * original(x, w)
        )
        results = verifier.run_suite("limits")
        failed = [check["name"] for check in results["checks"] if check["status"] == "fail"]
        assert "master_equivalence[maxwell]" in failed

    def test_fractional_derivative(self):
        """Test the Grunwald-Letnikov check on its own."""
        check = verifier.check_fractional_derivative()
        assert check["status"] == "pass"
        assert check["metric"] <= check["tolerance"]


class TestFdtChecks:
    """Test individual fluctuation-dissipation checks."""

    def test_analytic_transform(self):
        """Test the analytic viscous VACF transform."""
        assert verifier.check_transform_analytic()["status"] == "pass"

    def test_hydrodynamic_initial_value(self):
        """Test the hydrodynamic VACF at t = 0."""
        assert verifier.check_hydrodynamic_initial_value()["status"] == "pass"

    def test_viscous_equipartition(self):
        """Test the viscous sum rule."""
        check = verifier.check_equipartition("viscous")
        assert check["status"] == "pass"
        assert check["name"] == "equipartition[viscous]"


class TestSimulationChecks:
    """Test the simulated-ensemble checks."""

    def test_hydrodynamic_ensemble(self):
        """Test the hydrodynamic ensemble meets equipartition and its closed spectrum."""
        checks = verifier.check_hydrodynamic_ensemble(seed=0, threads=2)
        assert [check["name"] for check in checks] == [
            "simulation[hydrodynamic_equipartition]",
            "simulation[hydrodynamic_psd]",
        ]
        for check in checks:
            assert check["status"] == "pass", check["message"]

    def test_suite_covers_every_simulated_family(self):
        """Test the simulation suite lists six ensembles."""
        assert len(verifier.simulation_checks()) == 6


class TestReporting:
    """Test suite bookkeeping and report lines."""

    def test_guarded_turns_errors_into_failures(self):
        """Test a raising check becomes a failure with an infinite metric."""

        def broken():
            raise ParameterError("no such medium")

        check = verifier._guarded("broken", broken)
        assert check["status"] == "fail"
        assert check["metric"] == math.inf
        assert "no such medium" in check["message"]

    def test_report_lines(self):
        """Test one tab-separated line per check."""
        results = {
            "checks": [
                verifier._make_check("a", 1e-12, 1e-9),
                verifier._make_check("b", 1.0, 0.1),
            ]
        }
        assert verifier.report_lines(results) == [
            "a\t1.000000e-12\t1.000000e-09\tpass",
            "b\t1.000000e+00\t1.000000e-01\tfail",
        ]

    def test_nan_metric_fails(self):
        """Test a NaN metric never passes."""
        assert verifier._make_check("nan", float("nan"), 1.0)["status"] == "fail"

    def test_unknown_suite(self):
        """Test an unknown suite name."""
        with pytest.raises(ValueError):
            verifier.run_suite("nonsense")

    def test_require_pass_names_failures(self):
        """Test a failed check raises VerificationError naming it."""
        results = {
            "checks": [
                verifier._make_check("a", 1e-12, 1e-9),
                verifier._make_check("b", 1.0, 0.1),
            ]
        }
        with pytest.raises(VerificationError) as excinfo:
            verifier.require_pass(results)
        assert excinfo.value.failed == ["b"]
        assert "1 of 2 checks failed" in str(excinfo.value)

    def test_require_pass_is_silent_on_success(self):
        """Test a clean run raises nothing."""
        verifier.require_pass({"checks": [verifier._make_check("a", 0.0, 1.0)]})
