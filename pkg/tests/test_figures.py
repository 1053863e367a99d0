"""
Tests for the figure datasets.
"""

import json
import os

import numpy as np
import pytest

from rheobrown.core.exceptions import ParameterError
from rheobrown.core.figures import FIGURES, figure_curves, figure_ids, write_figure
from rheobrown.utils.io import file_digest, read_columns_csv


class TestFigureCurves:
    """Test the normalized sweeps."""

    def test_ids(self):
        """Test the available figures."""
        assert figure_ids() == [1, 4, 7, 9, 11]

    def test_maxwell_sweep_has_reference(self):
        """Test six Maxwell curves plus the viscous reference."""
        curves = figure_curves(1)
        assert len(curves) == 7
        spec, curve = curves[-1]
        assert spec.reference and spec.medium == "viscous"
        assert curve.values[0] == pytest.approx(1.0 / (1.0 + 1e-4), rel=1e-12)

    def test_trap_peaks_on_grid(self):
        """Test every trap curve reaches exactly one at its resonance."""
        for spec, curve in figure_curves(4):
            if spec.reference:
                continue
            w = spec.groups["omegaRtau"]
            index = int(np.argmin(np.abs(curve.omega - w)))
            assert curve.omega[index] == w
            assert curve.values[index] == pytest.approx(1.0, rel=1e-12)
            assert curve.values.max() == pytest.approx(1.0, rel=1e-12)

    def test_springpot_alpha_one_is_reference(self):
        """Test the alpha = 1 springpot curve coincides with the reference."""
        curves = {spec.name: curve for spec, curve in figure_curves(9)}
        np.testing.assert_allclose(
            curves["subdiffusive_alpha1"].values, curves["viscous"].values, rtol=1e-10
        )

    def test_hydrodynamic_sweep(self):
        """Test every gamma curve starts near 1/gamma."""
        grid = np.array([1e-8, 1.0])
        for spec, curve in figure_curves(11, grid=grid):
            assert curve.values[0] == pytest.approx(1.0 / spec.groups["gamma"], rel=1e-3)

    def test_custom_grid(self):
        """Test a caller-supplied grid is used as given."""
        grid = np.array([0.1, 1.0, 10.0])
        for _, curve in figure_curves(7, grid=grid):
            np.testing.assert_array_equal(curve.omega, grid)

    def test_unknown_figure(self):
        """Test an unknown figure id."""
        with pytest.raises(ParameterError):
            figure_curves(2)


class TestWriteFigure:
    """Test the figure files and their manifest."""

    def test_files_and_manifest(self, tmp_path):
        """Test one CSV per curve and a manifest with their digests."""
        written = write_figure(4, str(tmp_path))
        names = sorted(os.path.basename(p) for p in written["files"])
        assert len(names) == len(FIGURES[4].curves)
        assert "fig4_trap_omegaRtau0.5.csv" in names
        assert "fig4_viscous.csv" in names
        headers, columns = read_columns_csv(written["files"][0])
        assert headers == ["omega_dimensionless", "psd_normalized"]
        assert columns[0].size > 400

        with open(written["manifest"]) as f:
            manifest = json.load(f)
        assert manifest["command"] == "figures"
        assert manifest["config"]["figure"] == 4
        digests = {entry["path"]: entry["sha256"] for entry in manifest["files"]}
        for path in written["files"]:
            assert digests[os.path.basename(path)] == file_digest(path)

    def test_rerun_is_identical(self, tmp_path):
        """Test regenerating a figure reproduces its files."""
        first = write_figure(9, str(tmp_path / "a"))
        second = write_figure(9, str(tmp_path / "b"))
        for a, b in zip(first["files"] + [first["manifest"]], second["files"] + [second["manifest"]]):
            assert file_digest(a) == file_digest(b)
