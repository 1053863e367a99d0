"""
Tests for the command-line interface.
"""

import json
import os

import numpy as np
import pytest

from rheobrown import cli
from rheobrown.core import spectra
from rheobrown.utils.io import file_digest, read_columns_csv, read_trajectory

HANDLERS = {
    "spectrum": cli.handle_spectrum_command,
    "figures": cli.handle_figures_command,
    "simulate": cli.handle_simulate_command,
    "verify": cli.handle_verify_command,
}


def run(*argv):
    args = cli.setup_parser().parse_args([str(a) for a in argv])
    return HANDLERS[args.command](args)


def write_ini(path, text):
    path.write_text(text)
    return str(path)


VISCOUS_RUN = """
[medium]
type = viscous
normalized = true

[simulation]
dt = 0.05
n_steps = 256
n_traj = 2
seed = 7

[welch]
segment_length = 64
"""

DIVERGING_RUN = """
[medium]
type = trap
normalized = true
omegaRtau = 10

[simulation]
dt = 1.0
n_steps = 100
n_traj = 1
scheme = semi_implicit_euler
override_stability = true
"""


class TestSpectrumCommand:
    """Test the spectrum subcommand."""

    def test_viscous_corner(self, tmp_path):
        """Test 200 rows with the value 1/2 at w tau = 1."""
        out = tmp_path / "viscous.csv"
        code = run("spectrum", "--medium", "viscous", "--normalized", "--grid", "1e-2:1e2:200", "-o", out)
        assert code == cli.EXIT_OK
        headers, (omega, psd) = read_columns_csv(str(out))
        assert headers == ["omega_dimensionless", "psd_normalized"]
        assert omega.size == 200
        assert psd[np.flatnonzero(omega == 1.0)[0]] == pytest.approx(0.5, rel=1e-15)
        assert os.path.exists(tmp_path / "viscous.manifest.json")

    def test_maxwell_resonance(self, tmp_path):
        """Test dimensionless flags imply normalized mode and 1/4 at w tau = 2."""
        out = tmp_path / "maxwell.csv"
        assert run("spectrum", "--medium", "maxwell", "--omegaRtau", "2", "-o", out) == cli.EXIT_OK
        _, (omega, psd) = read_columns_csv(str(out))
        index = int(np.argmin(np.abs(omega - 2.0)))
        assert omega[index] == pytest.approx(2.0, rel=1e-12)
        assert psd[index] == pytest.approx(0.25, rel=1e-9)

    def test_hydrodynamic_manifest_gamma(self, tmp_path):
        """Test the manifest echoes gamma for a silica-like bead in water."""
        out = tmp_path / "hydro.csv"
        code = run("spectrum", "--medium", "hydrodynamic", "--rho-p", "1570", "--rho-f", "1000", "-o", out)
        assert code == cli.EXIT_OK
        with open(tmp_path / "hydro.manifest.json") as f:
            manifest = json.load(f)
        assert manifest["groups"]["gamma"] == pytest.approx(0.46, abs=0.005)
        assert manifest["config"]["material"]["rho_p"] == "1570.0"
        _, (omega, psd) = read_columns_csv(str(out))
        assert np.all(psd > 0.0)

    def test_si_config_file(self, tmp_path):
        """Test an SI config file writes dimensional columns."""
        config = write_ini(
            tmp_path / "viscous.ini",
            "[physical]\nkT = 4.11e-21\nN = 3\nR = 0.5e-6\nrho_p = 1050\n"
            "[medium]\ntype = viscous\neta = 8.9e-4\n[grid]\nomega = 1e4:1e9:50\n",
        )
        out = tmp_path / "si.csv"
        assert run("spectrum", config, "-o", out) == cli.EXIT_OK
        headers, (omega, psd) = read_columns_csv(str(out))
        assert headers == ["omega_rad_s", "psd_si"]
        assert omega.size == 50
        assert psd[0] == pytest.approx(3 * 4.11e-21 / (3.0 * np.pi * 0.5e-6 * 8.9e-4), rel=1e-3)

    def test_default_output_name(self, tmp_path, monkeypatch):
        """Test the default CSV name."""
        monkeypatch.chdir(tmp_path)
        assert run("spectrum", "--medium", "trap", "--omegaRtau", "1") == cli.EXIT_OK
        assert os.path.exists(tmp_path / "spectrum_trap.csv")
        assert os.path.exists(tmp_path / "spectrum_trap.manifest.json")

    def test_deterministic(self, tmp_path):
        """Test reruns produce identical files."""
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run("spectrum", "--medium", "jeffreys", "--omegaRtau", "1", "--xi", "0.5", "-o", a)
        run("spectrum", "--medium", "jeffreys", "--omegaRtau", "1", "--xi", "0.5", "-o", b)
        assert file_digest(str(a)) == file_digest(str(b))


class TestExitCodes:
    """Test configuration, divergence and verification exit codes."""

    def test_no_medium(self, tmp_path):
        """Test a missing medium exits with 2."""
        assert run("spectrum", "-o", tmp_path / "x.csv") == cli.EXIT_CONFIG

    def test_mixed_units(self, tmp_path):
        """Test SI keys in normalized mode exit with 2."""
        code = run("spectrum", "--medium", "maxwell", "--normalized", "--eta", "1", "-o", tmp_path / "x.csv")
        assert code == cli.EXIT_CONFIG

    def test_invalid_material(self, tmp_path):
        """Test a zero viscosity exits with 2."""
        code = run("spectrum", "--medium", "trap", "--G", "1", "--eta", "0", "-o", tmp_path / "x.csv")
        assert code == cli.EXIT_CONFIG

    def test_missing_config(self, tmp_path):
        """Test a missing config file exits with 2."""
        assert run("spectrum", tmp_path / "missing.ini") == cli.EXIT_CONFIG

    def test_divergence(self, tmp_path):
        """Test a diverging integration exits with 3."""
        config = write_ini(tmp_path / "diverge.ini", DIVERGING_RUN)
        assert run("simulate", config, "--out", tmp_path / "out") == cli.EXIT_DIVERGENCE

    def test_verification_failure(self, tmp_path, monkeypatch, capsys):
        """Test a broken closed form makes verify exit with 4."""
        original = spectra.normalized_maxwell
        monkeypatch.setattr(
            "rheobrown.core.spectra.normalized_maxwell", lambda x, w: 2.0 * original(x, w)
        )
        assert run("verify", "--suite", "limits") == cli.EXIT_VERIFICATION
        assert "checks failed: " in capsys.readouterr().out

    def test_verification_pass(self, tmp_path):
        """Test the limits suite passes and writes its report."""
        report = tmp_path / "report.txt"
        assert run("verify", "--suite", "limits", "--report", report) == cli.EXIT_OK
        lines = report.read_text().splitlines()
        assert lines
        assert all(line.split("\t")[-1] == "pass" for line in lines)


class TestSimulateCommand:
    """Test the simulate subcommand."""

    def test_outputs(self, tmp_path):
        """Test trajectory files, PSD estimate and manifest."""
        config = write_ini(tmp_path / "run.ini", VISCOUS_RUN)
        out = tmp_path / "run"
        assert run("simulate", config, "--out", out) == cli.EXIT_OK
        assert sorted(os.listdir(out)) == [
            "manifest.json", "psd_estimate.csv", "traj_00000.bin", "traj_00001.bin"
        ]
        data = read_trajectory(str(out / "traj_00000.bin"))
        assert data.dt == 0.05
        assert data.medium == "viscous"
        assert data.velocities.shape == (256, 1)
        with open(out / "manifest.json") as f:
            manifest = json.load(f)
        assert manifest["seed"] == 7
        assert manifest["simulation"]["scheme"] == "exact_ou"
        assert len(manifest["files"]) == 3

    def test_reproducible_digests(self, tmp_path):
        """Test the same seed reproduces every file and the manifest."""
        config = write_ini(tmp_path / "run.ini", VISCOUS_RUN)
        run("simulate", config, "--out", tmp_path / "a", "--threads", "1")
        run("simulate", config, "--out", tmp_path / "b", "--threads", "2")
        for name in ("traj_00000.bin", "traj_00001.bin", "psd_estimate.csv", "manifest.json"):
            assert file_digest(str(tmp_path / "a" / name)) == file_digest(str(tmp_path / "b" / name))

    def test_seed_flag_overrides_file(self, tmp_path):
        """Test --seed replaces the seed of the config file."""
        config = write_ini(tmp_path / "run.ini", VISCOUS_RUN)
        run("simulate", config, "--out", tmp_path / "a")
        run("simulate", config, "--out", tmp_path / "b", "--seed", "8")
        with open(tmp_path / "b" / "manifest.json") as f:
            assert json.load(f)["seed"] == 8
        assert file_digest(str(tmp_path / "a" / "traj_00000.bin")) != file_digest(
            str(tmp_path / "b" / "traj_00000.bin")
        )


class TestFiguresCommand:
    """Test the figures subcommand."""

    def test_single_figure(self, tmp_path):
        """Test one figure writes its curves and manifest."""
        assert run("figures", "9", "--outdir", tmp_path) == cli.EXIT_OK
        assert os.path.exists(tmp_path / "fig9_manifest.json")
        assert os.path.exists(tmp_path / "fig9_subdiffusive_alpha0.25.csv")

    def test_all_figures(self, tmp_path):
        """Test every figure is written."""
        assert run("figures", "all", "--outdir", tmp_path) == cli.EXIT_OK
        manifests = sorted(name for name in os.listdir(tmp_path) if name.endswith("manifest.json"))
        assert len(manifests) == 5
