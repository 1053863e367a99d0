"""
Tests for configuration, validators, terminal output and output files.
"""

import inspect
import json
import os

import numpy as np
import pytest
from colorama import Fore

from rheobrown.core.curves import Normalization, SpectrumCurve
from rheobrown.core.exceptions import ConfigError, GridError, ParameterError
from rheobrown.core.media import Hydrodynamic, Maxwell, Viscous, medium_keys
from rheobrown.utils import output
from rheobrown.utils.config import (
    RunConfig,
    build_medium,
    config_from_mapping,
    example_config_path,
    load_config,
    load_thresholds,
    merge_points,
    parse_grid,
    with_defaults,
)
from rheobrown.utils.io import (
    file_digest,
    read_columns_csv,
    read_trajectory,
    write_columns_csv,
    write_manifest,
    write_spectrum_csv,
    write_trajectory,
)
from rheobrown.utils.validators import (
    is_uniform_grid,
    is_valid_alpha,
    is_valid_dimension,
    is_valid_overlap,
    is_valid_positive,
    require_positive,
)


class TestValidators:
    """Test validator functions."""

    def test_positive(self):
        """Test strictly positive finite values."""
        assert is_valid_positive(1e-21) is True
        assert is_valid_positive("2.5") is True
        assert is_valid_positive(0.0) is False
        assert is_valid_positive(float("inf")) is False
        assert is_valid_positive("abc") is False

    def test_alpha(self):
        """Test springpot orders in [0, 1]."""
        assert is_valid_alpha(0.0) is True
        assert is_valid_alpha(1.0) is True
        assert is_valid_alpha(1.5) is False

    def test_dimension(self):
        """Test N in {1, 2, 3}."""
        assert is_valid_dimension(3) is True
        assert is_valid_dimension(4) is False
        assert is_valid_dimension(2.0) is False
        assert is_valid_dimension(True) is False

    def test_grids_and_overlap(self):
        """Test uniform grids and Welch overlaps."""
        assert is_uniform_grid(np.arange(10) * 0.1) is True
        assert is_uniform_grid([0.0, 0.1, 0.3]) is False
        assert is_valid_overlap(0.9) is True
        assert is_valid_overlap(0.95) is False

    def test_require(self):
        """Test guards raise ParameterError."""
        assert require_positive("eta", "1e-3") == pytest.approx(1e-3)
        with pytest.raises(ParameterError):
            require_positive("eta", -1.0)


class TestGrid:
    """Test grid parsing."""

    def test_points_and_unit(self):
        """Test '1e-2:1e2:200' holds 200 points including one."""
        grid = parse_grid("1e-2:1e2:200")
        assert grid.size == 200
        assert grid[0] == 1e-2
        assert grid[-1] < 1e2
        assert 1.0 in grid
        assert np.all(np.diff(grid) > 0.0)

    def test_constant_ratio(self):
        """Test log spacing."""
        grid = parse_grid("1:1e4:8")
        np.testing.assert_allclose(grid[1:] / grid[:-1], 10.0**0.5, rtol=1e-12)

    @pytest.mark.parametrize("spec", ["1:2", "0:1:10", "2:1:10", "a:b:c", "1:10:1"])
    def test_malformed(self, spec):
        """Test malformed specifications."""
        with pytest.raises(GridError):
            parse_grid(spec)

    def test_merge_points(self):
        """Test points inside the range are merged, others ignored."""
        grid = merge_points(np.array([1.0, 2.0, 4.0]), [3.0, 10.0])
        np.testing.assert_array_equal(grid, [1.0, 2.0, 3.0, 4.0])


class TestConfig:
    """Test configuration parsing and medium construction."""

    @pytest.mark.parametrize("key", medium_keys())
    def test_example_configs(self, key):
        """Test every shipped example builds its medium."""
        cfg = load_config(example_config_path(key))
        medium = build_medium(cfg)
        assert medium.key == key

    def test_example_hydrodynamic_gamma(self):
        """Test the shipped hydrodynamic example has gamma = 0.46."""
        medium = build_medium(load_config(example_config_path("hydrodynamic")))
        assert isinstance(medium, Hydrodynamic)
        assert medium.gamma_ratio == pytest.approx(0.46, rel=1e-9)

    def test_mapping_errors(self):
        """Test missing type, unknown medium and unknown section."""
        with pytest.raises(ConfigError):
            config_from_mapping({"medium": {}})
        with pytest.raises(ConfigError):
            config_from_mapping({"medium": {"type": "honey"}})
        with pytest.raises(ConfigError):
            config_from_mapping({"medium": {"type": "viscous"}, "extras": {}})

    def test_missing_file(self, tmp_path):
        """Test a missing file is a ConfigError."""
        with pytest.raises(ConfigError):
            load_config(str(tmp_path / "missing.ini"))

    def test_normalized_forbids_si_keys(self):
        """Test mixing units fails."""
        cfg = config_from_mapping(
            {"medium": {"type": "maxwell", "normalized": "true", "omegaRtau": "2", "eta": "1"}}
        )
        with pytest.raises(ConfigError):
            build_medium(cfg)

    def test_si_forbids_dimensionless_keys(self):
        """Test a dimensionless group in SI mode fails."""
        cfg = config_from_mapping({"medium": {"type": "maxwell", "omegaRtau": "2"}})
        with pytest.raises(ConfigError):
            build_medium(with_defaults(cfg))

    def test_missing_material_key(self):
        """Test an SI trap without G fails."""
        cfg = with_defaults(config_from_mapping({"medium": {"type": "trap", "eta": "1e-3"}}))
        with pytest.raises(ConfigError):
            build_medium(cfg)

    def test_normalized_medium(self):
        """Test normalized mode builds the canonical medium."""
        cfg = config_from_mapping(
            {"medium": {"type": "maxwell", "normalized": "yes", "omegaRtau": "2"}}
        )
        medium = build_medium(cfg)
        assert isinstance(medium, Maxwell)
        assert medium.groups().omegaR_tau == pytest.approx(2.0, rel=1e-12)

    def test_defaults(self):
        """Test a bare viscous medium falls back to a bead in water."""
        cfg = with_defaults(config_from_mapping({"medium": {"type": "viscous"}}))
        assert cfg.physical["kT"] == "4.11e-21"
        medium = build_medium(cfg)
        assert isinstance(medium, Viscous)
        assert medium.eta == pytest.approx(8.9e-4)
        assert medium.ctx.N == 3

    def test_defaults_keep_normalized(self):
        """Test normalized configurations are untouched."""
        cfg = RunConfig(medium="viscous", normalized=True)
        assert with_defaults(cfg) is cfg

    def test_echo(self):
        """Test the echo reports the default grid."""
        echo = RunConfig(medium="viscous").echo()
        assert echo["grid"] == "1e-2:1e2:400"

    def test_thresholds(self):
        """Test the policy file holds the stability band."""
        thresholds = load_thresholds()
        assert thresholds["stability"]["warn"] < thresholds["stability"]["fail"]
        assert thresholds["simulation"]["trajectory_block"] == 32


class TestOutput:
    """Test terminal messages."""

    @pytest.mark.parametrize(
        "printer, color",
        [
            (output.print_success, Fore.GREEN),
            (output.print_error, Fore.RED),
            (output.print_warning, Fore.YELLOW),
        ],
    )
    def test_colored_messages(self, printer, color, capsys):
        """Test each message helper wraps its text in its color."""
        printer("done")
        assert capsys.readouterr().out.startswith(f"{color}done")

    def test_helpers_document_arguments(self):
        """Test every public helper documents its arguments."""
        for name, fn in inspect.getmembers(output, inspect.isfunction):
            if fn.__module__ == output.__name__ and not name.startswith("_"):
                assert "Args:" in inspect.getdoc(fn), name


class TestFiles:
    """Test CSV, trajectory and manifest files."""

    def test_digest(self, tmp_path):
        """Test the SHA-256 of a known content."""
        path = tmp_path / "abc.txt"
        path.write_bytes(b"abc")
        assert file_digest(str(path)) == (
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        )

    def test_csv_preserves_floats(self, tmp_path):
        """Test written values read back bit for bit."""
        path = str(tmp_path / "columns.csv")
        a = np.array([0.1, 1.0 / 3.0, 1e-300, 2.5e21])
        b = np.array([np.pi, -0.0, 7.0, 1e-17])
        write_columns_csv(path, ["a", "b"], [a, b])
        headers, columns = read_columns_csv(path)
        assert headers == ["a", "b"]
        np.testing.assert_array_equal(columns[0], a)
        np.testing.assert_array_equal(columns[1], b)

    def test_spectrum_headers(self, tmp_path):
        """Test the header follows the normalization."""
        path = str(tmp_path / "psd.csv")
        curve = SpectrumCurve([1.0, 2.0], [0.5, 0.2], normalization=Normalization.NORMALIZED)
        write_spectrum_csv(path, curve)
        headers, _ = read_columns_csv(path)
        assert headers == ["omega_dimensionless", "psd_normalized"]

    def test_trajectory_file(self, tmp_path):
        """Test the binary layout reads back."""
        path = str(tmp_path / "traj.bin")
        rng = np.random.default_rng(0)
        v = rng.standard_normal((50, 3))
        x = np.cumsum(v, axis=0)
        write_trajectory(path, 1e-9, "maxwell", v, x)
        data = read_trajectory(path)
        assert data.dt == 1e-9
        assert data.medium == "maxwell"
        np.testing.assert_array_equal(data.velocities, v)
        np.testing.assert_array_equal(data.positions, x)
        assert os.path.getsize(path) == 48 + 2 * 50 * 3 * 8

    def test_trajectory_errors(self, tmp_path):
        """Test bad magic, truncation and long tags."""
        bad = tmp_path / "bad.bin"
        bad.write_bytes(b"NOTATRAJ" + bytes(40))
        with pytest.raises(ConfigError):
            read_trajectory(str(bad))
        path = str(tmp_path / "traj.bin")
        write_trajectory(path, 0.1, "viscous", np.zeros((4, 1)), np.zeros((4, 1)))
        with open(path, "rb") as f:
            raw = f.read()
        with open(path, "wb") as f:
            f.write(raw[:-8])
        with pytest.raises(ConfigError):
            read_trajectory(path)
        with pytest.raises(ValueError):
            write_trajectory(path, 0.1, "x" * 17, np.zeros((4, 1)), np.zeros((4, 1)))

    def test_manifest(self, tmp_path):
        """Test relative paths, digests and byte-identical reruns."""
        data = tmp_path / "out.csv"
        data.write_text("omega,psd\n1.0,0.5\n")
        path = str(tmp_path / "manifest.json")
        write_manifest(path, "spectrum", {"medium": "viscous"}, [str(data)], seed=3)
        first = open(path, "rb").read()
        write_manifest(path, "spectrum", {"medium": "viscous"}, [str(data)], seed=3)
        assert open(path, "rb").read() == first
        manifest = json.loads(first)
        assert manifest["files"] == [{"path": "out.csv", "sha256": file_digest(str(data))}]
        assert manifest["seed"] == 3
        assert manifest["command"] == "spectrum"
