"""
Run configuration: INI files with one section per concern.

Sections: ``[physical]`` (kT, N, R, m or rho_p, rho_f), ``[medium]`` (type,
normalized, material constants), ``[grid]`` (omega), ``[simulation]`` and
``[welch]``. Physical quantities are SI. ``normalized = true`` switches the
medium to dimensionless keys and forbids SI material keys.
"""

import configparser
import json
import logging
import os
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any, Dict, Iterable, Mapping, Optional

import numpy as np

from rheobrown.core.exceptions import ConfigError, GridError
from rheobrown.core.media import (
    MEDIA,
    MediumSpec,
    PhysicalContext,
    canonical_medium,
)

logger = logging.getLogger(__name__)

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")

SECTIONS = ("physical", "medium", "grid", "simulation", "welch")

# material keys per medium in SI mode
SI_KEYS = {
    "viscous": ("eta",),
    "trap": ("G", "eta"),
    "maxwell": ("G", "eta"),
    "jeffreys": ("G", "eta", "eta_inf"),
    "subdiffusive": ("mu_alpha", "alpha"),
    "hydrodynamic": ("eta", "rho_f", "rho_p"),
}

# dimensionless keys per medium in normalized mode
NORMALIZED_KEYS = {
    "viscous": (),
    "trap": ("omegaRtau",),
    "maxwell": ("omegaRtau",),
    "jeffreys": ("omegaRtau", "xi"),
    "subdiffusive": ("alpha",),
    "hydrodynamic": ("gamma",),
}

_SI_ONLY = {"eta", "G", "eta_inf", "mu_alpha", "rho_f", "rho_p"}
_NORMALIZED_ONLY = {"omegaRtau", "xi", "gamma"}

DEFAULT_GRID = "1e-2:1e2:400"

# SI fallbacks: a 1 um bead of density 1050 kg/m^3 in water at 298 K
DEFAULT_PHYSICAL = {"kT": "4.11e-21", "N": "3", "R": "0.5e-6"}
DEFAULT_PARTICLE_DENSITY = "1050"
DEFAULT_MATERIAL = {
    "viscous": {"eta": "8.9e-4"},
    "hydrodynamic": {"eta": "8.9e-4", "rho_f": "1000"},
}


@dataclass
class RunConfig:
    """
    Parsed configuration, still as plain key/value sections.

    Attributes:
        medium: Medium key
        normalized: Dimensionless mode
        physical: [physical] section
        material: [medium] section without type/normalized
        grid: Grid specification ``lo:hi:n``, None for the default grid
        simulation: [simulation] section
        welch: [welch] section
    """

    medium: str
    normalized: bool = False
    physical: Dict[str, str] = field(default_factory=dict)
    material: Dict[str, str] = field(default_factory=dict)
    grid: Optional[str] = None
    simulation: Dict[str, str] = field(default_factory=dict)
    welch: Dict[str, str] = field(default_factory=dict)

    def echo(self) -> Dict[str, Any]:
        """Configuration as written into manifests."""
        return {
            "medium": self.medium,
            "normalized": self.normalized,
            "physical": dict(self.physical),
            "material": dict(self.material),
            "grid": self.grid or DEFAULT_GRID,
            "simulation": dict(self.simulation),
            "welch": dict(self.welch),
        }


def parse_grid(spec: str) -> np.ndarray:
    """
    Parse ``lo:hi:n`` into n log-spaced points starting at lo.

    Consecutive points share the ratio (hi/lo)^(1/n); hi itself is the first
    point past the end, so "1e-2:1e2:200" holds 200 points including 1.
    Points within rounding of a power of ten are snapped onto it.

    Args:
        spec: Grid specification, e.g. "1e-2:1e2:200"

    Returns:
        Ascending grid

    Raises:
        GridError: If the specification is malformed or out of range
    """
    parts = spec.split(":")
    if len(parts) != 3:
        raise GridError(f"grid must read lo:hi:n, got '{spec}'")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise GridError(f"grid must read lo:hi:n with numbers, got '{spec}'")
    if not lo > 0.0 or not hi > lo or not np.isfinite(hi) or n < 2:
        raise GridError(f"grid needs 0 < lo < hi and n >= 2, got '{spec}'")
    exponents = np.log10(lo) + np.arange(n) * (np.log10(hi) - np.log10(lo)) / n
    grid = 10.0**exponents
    decades = np.round(exponents)
    snap = np.abs(exponents - decades) < 1e-12
    grid[snap] = 10.0 ** decades[snap]
    grid[0] = lo
    return grid


def merge_points(grid: np.ndarray, points: Iterable[float]) -> np.ndarray:
    """Grid with the given points added where they fall inside its range."""
    inside = [p for p in points if grid[0] <= p <= grid[-1]]
    return np.union1d(grid, inside) if inside else grid


def with_defaults(cfg: RunConfig) -> RunConfig:
    """
    Fill missing SI keys with the fallbacks of a bead in water.

    Normalized configurations are returned unchanged.
    """
    if cfg.normalized:
        return cfg
    physical = {**DEFAULT_PHYSICAL, **cfg.physical}
    material = {**DEFAULT_MATERIAL.get(cfg.medium, {}), **cfg.material}
    if cfg.medium == "hydrodynamic":
        material.setdefault("rho_p", physical.pop("rho_p", DEFAULT_PARTICLE_DENSITY))
    elif "m" not in physical:
        physical.setdefault("rho_p", DEFAULT_PARTICLE_DENSITY)
    filled = [key for key in physical if key not in cfg.physical]
    filled += [key for key in material if key not in cfg.material]
    if filled:
        logger.info("using default values for %s", ", ".join(sorted(filled)))
    return replace(cfg, physical=physical, material=material)


def _parse_bool(value: Any) -> bool:
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"expected a boolean, got '{value}'")


def config_from_mapping(sections: Mapping[str, Mapping[str, Any]]) -> RunConfig:
    """
    Build a RunConfig from nested mappings (parsed INI or CLI overrides).

    Args:
        sections: Section name -> key/value mapping

    Returns:
        RunConfig

    Raises:
        ConfigError: On unknown sections or a missing medium type
    """
    unknown = set(sections) - set(SECTIONS) - {"DEFAULT"}
    if unknown:
        raise ConfigError(f"unknown config section(s): {', '.join(sorted(unknown))}")
    medium_section = {k: str(v) for k, v in sections.get("medium", {}).items()}
    key = medium_section.pop("type", "").strip().lower()
    if not key:
        raise ConfigError("[medium] type is required")
    if key not in MEDIA:
        raise ConfigError(f"unknown medium '{key}'; expected one of {', '.join(MEDIA)}")
    normalized = _parse_bool(medium_section.pop("normalized", "false"))
    grid = sections.get("grid", {}).get("omega")
    return RunConfig(
        medium=key,
        normalized=normalized,
        physical={k: str(v) for k, v in sections.get("physical", {}).items()},
        material=medium_section,
        grid=None if grid is None else str(grid),
        simulation={k: str(v) for k, v in sections.get("simulation", {}).items()},
        welch={k: str(v) for k, v in sections.get("welch", {}).items()},
    )


def load_config(filepath: str) -> RunConfig:
    """
    Load a configuration file.

    Args:
        filepath: Path to an INI file

    Returns:
        RunConfig

    Raises:
        ConfigError: If the file is missing or malformed
    """
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keys such as G and omegaRtau are case-sensitive
    try:
        with open(filepath, "r") as f:
            parser.read_file(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {filepath}")
    except configparser.Error as e:
        raise ConfigError(f"malformed config file {filepath}: {e}")
    logger.debug("loaded config %s with sections %s", filepath, parser.sections())
    return config_from_mapping({name: dict(parser[name]) for name in parser.sections()})


def _float(section: Mapping[str, str], key: str, where: str) -> float:
    try:
        return float(section[key])
    except KeyError:
        raise ConfigError(f"[{where}] {key} is required")
    except ValueError:
        raise ConfigError(f"[{where}] {key} must be a number, got '{section[key]}'")


def build_context(cfg: RunConfig) -> PhysicalContext:
    """
    Physical context of an SI-mode configuration.

    ``m`` may be replaced by ``rho_p``; the hydrodynamic medium always takes
    its mass from the particle density.
    """
    phys = dict(cfg.physical)
    kT = _float(phys, "kT", "physical")
    R = _float(phys, "R", "physical")
    try:
        N = int(phys.get("N", "3"))
    except ValueError:
        raise ConfigError(f"[physical] N must be an integer, got '{phys['N']}'")
    rho_f = float(phys["rho_f"]) if "rho_f" in phys else None
    if cfg.medium == "hydrodynamic":
        rho_p = _float({**phys, **cfg.material}, "rho_p", "medium")
        return PhysicalContext.from_density(kT, N, R, rho_p, rho_f)
    if "m" in phys:
        rho_p = float(phys["rho_p"]) if "rho_p" in phys else None
        return PhysicalContext(kT, N, R, _float(phys, "m", "physical"), rho_p, rho_f)
    if "rho_p" in phys:
        return PhysicalContext.from_density(kT, N, R, _float(phys, "rho_p", "physical"), rho_f)
    raise ConfigError("[physical] needs the particle mass m or its density rho_p")


def build_medium(cfg: RunConfig) -> MediumSpec:
    """
    Medium described by a configuration.

    Args:
        cfg: Parsed configuration

    Returns:
        MediumSpec (in the canonical context when normalized)

    Raises:
        ConfigError: On missing, unexpected or mixed-unit keys
        ParameterError: If a value violates a material invariant
    """
    material = dict(cfg.material)
    if cfg.normalized:
        mixed = (_SI_ONLY & set(material)) | set(cfg.physical)
        if mixed:
            raise ConfigError(
                f"normalized mode forbids SI keys: {', '.join(sorted(mixed))}"
            )
        allowed = set(NORMALIZED_KEYS[cfg.medium])
        extra = set(material) - allowed
        if extra:
            raise ConfigError(f"unexpected key(s) for normalized {cfg.medium}: {', '.join(sorted(extra))}")
        groups = {key: _float(material, key, "medium") for key in material}
        kwargs = {
            "omegaR_tau": groups.get("omegaRtau", 1.0),
            "xi": groups.get("xi", 0.0),
            "alpha": groups.get("alpha", 0.5),
            "gamma": groups.get("gamma", 0.46),
        }
        return canonical_medium(cfg.medium, **kwargs)

    dimensionless = _NORMALIZED_ONLY & set(material)
    if dimensionless:
        raise ConfigError(
            f"dimensionless key(s) {', '.join(sorted(dimensionless))} need normalized = true"
        )
    expected = SI_KEYS[cfg.medium]
    extra = set(material) - set(expected)
    if extra:
        raise ConfigError(f"unexpected key(s) for {cfg.medium}: {', '.join(sorted(extra))}")
    ctx = build_context(cfg)
    values = {}
    for key in expected:
        if key == "rho_p" and key not in material:
            values[key] = ctx.rho_p
            continue
        if key == "rho_f" and key not in material and ctx.rho_f is not None:
            values[key] = ctx.rho_f
            continue
        if key == "eta_inf" and key not in material:
            values[key] = 0.0
            continue
        values[key] = _float(material, key, "medium")
    return MEDIA[cfg.medium](ctx, **values)


def example_config_path(medium: str) -> str:
    """Path of the shipped example config for a medium."""
    return os.path.join(DATA_DIR, "configs", f"{medium}.ini")


@lru_cache(maxsize=1)
def load_thresholds(filepath: Optional[str] = None) -> Dict[str, Any]:
    """
    Load policy constants (stability thresholds, tolerances).

    Args:
        filepath: Alternative thresholds file; defaults to the packaged one

    Returns:
        Dictionary of thresholds
    """
    path = filepath or os.path.join(DATA_DIR, "thresholds.json")
    with open(path, "r") as f:
        return json.load(f)
