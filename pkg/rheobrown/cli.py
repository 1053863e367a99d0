#!/usr/bin/env python3
"""
Command-line interface for rheobrown.
"""

import argparse
import logging
import os
import sys
from typing import Any, Dict, Optional

from rheobrown import __version__
from rheobrown.core import figures, verifier
from rheobrown.core.estimators import Detrend, Window, WelchConfig, welch_psd
from rheobrown.core.exceptions import (
    ConfigError,
    DivergenceError,
    ParameterError,
    PoleError,
    UnsupportedTopologyError,
    VerificationError,
)
from rheobrown.core.media import MEDIA, MediumSpec
from rheobrown.core.simkit import Scheme, SimConfig, default_dt, simulate
from rheobrown.core.spectra import spectrum_curve
from rheobrown.utils.config import (
    DEFAULT_GRID,
    RunConfig,
    build_medium,
    config_from_mapping,
    load_config,
    load_thresholds,
    merge_points,
    parse_grid,
    with_defaults,
)
from rheobrown.utils.io import write_manifest, write_spectrum_csv, write_trajectory
from rheobrown.utils.output import (
    format_quantity,
    print_error,
    print_header,
    print_info,
    print_success,
    print_table,
    print_warning,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3
EXIT_VERIFICATION = 4

INPUT_ERRORS = (ConfigError, ParameterError, UnsupportedTopologyError, PoleError)

# flag dest -> (section, key)
PHYSICAL_FLAGS = {"kT": "kT", "N": "N", "R": "R", "m": "m"}
MATERIAL_FLAGS = {"eta": "eta", "G": "G", "eta_inf": "eta_inf", "mu_alpha": "mu_alpha"}
DIMENSIONLESS_FLAGS = {"omegaRtau": "omegaRtau", "xi": "xi", "gamma": "gamma"}


def _add_medium_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", nargs="?", help="Config file (INI)")
    parser.add_argument("--medium", choices=list(MEDIA), help="Medium type")
    parser.add_argument(
        "--normalized", action="store_true", help="Dimensionless mode (canonical units)"
    )
    group = parser.add_argument_group("dimensionless groups")
    group.add_argument("--omegaRtau", type=float, help="omega_R * tau (trap, maxwell, jeffreys)")
    group.add_argument("--xi", type=float, help="eta_inf / eta (jeffreys)")
    group.add_argument("--alpha", type=float, help="Springpot order (subdiffusive)")
    group.add_argument("--gamma", type=float, help="(1 + 2 rho_p/rho_f)/9 (hydrodynamic)")
    si = parser.add_argument_group("SI quantities")
    si.add_argument("--kT", type=float, help="Thermal energy (J)")
    si.add_argument("--N", type=int, choices=[1, 2, 3], help="Spatial dimensions")
    si.add_argument("--R", type=float, help="Particle radius (m)")
    si.add_argument("--m", type=float, help="Particle mass (kg)")
    si.add_argument("--rho-p", dest="rho_p", type=float, help="Particle density (kg/m^3)")
    si.add_argument("--rho-f", dest="rho_f", type=float, help="Fluid density (kg/m^3)")
    si.add_argument("--eta", type=float, help="Viscosity (Pa*s)")
    si.add_argument("--G", type=float, help="Elastic modulus (Pa)")
    si.add_argument("--eta-inf", dest="eta_inf", type=float, help="Solvent viscosity (Pa*s)")
    si.add_argument("--mu-alpha", dest="mu_alpha", type=float, help="Springpot constant (Pa*s^alpha)")


def setup_parser() -> argparse.ArgumentParser:
    """Set up command-line argument parser."""
    parser = argparse.ArgumentParser(
        prog="rheobrown",
        description="Brownian motion in linear viscoelastic media: spectra, simulation, verification",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )

    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # Spectrum command
    spectrum_parser = subparsers.add_parser("spectrum", help="Closed-form power spectrum to CSV")
    _add_medium_arguments(spectrum_parser)
    spectrum_parser.add_argument("--grid", help=f"Frequency grid lo:hi:n (default {DEFAULT_GRID})")
    spectrum_parser.add_argument("-o", "--out", help="Output CSV (default spectrum_<medium>.csv)")

    # Figures command
    figures_parser = subparsers.add_parser("figures", help="Regenerate figure datasets")
    figures_parser.add_argument(
        "figure",
        choices=[str(i) for i in figures.figure_ids()] + ["all"],
        help="Figure id",
    )
    figures_parser.add_argument("--outdir", default="figures", help="Output directory")

    # Simulate command
    simulate_parser = subparsers.add_parser("simulate", help="Simulate a trajectory ensemble")
    _add_medium_arguments(simulate_parser)
    simulate_parser.add_argument("--out", default="trajectories", help="Output directory")
    simulate_parser.add_argument("--seed", type=int, help="Root seed")
    simulate_parser.add_argument(
        "-t", "--threads", type=int, default=1, help="Worker threads (default: 1)"
    )

    # Verify command
    verify_parser = subparsers.add_parser("verify", help="Run verification suites")
    verify_parser.add_argument(
        "--suite",
        default="limits",
        choices=list(verifier.SUITES) + ["all"],
        help="Suite to run (default: limits)",
    )
    verify_parser.add_argument("--seed", type=int, default=0, help="Root seed of the simulation suite")
    verify_parser.add_argument(
        "-t", "--threads", type=int, default=1, help="Worker threads (default: 1)"
    )
    verify_parser.add_argument("--report", help="Also write the report lines to this file")

    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    """Config file (if any) overlaid with command-line flags."""
    sections: Dict[str, Dict[str, Any]] = {}
    if args.config:
        sections = {name: dict(values) for name, values in _file_sections(args.config).items()}
    medium = sections.setdefault("medium", {})
    if args.medium:
        medium["type"] = args.medium
    if not medium.get("type"):
        raise ConfigError("give a config file or --medium")
    key = str(medium["type"]).strip().lower()

    flags = vars(args)
    given_dimensionless = [name for name in DIMENSIONLESS_FLAGS if flags.get(name) is not None]
    given_si = [
        name
        for name in list(PHYSICAL_FLAGS) + list(MATERIAL_FLAGS) + ["rho_p", "rho_f"]
        if flags.get(name) is not None
    ]
    implied = not args.config and not given_si and (given_dimensionless or args.alpha is not None)
    if args.normalized or implied:
        medium["normalized"] = "true"

    physical = sections.setdefault("physical", {})
    for name, option in PHYSICAL_FLAGS.items():
        if flags.get(name) is not None:
            physical[option] = flags[name]
    for name, option in {**MATERIAL_FLAGS, **DIMENSIONLESS_FLAGS, "alpha": "alpha"}.items():
        if flags.get(name) is not None:
            medium[option] = flags[name]
    for name in ("rho_p", "rho_f"):
        if flags.get(name) is not None:
            target = medium if key == "hydrodynamic" else physical
            target[name] = flags[name]
    if not physical:
        sections.pop("physical")
    if getattr(args, "grid", None):
        sections.setdefault("grid", {})["omega"] = args.grid
    return with_defaults(config_from_mapping(sections))


def _file_sections(filepath: str) -> Dict[str, Dict[str, str]]:
    cfg = load_config(filepath)
    sections: Dict[str, Dict[str, str]] = {
        "medium": {"type": cfg.medium, "normalized": str(cfg.normalized).lower(), **cfg.material},
    }
    for name in ("physical", "simulation", "welch"):
        values = getattr(cfg, name)
        if values:
            sections[name] = dict(values)
    if cfg.grid:
        sections["grid"] = {"omega": cfg.grid}
    return sections


def _spectrum_grid(cfg: RunConfig, medium: MediumSpec):
    if cfg.grid:
        return parse_grid(cfg.grid)
    scale = medium.time_scale
    marks = [rate * scale for rate in medium.characteristic_rates().values()]
    grid = merge_points(parse_grid(DEFAULT_GRID), marks)
    return grid if cfg.normalized else grid / scale


def _error_code(e: Exception) -> int:
    if isinstance(e, DivergenceError):
        return EXIT_DIVERGENCE
    if isinstance(e, VerificationError):
        return EXIT_VERIFICATION
    return EXIT_CONFIG


def handle_spectrum_command(args: argparse.Namespace) -> int:
    """Handle spectrum command."""
    try:
        cfg = _run_config(args)
        medium = build_medium(cfg)
        print_header(f"Power Spectrum: {medium.key}")
        grid = _spectrum_grid(cfg, medium)
        curve = spectrum_curve(medium, grid, normalized=cfg.normalized)
    except INPUT_ERRORS as e:
        print_error(f"Spectrum failed: {e}")
        return _error_code(e)

    if not curve.is_physical:
        print_warning("Spectrum has negative or non-finite samples")
    out = args.out or f"spectrum_{medium.key}.csv"
    parent = os.path.dirname(os.path.abspath(out))
    os.makedirs(parent, exist_ok=True)
    write_spectrum_csv(out, curve)
    groups = medium.groups().as_dict()
    manifest = write_manifest(
        f"{os.path.splitext(out)[0]}.manifest.json",
        command="spectrum",
        config=cfg.echo(),
        outputs=[out],
        extra={
            "groups": groups,
            "parameters": medium.parameters(),
            "convention": curve.convention_note,
        },
    )
    print_table(["Group", "Value"], [[k, format_quantity(v)] for k, v in groups.items()])
    print_success(f"\n{len(curve)} rows written to {out}")
    print_info(f"Manifest: {manifest}")
    return EXIT_OK


def handle_figures_command(args: argparse.Namespace) -> int:
    """Handle figures command."""
    ids = figures.figure_ids() if args.figure == "all" else [int(args.figure)]
    rows = []
    try:
        for figure_id in ids:
            print_header(f"Figure {figure_id}: {figures.FIGURES[figure_id].title}")
            written = figures.write_figure(figure_id, args.outdir)
            rows.extend([[figure_id, os.path.basename(path)] for path in written["files"]])
            print_info(f"Manifest: {written['manifest']}")
    except INPUT_ERRORS as e:
        print_error(f"Figure generation failed: {e}")
        return _error_code(e)
    print_table(["Figure", "File"], rows)
    print_success(f"\n{len(rows)} curves written to {args.outdir}")
    return EXIT_OK


def _int_option(section: Dict[str, str], key: str, default: Optional[int]) -> Optional[int]:
    if key not in section:
        return default
    try:
        return int(section[key])
    except ValueError:
        raise ConfigError(f"[simulation] {key} must be an integer, got '{section[key]}'")


def _sim_config(
    cfg: RunConfig, medium: MediumSpec, seed: Optional[int], threads: int
) -> SimConfig:
    """SimConfig from the [simulation] section; the seed flag overrides the file."""
    section = dict(cfg.simulation)
    try:
        dt = float(section["dt"]) if "dt" in section else default_dt(medium)
    except ValueError:
        raise ConfigError(f"[simulation] dt must be a number, got '{section['dt']}'")
    scheme = section.get("scheme")
    override = section.get("override_stability", "false").strip().lower() in ("1", "true", "yes", "on")
    return SimConfig(
        medium,
        dt=dt,
        n_steps=_int_option(section, "n_steps", 4096),
        n_traj=_int_option(section, "n_traj", 8),
        seed=seed if seed is not None else _int_option(section, "seed", 0),
        scheme=Scheme(scheme) if scheme else None,
        burn_in=_int_option(section, "burn_in", None),
        threads=threads,
        fixed_lag=_int_option(section, "fixed_lag", None),
        override_stability=override,
    )


def _welch_config(section: Dict[str, str]) -> Optional[WelchConfig]:
    if "segment_length" not in section:
        return None
    defaults = load_thresholds()["welch"]
    try:
        return WelchConfig(
            segment_length=int(section["segment_length"]),
            overlap=float(section.get("overlap", defaults["overlap"])),
            window=Window(section.get("window", defaults["window"])),
            detrend=Detrend(section.get("detrend", defaults["detrend"])),
        )
    except ValueError as e:
        raise ConfigError(f"[welch] {e}")


def handle_simulate_command(args: argparse.Namespace) -> int:
    """Handle simulate command."""
    try:
        cfg = _run_config(args)
        medium = build_medium(cfg)
        sim = _sim_config(cfg, medium, args.seed, args.threads)
        print_header(f"Simulation: {medium.key} ({sim.scheme.value})")
        print_info(f"{sim.n_traj} trajectories x {sim.n_steps} steps, dt = {format_quantity(sim.dt, 's')}")
        ensemble = simulate(sim)
        welch = _welch_config(cfg.welch)
    except INPUT_ERRORS as e:
        print_error(f"Simulation failed: {e}")
        return _error_code(e)
    except DivergenceError as e:
        print_error(f"Simulation diverged at step {e.step}: {e}")
        return EXIT_DIVERGENCE
    except ValueError as e:
        # unknown scheme, window or detrend names
        print_error(f"Simulation failed: invalid setting: {e}")
        return EXIT_CONFIG

    os.makedirs(args.out, exist_ok=True)
    paths = []
    for j in range(ensemble.n_traj):
        path = os.path.join(args.out, f"traj_{j:05d}.bin")
        write_trajectory(path, ensemble.dt, medium.key, ensemble.velocities[j], ensemble.positions[j])
        paths.append(path)
    extra: Dict[str, Any] = {
        "simulation": sim.echo(),
        "stability": ensemble.metadata.get("stability"),
        "groups": medium.groups().as_dict(),
    }
    if welch is not None:
        estimate = welch_psd(ensemble, welch)
        psd_path = os.path.join(args.out, "psd_estimate.csv")
        write_spectrum_csv(psd_path, estimate)
        paths.append(psd_path)
        extra["welch"] = {"segment_length": welch.segment_length, "overlap": welch.overlap,
                          "window": welch.window.value, "detrend": welch.detrend.value}
    manifest = write_manifest(
        os.path.join(args.out, "manifest.json"),
        command="simulate",
        config=cfg.echo(),
        outputs=paths,
        seed=sim.seed,
        extra=extra,
    )
    print_success(f"\n{ensemble.n_traj} trajectories written to {args.out}")
    print_info(f"Manifest: {manifest}")
    return EXIT_OK


def handle_verify_command(args: argparse.Namespace) -> int:
    """Handle verify command."""
    print_header(f"Verification: {args.suite}")
    results = verifier.run_suite(args.suite, seed=args.seed, threads=args.threads)
    lines = verifier.report_lines(results)
    for line in lines:
        print(line)
    if args.report:
        with open(args.report, "w") as f:
            f.write("\n".join(lines) + "\n")
    verifier.display_results(results)
    try:
        verifier.require_pass(results)
    except VerificationError as e:
        print_error(str(e))
        return _error_code(e)
    return EXIT_OK


def main() -> None:
    """Main entry point for the CLI."""
    parser = setup_parser()
    args = parser.parse_args()

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if not args.command:
        parser.print_help()
        sys.exit(0)

    # Command handlers
    handlers = {
        "spectrum": handle_spectrum_command,
        "figures": handle_figures_command,
        "simulate": handle_simulate_command,
        "verify": handle_verify_command,
    }

    handler = handlers.get(args.command)
    if handler:
        exit_code = handler(args)
        sys.exit(exit_code)
    else:
        parser.print_help()
        sys.exit(1)


if __name__ == "__main__":
    main()
