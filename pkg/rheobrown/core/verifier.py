"""
Verification suites: closed forms against each other, against numerical
transforms and against simulated ensembles.

Every check is a dictionary with ``name``, ``status`` ("pass"/"fail"),
``metric``, ``tolerance``, ``message`` and ``details``. A suite collects its
checks with pass/fail counters; ``report_lines`` renders one machine-readable
line per check.
"""

import logging
import math
import time
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from rheobrown.core import spectra
from rheobrown.core.curves import TimeCurve
from rheobrown.core.estimators import (
    WelchConfig,
    ensemble_msd,
    loglog_slope,
    mean_square_velocity,
    position_variance,
    welch_psd,
)
from rheobrown.core.exceptions import RheoBrownError, VerificationError
from rheobrown.core.media import (
    CANONICAL_CONTEXT,
    MediumSpec,
    PhysicalContext,
    Viscous,
    canonical_medium,
    medium_keys,
)
from rheobrown.core.simkit import SimConfig, simulate
from rheobrown.core.specfun import fractional_monomial, gl_fractional_derivative
from rheobrown.utils.config import load_thresholds
from rheobrown.utils.output import (
    format_quantity,
    print_error,
    print_info,
    print_success,
    print_table,
    print_warning,
    verdict_color,
)

logger = logging.getLogger(__name__)

SUITES = ("limits", "fdt", "simulation")

# a 1 um polystyrene-like bead in water at room temperature
SI_CONTEXT = PhysicalContext.from_density(kT=4.11e-21, N=3, R=0.5e-6, rho_p=1050.0, rho_f=1000.0)

# three parameter sets per medium for the master-formula comparison
PARAMETER_SETS: Dict[str, Sequence[Callable[[], MediumSpec]]] = {
    "viscous": (
        lambda: canonical_medium("viscous"),
        lambda: Viscous(CANONICAL_CONTEXT, eta=3.0),
        lambda: Viscous(SI_CONTEXT, eta=1e-3),
    ),
    "trap": tuple(
        (lambda w=w: canonical_medium("trap", omegaR_tau=w)) for w in (0.5, 2.0, 10.0)
    ),
    "maxwell": tuple(
        (lambda w=w: canonical_medium("maxwell", omegaR_tau=w)) for w in (0.5, 2.0, 50.0)
    ),
    "jeffreys": tuple(
        (lambda w=w, xi=xi: canonical_medium("jeffreys", omegaR_tau=w, xi=xi))
        for w, xi in ((1.0, 0.5), (5.0, 2.0), (0.3, 0.1))
    ),
    "subdiffusive": tuple(
        (lambda a=a: canonical_medium("subdiffusive", alpha=a)) for a in (0.25, 0.5, 0.75)
    ),
    "hydrodynamic": tuple(
        (lambda g=g: canonical_medium("hydrodynamic", gamma=g)) for g in (0.46, 0.55, 2.0)
    ),
}


def _tolerance(key: str) -> float:
    return float(load_thresholds()["verification"][key])


def _max_rel(estimate: np.ndarray, exact: np.ndarray) -> float:
    estimate = np.asarray(estimate, dtype=float)
    exact = np.asarray(exact, dtype=float)
    return float(np.max(np.abs(estimate - exact) / np.abs(exact)))


def _make_check(
    name: str, metric: float, tolerance: float, message: str = "", details: Optional[List[str]] = None
) -> Dict[str, Any]:
    passed = math.isfinite(metric) and metric <= tolerance
    return {
        "name": name,
        "status": "pass" if passed else "fail",
        "metric": float(metric),
        "tolerance": float(tolerance),
        "message": message,
        "details": details or [],
    }


def _guarded(name: str, fn: Callable[[], Dict[str, Any]]) -> Dict[str, Any]:
    try:
        return fn()
    except (RheoBrownError, ArithmeticError, ValueError) as e:
        logger.debug("check %s raised %r", name, e)
        check = _make_check(name, math.inf, 0.0)
        check["message"] = f"Error running check: {e}"
        return check


def _log_grid(lo: float, hi: float, n: int) -> np.ndarray:
    return np.logspace(math.log10(lo), math.log10(hi), n)


# ---------------------------------------------------------------------------
# limits
# ---------------------------------------------------------------------------


def check_master_equivalence(key: str) -> Dict[str, Any]:
    """Spectrum from the network fluidity against the closed form, 50 points x 3 sets."""
    worst = 0.0
    details = []
    for factory in PARAMETER_SETS[key]:
        medium = factory()
        omega = _log_grid(1e-2, 1e2, 50) / medium.time_scale
        err = _max_rel(spectra.psd_master(medium, omega), spectra.psd_closed(medium, omega))
        details.append(f"{medium.groups().as_dict()}: {err:.3e}")
        worst = max(worst, err)
    return _make_check(
        f"master_equivalence[{key}]",
        worst,
        _tolerance("master_rtol"),
        "fluidity spectrum vs closed form",
        details,
    )


def check_jeffreys_maxwell_limit() -> Dict[str, Any]:
    """Jeffreys with xi = 0 is the Maxwell fluid."""
    x = _log_grid(1e-2, 1e2, 200)
    worst = 0.0
    for w in (0.5, 1.0, 5.0):
        jeffreys = spectra.normalized_psd(canonical_medium("jeffreys", omegaR_tau=w, xi=0.0), x)
        maxwell = spectra.normalized_psd(canonical_medium("maxwell", omegaR_tau=w), x)
        worst = max(worst, _max_rel(jeffreys, maxwell))
    return _make_check("limit[jeffreys_xi0=maxwell]", worst, _tolerance("limit_exact_rtol"))


def check_springpot_viscous_limit() -> Dict[str, Any]:
    """Springpot material with alpha = 1 is the viscous fluid."""
    x = _log_grid(1e-2, 1e2, 200)
    subdiffusive = spectra.normalized_psd(canonical_medium("subdiffusive", alpha=1.0), x)
    viscous = spectra.normalized_psd(canonical_medium("viscous"), x)
    return _make_check(
        "limit[subdiffusive_alpha1=viscous]", _max_rel(subdiffusive, viscous), _tolerance("limit_rtol")
    )


def check_trap_viscous_limit() -> Dict[str, Any]:
    """A vanishing trap stiffness leaves the viscous fluid."""
    x = _log_grid(1e-2, 1e2, 200)
    trap = spectra.normalized_psd(canonical_medium("trap", omegaR_tau=1e-6), x)
    viscous = spectra.normalized_psd(canonical_medium("viscous"), x)
    return _make_check("limit[trap_G0=viscous]", _max_rel(trap, viscous), _tolerance("limit_rtol"))


def check_stiff_maxwell_limit() -> Dict[str, Any]:
    """A stiff Maxwell fluid (omega_R tau = 50) converges to the viscous spectrum."""
    x = _log_grid(0.1, 10.0, 100)
    maxwell = spectra.normalized_psd(canonical_medium("maxwell", omegaR_tau=50.0), x)
    viscous = spectra.normalized_psd(canonical_medium("viscous"), x)
    return _make_check(
        "limit[maxwell_stiff~viscous]", _max_rel(maxwell, viscous), _tolerance("maxwell_viscous_rtol")
    )


def check_fractional_derivative() -> Dict[str, Any]:
    """Grunwald-Letnikov derivative of t^p against the exact monomial rule at h = 1e-4."""
    h = 1e-4
    t = np.arange(10001) * h
    mask = t >= 0.1
    worst = 0.0
    details = []
    for p, alpha in ((1.0, 0.5), (2.0, 0.5), (2.0, 0.75)):
        samples = TimeCurve(t, t**p)
        approx = gl_fractional_derivative(samples, alpha, h).values
        err = _max_rel(approx[mask], fractional_monomial(p, alpha, t[mask]))
        details.append(f"p={p:g} alpha={alpha:g}: {err:.3e}")
        worst = max(worst, err)
    return _make_check("gl_monomial", worst, 1e-3, "t in [0.1, 1]", details)


def _vacf_from_msd_samples():
    ctx = CANONICAL_CONTEXT
    medium = Viscous(ctx, eta=1.0)
    tau = medium.tau
    h = tau / 1000.0
    t = np.arange(12001) * h
    msd = TimeCurve(t, spectra.msd_viscous(ctx, 1.0, t))
    estimate = spectra.vacf_from_msd(msd).values
    exact = spectra.vacf_viscous(ctx, 1.0, t)
    return t, tau, estimate, exact


def check_vacf_from_msd() -> Dict[str, Any]:
    """Half the second derivative of the Ornstein MSD recovers the exponential VACF."""
    t, tau, estimate, exact = _vacf_from_msd_samples()
    mask = (t >= 0.1 * tau) & (t <= 5.0 * tau)
    return _make_check(
        "vacf_from_msd[pointwise]",
        _max_rel(estimate[mask], exact[mask]),
        _tolerance("vacf_from_msd_rtol"),
        "h = tau/1000, t in [tau/10, 5 tau]",
    )


def check_vacf_from_msd_sup() -> Dict[str, Any]:
    """Same loop out to 10 tau, error measured against the initial VACF."""
    t, tau, estimate, exact = _vacf_from_msd_samples()
    mask = (t >= 0.1 * tau) & (t <= 10.0 * tau)
    metric = float(np.max(np.abs(estimate[mask] - exact[mask])) / exact[0])
    return _make_check(
        "vacf_from_msd[sup]",
        metric,
        _tolerance("vacf_from_msd_rtol"),
        "h = tau/1000, t in [tau/10, 10 tau], relative to C(0)",
    )


def limits_checks() -> List[Callable[[], Dict[str, Any]]]:
    checks: List[Callable[[], Dict[str, Any]]] = [
        (lambda key=key: check_master_equivalence(key)) for key in medium_keys()
    ]
    checks += [
        check_jeffreys_maxwell_limit,
        check_springpot_viscous_limit,
        check_trap_viscous_limit,
        check_stiff_maxwell_limit,
        check_fractional_derivative,
        check_vacf_from_msd,
        check_vacf_from_msd_sup,
    ]
    return checks


# ---------------------------------------------------------------------------
# fdt
# ---------------------------------------------------------------------------


def check_transform_analytic() -> Dict[str, Any]:
    """Twice the real part of the analytic VACF transform is the viscous spectrum."""
    eta = 1e-3
    tau = Viscous(SI_CONTEXT, eta).tau
    omega = _log_grid(1e-2, 1e2, 30) / tau
    transform = 2.0 * np.real(spectra.vacf_viscous_transform(SI_CONTEXT, eta, omega))
    exact = spectra.psd_viscous(SI_CONTEXT, eta, omega)
    return _make_check("transform[analytic]", _max_rel(transform, exact), _tolerance("transform_rtol"))


def check_transform_quadrature() -> Dict[str, Any]:
    """Numeric cosine transform of the viscous VACF against the viscous spectrum."""
    ctx = CANONICAL_CONTEXT
    tau = Viscous(ctx, 1.0).tau
    omega = _log_grid(1e-2, 1e2, 30) / tau
    transform = spectra.cosine_transform(lambda s: spectra.vacf_viscous(ctx, 1.0, s), omega, tau)
    exact = spectra.psd_viscous(ctx, 1.0, omega)
    return _make_check("transform[quadrature]", _max_rel(transform, exact), _tolerance("quadrature_rtol"))


def check_hydrodynamic_transform(gamma: float) -> Dict[str, Any]:
    """Numeric transform of the hydrodynamic VACF against its closed spectrum."""
    medium = canonical_medium("hydrodynamic", gamma=gamma)
    ctx = medium.ctx

    def vacf(s: float) -> float:
        return spectra.vacf_hydrodynamic(ctx, medium.eta, medium.rho_f, medium.rho_p, s)

    omega = _log_grid(1e-2, 1e2, 25) / medium.lam
    transform = spectra.cosine_transform(vacf, omega, medium.lam)
    exact = spectra.psd_closed(medium, omega)
    return _make_check(
        f"hydrodynamic_transform[gamma={gamma:g}]",
        _max_rel(transform, exact),
        _tolerance("quadrature_rtol"),
    )


def check_hydrodynamic_initial_value() -> Dict[str, Any]:
    """The hydrodynamic VACF starts at N kT/M, added mass included."""
    worst = 0.0
    for gamma in (0.2, 0.46, 0.55, 2.0):
        medium = canonical_medium("hydrodynamic", gamma=gamma)
        ctx = medium.ctx
        value = spectra.vacf_hydrodynamic(ctx, medium.eta, medium.rho_f, medium.rho_p, 0.0)
        worst = max(worst, _max_rel(value, spectra.mean_square_velocity(medium)))
    return _make_check("hydrodynamic_vacf[t=0]", worst, _tolerance("limit_rtol"))


def check_hydrodynamic_tail() -> Dict[str, Any]:
    """Long-time tail of the hydrodynamic VACF decays as t^-3/2."""
    worst = 0.0
    details = []
    for gamma in (0.46, 0.55):
        medium = canonical_medium("hydrodynamic", gamma=gamma)
        ctx = medium.ctx
        t = _log_grid(1e3, 1e5, 40) * medium.lam
        values = spectra.vacf_hydrodynamic(ctx, medium.eta, medium.rho_f, medium.rho_p, t)
        slope = loglog_slope(t, values, t[0], t[-1])
        details.append(f"gamma={gamma:g}: slope {slope:.4f}")
        worst = max(worst, abs(slope + 1.5))
    return _make_check("hydrodynamic_vacf[tail]", worst, 0.05, "|slope + 3/2|", details)


def check_equipartition(key: str) -> Dict[str, Any]:
    """int_0^inf S dw = pi N kT/m for one medium."""
    medium = canonical_medium(key)
    integral = spectra.equipartition_integral(medium)
    target = spectra.equipartition_target(medium)
    return _make_check(
        f"equipartition[{key}]",
        abs(integral - target) / target,
        _tolerance("sum_rule_rtol"),
        f"integral {integral:.6g}, target {target:.6g}",
    )


def fdt_checks() -> List[Callable[[], Dict[str, Any]]]:
    checks: List[Callable[[], Dict[str, Any]]] = [
        check_transform_analytic,
        check_transform_quadrature,
        lambda: check_hydrodynamic_transform(0.46),
        lambda: check_hydrodynamic_transform(0.55),
        check_hydrodynamic_initial_value,
        check_hydrodynamic_tail,
    ]
    checks += [(lambda key=key: check_equipartition(key)) for key in medium_keys()]
    return checks


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


def _band(curve_omega: np.ndarray, lo: float, hi: float) -> np.ndarray:
    return (curve_omega >= lo) & (curve_omega <= hi)


def check_viscous_ensemble(seed: int, threads: int) -> List[Dict[str, Any]]:
    """Viscous ensemble: Welch spectrum and time-averaged MSD against closed forms."""
    medium = canonical_medium("viscous")
    dt = 0.01 * medium.tau
    ensemble = simulate(SimConfig(medium, dt, 2**14, n_traj=500, seed=seed, threads=threads))
    psd = welch_psd(ensemble, WelchConfig(4096))
    band = _band(psd.omega, 0.1 / medium.tau, 5.0 / medium.tau)
    exact = spectra.psd_closed(medium, psd.omega[band])
    psd_check = _make_check(
        "simulation[viscous_psd]",
        _max_rel(psd.values[band], exact),
        _tolerance("psd_rtol"),
        "omega tau in [0.1, 5]",
    )
    max_lag = int(round(20.0 * medium.tau / dt))
    msd = ensemble_msd(ensemble, time_average=True, max_lag=max_lag)
    lag = (msd.t >= 0.1 * medium.tau) & (msd.t <= 20.0 * medium.tau)
    exact_msd = spectra.msd_viscous(medium.ctx, medium.eta, msd.t[lag])
    msd_check = _make_check(
        "simulation[viscous_msd]",
        _max_rel(msd.values[lag], exact_msd),
        _tolerance("msd_rtol"),
        "t in [tau/10, 20 tau]",
    )
    return [psd_check, msd_check]


def check_trap_variance(seed: int, threads: int) -> Dict[str, Any]:
    """Trapped ensemble: position variance against N kT/(6 pi R G), in standard errors."""
    medium = canonical_medium("trap", omegaR_tau=1.0)
    ensemble = simulate(
        SimConfig(medium, 0.01 * medium.tau, 2**14, n_traj=200, seed=seed + 1, threads=threads)
    )
    estimate = position_variance(ensemble)
    target = spectra.stationary_position_variance(medium)
    return _make_check(
        "simulation[trap_variance]",
        abs(estimate.value - target) / estimate.stderr,
        _tolerance("standard_errors"),
        f"estimate {estimate.value:.5g} +- {estimate.stderr:.2g}, target {target:.5g}",
    )


def check_maxwell_psd(seed: int, threads: int) -> Dict[str, Any]:
    """Maxwell ensemble (omega_R tau = 1): Welch spectrum against the closed form."""
    medium = canonical_medium("maxwell", omegaR_tau=1.0)
    ensemble = simulate(
        SimConfig(medium, 0.01 * medium.tau, 2**14, n_traj=500, seed=seed + 2, threads=threads)
    )
    psd = welch_psd(ensemble, WelchConfig(4096))
    band = _band(psd.omega, 0.1 / medium.tau, 5.0 / medium.tau)
    return _make_check(
        "simulation[maxwell_psd]",
        _max_rel(psd.values[band], spectra.psd_closed(medium, psd.omega[band])),
        _tolerance("psd_rtol"),
        "omega tau in [0.1, 5]",
    )


def check_subdiffusive_msd(seed: int, threads: int) -> Dict[str, Any]:
    """Springpot ensemble (alpha = 1/2): MSD exponent over two decades."""
    medium = canonical_medium("subdiffusive", alpha=0.5)
    lam = medium.lam
    dt = 0.2 * lam
    # dt/lambda = 0.2 warns; the slope is only read at lags of 5 lambda and beyond
    cfg = SimConfig(
        medium, dt, 8192, n_traj=128, seed=seed + 3, threads=threads, override_stability=True
    )
    ensemble = simulate(cfg)
    msd = ensemble_msd(ensemble, time_average=True, max_lag=int(round(500.0 * lam / dt)))
    # log-spaced lags keep the fit from leaning on the noisy long-lag end
    picks = np.unique(np.round(_log_grid(5.0 * lam / dt, 500.0 * lam / dt, 60)).astype(int))
    slope = loglog_slope(msd.t[picks], msd.values[picks], 5.0 * lam, 500.0 * lam)
    return _make_check(
        "simulation[subdiffusive_msd_slope]",
        abs(slope - medium.alpha),
        0.05,
        f"slope {slope:.4f} on t in [5 lambda, 500 lambda]",
    )


def check_subdiffusive_psd(seed: int, threads: int) -> Dict[str, Any]:
    """Springpot ensemble (alpha = 1/2): high-frequency spectral exponent -(3 - alpha)."""
    medium = canonical_medium("subdiffusive", alpha=0.5)
    lam = medium.lam
    ensemble = simulate(
        SimConfig(medium, 0.005 * lam, 4096, n_traj=32, seed=seed + 4, threads=threads)
    )
    psd = welch_psd(ensemble, WelchConfig(1024))
    slope = loglog_slope(psd.omega, psd.values, 20.0 / lam, 100.0 / lam)
    return _make_check(
        "simulation[subdiffusive_psd_slope]",
        abs(slope + (3.0 - medium.alpha)),
        0.1,
        f"slope {slope:.4f} on omega lambda in [20, 100]",
    )


def check_hydrodynamic_ensemble(seed: int, threads: int) -> List[Dict[str, Any]]:
    """
    Hydrodynamic ensemble (gamma = 2): <v^2> against N kT/M in standard
    errors, and the median relative error of the Welch spectrum against the
    closed form for omega lambda in [10, 100].
    """
    medium = canonical_medium("hydrodynamic", gamma=2.0)
    lam = medium.lam
    dt = 1e-3 * lam
    cfg = SimConfig(
        medium, dt, 4096, n_traj=256, seed=seed + 5, threads=threads,
        burn_in=int(round(2.0 * lam / dt)),
    )
    ensemble = simulate(cfg)
    estimate = mean_square_velocity(ensemble)
    target = medium.ctx.N * medium.ctx.kT / medium.effective_mass
    velocity_check = _make_check(
        "simulation[hydrodynamic_equipartition]",
        abs(estimate.value - target) / estimate.stderr,
        _tolerance("standard_errors"),
        f"estimate {estimate.value:.5g} +- {estimate.stderr:.2g}, target {target:.5g}",
    )
    psd = welch_psd(ensemble, WelchConfig(1024))
    band = _band(psd.omega, 10.0 / lam, 100.0 / lam)
    exact = spectra.psd_closed(medium, psd.omega[band])
    psd_check = _make_check(
        "simulation[hydrodynamic_psd]",
        float(np.median(np.abs(psd.values[band] - exact) / exact)),
        _tolerance("psd_rtol"),
        "median over omega lambda in [10, 100]",
    )
    return [velocity_check, psd_check]


def simulation_checks(seed: int = 0, threads: int = 1) -> List[Callable[[], Any]]:
    return [
        lambda: check_viscous_ensemble(seed, threads),
        lambda: check_trap_variance(seed, threads),
        lambda: check_maxwell_psd(seed, threads),
        lambda: check_subdiffusive_msd(seed, threads),
        lambda: check_subdiffusive_psd(seed, threads),
        lambda: check_hydrodynamic_ensemble(seed, threads),
    ]


# ---------------------------------------------------------------------------
# Running and reporting
# ---------------------------------------------------------------------------


def _suite_checks(suite: str, seed: int, threads: int) -> List[Callable[[], Any]]:
    if suite == "limits":
        return limits_checks()
    if suite == "fdt":
        return fdt_checks()
    if suite == "simulation":
        return simulation_checks(seed, threads)
    raise ValueError(f"unknown suite '{suite}'; expected one of {', '.join(SUITES + ('all',))}")


def run_suite(suite: str, seed: int = 0, threads: int = 1) -> Dict[str, Any]:
    """
    Run one verification suite, or all of them.

    Args:
        suite: "limits", "fdt", "simulation" or "all"
        seed: Root seed of the simulation suite
        threads: Worker threads of the simulation suite

    Returns:
        Dictionary with the checks and pass/fail counters
    """
    names = SUITES if suite == "all" else (suite,)
    results: Dict[str, Any] = {"suite": suite, "checks": [], "passed": 0, "failed": 0}
    start = time.perf_counter()
    for name in names:
        for index, check_fn in enumerate(_suite_checks(name, seed, threads)):
            outcome = _guarded(f"{name}[{index}]", check_fn)
            for check in outcome if isinstance(outcome, list) else [outcome]:
                results["checks"].append(check)
                if check["status"] == "pass":
                    results["passed"] += 1
                else:
                    results["failed"] += 1
                logger.debug("%s: %s (%.3e)", check["name"], check["status"], check["metric"])
    results["elapsed"] = time.perf_counter() - start
    return results


def require_pass(results: Dict[str, Any]) -> None:
    """
    Raise when a suite run holds a failed check.

    Args:
        results: Output of ``run_suite``

    Raises:
        VerificationError: Naming every failed check
    """
    failed = [check["name"] for check in results["checks"] if check["status"] != "pass"]
    if failed:
        raise VerificationError(
            f"{len(failed)} of {len(results['checks'])} checks failed: {', '.join(failed)}",
            failed,
        )


def report_lines(results: Dict[str, Any]) -> List[str]:
    """One tab-separated line per check: name, metric, tolerance, verdict."""
    return [
        f"{c['name']}\t{c['metric']:.6e}\t{c['tolerance']:.6e}\t{c['status']}"
        for c in results.get("checks", [])
    ]


def display_results(results: Dict[str, Any]) -> None:
    """
    Display verification results.

    Args:
        results: Dictionary returned by ``run_suite``
    """
    checks = results.get("checks", [])
    passed = results.get("passed", 0)
    failed = results.get("failed", 0)

    print_success(f"\nVerification Report: {results.get('suite')}")
    print_info(f"\nTotal Checks: {len(checks)}")
    print_success(f"Passed: {passed}")
    if failed:
        print_error(f"Failed: {failed}")

    rows = [
        [c["name"], format_quantity(c["metric"]), format_quantity(c["tolerance"]), verdict_color(c["status"])]
        for c in checks
    ]
    print_table(["Check", "Metric", "Tolerance", "Verdict"], rows)

    for check in checks:
        if check["status"] != "pass":
            print_error(f"  ✗ {check['name']}: {check['message']}")
            for detail in check.get("details", []):
                print_info(f"    {detail}")

    print_info(f"\nElapsed: {results.get('elapsed', 0.0):.1f} s")
    if failed:
        print_warning("Verification failed")
    else:
        print_success("All checks passed")
