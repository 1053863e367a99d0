"""
Closed-form spectra, velocity autocorrelations and mean-square displacements.

Every spectrum follows ``CONVENTION_NOTE``: S(w) = 2 Re of the one-sided
Fourier transform of the VACF, so that S(w) = N kT/(3 pi R) Re{phi(w)} with
phi the fluidity of the medium's rheological analogue. The specialized
``psd_*`` functions evaluate the same quantity through the normalized closed
forms, which depend only on the dimensionless groups.
"""

import logging
import math
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import integrate

from rheobrown.core.curves import CurveKind, Normalization, SpectrumCurve, TimeCurve
from rheobrown.core.exceptions import UnsupportedTopologyError
from rheobrown.core.media import (
    HarmonicTrap,
    Hydrodynamic,
    Jeffreys,
    Maxwell,
    MediumSpec,
    PhysicalContext,
    Subdiffusive,
    Viscous,
)
from rheobrown.core.rheology import creep_compliance_closed, creep_compliance_numeric, fluidity
from rheobrown.core.specfun import erfcx_complex, frac_power_iomega, ornstein_shape
from rheobrown.utils.validators import require_uniform

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

_SQRT_HALF = math.sqrt(0.5)


def _output(x: ArrayLike, value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(x) == 0 else value


# ---------------------------------------------------------------------------
# Normalized closed forms (functions of the dimensionless groups only)
# ---------------------------------------------------------------------------


def normalized_viscous(x: ArrayLike) -> ArrayLike:
    """1/(1 + (w tau)^2)."""
    xx = np.asarray(x, dtype=float)
    return _output(x, 1.0 / (1.0 + xx * xx))


def normalized_trap(x: ArrayLike, omegaR_tau: float) -> ArrayLike:
    """
    (w tau)^2 / ([(w_R tau)^2 - (w tau)^2]^2 + (w tau)^2).

    Peaks at exactly 1 where w tau = w_R tau. With w_R tau = 0 the trap is a
    viscous fluid and the DC value is the viscous limit 1.
    """
    xx = np.asarray(x, dtype=float)
    w2 = omegaR_tau * omegaR_tau
    x2 = xx * xx
    den = (w2 - x2) ** 2 + x2
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.where(den == 0.0, 1.0, x2 / np.where(den == 0.0, 1.0, den))
    return _output(x, value)


def normalized_maxwell(x: ArrayLike, omegaR_tau: float) -> ArrayLike:
    """(w_R tau)^4 / ([(w_R tau)^2 - (w tau)^2]^2 + (w tau)^2 (w_R tau)^4)."""
    xx = np.asarray(x, dtype=float)
    w2 = omegaR_tau * omegaR_tau
    w4 = w2 * w2
    x2 = xx * xx
    return _output(x, w4 / ((w2 - x2) ** 2 + x2 * w4))


def normalized_jeffreys(x: ArrayLike, omegaR_tau: float, xi: float) -> ArrayLike:
    """
    Jeffreys spectrum with viscosity ratio xi = eta_inf/eta.

    [(1+xi) w^4 + xi x^2] / ([(1+xi) w^2 - x^2]^2 + x^2 (w^2 + xi)^2) with
    x = w tau and w = w_R tau. Reduces to the Maxwell form at xi = 0.
    """
    xx = np.asarray(x, dtype=float)
    w2 = omegaR_tau * omegaR_tau
    x2 = xx * xx
    num = (1.0 + xi) * w2 * w2 + xi * x2
    den = ((1.0 + xi) * w2 - x2) ** 2 + x2 * (w2 + xi) ** 2
    return _output(x, num / den)


def normalized_subdiffusive(x: ArrayLike, alpha: float) -> ArrayLike:
    """
    Springpot spectrum in units of w lambda.

    (x)^(1+alpha) sin(alpha pi/2) / ([x^alpha cos(alpha pi/2) - x^2]^2 + [x^alpha sin(alpha pi/2)]^2)
    """
    xx = np.asarray(x, dtype=float)
    phase = complex(frac_power_iomega(1.0, alpha))
    c, s = phase.real, phase.imag
    xa = np.power(xx, alpha)
    num = xa * xx * s
    den = (xa * c - xx * xx) ** 2 + (xa * s) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        # alpha = 1 has the finite viscous limit at x = 0
        value = np.where(den == 0.0, 1.0 if alpha == 1.0 else 0.0, num / np.where(den == 0.0, 1.0, den))
    return _output(x, value)


def normalized_hydrodynamic(x: ArrayLike, gamma: float) -> ArrayLike:
    """
    Spectrum with hydrodynamic memory in units of w lambda.

    (gamma + sqrt(x) cos(pi/4)) / ((gamma + sqrt(x) cos(pi/4))^2 + (x + sqrt(x) sin(pi/4))^2)
    """
    xx = np.asarray(x, dtype=float)
    root = np.sqrt(xx) * _SQRT_HALF
    real = gamma + root
    imag = xx + root
    return _output(x, real / (real * real + imag * imag))


def normalized_psd(medium: MediumSpec, x: ArrayLike) -> ArrayLike:
    """
    Normalized spectrum of a medium at dimensionless frequency x.

    Args:
        medium: Any medium
        x: omega * medium.time_scale (w tau or w lambda)

    Returns:
        S(w)/S_ref
    """
    groups = medium.groups()
    if isinstance(medium, Jeffreys):
        return normalized_jeffreys(x, groups.omegaR_tau, groups.xi)
    if isinstance(medium, Maxwell):
        return normalized_maxwell(x, groups.omegaR_tau)
    if isinstance(medium, HarmonicTrap):
        return normalized_trap(x, groups.omegaR_tau)
    if isinstance(medium, Viscous):
        return normalized_viscous(x)
    if isinstance(medium, Subdiffusive):
        return normalized_subdiffusive(x, medium.alpha)
    if isinstance(medium, Hydrodynamic):
        return normalized_hydrodynamic(x, groups.gamma_ratio)
    raise TypeError(f"no closed-form spectrum for {type(medium).__name__}")


def reference_psd(medium: MediumSpec) -> float:
    """Reference PSD S_ref used as the normalized spectrum's unit."""
    return medium.reference_psd()


def psd_closed(medium: MediumSpec, omega: ArrayLike) -> ArrayLike:
    """Dimensional spectrum of a medium through its normalized closed form."""
    om = np.asarray(omega, dtype=float)
    value = medium.reference_psd() * np.asarray(normalized_psd(medium, np.abs(om) * medium.time_scale))
    return _output(omega, value)


# ---------------------------------------------------------------------------
# Dimensional spectra
# ---------------------------------------------------------------------------


def psd_master(medium: MediumSpec, omega: ArrayLike) -> ArrayLike:
    """
    Spectrum from the fluidity of the medium's rheological analogue.

    Args:
        medium: Any medium
        omega: Angular frequency (rad/s)

    Returns:
        N kT/(3 pi R) Re{i w / G(w)} in m^2/s per rad/s

    Raises:
        PoleError: If the analogue's modulus vanishes at a requested frequency
    """
    phi = fluidity(medium.network(), omega)
    return _output(omega, medium.ctx.psd_prefactor * np.real(np.asarray(phi)))


def psd_viscous(ctx: PhysicalContext, eta: float, omega: ArrayLike) -> ArrayLike:
    """Memoryless viscous fluid: N kT/(3 pi R eta) / (1 + (w tau)^2)."""
    return psd_closed(Viscous(ctx, eta), omega)


def psd_trap(ctx: PhysicalContext, G: float, eta: float, omega: ArrayLike) -> ArrayLike:
    """Harmonic trap; vanishes at DC and peaks at w = w_R."""
    return psd_closed(HarmonicTrap(ctx, G, eta), omega)


def psd_maxwell(ctx: PhysicalContext, G: float, eta: float, omega: ArrayLike) -> ArrayLike:
    """Maxwell fluid."""
    return psd_closed(Maxwell(ctx, G, eta), omega)


def psd_jeffreys(
    ctx: PhysicalContext, G: float, eta: float, eta_inf: float, omega: ArrayLike
) -> ArrayLike:
    """Jeffreys fluid; DC value N kT/(3 pi R (eta + eta_inf))."""
    return psd_closed(Jeffreys(ctx, G, eta, eta_inf), omega)


def psd_subdiffusive(ctx: PhysicalContext, mu_alpha: float, alpha: float, omega: ArrayLike) -> ArrayLike:
    """Springpot material; decays as w^-(3 - alpha)."""
    return psd_closed(Subdiffusive(ctx, mu_alpha, alpha), omega)


def psd_hydrodynamic(
    ctx: PhysicalContext, eta: float, rho_f: float, rho_p: float, omega: ArrayLike
) -> ArrayLike:
    """Viscous fluid with hydrodynamic memory; decays as w^-3/2."""
    return psd_closed(Hydrodynamic(ctx, eta, rho_f, rho_p), omega)


def spectrum_curve(medium: MediumSpec, omega: Sequence[float], normalized: bool = False) -> SpectrumCurve:
    """
    Sample a medium's spectrum on a grid.

    Args:
        medium: Any medium
        omega: Grid, dimensionless (w tau or w lambda) when ``normalized``,
            otherwise in rad/s
        normalized: Emit S/S_ref against the dimensionless grid

    Returns:
        SpectrumCurve with the medium's groups in its metadata
    """
    grid = np.asarray(omega, dtype=float)
    if normalized:
        values = np.asarray(normalized_psd(medium, grid), dtype=float)
        norm = Normalization.NORMALIZED
    else:
        values = np.asarray(psd_closed(medium, grid), dtype=float)
        norm = Normalization.DIMENSIONAL
    metadata = {"medium": medium.key, **medium.groups().as_dict()}
    return SpectrumCurve(grid, values, normalization=norm, metadata=metadata)


# ---------------------------------------------------------------------------
# Time domain
# ---------------------------------------------------------------------------


def vacf_viscous(ctx: PhysicalContext, eta: float, t: ArrayLike) -> ArrayLike:
    """(N kT/m) exp(-t/tau)."""
    medium = Viscous(ctx, eta)
    tt = np.abs(np.asarray(t, dtype=float))
    return _output(t, ctx.N * ctx.kT / ctx.m * np.exp(-tt / medium.tau))


def vacf_viscous_transform(ctx: PhysicalContext, eta: float, omega: ArrayLike) -> Union[complex, np.ndarray]:
    """
    Analytic one-sided Fourier transform of the viscous VACF.

    int_0^inf (N kT/m) exp(-t/tau) exp(-i w t) dt = (N kT/m) tau/(1 + i w tau);
    twice its real part is ``psd_viscous``.
    """
    tau = Viscous(ctx, eta).tau
    om = np.asarray(omega, dtype=float)
    value = ctx.N * ctx.kT / ctx.m * tau / (1.0 + 1j * om * tau)
    return complex(value) if np.ndim(omega) == 0 else value


def hydrodynamic_roots(medium: Hydrodynamic) -> tuple:
    """
    Roots a, b of M s + z sqrt(s) + zeta in the variable sqrt(s), sign-flipped.

    a, b = (z +- sqrt(z^2 - 4 zeta M))/(2M); complex conjugates when
    z^2 < 4 zeta M. Both have positive real part.
    """
    R = medium.ctx.R
    zeta = medium.ctx.stokes_factor * medium.eta
    z = 6.0 * math.pi * R * R * math.sqrt(medium.rho_f * medium.eta)
    M = medium.effective_mass
    root = np.sqrt(complex(z * z - 4.0 * zeta * M))
    return (z + root) / (2.0 * M), (z - root) / (2.0 * M)


def vacf_hydrodynamic(
    ctx: PhysicalContext, eta: float, rho_f: float, rho_p: float, t: ArrayLike
) -> ArrayLike:
    """
    VACF of a sphere with hydrodynamic memory.

    (N kT/(M (b - a))) [b erfcx(b sqrt t) - a erfcx(a sqrt t)], evaluated with
    the scaled complementary error function so nothing overflows. A double
    root uses the analytic limit.

    Args:
        ctx: Physical context (R, kT, N)
        eta: Fluid viscosity (Pa*s)
        rho_f: Fluid density (kg/m^3)
        rho_p: Particle density (kg/m^3)
        t: Time lag(s), t >= 0

    Returns:
        VACF in m^2/s^2; equals N kT/M at t = 0 and decays as t^-3/2
    """
    medium = Hydrodynamic(ctx, eta, rho_f, rho_p)
    M = medium.effective_mass
    scale = ctx.N * ctx.kT / M
    a, b = hydrodynamic_roots(medium)
    sqrt_t = np.sqrt(np.abs(np.asarray(t, dtype=float)))
    if abs(b - a) <= 1e-10 * abs(a):
        y = a * sqrt_t
        ey = np.asarray(erfcx_complex(y))
        value = scale * (ey + y * (2.0 * y * ey - 2.0 / math.sqrt(math.pi)))
    elif abs(np.imag(b)) > 0.0:
        # a = conj(b): the difference quotient is Im(b erfcx(b sqrt t))/Im(b)
        term_b = b * np.asarray(erfcx_complex(b * sqrt_t))
        value = scale * np.imag(term_b) / np.imag(b)
    else:
        term_b = b * np.asarray(erfcx_complex(b * sqrt_t))
        term_a = a * np.asarray(erfcx_complex(a * sqrt_t))
        value = scale * (term_b - term_a) / (b - a)
    residue = np.max(np.abs(np.imag(value)) - 1e-10 * np.abs(np.real(value)))
    if residue > 0.0:
        logger.warning("hydrodynamic VACF carries an imaginary residue of %.3g", residue)
    return _output(t, np.real(value))


def msd_viscous(ctx: PhysicalContext, eta: float, t: ArrayLike) -> ArrayLike:
    """
    Ornstein MSD: (N kT/(3 pi R eta)) [t - tau (1 - exp(-t/tau))].

    Args:
        ctx: Physical context
        eta: Viscosity (Pa*s)
        t: Time(s), t >= 0

    Returns:
        MSD in m^2
    """
    medium = Viscous(ctx, eta)
    tt = np.asarray(t, dtype=float)
    value = medium.reference_psd() * medium.tau * np.asarray(ornstein_shape(tt / medium.tau))
    return _output(t, value)


def msd_from_network(medium: MediumSpec, t_grid: Sequence[float]) -> TimeCurve:
    """
    MSD through the correspondence principle, N kT/(3 pi R) J(t).

    The closed creep compliance is used when the analogue network has one,
    numeric inversion of the fluidity otherwise.

    Args:
        medium: Any medium
        t_grid: Ascending times t >= 0

    Returns:
        TimeCurve of the MSD (m^2)
    """
    t = np.asarray(t_grid, dtype=float)
    net = medium.network()
    try:
        creep = creep_compliance_closed(net, t)
        curve = TimeCurve(t, np.asarray(creep), CurveKind.CREEP)
        logger.debug("closed creep compliance for %s", medium.key)
    except UnsupportedTopologyError:
        breakpoints = list(medium.characteristic_rates().values())
        curve = creep_compliance_numeric(net, t, breakpoints=breakpoints)
    values = medium.ctx.psd_prefactor * np.asarray(curve.values)
    return TimeCurve(
        t, values, CurveKind.MSD, accurate=curve.accurate, metadata={"medium": medium.key}
    )


def vacf_from_msd(msd: TimeCurve) -> TimeCurve:
    """
    Half the second time derivative of an MSD.

    Centered second differences inside, second-order one-sided stencils at
    the two ends.

    Args:
        msd: MSD samples on a uniform grid (at least four points)

    Returns:
        TimeCurve of the VACF

    Raises:
        GridError: If the grid is not uniform
    """
    t = require_uniform(msd.t)
    f = np.asarray(msd.values, dtype=float)
    if f.size < 4:
        raise ValueError("need at least four samples for a second derivative")
    h2 = (t[1] - t[0]) ** 2
    d2 = np.empty_like(f)
    d2[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / h2
    d2[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2
    d2[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / h2
    return TimeCurve(t, 0.5 * d2, CurveKind.VACF, metadata=dict(msd.metadata))


def cosine_transform(
    f: Callable[[float], float],
    omega: ArrayLike,
    time_scale: float,
) -> ArrayLike:
    """
    Numeric 2 int_0^inf f(t) cos(w t) dt of a real, decaying correlation.

    The range is split at a few periods (or time scales): the head uses a
    cosine-weighted finite rule, the infinite tail a Fourier-integral rule.

    Args:
        f: Scalar correlation function of t >= 0
        omega: Angular frequency (rad/s), >= 0
        time_scale: Decay scale of ``f``; sets the split point

    Returns:
        Twice the one-sided cosine transform
    """
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    out = np.empty(om.shape)
    for i, w in enumerate(om):
        if w == 0.0:
            head, _ = integrate.quad(f, 0.0, 50.0 * time_scale, limit=400)
            tail, _ = integrate.quad(f, 50.0 * time_scale, np.inf, limit=400)
            out[i] = 2.0 * (head + tail)
            continue
        split = max(20.0 * time_scale, 20.0 * math.pi / w)
        head, _ = integrate.quad(f, 0.0, split, weight="cos", wvar=w, limit=400)
        tail, _ = integrate.quad(f, split, np.inf, weight="cos", wvar=w, limlst=200)
        out[i] = 2.0 * (head + tail)
    return float(out[0]) if np.ndim(omega) == 0 else out.reshape(np.shape(omega))


def equipartition_integral(medium: MediumSpec, decades: float = 8.0) -> float:
    """
    Numeric int_0^inf S(w) dw; equals pi N kT/m (M with added mass).

    The bulk is integrated in log frequency with the characteristic rates as
    breakpoints; beyond the top of the grid a power-law tail with the slope
    measured there is added analytically.

    Args:
        medium: Any medium
        decades: Decades covered on each side of 1/time_scale

    Returns:
        Integral in m^2/s^2
    """
    center = 1.0 / medium.time_scale
    w_lo = center * 10.0 ** (-decades)
    w_hi = center * 10.0 ** decades

    def integrand(u: float) -> float:
        w = math.exp(u)
        return float(psd_closed(medium, w)) * w

    marks = sorted(
        math.log(rate) for rate in medium.characteristic_rates().values() if w_lo < rate < w_hi
    )
    bulk, _ = integrate.quad(
        integrand, math.log(w_lo), math.log(w_hi), points=marks or None, limit=800
    )
    head = float(psd_closed(medium, w_lo)) * w_lo
    s_hi = float(psd_closed(medium, w_hi))
    slope = math.log2(float(psd_closed(medium, 2.0 * w_hi)) / s_hi)
    tail = s_hi * w_hi / (-slope - 1.0) if slope < -1.0 else 0.0
    if slope >= -1.0:
        logger.warning("spectrum tail slope %.3g is not integrable; tail dropped", slope)
    return bulk + head + tail


def equipartition_target(medium: MediumSpec) -> float:
    """pi N kT / m_eff, the value ``equipartition_integral`` must reach."""
    return math.pi * medium.ctx.N * medium.ctx.kT / medium.effective_mass


def mean_square_velocity(medium: MediumSpec) -> float:
    """Equilibrium <v^2> = N kT / m_eff."""
    return medium.ctx.N * medium.ctx.kT / medium.effective_mass


def stationary_position_variance(medium: MediumSpec) -> Optional[float]:
    """Summed position variance N kT/(6 pi R G) of a trapped particle, None for fluids."""
    if isinstance(medium, HarmonicTrap) and medium.G > 0.0:
        return medium.ctx.N * medium.position_variance()
    return None
