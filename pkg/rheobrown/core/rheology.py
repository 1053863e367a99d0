"""
Mechanical elements, rheological networks and their response functions.

A network is a tree of elements joined by ``Parallel`` and ``Series`` nodes.
Complex moduli compose recursively: parallel moduli add, series moduli add
reciprocally. Time-domain closed forms are provided for the topologies that
have them; everything else raises ``UnsupportedTopologyError`` and callers
fall back to ``creep_compliance_numeric``.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, special

from rheobrown.core.curves import CurveKind, TimeCurve
from rheobrown.core.exceptions import ParameterError, PoleError, UnsupportedTopologyError
from rheobrown.core.specfun import frac_power_iomega, ornstein_shape
from rheobrown.utils.validators import (
    is_ascending,
    require_alpha,
    require_non_negative,
    require_positive,
)

logger = logging.getLogger(__name__)

INERPOT_ORDER = 1.5


@dataclass(frozen=True)
class Spring:
    """Hookean element, tau = G gamma."""

    G: float

    def __post_init__(self) -> None:
        require_positive("G", self.G)

    def modulus(self, omega: np.ndarray) -> np.ndarray:
        return np.full(np.shape(omega), self.G, dtype=complex)


@dataclass(frozen=True)
class Dashpot:
    """Newtonian element, tau = eta dgamma/dt."""

    eta: float

    def __post_init__(self) -> None:
        require_positive("eta", self.eta)

    def modulus(self, omega: np.ndarray) -> np.ndarray:
        return 1j * np.asarray(omega, dtype=float) * self.eta


@dataclass(frozen=True)
class Inerter:
    """Element whose force follows the relative acceleration, tau = m_R d2gamma/dt2."""

    m_R: float

    def __post_init__(self) -> None:
        require_positive("m_R", self.m_R)

    def modulus(self, omega: np.ndarray) -> np.ndarray:
        om = np.asarray(omega, dtype=float)
        return (-self.m_R * om * om).astype(complex)


@dataclass(frozen=True)
class Springpot:
    """
    Scott-Blair element, tau = mu_alpha d^alpha gamma / dt^alpha.

    ``alpha`` is restricted to [0, 1]; the order-3/2 element of the
    hydrodynamic network is only available through ``Springpot.inerpot``.
    """

    mu_alpha: float
    alpha: float
    inerpot_order: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        require_positive("mu_alpha", self.mu_alpha)
        if self.inerpot_order:
            if self.alpha != INERPOT_ORDER:
                raise ParameterError("an inerpot has order exactly 3/2")
        else:
            require_alpha(self.alpha)

    @classmethod
    def inerpot(cls, mu_3_2: float) -> "Springpot":
        """Order-3/2 springpot of the hydrodynamic network."""
        return cls(mu_3_2, INERPOT_ORDER, inerpot_order=True)

    def modulus(self, omega: np.ndarray) -> np.ndarray:
        return self.mu_alpha * np.asarray(frac_power_iomega(omega, self.alpha), dtype=complex)


Element = Union[Spring, Dashpot, Inerter, Springpot]


@dataclass(frozen=True)
class Parallel:
    """Branches sharing the same strain; stresses add."""

    children: Tuple["RheoNetwork", ...]
    label: str = ""

    def __post_init__(self) -> None:
        if not self.children:
            raise ParameterError("a parallel node needs at least one branch")


@dataclass(frozen=True)
class Series:
    """Elements carrying the same stress; strains add."""

    children: Tuple["RheoNetwork", ...]
    label: str = ""

    def __post_init__(self) -> None:
        if not self.children:
            raise ParameterError("a series node needs at least one element")


RheoNetwork = Union[Spring, Dashpot, Inerter, Springpot, Parallel, Series]


class Relaxation(NamedTuple):
    """Relaxation modulus split into an impulse weight (times delta(t)) and a regular part."""

    impulse_weight: float
    regular: Union[float, np.ndarray]


# ---------------------------------------------------------------------------
# Named networks
# ---------------------------------------------------------------------------


def _assemble(parts: Iterable[Optional[RheoNetwork]], label: str) -> Parallel:
    children = tuple(p for p in parts if p is not None)
    if not children:
        raise ParameterError(f"{label} network has no element with a non-zero constant")
    return Parallel(children, label=label)


def _optional(factory: type, name: str, value: float) -> Optional[RheoNetwork]:
    value = require_non_negative(name, value)
    return factory(value) if value > 0.0 else None


def interviscous(eta: float, m_R: float) -> Parallel:
    """Dashpot || inerter (memoryless viscous fluid)."""
    return _assemble(
        [_optional(Dashpot, "eta", eta), _optional(Inerter, "m_R", m_R)], "interviscous"
    )


def inertoviscoelastic(G: float, eta: float, m_R: float) -> Parallel:
    """Spring || dashpot || inerter (harmonic trap, Kelvin solid with inertia)."""
    return _assemble(
        [
            _optional(Spring, "G", G),
            _optional(Dashpot, "eta", eta),
            _optional(Inerter, "m_R", m_R),
        ],
        "inertoviscoelastic",
    )


def maxwell_inerter(G: float, eta: float, m_R: float) -> Parallel:
    """(Spring -- dashpot) || inerter."""
    maxwell = Series((Spring(G), Dashpot(eta)), label="maxwell")
    return _assemble([maxwell, _optional(Inerter, "m_R", m_R)], "maxwell_inerter")


def jeffreys_inerter(G: float, eta: float, eta_inf: float, m_R: float) -> Parallel:
    """(Spring -- dashpot) || dashpot(eta_inf) || inerter."""
    maxwell = Series((Spring(G), Dashpot(eta)), label="maxwell")
    return _assemble(
        [maxwell, _optional(Dashpot, "eta_inf", eta_inf), _optional(Inerter, "m_R", m_R)],
        "jeffreys_inerter",
    )


def springpot_inerter(mu_alpha: float, alpha: float, m_R: float) -> Parallel:
    """Springpot || inerter (subdiffusive material)."""
    return _assemble(
        [Springpot(mu_alpha, alpha), _optional(Inerter, "m_R", m_R)], "springpot_inerter"
    )


def hydrodynamic_network(eta: float, mu_3_2: float, m_R: float) -> Parallel:
    """Dashpot || inerpot(mu_3/2) || inerter (viscous fluid with hydrodynamic memory)."""
    return _assemble(
        [
            _optional(Dashpot, "eta", eta),
            Springpot.inerpot(mu_3_2),
            _optional(Inerter, "m_R", m_R),
        ],
        "hydrodynamic",
    )


# ---------------------------------------------------------------------------
# Frequency domain
# ---------------------------------------------------------------------------


def _modulus(node: RheoNetwork, om: np.ndarray) -> np.ndarray:
    if isinstance(node, Parallel):
        total = np.zeros(om.shape, dtype=complex)
        for child in node.children:
            total = total + _modulus(child, om)
        return total
    if isinstance(node, Series):
        moduli = [_modulus(child, om) for child in node.children]
        # a zero-modulus element in series makes the compliance infinite
        blocked = np.zeros(om.shape, dtype=bool)
        for g in moduli:
            blocked |= g == 0
        compliance = np.zeros(om.shape, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            for g in moduli:
                compliance = compliance + np.where(blocked, 0.0, 1.0 / np.where(g == 0, 1.0, g))
            result = np.where(blocked, 0.0, 1.0 / np.where(compliance == 0, 1.0, compliance))
        if np.any(blocked):
            logger.debug("series node with zero-modulus element at %d frequencies", blocked.sum())
        return result.astype(complex)
    return node.modulus(om)


def dynamic_modulus(net: RheoNetwork, omega: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
    """
    Complex dynamic modulus G(omega) of a network.

    Args:
        net: Element or composition tree
        omega: Angular frequency (rad/s); negative values follow conjugate symmetry

    Returns:
        Complex modulus in Pa (scalar in, scalar out)
    """
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    result = _modulus(net, om)
    return complex(result[0]) if np.ndim(omega) == 0 else result.reshape(np.shape(omega))


def complex_compliance(net: RheoNetwork, omega: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
    """
    Complex compliance 1/G(omega); infinite where the modulus vanishes.

    Args:
        net: Element or composition tree
        omega: Angular frequency (rad/s)

    Returns:
        Complex compliance in 1/Pa, ``inf`` at poles
    """
    g = np.atleast_1d(np.asarray(dynamic_modulus(net, omega), dtype=complex))
    with np.errstate(divide="ignore", invalid="ignore"):
        result = np.where(g == 0, complex(np.inf, 0.0), 1.0 / np.where(g == 0, 1.0, g))
    return complex(result[0]) if np.ndim(omega) == 0 else result.reshape(np.shape(omega))


def zero_shear_viscosity(node: RheoNetwork) -> float:
    """
    Exact limit of G(omega)/(i omega) as omega -> 0.

    Infinite for networks with a load-bearing elastic path (solids), zero
    for networks that only carry stress through an inerter.

    Args:
        node: Element or composition tree

    Returns:
        Zero-shear viscosity in Pa*s (may be ``math.inf`` or 0)
    """
    if isinstance(node, Spring):
        return math.inf
    if isinstance(node, Dashpot):
        return node.eta
    if isinstance(node, Inerter):
        return 0.0
    if isinstance(node, Springpot):
        if node.alpha < 1.0:
            return math.inf
        return node.mu_alpha if node.alpha == 1.0 else 0.0
    if isinstance(node, Parallel):
        return sum(zero_shear_viscosity(child) for child in node.children)
    total = 0.0
    for child in node.children:
        eta0 = zero_shear_viscosity(child)
        total += math.inf if eta0 == 0.0 else 1.0 / eta0
    if total == 0.0:
        return math.inf
    return 0.0 if math.isinf(total) else 1.0 / total


def fluidity(net: RheoNetwork, omega: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
    """
    Complex dynamic fluidity phi(omega) = i omega / G(omega).

    At omega = 0 the exact limit 1/eta_0 is returned (zero for solids).

    Args:
        net: Element or composition tree
        omega: Angular frequency (rad/s)

    Returns:
        Complex fluidity in 1/(Pa*s)

    Raises:
        PoleError: If G vanishes at a requested non-zero frequency, or the
            network has no dissipation or elasticity at DC
    """
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    g = _modulus(net, om)
    dc = om == 0.0
    resonant = (g == 0) & ~dc
    if np.any(resonant):
        where = float(om[resonant][0])
        raise PoleError(f"complex modulus vanishes at omega = {where:g} rad/s (resonance)", where)
    phi = np.empty(om.shape, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi[~dc] = 1j * om[~dc] / g[~dc]
    if np.any(dc):
        eta0 = zero_shear_viscosity(net)
        if eta0 == 0.0:
            raise PoleError("fluidity diverges at omega = 0 (no dissipative or elastic path)", 0.0)
        phi[dc] = 0.0 if math.isinf(eta0) else 1.0 / eta0
    return complex(phi[0]) if np.ndim(omega) == 0 else phi.reshape(np.shape(omega))


def low_frequency_exponent(net: RheoNetwork, omega_lo: float = 1e-8) -> float:
    """
    Log-log slope of |G(omega)| over one decade starting at ``omega_lo``.

    Args:
        net: Element or composition tree
        omega_lo: Lower frequency of the probe decade (rad/s)

    Returns:
        Exponent p in |G| ~ omega^p
    """
    g_lo, g_hi = np.abs(dynamic_modulus(net, np.array([omega_lo, 10.0 * omega_lo])))
    if g_lo == 0.0 or g_hi == 0.0:
        return math.inf
    return float(np.log10(g_hi / g_lo))


# ---------------------------------------------------------------------------
# Time domain
# ---------------------------------------------------------------------------


def _is_maxwell_element(node: RheoNetwork) -> bool:
    if not isinstance(node, Series) or len(node.children) != 2:
        return False
    kinds = {type(child) for child in node.children}
    return kinds == {Spring, Dashpot}


def _pick(children: Sequence[RheoNetwork], kind: type) -> RheoNetwork:
    return next(child for child in children if isinstance(child, kind))


def relaxation_modulus(net: RheoNetwork, t: Union[float, np.ndarray]) -> Relaxation:
    """
    Stress response to a unit step strain.

    Supported: spring, dashpot (impulse), springpot, the Maxwell element and
    any parallel combination of supported parts (e.g. the Jeffreys fluid,
    whose dashpot contributes the impulse weight eta_inf).

    Args:
        net: Element or composition tree
        t: Time(s) after the step, strictly positive

    Returns:
        ``Relaxation(impulse_weight, regular)``

    Raises:
        UnsupportedTopologyError: For inerters and general series trees
    """
    tt = np.asarray(t, dtype=float)
    if np.any(tt <= 0.0):
        raise ParameterError("relaxation modulus needs t > 0")
    scalar = np.ndim(t) == 0

    def regular(value: np.ndarray) -> Union[float, np.ndarray]:
        return float(value) if scalar else value

    if isinstance(net, Spring):
        return Relaxation(0.0, regular(np.full(tt.shape, net.G)))
    if isinstance(net, Dashpot):
        return Relaxation(net.eta, regular(np.zeros(tt.shape)))
    if isinstance(net, Springpot):
        if net.alpha == 0.0:
            return Relaxation(0.0, regular(np.full(tt.shape, net.mu_alpha)))
        if net.alpha == 1.0:
            return Relaxation(net.mu_alpha, regular(np.zeros(tt.shape)))
        if net.alpha < 1.0:
            value = net.mu_alpha * tt ** (-net.alpha) / special.gamma(1.0 - net.alpha)
            return Relaxation(0.0, regular(value))
    if _is_maxwell_element(net):
        spring = _pick(net.children, Spring)
        dashpot = _pick(net.children, Dashpot)
        value = spring.G * np.exp(-spring.G / dashpot.eta * tt)
        return Relaxation(0.0, regular(value))
    if isinstance(net, Parallel):
        impulse = 0.0
        total = np.zeros(tt.shape)
        for child in net.children:
            part = relaxation_modulus(child, tt)
            impulse += part.impulse_weight
            total = total + np.asarray(part.regular)
        return Relaxation(impulse, regular(total))
    raise UnsupportedTopologyError(f"no closed-form relaxation modulus for {_describe(net)}")


def creep_compliance_closed(net: RheoNetwork, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    Closed-form strain response to a unit step stress.

    Supported: spring, dashpot, springpot, the interviscous fluid
    (dashpot || inerter), the Kelvin-Voigt solid (spring || dashpot) and any
    series chain of supported parts.

    Args:
        net: Element or composition tree
        t: Time(s) after the step, t >= 0

    Returns:
        Creep compliance J(t) in 1/Pa

    Raises:
        UnsupportedTopologyError: For every other topology
    """
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0.0):
        raise ParameterError("creep compliance needs t >= 0")
    value = _creep(net, tt)
    return float(value) if np.ndim(t) == 0 else value


def _creep(net: RheoNetwork, tt: np.ndarray) -> np.ndarray:
    if isinstance(net, Spring):
        return np.full(tt.shape, 1.0 / net.G)
    if isinstance(net, Dashpot):
        return tt / net.eta
    if isinstance(net, Springpot) and net.alpha <= 1.0:
        return tt ** net.alpha / (net.mu_alpha * special.gamma(1.0 + net.alpha))
    if isinstance(net, Series):
        return sum((_creep(child, tt) for child in net.children), np.zeros(tt.shape))
    if isinstance(net, Parallel):
        kinds = sorted(type(child).__name__ for child in net.children)
        if len(net.children) == 1:
            return _creep(net.children[0], tt)
        if kinds == ["Dashpot", "Inerter"]:
            eta = _pick(net.children, Dashpot).eta
            tau = _pick(net.children, Inerter).m_R / eta
            return tau / eta * ornstein_shape(tt / tau)
        if kinds == ["Dashpot", "Spring"]:
            G = _pick(net.children, Spring).G
            eta = _pick(net.children, Dashpot).eta
            return -np.expm1(-G / eta * tt) / G
    raise UnsupportedTopologyError(f"no closed-form creep compliance for {_describe(net)}")


def creep_compliance_numeric(
    net: RheoNetwork,
    t_grid: Union[Sequence[float], np.ndarray],
    breakpoints: Sequence[float] = (),
    rtol: float = 1e-2,
) -> TimeCurve:
    """
    Creep compliance by cosine-transform inversion of the fluidity.

    Uses J(t) = (2/pi) int_0^inf Re{phi(w)} (1 - cos wt)/w^2 dw. The integral
    is split at w_c = 1/t: below it the integrand is smooth and bounded,
    above it the non-oscillatory and oscillatory parts are integrated
    separately, the latter with a Fourier-weighted rule on the infinite tail.
    A linear-in-t contribution from a finite DC fluidity needs no special
    treatment in this form.

    Args:
        net: Element or composition tree
        t_grid: Ascending times t >= 0
        breakpoints: Characteristic frequencies (rad/s) where Re{phi} has
            structure (resonances, corners); they split the quadrature
        rtol: Accuracy target; samples missing it flag the curve inaccurate

    Returns:
        TimeCurve of J(t); ``accurate`` is False if any sample missed ``rtol``

    Raises:
        ParameterError: If the low-frequency behaviour of G makes J diverge
    """
    t_arr = np.asarray(t_grid, dtype=float)
    if t_arr.ndim != 1 or np.any(t_arr < 0.0) or (t_arr.size > 1 and not is_ascending(t_arr)):
        raise ParameterError("t_grid must be ascending and non-negative")
    exponent = low_frequency_exponent(net)
    if exponent >= 2.0 - 1e-6:
        raise ParameterError(
            f"|G| ~ omega^{exponent:.3g} at low frequency; creep compliance is not integrable"
        )

    def re_phi(w: float) -> float:
        return float(np.real(fluidity(net, w)))

    marks = sorted({float(b) for b in breakpoints if b > 0.0})
    values = np.zeros_like(t_arr)
    accurate = True
    for i, t in enumerate(t_arr):
        if t == 0.0:
            continue
        w_c = 1.0 / t

        def low(w: float) -> float:
            s = math.sin(0.5 * w * t)
            return re_phi(w) * 2.0 * s * s / (w * w)

        lo, err_lo = integrate.quad(low, 0.0, w_c, limit=200)
        inner = [b for b in marks if b > w_c]
        w_hi = max([w_c * 10.0] + [10.0 * b for b in inner])
        mid, err_mid = integrate.quad(
            lambda w: re_phi(w) / (w * w), w_c, w_hi, points=inner or None, limit=400
        )
        tail, err_tail = integrate.quad(lambda w: re_phi(w) / (w * w), w_hi, np.inf, limit=200)
        osc, err_osc = integrate.quad(
            lambda w: re_phi(w) / (w * w), w_c, np.inf, weight="cos", wvar=t, limlst=100
        )
        total = lo + mid + tail - osc
        values[i] = 2.0 / math.pi * total
        error = err_lo + err_mid + err_tail + err_osc
        if error > rtol * abs(total):
            accurate = False
            logger.warning("creep inversion at t=%g: error estimate %.2g exceeds tolerance", t, error)
    return TimeCurve(t_arr, values, CurveKind.CREEP, accurate=accurate)


def _describe(net: RheoNetwork) -> str:
    if isinstance(net, (Parallel, Series)):
        inner = ", ".join(_describe(child) for child in net.children)
        name = net.label or type(net).__name__.lower()
        return f"{name}({inner})"
    return type(net).__name__
