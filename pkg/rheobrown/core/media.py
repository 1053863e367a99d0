"""
Media in which the Brownian particle moves, and the constants feeding them.

Every medium maps to exactly one rheological network (the medium in parallel
with the particle's inerter) and exposes the dimensionless groups used as
figure axes.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, fields
from enum import Enum
from typing import ClassVar, Dict, List, Optional, Type

from rheobrown.core.exceptions import ParameterError
from rheobrown.core.rheology import (
    Parallel,
    hydrodynamic_network,
    inertoviscoelastic,
    interviscous,
    jeffreys_inerter,
    maxwell_inerter,
    springpot_inerter,
)
from rheobrown.utils.validators import (
    require_alpha,
    require_dimension,
    require_non_negative,
    require_positive,
)

logger = logging.getLogger(__name__)


def particle_mass_from_density(R: float, rho: float) -> float:
    """Mass of a sphere of radius R and density rho."""
    return 4.0 / 3.0 * math.pi * R**3 * rho


def added_mass(R: float, rho_f: float) -> float:
    """Half the mass of the displaced fluid, m_f/2."""
    return 0.5 * particle_mass_from_density(R, rho_f)


@dataclass(frozen=True)
class PhysicalContext:
    """
    Thermal and geometric constants of one particle.

    Attributes:
        kT: Thermal energy (J)
        N: Number of spatial dimensions (1, 2 or 3)
        R: Particle radius (m)
        m: Particle mass (kg)
        rho_p: Particle density (kg/m^3), optional
        rho_f: Fluid density (kg/m^3), optional
    """

    kT: float
    N: int
    R: float
    m: float
    rho_p: Optional[float] = None
    rho_f: Optional[float] = None

    def __post_init__(self) -> None:
        require_positive("kT", self.kT)
        require_dimension(self.N)
        require_positive("R", self.R)
        require_positive("m", self.m)
        if self.rho_p is not None:
            require_positive("rho_p", self.rho_p)
        if self.rho_f is not None:
            require_positive("rho_f", self.rho_f)

    @classmethod
    def from_density(
        cls, kT: float, N: int, R: float, rho_p: float, rho_f: Optional[float] = None
    ) -> "PhysicalContext":
        """Build a context whose mass follows from the particle density."""
        require_positive("R", R)
        require_positive("rho_p", rho_p)
        return cls(kT, N, R, particle_mass_from_density(R, rho_p), rho_p, rho_f)

    @property
    def stokes_factor(self) -> float:
        """6 pi R."""
        return 6.0 * math.pi * self.R

    @property
    def m_R(self) -> float:
        """Distributed inertance m/(6 pi R)."""
        return self.m / self.stokes_factor

    @property
    def psd_prefactor(self) -> float:
        """N kT/(3 pi R), the factor in front of Re{phi} in every spectrum."""
        return self.N * self.kT / (3.0 * math.pi * self.R)


# kT = N = 1, 6 pi R = 1, m = 1: every dimensionless group equals its SI value.
CANONICAL_CONTEXT = PhysicalContext(kT=1.0, N=1, R=1.0 / (6.0 * math.pi), m=1.0)


@dataclass(frozen=True)
class DimensionlessGroups:
    """Figure axes of a medium; fields a medium does not define stay None."""

    tau: Optional[float] = None
    omegaR_tau: Optional[float] = None
    xi: Optional[float] = None
    lam: Optional[float] = None
    gamma_ratio: Optional[float] = None

    def as_dict(self) -> Dict[str, float]:
        names = {"lam": "lambda", "gamma_ratio": "gamma"}
        return {
            names.get(key, key): value
            for key, value in self.__dict__.items()
            if value is not None
        }


class DampingRegime(str, Enum):
    UNDERDAMPED = "underdamped"
    CRITICAL = "critically damped"
    OVERDAMPED = "overdamped"


@dataclass(frozen=True)
class MediumSpec(ABC):
    """A linear viscoelastic medium hosting a particle described by ``ctx``."""

    key: ClassVar[str] = ""

    ctx: PhysicalContext

    @property
    def effective_mass(self) -> float:
        """Mass entering the velocity variance (m, or m + m_f/2 with added mass)."""
        return self.ctx.m

    @property
    def m_R(self) -> float:
        return self.effective_mass / self.ctx.stokes_factor

    @abstractmethod
    def network(self) -> Parallel:
        """Rheological analogue: the medium in parallel with the inerter."""

    @abstractmethod
    def groups(self) -> DimensionlessGroups:
        """Dimensionless groups of this medium."""

    @abstractmethod
    def reference_psd(self) -> float:
        """Reference PSD dividing the spectrum in normalized form."""

    @property
    @abstractmethod
    def time_scale(self) -> float:
        """Time scale making frequencies dimensionless (tau or lambda)."""

    def characteristic_rates(self) -> Dict[str, float]:
        """Rates (1/s) at which the spectrum has structure."""
        return {"1/tau": 1.0 / self.time_scale}

    def parameters(self) -> Dict[str, float]:
        """Material constants for manifests."""
        return {
            f.name: getattr(self, f.name)
            for f in fields(self)
            if f.name != "ctx"
        }


@dataclass(frozen=True)
class Viscous(MediumSpec):
    """Memoryless Newtonian fluid."""

    key: ClassVar[str] = "viscous"

    eta: float = 1.0

    def __post_init__(self) -> None:
        require_positive("eta", self.eta)

    @property
    def tau(self) -> float:
        return self.m_R / self.eta

    @property
    def time_scale(self) -> float:
        return self.tau

    def network(self) -> Parallel:
        return interviscous(self.eta, self.m_R)

    def groups(self) -> DimensionlessGroups:
        return DimensionlessGroups(tau=self.tau)

    def reference_psd(self) -> float:
        return self.ctx.psd_prefactor / self.eta


@dataclass(frozen=True)
class HarmonicTrap(MediumSpec):
    """Viscous fluid plus a harmonic restoring force (inertoviscoelastic solid)."""

    key: ClassVar[str] = "trap"

    G: float = 1.0
    eta: float = 1.0

    def __post_init__(self) -> None:
        require_non_negative("G", self.G)
        require_positive("eta", self.eta)

    @property
    def tau(self) -> float:
        return self.m_R / self.eta

    @property
    def omega_R(self) -> float:
        return math.sqrt(self.G / self.m_R)

    @property
    def time_scale(self) -> float:
        return self.tau

    def network(self) -> Parallel:
        return inertoviscoelastic(self.G, self.eta, self.m_R)

    def groups(self) -> DimensionlessGroups:
        return DimensionlessGroups(tau=self.tau, omegaR_tau=self.omega_R * self.tau)

    def reference_psd(self) -> float:
        return self.ctx.psd_prefactor / self.eta

    def characteristic_rates(self) -> Dict[str, float]:
        rates = super().characteristic_rates()
        if self.G > 0.0:
            rates["omega_R"] = self.omega_R
        return rates

    def position_variance(self) -> float:
        """Long-time position variance per axis, kT/(6 pi R G)."""
        if self.G == 0.0:
            return math.inf
        return self.ctx.kT / (self.ctx.stokes_factor * self.G)


@dataclass(frozen=True)
class Maxwell(MediumSpec):
    """Spring and dashpot in series: a single relaxation time eta/G."""

    key: ClassVar[str] = "maxwell"

    G: float = 1.0
    eta: float = 1.0

    def __post_init__(self) -> None:
        require_positive("G", self.G)
        require_positive("eta", self.eta)

    @property
    def tau(self) -> float:
        return self.m_R / self.eta

    @property
    def omega_R(self) -> float:
        return math.sqrt(self.G / self.m_R)

    @property
    def relaxation_time(self) -> float:
        return self.eta / self.G

    @property
    def time_scale(self) -> float:
        return self.tau

    def network(self) -> Parallel:
        return maxwell_inerter(self.G, self.eta, self.m_R)

    def groups(self) -> DimensionlessGroups:
        return DimensionlessGroups(tau=self.tau, omegaR_tau=self.omega_R * self.tau)

    def reference_psd(self) -> float:
        return self.ctx.psd_prefactor / self.eta

    def characteristic_rates(self) -> Dict[str, float]:
        rates = super().characteristic_rates()
        rates["omega_R"] = self.omega_R
        rates["G/eta"] = 1.0 / self.relaxation_time
        return rates


@dataclass(frozen=True)
class Jeffreys(Maxwell):
    """Maxwell element in parallel with a solvent dashpot eta_inf."""

    key: ClassVar[str] = "jeffreys"

    eta_inf: float = 0.0

    def __post_init__(self) -> None:
        super().__post_init__()
        require_non_negative("eta_inf", self.eta_inf)

    @property
    def xi(self) -> float:
        return self.eta_inf / self.eta

    def network(self) -> Parallel:
        return jeffreys_inerter(self.G, self.eta, self.eta_inf, self.m_R)

    def groups(self) -> DimensionlessGroups:
        return DimensionlessGroups(
            tau=self.tau, omegaR_tau=self.omega_R * self.tau, xi=self.xi
        )

    def characteristic_rates(self) -> Dict[str, float]:
        rates = super().characteristic_rates()
        if self.eta_inf > 0.0:
            rates["eta_inf/m_R"] = self.eta_inf / self.m_R
        return rates


@dataclass(frozen=True)
class Subdiffusive(MediumSpec):
    """Springpot material, MSD growing as t^alpha."""

    key: ClassVar[str] = "subdiffusive"

    mu_alpha: float = 1.0
    alpha: float = 0.5

    def __post_init__(self) -> None:
        require_positive("mu_alpha", self.mu_alpha)
        require_alpha(self.alpha)

    @property
    def lam(self) -> float:
        return (self.m_R / self.mu_alpha) ** (1.0 / (2.0 - self.alpha))

    @property
    def time_scale(self) -> float:
        return self.lam

    def network(self) -> Parallel:
        return springpot_inerter(self.mu_alpha, self.alpha, self.m_R)

    def groups(self) -> DimensionlessGroups:
        return DimensionlessGroups(lam=self.lam)

    def reference_psd(self) -> float:
        return self.ctx.psd_prefactor * self.lam ** (self.alpha - 1.0) / self.mu_alpha

    def characteristic_rates(self) -> Dict[str, float]:
        return {"1/lambda": 1.0 / self.lam}


@dataclass(frozen=True)
class Hydrodynamic(MediumSpec):
    """
    Viscous fluid with hydrodynamic memory (Basset force and added mass).

    The particle mass follows from ``rho_p``; the inertance includes half the
    displaced fluid mass.
    """

    key: ClassVar[str] = "hydrodynamic"

    eta: float = 1.0
    rho_f: float = 1000.0
    rho_p: float = 1000.0

    def __post_init__(self) -> None:
        require_positive("eta", self.eta)
        require_positive("rho_f", self.rho_f)
        require_positive("rho_p", self.rho_p)
        expected = particle_mass_from_density(self.ctx.R, self.rho_p)
        if not math.isclose(expected, self.ctx.m, rel_tol=1e-9):
            logger.warning(
                "context mass %.6g kg differs from the density mass %.6g kg; using the latter",
                self.ctx.m,
                expected,
            )

    @property
    def particle_mass(self) -> float:
        return particle_mass_from_density(self.ctx.R, self.rho_p)

    @property
    def effective_mass(self) -> float:
        return self.particle_mass + added_mass(self.ctx.R, self.rho_f)

    @property
    def mu_3_2(self) -> float:
        """Inerpot constant R sqrt(rho_f eta)."""
        return self.ctx.R * math.sqrt(self.rho_f * self.eta)

    @property
    def tau(self) -> float:
        return self.m_R / self.eta

    @property
    def lam(self) -> float:
        return (self.m_R / self.mu_3_2) ** 2

    @property
    def gamma_ratio(self) -> float:
        return self.eta * self.m_R / self.mu_3_2**2

    @property
    def vorticity_time(self) -> float:
        """R^2 rho_f/eta, the time vorticity needs to diffuse over one radius."""
        return self.ctx.R**2 * self.rho_f / self.eta

    @property
    def time_scale(self) -> float:
        return self.lam

    def network(self) -> Parallel:
        return hydrodynamic_network(self.eta, self.mu_3_2, self.m_R)

    def groups(self) -> DimensionlessGroups:
        return DimensionlessGroups(tau=self.tau, lam=self.lam, gamma_ratio=self.gamma_ratio)

    def reference_psd(self) -> float:
        return self.ctx.psd_prefactor * self.m_R / self.mu_3_2**2

    def characteristic_rates(self) -> Dict[str, float]:
        return {"1/tau": 1.0 / self.tau, "1/lambda": 1.0 / self.lam}


MEDIA: Dict[str, Type[MediumSpec]] = {
    cls.key: cls for cls in (Viscous, HarmonicTrap, Maxwell, Jeffreys, Subdiffusive, Hydrodynamic)
}


def medium_keys() -> List[str]:
    """Registered medium keys."""
    return list(MEDIA)


def damping_regime(trap: HarmonicTrap) -> DampingRegime:
    """
    Classify a harmonic trap by omega_0 tau against 1/2.

    Args:
        trap: Harmonic trap medium

    Returns:
        Underdamped above 1/2, overdamped below, critical at 1/2
    """
    product = trap.omega_R * trap.tau
    if math.isclose(product, 0.5, rel_tol=1e-9):
        return DampingRegime.CRITICAL
    return DampingRegime.UNDERDAMPED if product > 0.5 else DampingRegime.OVERDAMPED


def canonical_medium(
    key: str,
    omegaR_tau: float = 1.0,
    xi: float = 0.0,
    alpha: float = 0.5,
    gamma: float = 0.46,
) -> MediumSpec:
    """
    Medium in the canonical context whose time scale (tau or lambda) is one.

    Spectra of the returned medium, divided by its reference PSD, are the
    normalized curves of the given dimensionless groups.

    Args:
        key: Medium key
        omegaR_tau: Dimensionless stiffness (trap, Maxwell, Jeffreys)
        xi: Viscosity ratio eta_inf/eta (Jeffreys)
        alpha: Springpot order (subdiffusive)
        gamma: Density group eta m_R/mu_3/2^2 (hydrodynamic), above 1/9

    Returns:
        The medium

    Raises:
        ParameterError: If the key is unknown or a group is out of range
    """
    ctx = CANONICAL_CONTEXT
    if key == Viscous.key:
        return Viscous(ctx, eta=1.0)
    if key == HarmonicTrap.key:
        return HarmonicTrap(ctx, G=require_non_negative("omegaRtau", omegaR_tau) ** 2, eta=1.0)
    if key == Maxwell.key:
        return Maxwell(ctx, G=require_positive("omegaRtau", omegaR_tau) ** 2, eta=1.0)
    if key == Jeffreys.key:
        G = require_positive("omegaRtau", omegaR_tau) ** 2
        return Jeffreys(ctx, G=G, eta=1.0, eta_inf=require_non_negative("xi", xi))
    if key == Subdiffusive.key:
        return Subdiffusive(ctx, mu_alpha=1.0, alpha=alpha)
    if key == Hydrodynamic.key:
        require_positive("gamma", gamma)
        if gamma <= 1.0 / 9.0:
            raise ParameterError(f"gamma = (1 + 2 rho_p/rho_f)/9 must exceed 1/9, got {gamma}")
        # with 6 pi R = 1 the conditions lambda = 1, M = 1 fix rho_f and eta
        rho_f = 1.0 / (ctx.R**2 * gamma)
        rho_p = 0.5 * (9.0 * gamma - 1.0) * rho_f
        hydro_ctx = PhysicalContext.from_density(ctx.kT, ctx.N, ctx.R, rho_p, rho_f)
        return Hydrodynamic(hydro_ctx, eta=gamma, rho_f=rho_f, rho_p=rho_p)
    raise ParameterError(f"unknown medium '{key}'; expected one of {', '.join(MEDIA)}")
