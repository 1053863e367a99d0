"""
Trajectory ensembles from the (generalized) Langevin equation.

Per axis the particle obeys

    M dv/dt = -int_0^t K(t - s) v(s) ds + f(t),   <f(t) f(s)> = kT K(|t - s|)

with K the friction kernel of the medium (6 pi R times its relaxation
modulus). The schemes:

* ``EXACT_OU``: viscous fluid, exact Ornstein-Uhlenbeck velocity update,
  trapezoidal positions.
* ``EXACT_GAUSSIAN``: any medium whose kernel is a sum of a delta and
  exponentials plus a harmonic force (trap, Maxwell, Jeffreys). The state
  (x, v[, u]) is a linear SDE, stepped with its exact Gaussian propagator.
  For Maxwell and Jeffreys media ``u`` is the auxiliary stress variable that
  carries the exponential kernel (Markov embedding).
* ``SEMI_IMPLICIT_EULER``: harmonic trap cross-check.
* ``SPECTRAL_GL``: springpot and hydrodynamic media. The memory force is a
  Grunwald-Letnikov sum over the full history (or a fixed lag); the random
  force is stationary Gaussian noise with spectrum 2 kT Re Z(w), Z the
  medium's friction in the frequency domain.

Each trajectory draws from its own counter-based stream seeded by
(seed, trajectory index). Trajectories are grouped in fixed-size blocks, so
results do not depend on the number of worker threads.
"""

import concurrent.futures
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy import fft, linalg, signal

from rheobrown.core.curves import TimeCurve
from rheobrown.core.exceptions import (
    ConfigError,
    DivergenceError,
    IndefiniteCovarianceError,
    ParameterError,
)
from rheobrown.core.media import (
    HarmonicTrap,
    Hydrodynamic,
    Jeffreys,
    Maxwell,
    MediumSpec,
    Subdiffusive,
    Viscous,
)
from rheobrown.core.rheology import Inerter, Parallel, dynamic_modulus, zero_shear_viscosity
from rheobrown.core.specfun import gl_weights
from rheobrown.utils.config import load_thresholds

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.Generator]


class Scheme(str, Enum):
    EXACT_OU = "exact_ou"
    EXACT_GAUSSIAN = "exact_gaussian"
    SEMI_IMPLICIT_EULER = "semi_implicit_euler"
    SPECTRAL_GL = "spectral_gl"


# medium key -> schemes it supports, default first
COMPATIBLE_SCHEMES: Dict[str, Tuple[Scheme, ...]] = {
    Viscous.key: (Scheme.EXACT_OU, Scheme.EXACT_GAUSSIAN),
    HarmonicTrap.key: (Scheme.EXACT_GAUSSIAN, Scheme.SEMI_IMPLICIT_EULER),
    Maxwell.key: (Scheme.EXACT_GAUSSIAN,),
    Jeffreys.key: (Scheme.EXACT_GAUSSIAN,),
    Subdiffusive.key: (Scheme.SPECTRAL_GL,),
    Hydrodynamic.key: (Scheme.SPECTRAL_GL,),
}


@dataclass
class SimConfig:
    """
    Simulation request.

    Attributes:
        medium: Medium and particle
        dt: Time step (s)
        n_steps: Recorded samples per trajectory
        n_traj: Number of trajectories
        seed: Root seed; with the trajectory index it fixes every stream
        scheme: Integration scheme, None for the medium's default
        burn_in: Steps discarded before recording, None for the default
        threads: Worker threads (results do not depend on it)
        fixed_lag: Truncate fractional memory to this many steps, None for full history
        override_stability: Run even when the stability report fails
    """

    medium: MediumSpec
    dt: float
    n_steps: int
    n_traj: int = 1
    seed: int = 0
    scheme: Optional[Scheme] = None
    burn_in: Optional[int] = None
    threads: int = 1
    fixed_lag: Optional[int] = None
    override_stability: bool = False

    def __post_init__(self) -> None:
        if not self.dt > 0.0 or not math.isfinite(self.dt):
            raise ConfigError(f"dt must be positive and finite, got {self.dt}")
        if self.n_steps < 2:
            raise ConfigError(f"n_steps must be at least 2, got {self.n_steps}")
        if self.n_traj < 1:
            raise ConfigError(f"n_traj must be at least 1, got {self.n_traj}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.threads < 1:
            raise ConfigError(f"threads must be at least 1, got {self.threads}")
        if self.burn_in is not None and self.burn_in < 0:
            raise ConfigError(f"burn_in must be non-negative, got {self.burn_in}")
        if self.fixed_lag is not None and self.fixed_lag < 1:
            raise ConfigError(f"fixed_lag must be at least 1, got {self.fixed_lag}")
        supported = COMPATIBLE_SCHEMES[self.medium.key]
        if self.scheme is None:
            self.scheme = supported[0]
        self.scheme = Scheme(self.scheme)
        if self.scheme not in supported:
            raise ConfigError(
                f"scheme '{self.scheme.value}' cannot integrate a {self.medium.key} medium; "
                f"use one of {', '.join(s.value for s in supported)}"
            )
        if self.burn_in is None:
            self.burn_in = default_burn_in(self.medium, self.dt)

    def echo(self) -> Dict[str, Any]:
        return {
            "medium": self.medium.key,
            "parameters": self.medium.parameters(),
            "dt": self.dt,
            "n_steps": self.n_steps,
            "n_traj": self.n_traj,
            "seed": self.seed,
            "scheme": self.scheme.value,
            "burn_in": self.burn_in,
            "fixed_lag": self.fixed_lag,
        }


@dataclass
class Ensemble:
    """
    Simulated trajectories sharing one step size.

    Attributes:
        dt: Sampling step (s)
        positions: Array (n_traj, n_steps, N) in m
        velocities: Array (n_traj, n_steps, N) in m/s
        medium: Medium echo
        seed: Root seed echo
        scheme: Scheme used
        metadata: Burn-in and other provenance
    """

    dt: float
    positions: np.ndarray
    velocities: np.ndarray
    medium: MediumSpec
    seed: int
    scheme: Scheme = Scheme.EXACT_OU
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.positions.shape != self.velocities.shape or self.positions.ndim != 3:
            raise ValueError("positions and velocities must share shape (n_traj, n_steps, N)")

    @property
    def n_traj(self) -> int:
        return int(self.positions.shape[0])

    @property
    def n_steps(self) -> int:
        return int(self.positions.shape[1])

    @property
    def n_dims(self) -> int:
        return int(self.positions.shape[2])

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.n_steps) * self.dt


@dataclass
class StabilityReport:
    """Dimensionless step-size products and the verdict against policy thresholds."""

    products: Dict[str, float]
    verdict: str
    warn: float
    fail: float

    @property
    def worst(self) -> Tuple[str, float]:
        name = max(self.products, key=self.products.get)
        return name, self.products[name]


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


def _step_products(medium: MediumSpec, dt: float) -> Dict[str, float]:
    products: Dict[str, float] = {}
    if isinstance(medium, (Viscous, HarmonicTrap, Maxwell, Hydrodynamic)):
        products["dt/tau"] = dt / medium.tau
    if isinstance(medium, (HarmonicTrap, Maxwell)) and medium.G > 0.0:
        products["omega_R*dt"] = medium.omega_R * dt
    if isinstance(medium, Maxwell):
        products["dt*G/eta"] = dt / medium.relaxation_time
    if isinstance(medium, Jeffreys) and medium.eta_inf > 0.0:
        products["dt*eta_inf/m_R"] = dt * medium.eta_inf / medium.m_R
    if isinstance(medium, (Subdiffusive, Hydrodynamic)):
        products["dt/lambda"] = dt / medium.lam
    if isinstance(medium, Hydrodynamic):
        # weight of the implicit Basset term against M/dt in one step
        products["(dt/lambda)^1/2"] = math.sqrt(dt / medium.lam)
    return products


def stability_report(cfg: SimConfig) -> StabilityReport:
    """
    Compare dt with every rate of the medium.

    Products below the warn threshold pass, products at or above the fail
    threshold fail, anything in between warns.

    Args:
        cfg: Simulation request

    Returns:
        StabilityReport
    """
    thresholds = load_thresholds()["stability"]
    warn, fail = float(thresholds["warn"]), float(thresholds["fail"])
    products = _step_products(cfg.medium, cfg.dt)
    worst = max(products.values())
    if worst >= fail:
        verdict = "fail"
    elif worst >= warn:
        verdict = "warn"
    else:
        verdict = "pass"
    return StabilityReport(products, verdict, warn, fail)


def default_burn_in(medium: MediumSpec, dt: float) -> int:
    """Ten of the medium's slowest relaxation times, in steps."""
    scales: List[float] = []
    if isinstance(medium, (Viscous, HarmonicTrap, Maxwell, Hydrodynamic)):
        scales.append(2.0 * medium.tau)
    if isinstance(medium, HarmonicTrap) and medium.G > 0.0:
        scales.append(medium.eta / medium.G)
        scales.append(1.0 / medium.omega_R)
    if isinstance(medium, Maxwell):
        scales.append(medium.relaxation_time)
        scales.append(1.0 / medium.omega_R)
    if isinstance(medium, (Subdiffusive, Hydrodynamic)):
        scales.append(medium.lam)
    factor = float(load_thresholds()["simulation"]["burn_in_time_scales"])
    return int(math.ceil(factor * max(scales) / dt))


def default_dt(medium: MediumSpec) -> float:
    """
    Step used when a request names none.

    A hundredth of the medium's time scale, shrunk until every step product
    is below half the warn threshold.
    """
    target = 0.5 * float(load_thresholds()["stability"]["warn"])
    dt = 0.01 * medium.time_scale
    products = _step_products(medium, dt)
    while max(products.values()) >= target:
        dt *= 0.5
        products = _step_products(medium, dt)
    return dt


# ---------------------------------------------------------------------------
# Noise
# ---------------------------------------------------------------------------


def trajectory_generator(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream of one trajectory."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def _as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return trajectory_generator(int(seed), 0)


def _circulant_sample(eigenvalues: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    size = eigenvalues.size
    a = rng.standard_normal(size)
    b = rng.standard_normal(size)
    spectrum = np.sqrt(eigenvalues / size) * (a + 1j * b)
    return np.real(fft.fft(spectrum))[:n]


def synthesize_colored_noise(cov: TimeCurve, n: int, seed: SeedLike) -> np.ndarray:
    """
    Stationary Gaussian series with a prescribed autocovariance.

    The covariance is embedded in a circulant of length 2n - 2 whose
    eigenvalues must be non-negative; small negative ones (above
    -1e-10 times the largest) are clipped. Lags beyond the given curve are
    taken as zero. A white force of strength q (covariance q delta(t)) on a
    grid of step dt is represented by cov[0] = q/dt, cov[k>0] = 0.

    Args:
        cov: Autocovariance at lags 0, dt, 2 dt, ...
        n: Number of samples, n >= 2
        seed: Root seed or a Generator

    Returns:
        Array of n samples

    Raises:
        IndefiniteCovarianceError: If the embedding is not positive semidefinite
    """
    if n < 2:
        raise ParameterError(f"need at least two samples, got {n}")
    values = np.zeros(n)
    given = np.asarray(cov.values, dtype=float)[:n]
    values[: given.size] = given
    row = np.concatenate((values, values[-2:0:-1]))
    eigenvalues = np.real(fft.fft(row))
    top = float(np.max(np.abs(eigenvalues)))
    lowest = float(np.min(eigenvalues))
    if lowest < -1e-10 * top:
        raise IndefiniteCovarianceError(
            f"covariance is not positive semidefinite: circulant eigenvalue {lowest:.3g} "
            f"against a largest {top:.3g}"
        )
    if lowest < 0.0:
        logger.warning("clipping circulant eigenvalues down to %.3g", lowest)
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    return _circulant_sample(eigenvalues, n, _as_generator(seed))


def friction_spectrum(medium: MediumSpec, omega: np.ndarray) -> np.ndarray:
    """
    Two-sided random-force spectrum 2 kT Re Z(w) for one axis.

    Z(w) = 6 pi R G_medium(w)/(i w) is the Fourier transform of the friction
    kernel, G_medium the analogue network without the particle's inerter.
    Infinite where the medium has no zero-frequency friction limit.
    """
    net = medium.network()
    children = tuple(child for child in net.children if not isinstance(child, Inerter))
    material = Parallel(children, label=net.label)
    om = np.abs(np.asarray(omega, dtype=float))
    out = np.empty(om.shape)
    positive = om > 0.0
    g = np.asarray(dynamic_modulus(material, om[positive]))
    out[positive] = 2.0 * medium.ctx.kT * medium.ctx.stokes_factor * np.real(g / (1j * om[positive]))
    if np.any(~positive):
        out[~positive] = 2.0 * medium.ctx.kT * medium.ctx.stokes_factor * zero_shear_viscosity(material)
    return out


def _spectral_force(
    medium: MediumSpec, n: int, dt: float, n_dims: int, rng: np.random.Generator
) -> np.ndarray:
    size = fft.next_fast_len(2 * n)
    omega = 2.0 * math.pi * fft.fftfreq(size, d=dt)
    spectrum = friction_spectrum(medium, omega)
    # a non-integrable DC spectrum is dropped; the force then has zero mean
    spectrum[~np.isfinite(spectrum)] = 0.0
    eigenvalues = spectrum / dt
    return np.stack(
        [_circulant_sample(eigenvalues, n, rng) for _ in range(n_dims)], axis=1
    )


# ---------------------------------------------------------------------------
# Schemes
# ---------------------------------------------------------------------------


@dataclass
class _Block:
    start: int
    stop: int


def _check_finite(values: np.ndarray, scale: float, step0: int, label: str) -> None:
    limit = float(load_thresholds()["simulation"]["divergence_factor"]) * scale
    bad = ~np.isfinite(values) | (np.abs(values) > limit)
    if np.any(bad):
        steps = np.nonzero(bad.reshape(bad.shape[0], -1).any(axis=1))[0]
        step = int(step0 + steps[0])
        raise DivergenceError(f"{label} exceeded {limit:.3g} at step {step}", step)


def _thermal_velocity(medium: MediumSpec) -> float:
    return math.sqrt(medium.ctx.kT / medium.effective_mass)


def _initial_velocity(medium: MediumSpec, rng: np.random.Generator) -> np.ndarray:
    return _thermal_velocity(medium) * rng.standard_normal(medium.ctx.N)


def _simulate_exact_ou(cfg: SimConfig, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    medium = cfg.medium
    N = medium.ctx.N
    total = cfg.burn_in + cfg.n_steps
    decay = math.exp(-cfg.dt / medium.tau)
    kick = _thermal_velocity(medium) * math.sqrt(-math.expm1(-2.0 * cfg.dt / medium.tau))
    v0 = _initial_velocity(medium, rng)
    noise = kick * rng.standard_normal((total - 1, N))
    v = np.empty((total, N))
    v[0] = v0
    v[1:], _ = signal.lfilter([1.0], [1.0, -decay], noise, axis=0, zi=(decay * v0)[None, :])
    x = np.zeros((total, N))
    x[1:] = np.cumsum(0.5 * cfg.dt * (v[1:] + v[:-1]), axis=0)
    return x[cfg.burn_in :], v[cfg.burn_in :]


def _linear_system(medium: MediumSpec) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Drift A, diffusion D and stationary initial variances of (x, v[, u])."""
    kT, S, M = medium.ctx.kT, medium.ctx.stokes_factor, medium.effective_mass
    if isinstance(medium, Maxwell):
        k = S * medium.G
        theta = medium.relaxation_time
        zeta_inf = S * medium.eta_inf if isinstance(medium, Jeffreys) else 0.0
        A = np.array(
            [[0.0, 1.0, 0.0], [0.0, -zeta_inf / M, 1.0 / M], [0.0, -k, -1.0 / theta]]
        )
        D = np.diag([0.0, 2.0 * kT * zeta_inf / M**2, 2.0 * kT * k / theta])
        var0 = np.array([0.0, kT / M, kT * k])
        return A, D, var0
    zeta = S * medium.eta
    k = S * medium.G if isinstance(medium, HarmonicTrap) else 0.0
    A = np.array([[0.0, 1.0], [-k / M, -zeta / M]])
    D = np.diag([0.0, 2.0 * kT * zeta / M**2])
    var0 = np.array([0.0, kT / M])
    return A, D, var0


def gaussian_propagator(A: np.ndarray, D: np.ndarray, dt: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exact one-step transition of dX = A X dt + sqrt(D) dW.

    Returns the mean map F = exp(A dt) and a square root L of the step
    covariance Q = int_0^dt exp(As) D exp(A's) ds (Van Loan's block
    exponential), so that X' = F X + L xi.
    """
    d = A.shape[0]
    block = np.zeros((2 * d, 2 * d))
    block[:d, :d] = -A
    block[:d, d:] = D
    block[d:, d:] = A.T
    E = linalg.expm(block * dt)
    F = E[d:, d:].T
    Q = F @ E[:d, d:]
    Q = 0.5 * (Q + Q.T)
    eigval, eigvec = linalg.eigh(Q)
    L = eigvec * np.sqrt(np.clip(eigval, 0.0, None))
    return F, L


def _apply(matrix: np.ndarray, state: np.ndarray) -> np.ndarray:
    # elementwise products keep every trajectory independent of the batch shape
    out = np.zeros_like(state)
    for k in range(matrix.shape[1]):
        out += state[..., k : k + 1] * matrix[:, k]
    return out


def _simulate_linear(
    cfg: SimConfig, rngs: List[np.random.Generator]
) -> Tuple[np.ndarray, np.ndarray]:
    medium = cfg.medium
    N = medium.ctx.N
    B = len(rngs)
    total = cfg.burn_in + cfg.n_steps
    A, D, var0 = _linear_system(medium)
    d = A.shape[0]
    state = np.zeros((B, N, d))
    for j, rng in enumerate(rngs):
        state[j, :, 1:] = np.sqrt(var0[1:]) * rng.standard_normal((N, d - 1))
    semi_implicit = cfg.scheme is Scheme.SEMI_IMPLICIT_EULER
    if not semi_implicit:
        F, L = gaussian_propagator(A, D, cfg.dt)
    x = np.empty((B, cfg.n_steps, N))
    v = np.empty((B, cfg.n_steps, N))
    interval = int(load_thresholds()["simulation"]["check_interval"])
    scales = np.sqrt(var0[1:])
    step = 0
    while step < total:
        chunk = min(interval, total - step)
        noise = np.stack([rng.standard_normal((chunk, N, d)) for rng in rngs], axis=0)
        with np.errstate(over="ignore", invalid="ignore"):
            for i in range(chunk):
                if step >= cfg.burn_in:
                    x[:, step - cfg.burn_in] = state[..., 0]
                    v[:, step - cfg.burn_in] = state[..., 1]
                if semi_implicit:
                    state = _semi_implicit_step(medium, state, noise[:, i], cfg.dt)
                else:
                    state = _apply(F, state) + _apply(L, noise[:, i])
                step += 1
        _check_finite((state[..., 1:] / scales).reshape(1, -1), 1.0, step, "state")
    return x, v


def _semi_implicit_step(
    medium: HarmonicTrap, state: np.ndarray, xi: np.ndarray, dt: float
) -> np.ndarray:
    S, M, kT = medium.ctx.stokes_factor, medium.effective_mass, medium.ctx.kT
    zeta, k = S * medium.eta, S * medium.G
    x, v = state[..., 0], state[..., 1]
    kick = math.sqrt(2.0 * kT * zeta * dt) / M
    v_new = (v - dt * k / M * x + kick * xi[..., 1]) / (1.0 + dt * zeta / M)
    out = np.empty_like(state)
    out[..., 1] = v_new
    out[..., 0] = x + dt * v_new
    return out


def _simulate_fractional(
    cfg: SimConfig, rngs: List[np.random.Generator]
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Implicit-in-the-current-step GL scheme.

    Subdiffusive: memory force c D^alpha x with c = 6 pi R mu_alpha, GL on
    positions. Hydrodynamic: zeta v + z D^1/2 v, GL on velocities.
    """
    medium = cfg.medium
    N = medium.ctx.N
    B = len(rngs)
    dt = cfg.dt
    total = cfg.burn_in + cfg.n_steps
    M = medium.effective_mass
    S = medium.ctx.stokes_factor
    if isinstance(medium, Subdiffusive):
        order, coeff, zeta, on_position = medium.alpha, S * medium.mu_alpha, 0.0, True
    else:
        order, coeff, zeta, on_position = 0.5, S * medium.mu_3_2, S * medium.eta, False
    lag = cfg.fixed_lag or total
    weights = gl_weights(order, min(lag, total) + 1)
    wrev = weights[::-1]
    scale = coeff * dt ** (-order)

    v0 = np.stack([_initial_velocity(medium, rng) for rng in rngs], axis=0)
    force = np.stack([_spectral_force(medium, total, dt, N, rng) for rng in rngs], axis=0)
    history = np.zeros((total, B * N))
    x = np.zeros((total, B * N))
    v = np.zeros((total, B * N))
    v[0] = v0.reshape(-1)
    history[0] = x[0] if on_position else v[0]
    f = force.transpose(1, 0, 2).reshape(total, B * N)
    # the current sample enters with weight w_0 = 1 and is solved for implicitly
    implicit = M / dt + zeta + (scale * dt if on_position else scale)
    interval = int(load_thresholds()["simulation"]["check_interval"])
    vscale = _thermal_velocity(medium)
    for n in range(total - 1):
        first = max(0, n + 1 - lag)
        count = n + 1 - first
        memory = wrev[wrev.size - 1 - count : wrev.size - 1] @ history[first : n + 1]
        if on_position:
            rhs = M / dt * v[n] - scale * (x[n] + memory) + f[n]
        else:
            rhs = M / dt * v[n] - scale * memory + f[n]
        v[n + 1] = rhs / implicit
        x[n + 1] = x[n] + dt * v[n + 1]
        history[n + 1] = x[n + 1] if on_position else v[n + 1]
        if (n + 1) % interval == 0:
            _check_finite(v[n + 1 - interval + 1 : n + 2], vscale, n + 2 - interval, "velocity")
    _check_finite(v, vscale, 0, "velocity")
    shape = (total, B, N)
    x = x.reshape(shape).transpose(1, 0, 2)[:, cfg.burn_in :]
    v = v.reshape(shape).transpose(1, 0, 2)[:, cfg.burn_in :]
    return np.ascontiguousarray(x), np.ascontiguousarray(v)


def _simulate_block(cfg: SimConfig, block: _Block) -> Tuple[np.ndarray, np.ndarray]:
    rngs = [trajectory_generator(cfg.seed, j) for j in range(block.start, block.stop)]
    if cfg.scheme is Scheme.EXACT_OU:
        pairs = [_simulate_exact_ou(cfg, rng) for rng in rngs]
        for _, vj in pairs:
            _check_finite(vj, _thermal_velocity(cfg.medium), cfg.burn_in, "velocity")
        return np.stack([p[0] for p in pairs]), np.stack([p[1] for p in pairs])
    if cfg.scheme is Scheme.SPECTRAL_GL:
        return _simulate_fractional(cfg, rngs)
    return _simulate_linear(cfg, rngs)


def simulate(cfg: SimConfig) -> Ensemble:
    """
    Integrate an ensemble of trajectories.

    Args:
        cfg: Simulation request

    Returns:
        Ensemble of n_traj trajectories with n_steps samples each

    Raises:
        ConfigError: If the step warns or fails the stability check without override
        DivergenceError: If the state leaves 1e9 thermal scales
    """
    report = stability_report(cfg)
    name, product = report.worst
    if report.verdict != "pass" and not cfg.override_stability:
        raise ConfigError(
            f"time step too large: {name} = {product:.3g} >= {report.warn} "
            "(set override_stability to run anyway)"
        )
    if report.verdict != "pass":
        logger.warning("stability %s: %s = %.3g", report.verdict, name, product)

    block_size = int(load_thresholds()["simulation"]["trajectory_block"])
    blocks = [
        _Block(start, min(start + block_size, cfg.n_traj))
        for start in range(0, cfg.n_traj, block_size)
    ]
    logger.debug(
        "simulating %d trajectories in %d blocks on %d threads (%s)",
        cfg.n_traj, len(blocks), cfg.threads, cfg.scheme.value,
    )
    results: List[Optional[Tuple[np.ndarray, np.ndarray]]] = [None] * len(blocks)
    with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.threads) as executor:
        futures = {
            executor.submit(_simulate_block, cfg, block): index
            for index, block in enumerate(blocks)
        }
        for future in concurrent.futures.as_completed(futures):
            results[futures[future]] = future.result()

    positions = np.concatenate([r[0] for r in results], axis=0)
    velocities = np.concatenate([r[1] for r in results], axis=0)
    return Ensemble(
        dt=cfg.dt,
        positions=positions,
        velocities=velocities,
        medium=cfg.medium,
        seed=cfg.seed,
        scheme=cfg.scheme,
        metadata={"burn_in": cfg.burn_in, "fixed_lag": cfg.fixed_lag, "stability": report.verdict},
    )
