"""
Special functions and fractional-calculus numerics.

Everything here is a pure function of its inputs. The Grunwald-Letnikov
operators treat the first sample of a curve as the lower terminal, i.e. the
sampled function is taken to vanish before it.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np
from scipy import signal, special

from rheobrown.core.curves import CurveKind, TimeCurve
from rheobrown.core.exceptions import GridError, ParameterError
from rheobrown.utils.validators import is_uniform_grid

logger = logging.getLogger(__name__)

ArrayLike = Union[float, complex, np.ndarray]

# Direct convolution below this length keeps the GL sum exactly causal.
_DIRECT_CONVOLUTION_MAX = 4096


class FracKind(str, Enum):
    INTEGRAL = "integral"
    DERIVATIVE = "derivative"


@dataclass(frozen=True)
class FracOrder:
    """
    Order of a Riemann-Liouville operator.

    Attributes:
        alpha: Real order
        kind: Integral (alpha > 0) or derivative (0 < alpha < 2)
    """

    alpha: float
    kind: FracKind = FracKind.DERIVATIVE

    def __post_init__(self) -> None:
        if self.kind is FracKind.INTEGRAL and not self.alpha > 0.0:
            raise ParameterError(f"fractional integral needs alpha > 0, got {self.alpha}")
        if self.kind is FracKind.DERIVATIVE and not 0.0 < self.alpha < 2.0:
            raise ParameterError(f"fractional derivative needs 0 < alpha < 2, got {self.alpha}")

    @property
    def signed(self) -> float:
        """Order as used by the GL sum: negative for integrals."""
        return -self.alpha if self.kind is FracKind.INTEGRAL else self.alpha


def gamma_fn(x: ArrayLike) -> ArrayLike:
    """
    Gamma function of a real argument.

    Args:
        x: Real argument(s), not a non-positive integer

    Returns:
        Gamma(x)

    Raises:
        ParameterError: If any argument sits on a pole
    """
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    poles = (arr <= 0.0) & (arr == np.round(arr))
    if np.any(poles):
        raise ParameterError(f"Gamma has a pole at non-positive integer {arr[poles][0]:g}")
    result = special.gamma(arr)
    return float(result[0]) if np.ndim(x) == 0 else result.reshape(np.shape(x))


def erfcx_complex(w: ArrayLike) -> ArrayLike:
    """
    Scaled complementary error function exp(w^2) erfc(w) for complex w.

    The right half-plane is evaluated through the Faddeeva function,
    erfcx(w) = wofz(i w), which never forms exp(w^2). The left half-plane
    uses the reflection erfcx(w) = 2 exp(w^2) - erfcx(-w).

    Args:
        w: Complex argument(s)

    Returns:
        erfcx(w), complex
    """
    arr = np.atleast_1d(np.asarray(w, dtype=complex))
    right = arr.real >= 0.0
    result = np.empty_like(arr)
    result[right] = special.wofz(1j * arr[right])
    left = ~right
    if np.any(left):
        wl = arr[left]
        result[left] = 2.0 * np.exp(wl * wl) - special.wofz(-1j * wl)
    return complex(result[0]) if np.ndim(w) == 0 else result.reshape(np.shape(w))


def frac_power_iomega(omega: ArrayLike, alpha: float) -> ArrayLike:
    """
    Principal-branch power (i omega)^alpha.

    For omega >= 0 this is omega^alpha (cos(alpha pi/2) + i sin(alpha pi/2));
    negative frequencies follow from conjugate symmetry.

    Args:
        omega: Angular frequency (rad/s)
        alpha: Real exponent

    Returns:
        Complex value(s) of (i omega)^alpha
    """
    om = np.asarray(omega, dtype=float)
    # exact at integer orders so springpots collapse onto springs, dashpots and inerters
    exact_phases = {0.0: 1.0 + 0.0j, 1.0: 1.0j, 2.0: -1.0 + 0.0j}
    phase = exact_phases.get(
        float(alpha), np.cos(alpha * np.pi / 2.0) + 1j * np.sin(alpha * np.pi / 2.0)
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        magnitude = np.power(np.abs(om), alpha)
    value = magnitude * phase
    value = np.where(om < 0.0, np.conj(value), value)
    return complex(value) if np.ndim(omega) == 0 else value


def gl_weights(alpha: float, n: int) -> np.ndarray:
    """
    Grunwald-Letnikov binomial weights (-1)^k C(alpha, k).

    Uses w_0 = 1, w_k = w_{k-1} (1 - (alpha + 1)/k).

    Args:
        alpha: Order (negative for fractional integrals)
        n: Number of weights

    Returns:
        Array of n weights
    """
    if n <= 0:
        return np.zeros(0)
    k = np.arange(1, n, dtype=float)
    factors = 1.0 - (alpha + 1.0) / k
    return np.concatenate(([1.0], np.cumprod(factors)))


def _gl_apply(samples: TimeCurve, order: float, h: float) -> np.ndarray:
    t = np.asarray(samples.t, dtype=float)
    if t.size > 1 and not is_uniform_grid(t):
        raise GridError("Grunwald-Letnikov sums need a uniform time grid")
    if t.size > 1 and not np.isclose(t[1] - t[0], h, rtol=1e-9, atol=0.0):
        raise GridError(f"step h={h:g} does not match the grid spacing {t[1] - t[0]:g}")
    values = np.asarray(samples.values, dtype=float)
    n = values.size
    weights = gl_weights(order, n)
    if n <= _DIRECT_CONVOLUTION_MAX:
        conv = np.convolve(weights, values)[:n]
    else:
        conv = signal.fftconvolve(weights, values)[:n]
    return conv * h ** (-order)


def gl_fractional_derivative(samples: TimeCurve, alpha: float, h: float) -> TimeCurve:
    """
    Grunwald-Letnikov approximation of the Riemann-Liouville derivative.

    Output k is h^-alpha * sum_{j<=k} w_j f_{k-j}; first order in h.

    Args:
        samples: Causal samples on a uniform grid
        alpha: Order, 0 < alpha < 2
        h: Grid step

    Returns:
        TimeCurve with the derivative on the same grid

    Raises:
        GridError: If the grid is not uniform or h disagrees with it
    """
    order = FracOrder(alpha, FracKind.DERIVATIVE)
    values = _gl_apply(samples, order.signed, h)
    return TimeCurve(samples.t, values, CurveKind.DERIVATIVE, metadata={"alpha": alpha})


def gl_fractional_integral(samples: TimeCurve, alpha: float, h: float) -> TimeCurve:
    """
    Grunwald-Letnikov approximation of the Riemann-Liouville integral I^alpha.

    Args:
        samples: Causal samples on a uniform grid
        alpha: Order, alpha > 0
        h: Grid step

    Returns:
        TimeCurve with the fractional integral on the same grid
    """
    order = FracOrder(alpha, FracKind.INTEGRAL)
    values = _gl_apply(samples, order.signed, h)
    return TimeCurve(samples.t, values, CurveKind.DERIVATIVE, metadata={"alpha": -alpha})


def fractional_monomial(p: float, alpha: float, t: ArrayLike) -> ArrayLike:
    """
    Exact Riemann-Liouville derivative of t^p: Gamma(p+1)/Gamma(p+1-alpha) t^(p-alpha).

    Args:
        p: Monomial power (p > -1)
        alpha: Derivative order (negative for integrals)
        t: Time(s)

    Returns:
        Derivative values
    """
    coeff = special.gamma(p + 1.0) / special.gamma(p + 1.0 - alpha)
    return coeff * np.power(t, p - alpha)


def ornstein_shape(x: ArrayLike) -> ArrayLike:
    """
    x - (1 - exp(-x)), the dimensionless Ornstein displacement shape.

    Evaluated through ``expm1`` with a Taylor series below x = 0.1, so that
    the ballistic regime x^2/2 keeps full relative precision.

    Args:
        x: Dimensionless time t/tau, x >= 0

    Returns:
        Shape values
    """
    xx = np.asarray(x, dtype=float)
    small = np.abs(xx) < 0.1
    xs = np.where(small, xx, 0.0)
    # x^2/2 - x^3/6 + x^4/24 - ...
    series = np.zeros_like(xs)
    term = xs.copy()
    for k in range(2, 14):
        term = term * (-xs) / k
        series = series - term
    direct = xx + np.expm1(-xx)
    result = np.where(small, series, direct)
    return float(result) if np.ndim(x) == 0 else result
