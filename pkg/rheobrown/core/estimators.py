"""
Estimators closing the loop between simulated ensembles and closed forms.

Spectra are computed one-sided by ``scipy.signal.welch`` and converted to the
two-sided angular convention of ``curves.CONVENTION_NOTE`` in exactly one
place, ``_to_two_sided``. Standard errors are taken across trajectories,
which are independent by construction.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import fft, signal

from rheobrown.core.curves import CurveKind, Normalization, SpectrumCurve, TimeCurve
from rheobrown.core.exceptions import ConfigError, ParameterError
from rheobrown.core.simkit import Ensemble
from rheobrown.utils.validators import is_valid_overlap, require_uniform

logger = logging.getLogger(__name__)


class Window(str, Enum):
    RECTANGULAR = "rectangular"
    HANN = "hann"


class Detrend(str, Enum):
    NONE = "none"
    MEAN = "mean"


_SCIPY_WINDOW = {Window.RECTANGULAR: "boxcar", Window.HANN: "hann"}
_SCIPY_DETREND = {Detrend.NONE: False, Detrend.MEAN: "constant"}


@dataclass
class WelchConfig:
    """
    Segmenting of the averaged periodogram.

    Attributes:
        segment_length: Samples per segment
        overlap: Fraction of a segment shared with the next, in [0, 0.9]
        window: Taper applied to each segment
        detrend: Per-segment detrending
    """

    segment_length: int
    overlap: float = 0.5
    window: Window = Window.HANN
    detrend: Detrend = Detrend.NONE

    def __post_init__(self) -> None:
        if self.segment_length < 2:
            raise ConfigError(f"segment_length must be at least 2, got {self.segment_length}")
        if not is_valid_overlap(self.overlap):
            raise ConfigError(f"overlap must lie in [0, 0.9], got {self.overlap}")
        self.window = Window(self.window)
        self.detrend = Detrend(self.detrend)


class Estimate(NamedTuple):
    value: float
    stderr: float


class StationarityReport(NamedTuple):
    """Largest VACF discrepancy between disjoint time origins."""

    n_origins: int
    discrepancy: float
    z_score: float
    threshold: float
    passed: bool


def _field(ensemble: Ensemble, field: str) -> np.ndarray:
    if field == "velocity":
        return ensemble.velocities
    if field == "position":
        return ensemble.positions
    raise ParameterError(f"unknown field '{field}'; expected 'velocity' or 'position'")


def _mean_and_stderr(per_traj: np.ndarray) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    mean = per_traj.mean(axis=0)
    n = per_traj.shape[0]
    if n < 2:
        return mean, None
    return mean, per_traj.std(axis=0, ddof=1) / math.sqrt(n)


def _to_two_sided(one_sided: np.ndarray, n_freq: int, segment_length: int) -> np.ndarray:
    # interior bins of a one-sided density carry both signs of frequency
    two_sided = 0.5 * one_sided
    two_sided[..., 0] = one_sided[..., 0]
    if segment_length % 2 == 0:
        two_sided[..., n_freq - 1] = one_sided[..., n_freq - 1]
    return two_sided


def welch_psd(ensemble: Ensemble, cfg: WelchConfig, field: str = "velocity") -> SpectrumCurve:
    """
    Averaged-periodogram PSD of an ensemble.

    Per-trajectory periodograms are summed over the spatial axes and averaged
    over trajectories. The result follows the package convention: two-sided
    in angular frequency, so white noise of variance s^2 sampled at dt has
    the level s^2 dt and a viscous ensemble converges to ``psd_viscous``.

    Args:
        ensemble: Simulated ensemble (stationary after burn-in)
        cfg: Segmenting
        field: "velocity" (or "position")

    Returns:
        SpectrumCurve on omega = 2 pi f (rad/s), with standard errors

    Raises:
        ConfigError: If the segment is longer than the series
    """
    data = _field(ensemble, field)
    if cfg.segment_length > ensemble.n_steps:
        raise ConfigError(
            f"segment_length {cfg.segment_length} exceeds the series length {ensemble.n_steps}"
        )
    freq, density = signal.welch(
        data,
        fs=1.0 / ensemble.dt,
        window=_SCIPY_WINDOW[cfg.window],
        nperseg=cfg.segment_length,
        noverlap=int(cfg.overlap * cfg.segment_length),
        detrend=_SCIPY_DETREND[cfg.detrend],
        return_onesided=True,
        scaling="density",
        axis=1,
    )
    per_traj = density.sum(axis=2)
    per_traj = _to_two_sided(per_traj, freq.size, cfg.segment_length)
    mean, stderr = _mean_and_stderr(per_traj)
    logger.debug(
        "welch: %d trajectories, %d bins, segment %d", ensemble.n_traj, freq.size, cfg.segment_length
    )
    return SpectrumCurve(
        2.0 * np.pi * freq,
        mean,
        normalization=Normalization.DIMENSIONAL,
        stderr=stderr,
        metadata={"segment_length": cfg.segment_length, "window": cfg.window.value},
    )


def _autocorrelation(data: np.ndarray, max_lag: int) -> np.ndarray:
    """Origin-averaged autocorrelation along axis 1, summed over axis 2."""
    n = data.shape[1]
    size = fft.next_fast_len(2 * n)
    spectrum = fft.rfft(data, size, axis=1)
    raw = fft.irfft(spectrum * np.conj(spectrum), size, axis=1)[:, : max_lag + 1]
    counts = (n - np.arange(max_lag + 1))[None, :, None]
    return (raw / counts).sum(axis=2)


def ensemble_vacf(ensemble: Ensemble, max_lag: Optional[int] = None) -> TimeCurve:
    """
    Time- and ensemble-averaged velocity autocorrelation.

    Args:
        ensemble: Simulated ensemble
        max_lag: Largest lag in steps, default n_steps // 2

    Returns:
        TimeCurve of sum over axes of <v(0) v(t)>, with standard errors
    """
    n = ensemble.n_steps
    max_lag = n // 2 if max_lag is None else int(max_lag)
    if not 0 <= max_lag < n:
        raise ParameterError(f"max_lag must lie in [0, {n - 1}], got {max_lag}")
    per_traj = _autocorrelation(ensemble.velocities, max_lag)
    mean, stderr = _mean_and_stderr(per_traj)
    t = np.arange(max_lag + 1) * ensemble.dt
    return TimeCurve(t, mean, CurveKind.VACF, stderr=stderr)


def ensemble_msd(
    ensemble: Ensemble, time_average: bool = False, max_lag: Optional[int] = None
) -> TimeCurve:
    """
    Mean-square displacement of an ensemble.

    Without time averaging, the displacement of each trajectory is taken
    from its first sample. With it, all time origins are used (FFT form of
    the sliding-window average), which sharpens the estimate for stationary
    increments.

    Args:
        ensemble: Simulated ensemble
        time_average: Average over all time origins
        max_lag: Largest lag in steps, default all

    Returns:
        TimeCurve of sum over axes of <|r(t) - r(0)|^2>, with standard errors
    """
    n = ensemble.n_steps
    max_lag = n - 1 if max_lag is None else int(max_lag)
    if not 0 <= max_lag < n:
        raise ParameterError(f"max_lag must lie in [0, {n - 1}], got {max_lag}")
    r = ensemble.positions
    if not time_average:
        disp = r[:, : max_lag + 1] - r[:, :1]
        per_traj = (disp * disp).sum(axis=2)
    else:
        sq = r * r
        cum = np.cumsum(sq, axis=1)
        total = cum[:, -1:]
        lags = np.arange(max_lag + 1)
        head = cum[:, n - 1 - lags]
        tail = total - np.concatenate((np.zeros_like(total), cum[:, : max_lag]), axis=1)
        counts = (n - lags)[None, :, None]
        s1 = ((head + tail) / counts).sum(axis=2)
        per_traj = s1 - 2.0 * _autocorrelation(r, max_lag)
        per_traj[:, 0] = 0.0
    mean, stderr = _mean_and_stderr(per_traj)
    t = np.arange(max_lag + 1) * ensemble.dt
    return TimeCurve(t, mean, CurveKind.MSD, stderr=stderr, metadata={"time_average": time_average})


def stationarity_check(
    ensemble: Ensemble, n_origins: int, max_lag: Optional[int] = None, threshold: float = 5.0
) -> StationarityReport:
    """
    Compare VACFs estimated from disjoint time windows.

    The series is cut into ``n_origins`` equal windows; every pair of window
    VACFs is compared lag by lag against its combined standard error.

    Args:
        ensemble: Simulated ensemble with at least two trajectories
        n_origins: Number of disjoint windows
        max_lag: Largest lag in steps, default a quarter window
        threshold: Pass while every difference stays below this many standard errors

    Returns:
        StationarityReport with the sup-norm discrepancy and the worst z-score
    """
    if n_origins < 1:
        raise ParameterError(f"n_origins must be at least 1, got {n_origins}")
    if n_origins == 1:
        return StationarityReport(1, 0.0, 0.0, threshold, True)
    if ensemble.n_traj < 2:
        raise ParameterError("stationarity check needs at least two trajectories")
    window = ensemble.n_steps // n_origins
    max_lag = max(1, window // 4) if max_lag is None else int(max_lag)
    if window < 2 or max_lag >= window:
        raise ParameterError(f"{n_origins} origins leave windows of {window} samples, too short")
    curves = []
    for k in range(n_origins):
        part = ensemble.velocities[:, k * window : (k + 1) * window]
        per_traj = _autocorrelation(part, max_lag)
        curves.append(_mean_and_stderr(per_traj))
    discrepancy, z_score = 0.0, 0.0
    for (mean_a, se_a), (mean_b, se_b) in combinations(curves, 2):
        diff = np.abs(mean_a - mean_b)
        se = np.sqrt(se_a**2 + se_b**2)
        discrepancy = max(discrepancy, float(diff.max()))
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(se > 0.0, diff / se, np.where(diff > 0.0, np.inf, 0.0))
        z_score = max(z_score, float(z.max()))
    return StationarityReport(n_origins, discrepancy, z_score, threshold, z_score < threshold)


def psd_from_vacf(vacf: TimeCurve, omega: Sequence[float]) -> SpectrumCurve:
    """
    Numeric Wiener-Khinchin transform 2 int_0^T C(t) cos(w t) dt (trapezoidal).

    Args:
        vacf: Correlation on a uniform lag grid starting at zero
        omega: Angular frequencies (rad/s)

    Returns:
        SpectrumCurve in the package convention
    """
    t = require_uniform(vacf.t)
    values = np.asarray(vacf.values, dtype=float)
    weights = np.full(t.size, t[1] - t[0])
    weights[0] *= 0.5
    weights[-1] *= 0.5
    om = np.asarray(omega, dtype=float)
    psd = 2.0 * np.cos(np.outer(om, t)) @ (weights * values)
    return SpectrumCurve(om, psd, metadata={"max_lag_time": float(t[-1])})


def mean_square_velocity(ensemble: Ensemble) -> Estimate:
    """Time-averaged sum over axes of <v^2>, mean and standard error over trajectories."""
    per_traj = (ensemble.velocities**2).sum(axis=2).mean(axis=1)
    mean, stderr = _mean_and_stderr(per_traj)
    return Estimate(float(mean), float(stderr) if stderr is not None else math.nan)


def position_variance(ensemble: Ensemble) -> Estimate:
    """Time-averaged sum over axes of <x^2> about the trap centre."""
    per_traj = (ensemble.positions**2).sum(axis=2).mean(axis=1)
    mean, stderr = _mean_and_stderr(per_traj)
    return Estimate(float(mean), float(stderr) if stderr is not None else math.nan)


def loglog_slope(t: np.ndarray, values: np.ndarray, lo: float, hi: float) -> float:
    """
    Least-squares slope of log(values) against log(t) on [lo, hi].

    Args:
        t: Abscissa (time or frequency)
        values: Positive samples
        lo: Window start
        hi: Window end

    Returns:
        Fitted exponent
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = (t >= lo) & (t <= hi) & (values > 0.0)
    if mask.sum() < 2:
        raise ParameterError(f"fewer than two positive samples in [{lo:g}, {hi:g}]")
    slope, _ = np.polyfit(np.log(t[mask]), np.log(values[mask]), 1)
    return float(slope)
