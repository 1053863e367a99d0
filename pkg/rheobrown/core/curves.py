"""
Sampled curve types shared by spectra, estimators, simkit and the CLI.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

# Transform convention used by every spectrum in the package.
CONVENTION_NOTE = (
    "S(w) = 2 Re int_0^inf <v(0)v(t)> exp(-i w t) dt; two-sided in w, "
    "int_-inf^inf S dw = 2 pi <v^2>; no extra 1/(2 pi) factor"
)


class Normalization(str, Enum):
    DIMENSIONAL = "dimensional"
    NORMALIZED = "normalized"


class CurveKind(str, Enum):
    MSD = "msd"
    VACF = "vacf"
    CREEP = "creep"
    COVARIANCE = "covariance"
    DERIVATIVE = "derivative"
    SERIES = "series"


@dataclass
class SpectrumCurve:
    """
    A sampled power spectral density.

    Attributes:
        omega: Frequency grid, rad/s or dimensionless (omega*tau, omega*lambda)
        values: PSD samples, real and non-negative
        normalization: Whether values are divided by the reference PSD
        convention_note: Transform convention the values follow
        stderr: Optional standard errors of estimated values
        metadata: Free-form parameters echoed into manifests
    """

    omega: np.ndarray
    values: np.ndarray
    normalization: Normalization = Normalization.DIMENSIONAL
    convention_note: str = CONVENTION_NOTE
    stderr: Optional[np.ndarray] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.omega = np.asarray(self.omega, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.omega.shape != self.values.shape:
            raise ValueError("omega and values must have the same shape")

    def __len__(self) -> int:
        return int(self.omega.size)

    @property
    def is_physical(self) -> bool:
        """True if every sample is finite and non-negative."""
        return bool(np.all(np.isfinite(self.values)) and np.all(self.values >= 0.0))


@dataclass
class TimeCurve:
    """
    A sampled time-domain function (MSD, VACF, creep compliance, covariance).

    Attributes:
        t: Time grid in seconds (or dimensionless when metadata says so)
        values: Samples on the grid
        kind: What the samples represent
        stderr: Optional standard errors of estimated values
        accurate: False when a numerical method could not reach its tolerance
        metadata: Free-form parameters echoed into manifests
    """

    t: np.ndarray
    values: np.ndarray
    kind: CurveKind = CurveKind.SERIES
    stderr: Optional[np.ndarray] = None
    accurate: bool = True
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.t = np.asarray(self.t, dtype=float)
        self.values = np.asarray(self.values)
        if self.t.shape[0] != self.values.shape[0]:
            raise ValueError("t and values must have the same length")

    def __len__(self) -> int:
        return int(self.t.size)

    @property
    def step(self) -> float:
        """Grid spacing of a uniform grid (first interval)."""
        if self.t.size < 2:
            raise ValueError("curve has fewer than two samples")
        return float(self.t[1] - self.t[0])
