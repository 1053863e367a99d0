"""
Datasets behind the normalized spectrum figures.

Each figure is a fixed sweep of dimensionless groups. Every curve is written
as its own CSV (normalized frequency, normalized PSD) and the sweep values
are recorded in the figure's manifest.
"""

import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from rheobrown.core.curves import SpectrumCurve
from rheobrown.core.exceptions import ParameterError
from rheobrown.core.media import canonical_medium
from rheobrown.core.spectra import spectrum_curve
from rheobrown.utils.config import merge_points, parse_grid
from rheobrown.utils.io import write_manifest, write_spectrum_csv

logger = logging.getLogger(__name__)

DEFAULT_FIGURE_GRID = "1e-2:1e2:400"


@dataclass(frozen=True)
class CurveSpec:
    """
    One curve of a figure.

    Attributes:
        medium: Medium key
        groups: Dimensionless groups passed to ``canonical_medium``
        reference: True for the memoryless viscous reference curve
    """

    medium: str
    groups: Dict[str, float] = field(default_factory=dict)
    reference: bool = False

    @property
    def name(self) -> str:
        parts = [self.medium] + [f"{key}{value:g}" for key, value in self.groups.items()]
        return "_".join(parts)


@dataclass(frozen=True)
class FigureSpec:
    figure_id: int
    title: str
    axis: str
    curves: Tuple[CurveSpec, ...]
    # evaluate every curve at its resonance as well as on the grid
    include_peaks: bool = False


_VISCOUS_REFERENCE = CurveSpec("viscous", reference=True)

FIGURES: Dict[int, FigureSpec] = {
    1: FigureSpec(
        1,
        "Maxwell fluid, sweep of omega_R tau",
        "omega*tau",
        tuple(CurveSpec("maxwell", {"omegaRtau": w}) for w in (0.5, 1.0, 2.0, 5.0, 10.0, 50.0))
        + (_VISCOUS_REFERENCE,),
    ),
    4: FigureSpec(
        4,
        "Harmonic trap, sweep of omega_R tau",
        "omega*tau",
        tuple(CurveSpec("trap", {"omegaRtau": w}) for w in (0.5, 1.0, 2.0, 5.0))
        + (_VISCOUS_REFERENCE,),
        include_peaks=True,
    ),
    7: FigureSpec(
        7,
        "Jeffreys fluid, (omega_R tau, xi) pairs",
        "omega*tau",
        tuple(
            CurveSpec("jeffreys", {"omegaRtau": w, "xi": xi})
            for w, xi in ((1.0, 0.0), (1.0, 0.5), (1.0, 2.0), (5.0, 0.5), (5.0, 2.0))
        ),
    ),
    9: FigureSpec(
        9,
        "Springpot material, sweep of alpha",
        "omega*lambda",
        tuple(CurveSpec("subdiffusive", {"alpha": a}) for a in (0.25, 0.5, 0.75, 1.0))
        + (_VISCOUS_REFERENCE,),
    ),
    11: FigureSpec(
        11,
        "Hydrodynamic memory, sweep of the density group gamma",
        "omega*lambda",
        tuple(CurveSpec("hydrodynamic", {"gamma": g}) for g in (0.46, 0.55, 0.2, 1.0, 2.0, 5.0)),
    ),
}


def figure_ids() -> List[int]:
    """Figures with a dataset."""
    return sorted(FIGURES)


def _curve_grid(spec: CurveSpec, grid: np.ndarray, include_peaks: bool) -> np.ndarray:
    if include_peaks and "omegaRtau" in spec.groups:
        return merge_points(grid, [spec.groups["omegaRtau"]])
    return grid


def _canonical(spec: CurveSpec):
    kwargs = {
        "omegaRtau": "omegaR_tau",
        "xi": "xi",
        "alpha": "alpha",
        "gamma": "gamma",
    }
    return canonical_medium(spec.medium, **{kwargs[k]: v for k, v in spec.groups.items()})


def figure_curves(
    figure_id: int, grid: Optional[np.ndarray] = None
) -> List[Tuple[CurveSpec, SpectrumCurve]]:
    """
    Normalized curves of one figure.

    Args:
        figure_id: One of ``figure_ids()``
        grid: Dimensionless frequency grid, default 400 points from 1e-2 up to 1e2

    Returns:
        (curve spec, normalized SpectrumCurve) pairs in sweep order

    Raises:
        ParameterError: If the figure is unknown
    """
    if figure_id not in FIGURES:
        raise ParameterError(
            f"unknown figure {figure_id}; expected one of {', '.join(map(str, figure_ids()))}"
        )
    figure = FIGURES[figure_id]
    base = parse_grid(DEFAULT_FIGURE_GRID) if grid is None else np.asarray(grid, dtype=float)
    curves = []
    for spec in figure.curves:
        omega = _curve_grid(spec, base, figure.include_peaks)
        curve = spectrum_curve(_canonical(spec), omega, normalized=True)
        curve.metadata.update({"figure": figure_id, "reference": spec.reference, **spec.groups})
        curves.append((spec, curve))
    return curves


def write_figure(
    figure_id: int, outdir: str, grid: Optional[np.ndarray] = None
) -> Dict[str, object]:
    """
    Write one CSV per curve of a figure plus its manifest.

    Args:
        figure_id: One of ``figure_ids()``
        outdir: Output directory, created if missing
        grid: Optional dimensionless frequency grid

    Returns:
        Dictionary with the CSV paths and the manifest path
    """
    os.makedirs(outdir, exist_ok=True)
    curves = figure_curves(figure_id, grid)
    figure = FIGURES[figure_id]
    paths = []
    records = []
    for spec, curve in curves:
        path = os.path.join(outdir, f"fig{figure_id}_{spec.name}.csv")
        write_spectrum_csv(path, curve)
        paths.append(path)
        records.append(
            {
                "file": os.path.basename(path),
                "medium": spec.medium,
                "reference": spec.reference,
                "groups": dict(spec.groups),
                "points": len(curve),
            }
        )
        logger.debug("figure %d: wrote %s (%d points)", figure_id, path, len(curve))
    manifest = write_manifest(
        os.path.join(outdir, f"fig{figure_id}_manifest.json"),
        command="figures",
        config={
            "figure": figure_id,
            "title": figure.title,
            "axis": figure.axis,
            "grid": DEFAULT_FIGURE_GRID if grid is None else "custom",
        },
        outputs=paths,
        extra={"curves": records},
    )
    return {"figure": figure_id, "files": paths, "manifest": manifest}
