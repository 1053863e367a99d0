"""
Core modules: rheological networks, media, spectra, simulation and estimation.
"""

from rheobrown.core import (
    curves,
    estimators,
    exceptions,
    figures,
    media,
    rheology,
    simkit,
    specfun,
    spectra,
    verifier,
)

__all__ = [
    "curves",
    "exceptions",
    "specfun",
    "rheology",
    "media",
    "spectra",
    "simkit",
    "estimators",
    "figures",
    "verifier",
]
