"""
rheobrown - Brownian motion in linear viscoelastic media.

Closed-form power spectra, velocity autocorrelations and mean-square
displacements from rheological analogues, a generalized Langevin simulator
with fluctuation-dissipation-consistent noise, and the estimators that
compare the two.
"""

__version__ = "0.1.0"
__author__ = "Ritik Rajput"
__email__ = "netscafeeee@gmail.com"

from rheobrown.core import (
    estimators,
    figures,
    media,
    rheology,
    simkit,
    specfun,
    spectra,
    verifier,
)

__all__ = [
    "specfun",
    "rheology",
    "media",
    "spectra",
    "simkit",
    "estimators",
    "figures",
    "verifier",
]
