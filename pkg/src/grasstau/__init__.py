"""Finite-dimensional KP tau-functions from Grassmann cones.

The package computes tau-functions as determinants of flows generated by an
arbitrary square matrix and checks the rank-one criterion on the lower-left
block that decides whether the result is a KP tau-function.
"""

from .exterior import Frame, PluckerVector, plucker_coordinates, plucker_residuals, is_decomposable
from .kp_flow import Generator, hbde_residual, miwa_tau, time_tau, tau_shifted
from .scalars import UnsupportedModeError

__all__ = [
    "Frame",
    "Generator",
    "PluckerVector",
    "UnsupportedModeError",
    "hbde_residual",
    "is_decomposable",
    "miwa_tau",
    "plucker_coordinates",
    "plucker_residuals",
    "tau_shifted",
    "time_tau",
]

__version__ = "0.1.0"
