"""Spectra, projection kernels and spectral resolutions for Laplacians on
Sierpinski fractafolds and their cell and edge graphs."""

from .decimation import (
    GASKET, INTERVAL, Branch, DecimationPolynomial, EigenvalueAddress, enumerate_series,
    frak_R, resolve_address,
)
from .errors import (
    AdmissibilityError, ConvergenceError, DiscriminantError, ForbiddenEigenvalueError,
    FractafoldError, GraphError, NotInE6Error, PoleError, SizeCapError,
)
from .fractafold import FractafoldMesh, decimation_spectrum_check, fractafold_kernel, fractafold_spectrum
from .graph_core import CellGraph, brute_spectrum, build_graph, edge_graph, refine

__version__ = "0.1.0"

__all__ = [
    "GASKET", "INTERVAL", "Branch", "DecimationPolynomial", "EigenvalueAddress", "enumerate_series",
    "frak_R", "resolve_address",
    "AdmissibilityError", "ConvergenceError", "DiscriminantError", "ForbiddenEigenvalueError",
    "FractafoldError", "GraphError", "NotInE6Error", "PoleError", "SizeCapError",
    "FractafoldMesh", "decimation_spectrum_check", "fractafold_kernel", "fractafold_spectrum",
    "CellGraph", "brute_spectrum", "build_graph", "edge_graph", "refine",
]
