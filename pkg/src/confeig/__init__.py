"""Laplace eigenvalues of planar domains given by finite exterior conformal maps."""

__version__ = "0.1.0"

from .conformal import ConformalMap, PerturbSpec, boundary_trace, derivative_trace, perturb  # noqa: E402
from .freqexp import DTensor, assemble_dtensor  # noqa: E402
from .grunsky import GrunskyTable, grunsky_table  # noqa: E402
from .laurent import LaurentSeries  # noqa: E402
from .spectral import BC, EigenResult, assemble, refine, scan  # noqa: E402

__all__ = [
    "BC",
    "ConformalMap",
    "DTensor",
    "EigenResult",
    "GrunskyTable",
    "LaurentSeries",
    "PerturbSpec",
    "assemble",
    "assemble_dtensor",
    "boundary_trace",
    "derivative_trace",
    "grunsky_table",
    "perturb",
    "refine",
    "scan",
]
