"""Numerical calculus for pseudo-differential operators generated by a
model boundary-value operator with discrete biorthogonal spectrum."""

from .model import (BracketTable, ModelProblem, ModelSpec, bracket, build_model,
                    check_biorthogonality, check_wz, s0_tail)
from .symbols import AdmissibleFamily, Symbol, default_family, make_symbol
from .transform import CoeffVector, fourier, fourier_star, inverse, inverse_star

__version__ = "0.1.0"

__all__ = [
    "BracketTable", "ModelProblem", "ModelSpec", "bracket", "build_model",
    "check_biorthogonality", "check_wz", "s0_tail",
    "AdmissibleFamily", "Symbol", "default_family", "make_symbol",
    "CoeffVector", "fourier", "fourier_star", "inverse", "inverse_star",
    "__version__",
]
