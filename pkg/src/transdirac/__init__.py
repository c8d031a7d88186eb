"""Computational core of transversal Dirac operator theory on model spaces."""

from .clifford import build_clifford, chirality_grading, clifford_vector
from .exceptions import ContractViolation, TransDiracError, ValidationError
from .forms import Form, MetricPoint, bigstar, hodge_star
from .spectrum import SpectrumReport

__all__ = [
    "build_clifford",
    "chirality_grading",
    "clifford_vector",
    "ContractViolation",
    "TransDiracError",
    "ValidationError",
    "Form",
    "MetricPoint",
    "bigstar",
    "hodge_star",
    "SpectrumReport",
]

__version__ = "0.1.0"
