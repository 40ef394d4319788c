"""Exact computations for logarithmic Frobenius type structures.

The package builds formal Frobenius manifolds from quantum cohomology data
and from nilpotent orbits of polarized variations of Hodge structure.
"""

from .numbers import GaussianRational, Q, rational
from .series import MatrixSeries, TruncatedSeries, VariableSet

__all__ = [
    "GaussianRational",
    "MatrixSeries",
    "Q",
    "TruncatedSeries",
    "VariableSet",
    "rational",
]
