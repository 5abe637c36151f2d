"""Exact intersection algebra of surface bundles over surfaces with Torelli monodromy."""

from .errors import (
    DimensionError,
    GenusError,
    InconsistentData,
    IndeterminateContribution,
    IndeterminatePairing,
    NonSymplecticError,
    NotEquivalent,
    NotInImage,
    PrimitivityViolation,
    ProblemFileError,
    SurfBundleError,
)
from .symplectic import SymplecticLattice

__version__ = "0.1.0"

__all__ = [
    "DimensionError",
    "GenusError",
    "InconsistentData",
    "IndeterminateContribution",
    "IndeterminatePairing",
    "NonSymplecticError",
    "NotEquivalent",
    "NotInImage",
    "PrimitivityViolation",
    "ProblemFileError",
    "SurfBundleError",
    "SymplecticLattice",
]
