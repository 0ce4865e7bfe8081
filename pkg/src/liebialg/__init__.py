"""Exact verification and classification of Lie bialgebra cocycles on sl(n) / su(n, F, d)."""

from .fields import (
    DivisionByZero,
    SpecMismatch,
    TowerElem,
    TowerSpec,
    is_norm_from_quadratic,
    is_square_rational,
    squarefree_part,
)
from .matrices import MatK, build_J, build_S
from .quaternions import QuatAlg, QuatElem, hilbert_symbol, is_split, quat_iso, solve_norm_equation

__all__ = [
    "DivisionByZero",
    "SpecMismatch",
    "TowerElem",
    "TowerSpec",
    "is_norm_from_quadratic",
    "is_square_rational",
    "squarefree_part",
    "MatK",
    "build_J",
    "build_S",
    "QuatAlg",
    "QuatElem",
    "hilbert_symbol",
    "is_split",
    "quat_iso",
    "solve_norm_equation",
]

__version__ = "0.1.0"
