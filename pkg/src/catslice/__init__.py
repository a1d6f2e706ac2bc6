"""Finite categories, slices, fibrations and slice fibrations, checked exhaustively."""

from .core import (
    Certificate,
    FinCat,
    Functor,
    NatTrans,
    Presentation,
    validate_category,
)
from .errors import CategoryError

__all__ = ["Certificate", "CategoryError", "FinCat", "Functor", "NatTrans", "Presentation",
           "validate_category"]
__version__ = "0.1.0"
