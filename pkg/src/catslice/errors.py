"""Exception hierarchy. Every error carries a ``witness`` dict naming the
offending objects or morphisms so reports can show a concrete counterexample."""

from __future__ import annotations


class CategoryError(Exception):
    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = dict(witness or {})

    def __str__(self) -> str:
        base = super().__str__()
        if not self.witness:
            return base
        parts = ", ".join(f"{k}={v!r}" for k, v in self.witness.items())
        return f"{base} [{parts}]"


class InvalidName(CategoryError):
    pass


class DuplicateName(CategoryError):
    pass


class DanglingReference(CategoryError):
    pass


class NonTotal(CategoryError):
    pass


class NotClosed(CategoryError):
    pass


class IdentityLawViolation(CategoryError):
    pass


class AssociativityViolation(CategoryError):
    pass


class NotComposable(CategoryError):
    pass


class UnknownObject(CategoryError):
    pass


class UnknownMorphism(CategoryError):
    pass


class ShapeMismatch(CategoryError):
    pass


class FunctorLawViolation(CategoryError):
    pass


class MissingComponent(CategoryError):
    pass


class NaturalitySquareViolation(CategoryError):
    pass


class BudgetExceeded(CategoryError):
    pass


class MissingPullback(CategoryError):
    pass


class NoTerminalObject(CategoryError):
    pass


class TriangleIdentityViolation(CategoryError):
    pass


class NotAFibration(CategoryError):
    pass


class TriangleViolation(CategoryError):
    """A functor between total categories does not commute with the projections."""


class CartesianNotPreserved(CategoryError):
    pass


class NotVertical(CategoryError):
    pass


class NotASection(CategoryError):
    pass


class PointNotFibered(CategoryError):
    pass


class NoFiberedPullbacks(CategoryError):
    pass


class FactorizationFailure(CategoryError):
    pass


class NonUniqueFactorization(CategoryError):
    pass
