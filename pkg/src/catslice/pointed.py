"""Pointed categories ``(A, C)``, their morphisms ``(F, α)`` and the passage
``(A, C) ↦ (1_A, C/A)`` to terminally pointed categories.

The adjunction between terminally pointed and pointed categories is checked
one pointed category at a time, as a universal arrow with existence and
uniqueness established by enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .constructions import (
    build_slice,
    sigma_f,
    slice_functor,
    terminal_slice_section,
)
from .core import (
    DEFAULT_BUDGET,
    Certificate,
    FinCat,
    Functor,
    compose_functors,
    enumerate_functors,
    identity_functor,
    identity_name,
    is_terminal,
    terminal_object,
)
from .errors import NoTerminalObject, ShapeMismatch, UnknownObject


@dataclass(frozen=True, eq=False)
class PointedCat:
    point: str
    carrier: FinCat

    def __post_init__(self):
        if not self.carrier.objects:
            raise ShapeMismatch("a pointed category must be non-empty", {"category": self.carrier.name})
        if not self.carrier.has_object(self.point):
            raise UnknownObject(f"{self.point} is not an object of {self.carrier.name}",
                                {"object": self.point})

    def __eq__(self, other):
        if not isinstance(other, PointedCat):
            return NotImplemented
        return self.point == other.point and self.carrier == other.carrier

    def __hash__(self):
        return hash((self.point, self.carrier))


@dataclass(frozen=True, eq=False)
class PtdCatMor:
    """``(F, α): (A, C) → (B, D)`` with ``α: FA → B`` in ``D``."""

    source: PointedCat
    target: PointedCat
    functor: Functor
    comparison: str

    def __post_init__(self):
        F = self.functor
        if F.source != self.source.carrier or F.target != self.target.carrier:
            raise ShapeMismatch(f"{F.name} does not run between the carriers", {"functor": F.name})
        D = self.target.carrier
        D.require_morphism(self.comparison)
        if D.ends(self.comparison) != (F.ob[self.source.point], self.target.point):
            raise ShapeMismatch(
                f"comparison {self.comparison} is not a morphism F({self.source.point}) -> {self.target.point}",
                {"comparison": self.comparison},
            )

    def __eq__(self, other):
        if not isinstance(other, PtdCatMor):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.functor == other.functor and self.comparison == other.comparison)

    def __hash__(self):
        return hash((self.functor, self.comparison))


def identity_ptd(P: PointedCat) -> PtdCatMor:
    return PtdCatMor(P, P, identity_functor(P.carrier), identity_name(P.point))


def compose_ptd(first: PtdCatMor, second: PtdCatMor) -> PtdCatMor:
    """``(G, β)∘(F, α) = (GF, β∘Gα)``."""
    if first.target != second.source:
        raise ShapeMismatch("pointed morphisms are not composable", {})
    G = second.functor
    E = second.target.carrier
    return PtdCatMor(
        first.source,
        second.target,
        compose_functors(first.functor, G),
        E.compose(G.mor[first.comparison], second.comparison),
    )


def is_terminally_pointed_cat(P: PointedCat) -> bool:
    return is_terminal(P.carrier, P.point)


def terminally_pointed(C: FinCat) -> PointedCat:
    t = terminal_object(C)
    if t is None:
        raise NoTerminalObject(f"{C.name} has no terminal object", {"category": C.name})
    return PointedCat(t, C)


def G_pointed(P: PointedCat) -> PointedCat:
    """``(A, C) ↦ (1_A, C/A)``."""
    return PointedCat(identity_name(P.point), build_slice(P.carrier, P.point).carrier)


def G_on_mor(m: PtdCatMor) -> PtdCatMor:
    """``(F, α) ↦ (Σ_α ∘ F/A, α)``, the comparison read as ``α → 1_B`` in ``D/B``."""
    A, B = m.source.point, m.target.point
    F, alpha = m.functor, m.comparison
    D = m.target.carrier
    functor = compose_functors(slice_functor(F, A), sigma_f(D, alpha))
    SB = build_slice(D, B)
    comparison = SB.morphism(alpha, alpha, identity_name(B))
    return PtdCatMor(G_pointed(m.source), G_pointed(m.target), functor, comparison)


def universal_arrow(P: PointedCat) -> PtdCatMor:
    """``(Σ_A, 1_A): (1_A, C/A) → (A, C)``."""
    S = build_slice(P.carrier, P.point)
    return PtdCatMor(G_pointed(P), P, S.projection, identity_name(P.point))


def factorization(P: PointedCat, test: PtdCatMor) -> PtdCatMor:
    """For ``(F, α): (1, D) → (A, C)`` build ``(F̄, ᾱ)`` with
    ``F̄ = Σ_α ∘ F/1`` (preceded by ``D ≅ D/1``) and ``ᾱ = α`` seen in ``C/A``."""
    D = test.source.carrier
    F, alpha = test.functor, test.comparison
    C = P.carrier
    Fbar = compose_functors(
        compose_functors(terminal_slice_section(D, test.source.point), slice_functor(F, test.source.point)),
        sigma_f(C, alpha),
    )
    SA = build_slice(C, P.point)
    abar = SA.morphism(alpha, alpha, identity_name(P.point))
    return PtdCatMor(test.source, G_pointed(P), Fbar, abar)


def check_factorization(P: PointedCat, test: PtdCatMor, candidate: PtdCatMor) -> Certificate:
    """Does ``candidate`` followed by the universal arrow give back ``test``?"""
    claim = "factorization through (Sigma_A, 1_A)"
    if candidate.target != G_pointed(P) or candidate.source != test.source:
        return Certificate(claim, False, {"error": "FactorizationFailure", "reason": "wrong endpoints"})
    composite = compose_ptd(candidate, universal_arrow(P))
    if composite.functor != test.functor:
        bad = next(f for f in test.functor.mor if composite.functor.mor[f] != test.functor.mor[f])
        return Certificate(claim, False, {"error": "FactorizationFailure", "morphism": bad,
                                          "expected": test.functor.mor[bad],
                                          "got": composite.functor.mor[bad]})
    if composite.comparison != test.comparison:
        return Certificate(claim, False, {"error": "FactorizationFailure",
                                          "expected_comparison": test.comparison,
                                          "got_comparison": composite.comparison})
    return Certificate(claim, True)


def count_factorizations(P: PointedCat, test: PtdCatMor, budget: int = DEFAULT_BUDGET) -> int:
    """Number of pointed morphisms ``(1, D) → (1_A, C/A)`` whose composite with
    the universal arrow is ``test``, by exhaustive enumeration."""
    C, A = P.carrier, P.point
    S = build_slice(C, A)
    F = test.functor
    D = test.source.carrier
    count = 0
    functors = enumerate_functors(
        D,
        S.carrier,
        ob_candidates=lambda X: [x for x in S.carrier.objects if C.dom(x) == F.ob[X]],
        mor_candidates=lambda g: (lambda m: S.carrier.payload(m) == F.mor[g]),
        budget=budget,
    )
    for Fp in functors:
        start = Fp.ob[test.source.point]
        count += sum(
            1 for m in S.carrier.hom(start, identity_name(A))
            if S.carrier.payload(m) == test.comparison
        )
    return count


def default_probes() -> list[PointedCat]:
    from . import fixtures

    return [terminally_pointed(fixtures.one()), terminally_pointed(fixtures.two()),
            terminally_pointed(fixtures.cospan())]


def probe_morphisms(P: PointedCat, probes: Iterable[PointedCat],
                    budget: int = DEFAULT_BUDGET) -> list[PtdCatMor]:
    """Every pointed morphism from each terminally pointed probe into ``P``."""
    out = []
    for probe in probes:
        if not is_terminally_pointed_cat(probe):
            raise ShapeMismatch(f"probe {probe.carrier.name} is not terminally pointed", {})
        for F in enumerate_functors(probe.carrier, P.carrier, budget=budget, name="F"):
            for alpha in P.carrier.hom(F.ob[probe.point], P.point):
                out.append(PtdCatMor(probe, P, F, alpha))
    return out


@dataclass
class ArrowReport:
    test: PtdCatMor
    factorization: PtdCatMor | None
    count: int
    ok: bool = field(default=False)


def verify_universal_arrow(
    P: PointedCat,
    tests: Sequence[PtdCatMor] | None = None,
    probes: Iterable[PointedCat] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> Certificate:
    """Check that ``(Σ_A, 1_A)`` is universal from the inclusion to ``P``
    against every test morphism (generated from ``probes`` when not given).

    A failing witness names ``FactorizationFailure`` (the constructed
    factorization does not compose back) or ``NonUniqueFactorization``
    (enumeration finds a count other than one).
    """
    if tests is None:
        tests = probe_morphisms(P, probes if probes is not None else default_probes(), budget)
    reports = []
    for i, test in enumerate(tests):
        if test.target != P or not is_terminally_pointed_cat(test.source):
            raise ShapeMismatch("test morphism must run from a terminally pointed category into P",
                                {"test": i})
        fac = factorization(P, test)
        cert = check_factorization(P, test, fac)
        if not cert:
            return Certificate("universal arrow", False, {"test": i, **cert.witness}, reports)
        n = count_factorizations(P, test, budget)
        reports.append(ArrowReport(test, fac, n, n == 1))
        if n != 1:
            return Certificate(
                "universal arrow", False,
                {"error": "NonUniqueFactorization", "test": i, "functor": test.functor.name,
                 "comparison": test.comparison, "factorizations": n},
                reports,
            )
    return Certificate("universal arrow", True, {"tests": len(reports)}, reports)
