"""Cartesian morphisms, cloven fibrations, fibres, change of base, and the
fibered functors, transformations and adjunctions over a fixed base.

A fibration is just a :class:`~catslice.core.Functor` ``P: X → B``; once
certified it is wrapped in a :class:`CleavedFibration` that fixes one
cartesian lift per ``(Y, u)``, always the lexicographically smallest name.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Mapping, Union

from .constructions import Adjunction, build_arrow_category, check_adjunction
from .core import (
    Certificate,
    FinCat,
    Functor,
    NatTrans,
    build_category,
    compose_functors,
    has_pullbacks,
    identity_functor,
    identity_name,
    is_pullback_square,
    pair_name,
    product_category,
    pullback,
    terminal_category,
)
from .errors import (
    CartesianNotPreserved,
    NotAFibration,
    NotVertical,
    ShapeMismatch,
    TriangleViolation,
)


@dataclass(frozen=True, eq=False)
class CleavedFibration:
    proj: Functor
    cleavage: Mapping[tuple[str, str], str]

    @property
    def total(self) -> FinCat:
        return self.proj.source

    @property
    def base(self) -> FinCat:
        return self.proj.target

    def lift(self, Y: str, u: str) -> str:
        """The chosen cartesian morphism over ``u`` with codomain ``Y``."""
        return self.cleavage[Y, u]

    def __repr__(self) -> str:
        return f"CleavedFibration({self.total.name} -> {self.base.name})"


Fibrationish = Union[Functor, CleavedFibration]


def _proj(P: Fibrationish) -> Functor:
    return P.proj if isinstance(P, CleavedFibration) else P


# ---------------------------------------------------------------------------
# cartesian morphisms and fibrations


def is_cartesian(P: Fibrationish, f: str) -> Certificate:
    """Strong cartesianness of ``f: X → Y``: for all ``v: K → PX`` and
    ``g: Z → Y`` with ``Pg = Pf∘v`` there is exactly one ``h: Z → X`` with
    ``f∘h = g`` and ``Ph = v``.

    On failure the witness names ``(v, g)`` and how many ``h`` exist.
    """
    P = _proj(P)
    X, B = P.source, P.target
    src, tgt = X.ends(f)
    Pf = P.mor[f]
    counts = Counter((X.compose(h, f), P.mor[h]) for h in X.into(src))
    # h ↦ (f∘h, Ph) must be a bijection onto the admissible pairs (g, v);
    # count those pairs cheaply before hunting for a witness
    if all(n == 1 for n in counts.values()):
        groups = Counter((P.ob[X.dom(g)], P.mor[g]) for g in X.into(tgt))
        admissible = sum(
            n * sum(1 for v in B.hom(K, P.ob[src]) if B.compose(v, Pf) == Pg)
            for (K, Pg), n in groups.items()
        )
        if admissible == len(counts):
            return Certificate(f"{f} is cartesian", True)
    for g in X.into(tgt):
        Pg = P.mor[g]
        for v in B.hom(P.ob[X.dom(g)], P.ob[src]):
            if B.compose(v, Pf) == Pg:
                n = counts.get((g, v), 0)
                if n != 1:
                    return Certificate(f"{f} is cartesian", False,
                                       {"morphism": f, "v": v, "g": g, "candidates": n})
    return Certificate(f"{f} is cartesian", True)


def cartesian_morphisms(P: Fibrationish) -> frozenset[str]:
    P = _proj(P)
    if "cartesian" not in P._memo:
        P._memo["cartesian"] = frozenset(f for f in P.source.morphisms if is_cartesian(P, f))
    return P._memo["cartesian"]


def is_fibration(P: Fibrationish) -> Certificate:
    """Certify ``P`` as a fibration. ``value`` holds the canonical
    :class:`CleavedFibration`; the witness of a failure is a pair ``(Y, u)``
    with no cartesian lift."""
    P = _proj(P)
    X, B = P.source, P.target
    cart = cartesian_morphisms(P)
    cleavage = {}
    for Y in X.objects:
        by_image = defaultdict(list)
        for f in X.into(Y):
            if f in cart:
                by_image[P.mor[f]].append(f)
        for u in B.into(P.ob[Y]):
            lifts = by_image.get(u)
            if not lifts:
                return Certificate("fibration", False, {"object": Y, "base_morphism": u})
            cleavage[Y, u] = min(lifts)
    return Certificate("fibration", True, value=CleavedFibration(P, cleavage))


def cleave(P: Fibrationish) -> CleavedFibration:
    if isinstance(P, CleavedFibration):
        return P
    cert = is_fibration(P)
    if not cert:
        raise NotAFibration(f"{P.name} is not a fibration", cert.witness)
    return cert.value


def is_vertical(P: Fibrationish, f: str) -> bool:
    P = _proj(P)
    return P.mor[f] == identity_name(P.ob[P.source.dom(f)])


def cartesian_lifts(P: Fibrationish, Y: str, u: str) -> list[str]:
    P = _proj(P)
    cart = cartesian_morphisms(P)
    return sorted(f for f in P.source.into(Y) if P.mor[f] == u and f in cart)


def connecting_vertical_isos(P: Fibrationish, f1: str, f2: str) -> list[str]:
    """Vertical isomorphisms ``h`` with ``f2∘h = f1``."""
    P = _proj(P)
    X = P.source
    return [h for h in X.hom(X.dom(f1), X.dom(f2))
            if is_vertical(P, h) and X.is_iso(h) and X.compose(h, f2) == f1]


# ---------------------------------------------------------------------------
# fibres, vertical arrows, reindexing


def fiber_category(P: Fibrationish, I: str) -> FinCat:
    """Objects over ``I`` and morphisms over ``1_I``, names kept from the total category."""
    P = _proj(P)
    X = P.source
    P.target.require_object(I)
    key = ("fiber", I)
    if key in P._memo:
        return P._memo[key]
    idI = identity_name(I)
    objects = [Y for Y in X.objects if P.ob[Y] == I]
    arrows = {f: X.ends(f) for f in X.morphisms if P.mor[f] == idI}
    table = {(f, g): X.compose(f, g) for f in arrows for g in X.out_of(X.cod(f)) if g in arrows}
    C = FinCat(f"fib({X.name},{I})", objects, arrows, table)
    P._memo[key] = C
    return C


def fiber_inclusion(P: Fibrationish, I: str) -> Functor:
    P = _proj(P)
    Fi = fiber_category(P, I)
    return Functor(f"incl({I})", Fi, P.source, {a: a for a in Fi.objects},
                   {f: f for f in Fi.morphisms}, check=False)


@dataclass(frozen=True, eq=False)
class VerticalCategory:
    """Full subcategory of the arrow category on the ``P``-vertical morphisms."""

    carrier: FinCat
    cod_functor: Functor
    dom_functor: Functor

    def square(self, x: str, top: str, bottom: str, y: str) -> str:
        return self.carrier.named(x, y, (top, bottom))


def vertical_category(P: Fibrationish) -> VerticalCategory:
    P = _proj(P)
    if "vertical" in P._memo:
        return P._memo["vertical"]
    X = P.source
    vert = [x for x in X.morphisms if is_vertical(P, x)]
    arrows = []
    for x in vert:
        a, b = X.ends(x)
        for y in vert:
            c, d = X.ends(y)
            for top in X.hom(a, c):
                ty = X.compose(top, y)
                for bottom in X.hom(b, d):
                    if X.compose(x, bottom) == ty:
                        arrows.append((x, y, (top, bottom)))
    V = build_category(
        f"V({X.name})",
        vert,
        arrows,
        compose=lambda p, q: (X.compose(p[0], q[0]), X.compose(p[1], q[1])),
        label=lambda p: f"({p[0]},{p[1]})",
        identity=lambda x: (identity_name(X.dom(x)), identity_name(X.cod(x))),
        componentwise=True,
    )
    cod = Functor(f"cod({X.name})", V, X, {x: X.cod(x) for x in vert},
                  {m: V.payload(m)[1] for m in V.morphisms})
    dom = Functor(f"dom({X.name})", V, X, {x: X.dom(x) for x in vert},
                  {m: V.payload(m)[0] for m in V.morphisms})
    result = P._memo["vertical"] = VerticalCategory(V, cod, dom)
    return result


def reindexing_functor(fib: CleavedFibration, u: str) -> Functor:
    """``u*: P_J → P_I`` for ``u: I → J``, induced by the cleavage."""
    P = fib.proj
    X = P.source
    I, J = P.target.ends(u)
    FI, FJ = fiber_category(P, I), fiber_category(P, J)
    ob = {Y: X.dom(fib.lift(Y, u)) for Y in FJ.objects}
    mor = {}
    for g in FJ.morphisms:
        Y, Y2 = FJ.ends(g)
        target = X.compose(fib.lift(Y, u), g)
        hs = [h for h in FI.hom(ob[Y], ob[Y2]) if X.compose(h, fib.lift(Y2, u)) == target]
        if len(hs) != 1:
            raise NotAFibration(f"lift of {Y2} along {u} does not factor {g} uniquely",
                                {"morphism": g, "base_morphism": u, "candidates": hs})
        mor[g] = hs[0]
    return Functor(f"reindex({u})", FJ, FI, ob, mor)


def has_fibered_pullbacks(fib: CleavedFibration) -> Certificate:
    """Every fibre has pullbacks and reindexing carries the chosen fibre
    pullback squares to pullback squares."""
    P = fib.proj
    B = P.target
    claim = "fibered pullbacks"
    for I in B.objects:
        c = has_pullbacks(fiber_category(P, I))
        if not c:
            return Certificate(claim, False, {"fiber": I, **c.witness})
    for u in B.morphisms:
        I, J = B.ends(u)
        FI, FJ = fiber_category(P, I), fiber_category(P, J)
        R = reindexing_functor(fib, u)
        for b in FJ.objects:
            into = FJ.into(b)
            for i, f in enumerate(into):
                for g in into[i:]:
                    pb = pullback(FJ, f, g)
                    sq = is_pullback_square(FI, R.mor[f], R.mor[g], R.mor[pb.p1], R.mor[pb.p2])
                    if not sq:
                        return Certificate(claim, False, {"base_morphism": u, "f": f, "g": g,
                                                          "reason": "reindexing breaks a pullback"})
    return Certificate(claim, True)


# ---------------------------------------------------------------------------
# change of base


@dataclass(frozen=True, eq=False)
class ChangeOfBase:
    """Strict pullback of ``P: X → B`` along ``F: C → B``; objects ``(c,x)``."""

    projection: Functor
    over: Functor
    fibration: CleavedFibration | None

    @property
    def total(self) -> FinCat:
        return self.projection.source

    def object(self, c: str, x: str) -> str:
        return pair_name(c, x)

    def morphism(self, h: str, k: str) -> str:
        C, X = self.projection.target, self.over.target
        Y = self.total
        return Y.named(pair_name(C.dom(h), X.dom(k)), pair_name(C.cod(h), X.cod(k)), (h, k))


def change_of_base(P: Fibrationish, F: Functor) -> ChangeOfBase:
    """Pull ``P`` back along ``F``. When ``P`` is a fibration the result is
    re-certified, and the lifts ``(h, lift(x, Fh))`` are checked cartesian."""
    proj = _proj(P)
    X, B = proj.source, proj.target
    C = F.source
    if F.target != B:
        raise ShapeMismatch(f"{F.name} does not land in the base of {proj.name}", {})
    objects = [pair_name(c, x) for c in C.objects for x in X.objects if F.ob[c] == proj.ob[x]]
    over_base = defaultdict(list)
    for h in C.morphisms:
        over_base[F.mor[h]].append(h)
    arrows = [
        (pair_name(C.dom(h), X.dom(k)), pair_name(C.cod(h), X.cod(k)), (h, k))
        for k in X.morphisms
        for h in over_base.get(proj.mor[k], ())
    ]
    pairs = {pair_name(c, x): (c, x) for c in C.objects for x in X.objects}
    Y = build_category(
        f"pb({X.name},{C.name})",
        objects,
        arrows,
        compose=lambda p, q: (C.compose(p[0], q[0]), X.compose(p[1], q[1])),
        label=lambda p: pair_name(*p),
        identity=lambda o: tuple(map(identity_name, pairs[o])),
        componentwise=True,
    )
    PF = Functor(f"{proj.name}_F", Y, C, {o: pairs[o][0] for o in Y.objects},
                 {m: Y.payload(m)[0] for m in Y.morphisms})
    Fbar = Functor(f"{F.name}_bar", Y, X, {o: pairs[o][1] for o in Y.objects},
                   {m: Y.payload(m)[1] for m in Y.morphisms})
    fib = None
    if isinstance(P, CleavedFibration) or is_fibration(proj):
        parent = cleave(P)
        fib = cleave(PF)
        for o in Y.objects:
            c, x = pairs[o]
            for h in C.into(c):
                k = parent.lift(x, F.mor[h])
                inherited = Y.named(pair_name(C.dom(h), X.dom(k)), o, (h, k))
                if not is_cartesian(PF, inherited):
                    raise NotAFibration("inherited lift is not cartesian", {"morphism": inherited})
    return ChangeOfBase(PF, Fbar, fib)


def fiber_as_change_of_base(P: Fibrationish, I: str) -> ChangeOfBase:
    """The fibre over ``I`` obtained by pulling back along ``I: One → B``."""
    B = _proj(P).target
    one = terminal_category()
    point = Functor(f"pick({I})", one, B, {"pt": I}, {"id:pt": identity_name(I)})
    return change_of_base(P, point)


# ---------------------------------------------------------------------------
# standard fibrations


def codomain_fibration(C: FinCat) -> Functor:
    return build_arrow_category(C).cod_functor


def domain_fibration(C: FinCat) -> Functor:
    return build_arrow_category(C).dom_functor


def projection_fibration(B: FinCat, X: FinCat) -> Functor:
    return product_category(B, X).pi1


def identity_fibration(B: FinCat) -> Functor:
    return identity_functor(B)


def to_terminal(C: FinCat) -> Functor:
    one = terminal_category()
    return Functor(f"!({C.name})", C, one, {a: "pt" for a in C.objects},
                   {f: "id:pt" for f in C.morphisms})


# ---------------------------------------------------------------------------
# fibered functors, transformations, adjunctions


@dataclass(frozen=True, eq=False)
class FiberedFunctor:
    source: Functor
    target: Functor
    functor: Functor


def is_fibered_functor(P: Fibrationish, Q: Fibrationish, F: Functor) -> FiberedFunctor:
    """Check ``Q∘F = P`` on the nose and that ``F`` sends ``P``-cartesian
    morphisms to ``Q``-cartesian ones."""
    P, Q = _proj(P), _proj(Q)
    if F.source != P.source or F.target != Q.source or P.target != Q.target:
        raise ShapeMismatch(f"{F.name} does not run between the totals over a common base", {})
    for f in P.source.morphisms:
        if Q.mor[F.mor[f]] != P.mor[f]:
            raise TriangleViolation(f"Q∘{F.name} differs from P at {f}",
                                    {"morphism": f, "QF": Q.mor[F.mor[f]], "P": P.mor[f]})
    qcart = cartesian_morphisms(Q)
    for f in sorted(cartesian_morphisms(P)):
        if F.mor[f] not in qcart:
            raise CartesianNotPreserved(f"{F.name} sends cartesian {f} to non-cartesian {F.mor[f]}",
                                        {"morphism": f, "image": F.mor[f]})
    return FiberedFunctor(P, Q, F)


def is_fibered_nat_trans(gamma: NatTrans, Q: Fibrationish) -> Certificate:
    """Natural (checked at construction) with ``Q``-vertical components."""
    Q = _proj(Q)
    for a, c in sorted(gamma.components.items()):
        if not is_vertical(Q, c):
            return Certificate("fibered transformation", False,
                               {"object": a, "component": c, "image": Q.mor[c]})
    return Certificate("fibered transformation", True)


@dataclass(frozen=True, eq=False)
class FiberedAdjunction:
    adjunction: Adjunction
    left: FiberedFunctor
    right: FiberedFunctor


def is_fibered_adjunction(
    P: Fibrationish,
    Q: Fibrationish,
    F: Functor,
    G: Functor,
    unit: Mapping[str, str],
    counit: Mapping[str, str],
) -> FiberedAdjunction:
    """``F ⊣ G`` between fibrations over one base with ``P``-vertical unit and
    ``Q``-vertical counit, both functors fibered."""
    left = is_fibered_functor(P, Q, F)
    right = is_fibered_functor(Q, P, G)
    adj = check_adjunction(F, G, unit, counit)
    for a, c in sorted(adj.unit.components.items()):
        if not is_vertical(P, c):
            raise NotVertical(f"unit component at {a} is not vertical", {"object": a, "component": c})
    for a, c in sorted(adj.counit.components.items()):
        if not is_vertical(Q, c):
            raise NotVertical(f"counit component at {a} is not vertical", {"object": a, "component": c})
    return FiberedAdjunction(adj, left, right)


def identity_fibered_adjunction(P: Fibrationish) -> FiberedAdjunction:
    P = _proj(P)
    X = P.source
    ident = identity_functor(X)
    ids = {a: identity_name(a) for a in X.objects}
    return is_fibered_adjunction(P, P, ident, ident, ids, ids)


def morphisms_fibration(P: Fibrationish) -> Functor:
    """``P^→ = P∘cod_P: V(P) → B``."""
    P = _proj(P)
    return compose_functors(vertical_category(P).cod_functor, P)
