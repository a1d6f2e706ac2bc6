"""Slice, coslice and arrow categories and the functors between slices.

Slice objects are named after the base morphism they are (``x`` for
``x: X → A``); slice morphisms after their underlying base morphism, qualified
with endpoints only when that name is ambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .core import (
    Certificate,
    FinCat,
    Functor,
    NatTrans,
    build_category,
    check_equivalence,
    compose_functors,
    identity_functor,
    identity_name,
    is_terminal,
    pullback,
    terminal_object,
)
from .errors import (
    MissingPullback,
    NoTerminalObject,
    ShapeMismatch,
    TriangleIdentityViolation,
)


@dataclass(frozen=True, eq=False)
class SliceCat:
    base: FinCat
    over: str
    carrier: FinCat
    projection: Functor

    def morphism(self, x: str, g: str, y: str) -> str:
        """Name of the slice morphism ``x → y`` whose underlying morphism is ``g``."""
        return self.carrier.named(x, y, g)


@dataclass(frozen=True, eq=False)
class ArrowCat:
    base: FinCat
    carrier: FinCat
    dom_functor: Functor
    cod_functor: Functor

    def square(self, x: str, top: str, bottom: str, y: str) -> str:
        return self.carrier.named(x, y, (top, bottom))


@dataclass(frozen=True, eq=False)
class Adjunction:
    left: Functor
    right: Functor
    unit: NatTrans
    counit: NatTrans


def build_slice(C: FinCat, A: str) -> SliceCat:
    C.require_object(A)
    key = ("slice", A)
    if key in C._memo:
        return C._memo[key]
    objects = C.into(A)
    arrows = [
        (x, y, g)
        for x in objects
        for y in objects
        for g in C.hom(C.dom(x), C.dom(y))
        if C.compose(g, y) == x
    ]
    carrier = build_category(
        f"{C.name}/{A}",
        objects,
        arrows,
        compose=C.compose,
        label=lambda g: g,
        identity=lambda x: identity_name(C.dom(x)),
        componentwise=True,
    )
    projection = Functor(
        f"Sigma({A})",
        carrier,
        C,
        {x: C.dom(x) for x in objects},
        {m: carrier.payload(m) for m in carrier.morphisms},
    )
    result = C._memo[key] = SliceCat(C, A, carrier, projection)
    return result


def build_opslice(C: FinCat, I: str) -> SliceCat:
    """The coslice ``I\\C``: objects are morphisms out of ``I``."""
    C.require_object(I)
    key = ("opslice", I)
    if key in C._memo:
        return C._memo[key]
    objects = C.out_of(I)
    arrows = [
        (x, y, g)
        for x in objects
        for y in objects
        for g in C.hom(C.cod(x), C.cod(y))
        if C.compose(x, g) == y
    ]
    carrier = build_category(
        f"coslice({C.name},{I})",
        objects,
        arrows,
        compose=C.compose,
        label=lambda g: g,
        identity=lambda x: identity_name(C.cod(x)),
        componentwise=True,
    )
    projection = Functor(
        f"cod({I})",
        carrier,
        C,
        {x: C.cod(x) for x in objects},
        {m: carrier.payload(m) for m in carrier.morphisms},
    )
    result = C._memo[key] = SliceCat(C, I, carrier, projection)
    return result


def _square_label(p) -> str:
    return f"({p[0]},{p[1]})"


def build_arrow_category(C: FinCat) -> ArrowCat:
    """Objects are all morphisms of ``C``; morphisms are commuting squares
    ``(top, bottom)`` with ``y∘top = bottom∘x``."""
    if "arrow" in C._memo:
        return C._memo["arrow"]
    arrows = []
    for x in C.morphisms:
        a, b = C.ends(x)
        for y in C.morphisms:
            c, d = C.ends(y)
            for top in C.hom(a, c):
                ty = C.compose(top, y)
                for bottom in C.hom(b, d):
                    if C.compose(x, bottom) == ty:
                        arrows.append((x, y, (top, bottom)))
    carrier = build_category(
        f"arr({C.name})",
        C.morphisms,
        arrows,
        compose=lambda p, q: (C.compose(p[0], q[0]), C.compose(p[1], q[1])),
        label=_square_label,
        identity=lambda x: (identity_name(C.dom(x)), identity_name(C.cod(x))),
        componentwise=True,
    )
    dom = Functor(f"dom({C.name})", carrier, C, {x: C.dom(x) for x in C.morphisms},
                  {m: carrier.payload(m)[0] for m in carrier.morphisms})
    cod = Functor(f"cod({C.name})", carrier, C, {x: C.cod(x) for x in C.morphisms},
                  {m: carrier.payload(m)[1] for m in carrier.morphisms})
    result = C._memo["arrow"] = ArrowCat(C, carrier, dom, cod)
    return result


def sigma_f(C: FinCat, f: str) -> Functor:
    """Post-composition with ``f: A → B`` as a functor ``C/A → C/B``."""
    A, B = C.ends(f)
    SA, SB = build_slice(C, A), build_slice(C, B)
    ob = {x: C.compose(x, f) for x in SA.carrier.objects}
    mor = {}
    for m in SA.carrier.morphisms:
        x, y = SA.carrier.ends(m)
        mor[m] = SB.morphism(ob[x], SA.carrier.payload(m), ob[y])
    return Functor(f"Sigma({f})", SA.carrier, SB.carrier, ob, mor)


def reindex(C: FinCat, f: str) -> Functor:
    """Pullback along ``f: A → B`` as a functor ``C/B → C/A``, using the
    canonical pullback of each ``y`` against ``f``."""
    A, B = C.ends(f)
    SA, SB = build_slice(C, A), build_slice(C, B)
    pbs = {}
    for y in SB.carrier.objects:
        pb = pullback(C, y, f)
        if pb is None:
            raise MissingPullback(f"no pullback of {y} along {f}", {"f": y, "g": f})
        pbs[y] = pb
    ob = {y: pb.p2 for y, pb in pbs.items()}
    mor = {}
    for m in SB.carrier.morphisms:
        y, y2 = SB.carrier.ends(m)
        g = SB.carrier.payload(m)
        src, tgt = pbs[y], pbs[y2]
        med = tgt.mediate(C.compose(src.p1, g), src.p2, C)
        mor[m] = SA.morphism(src.p2, med, tgt.p2)
    return Functor(f"reindex({f})", SB.carrier, SA.carrier, ob, mor)


def check_adjunction(
    left: Functor,
    right: Functor,
    unit: Mapping[str, str],
    counit: Mapping[str, str],
) -> Adjunction:
    """Validate ``left ⊣ right`` from raw unit/counit components.

    Raises :class:`TriangleIdentityViolation` naming the failing object.
    """
    C, D = left.source, left.target
    if right.source != D or right.target != C:
        raise ShapeMismatch(f"{left.name} and {right.name} are not opposed", {})
    eta = NatTrans("unit", identity_functor(C), compose_functors(left, right), unit)
    eps = NatTrans("counit", compose_functors(right, left), identity_functor(D), counit)
    for c in C.objects:
        fc = left.ob[c]
        if D.compose(left.mor[eta[c]], eps[fc]) != identity_name(fc):
            raise TriangleIdentityViolation(
                f"(counit F)∘(F unit) is not the identity at {c}",
                {"object": c, "F_unit": left.mor[eta[c]], "counit": eps[fc]},
            )
    for d in D.objects:
        gd = right.ob[d]
        if C.compose(eta[gd], right.mor[eps[d]]) != identity_name(gd):
            raise TriangleIdentityViolation(
                f"(G counit)∘(unit G) is not the identity at {d}",
                {"object": d, "unit": eta[gd], "G_counit": right.mor[eps[d]]},
            )
    return Adjunction(left, right, eta, eps)


def adjunction_sigma_reindex(C: FinCat, f: str) -> Adjunction:
    """Post-composition with ``f`` is left adjoint to pullback along ``f``."""
    A, B = C.ends(f)
    SA, SB = build_slice(C, A), build_slice(C, B)
    left, right = sigma_f(C, f), reindex(C, f)
    unit = {}
    for x in SA.carrier.objects:
        pb = pullback(C, C.compose(x, f), f)
        med = pb.mediate(identity_name(C.dom(x)), x, C)
        unit[x] = SA.morphism(x, med, pb.p2)
    counit = {}
    for y in SB.carrier.objects:
        pb = pullback(C, y, f)
        counit[y] = SB.morphism(C.compose(pb.p2, f), pb.p1, y)
    return check_adjunction(left, right, unit, counit)


def slice_of_slice_iso(C: FinCat, f: str) -> tuple[Functor, Functor]:
    """The comparison ``(C/B)/f ⇄ C/A`` for ``f: A → B``, both directions.

    Raises if either composite fails to be the identity functor.
    """
    A, B = C.ends(f)
    SB = build_slice(C, B)
    SS = build_slice(SB.carrier, f)
    SA = build_slice(C, A)
    outer, inner = SS.carrier, SB.carrier

    fwd_ob = {s: inner.payload(s) for s in outer.objects}
    fwd_mor = {}
    for m in outer.morphisms:
        s, t = outer.ends(m)
        fwd_mor[m] = SA.morphism(fwd_ob[s], inner.payload(outer.payload(m)), fwd_ob[t])
    forward = Functor(f"cmp({f})", outer, SA.carrier, fwd_ob, fwd_mor)

    back_ob = {g: SB.morphism(C.compose(g, f), g, f) for g in SA.carrier.objects}
    back_mor = {}
    for m in SA.carrier.morphisms:
        g, g2 = SA.carrier.ends(m)
        h = SB.morphism(C.compose(g, f), SA.carrier.payload(m), C.compose(g2, f))
        back_mor[m] = SS.morphism(back_ob[g], h, back_ob[g2])
    backward = Functor(f"inv(cmp({f}))", SA.carrier, outer, back_ob, back_mor)

    if compose_functors(forward, backward) != identity_functor(outer):
        raise ShapeMismatch("slice-of-slice comparison is not invertible", {"morphism": f})
    if compose_functors(backward, forward) != identity_functor(SA.carrier):
        raise ShapeMismatch("slice-of-slice comparison is not invertible", {"morphism": f})
    return forward, backward


def slice_terminal_equiv(C: FinCat) -> tuple[Functor, Certificate]:
    """The domain projection ``C/1 → C`` together with its equivalence check."""
    one = terminal_object(C)
    if one is None:
        raise NoTerminalObject(f"{C.name} has no terminal object", {"category": C.name})
    proj = build_slice(C, one).projection
    return proj, check_equivalence(proj)


def terminal_slice_section(D: FinCat, one: str | None = None) -> Functor:
    """``D → D/1`` sending ``X`` to its unique map into the terminal object."""
    one = terminal_object(D) if one is None else one
    if one is None or not is_terminal(D, one):
        raise NoTerminalObject(f"{D.name} has no terminal object", {"category": D.name})
    S = build_slice(D, one)
    bang = {X: D.hom(X, one)[0] for X in D.objects}
    mor = {g: S.morphism(bang[D.dom(g)], g, bang[D.cod(g)]) for g in D.morphisms}
    return Functor(f"bang({D.name})", D, S.carrier, bang, mor)


def slice_functor(F: Functor, A: str) -> Functor:
    """``F/A: C/A → D/FA``."""
    C, D = F.source, F.target
    S, T = build_slice(C, A), build_slice(D, F.ob[A])
    ob = {x: F.mor[x] for x in S.carrier.objects}
    mor = {}
    for m in S.carrier.morphisms:
        x, y = S.carrier.ends(m)
        mor[m] = T.morphism(ob[x], F.mor[S.carrier.payload(m)], ob[y])
    return Functor(f"{F.name}/{A}", S.carrier, T.carrier, ob, mor)


def reindex_comparison(C: FinCat, f: str, g: str) -> NatTrans:
    """The canonical comparison ``f*∘g* ⇒ (g∘f)*`` for ``f: A → B`` and
    ``g: B → B'``: at ``z`` it is the mediating morphism into the pullback of
    ``z`` along ``g∘f``. Validated as natural; each component is an iso."""
    A = C.dom(f)
    SA = build_slice(C, A)
    gf = C.compose(f, g)
    two_step = compose_functors(reindex(C, g), reindex(C, f))
    one_step = reindex(C, gf)
    comps = {}
    for z in two_step.source.objects:
        outer = pullback(C, z, g)
        inner = pullback(C, outer.p2, f)
        target = pullback(C, z, gf)
        med = target.mediate(C.compose(inner.p1, outer.p1), inner.p2, C)
        comps[z] = SA.morphism(inner.p2, med, target.p2)
        if not SA.carrier.is_iso(comps[z]):
            raise ShapeMismatch(f"comparison at {z} is not invertible", {"object": z})
    return NatTrans(f"cmp({f},{g})", two_step, one_step, comps)
