"""Pointed fibrations ``(p, P)``, the slice fibration ``P/p`` with its
terminal point, and the functors ``Σ_p``, ``Σ_α`` and ``α*`` between slice
fibrations.

Points are functors ``p: B → X`` with ``P∘p = 1_B``. A point whose images are
all ``P``-cartesian is *fibered*. Some classical points, such as the diagonal
of a product projection, are sections without being fibered, so
:func:`validate_pointed_fibration` can accept them with ``require_fibered=False``.
The slice fibration is well defined for those too.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as cartesian_product
from typing import Iterable, Sequence

from .constructions import build_slice
from .core import (
    DEFAULT_BUDGET,
    Certificate,
    FinCat,
    Functor,
    NatTrans,
    build_category,
    check_equivalence,
    compose_functors,
    enumerate_functors,
    identity_functor,
    identity_name,
    is_isomorphism_functor,
    is_pullback_square,
    is_terminal,
    nat_trans_violation,
    pair_name,
    pullback,
    terminal_category,
)
from .errors import (
    CartesianNotPreserved,
    CategoryError,
    MissingPullback,
    NoFiberedPullbacks,
    NotASection,
    NotVertical,
    PointNotFibered,
    ShapeMismatch,
    TriangleViolation,
)
from .fibration import (
    ChangeOfBase,
    CleavedFibration,
    FiberedAdjunction,
    FiberedFunctor,
    Fibrationish,
    cartesian_morphisms,
    change_of_base,
    cleave,
    fiber_category,
    has_fibered_pullbacks,
    identity_fibration,
    is_fibered_adjunction,
    is_fibered_functor,
    is_vertical,
    to_terminal,
    vertical_category,
)
from .pointed import PointedCat, default_probes


# ---------------------------------------------------------------------------
# pointed fibrations and their morphisms


@dataclass(frozen=True, eq=False)
class PointedFibration:
    fib: CleavedFibration
    point: Functor
    fibered: bool

    @property
    def proj(self) -> Functor:
        return self.fib.proj

    @property
    def total(self) -> FinCat:
        return self.fib.total

    @property
    def base(self) -> FinCat:
        return self.fib.base

    def __repr__(self) -> str:
        return f"PointedFibration({self.point.name}, {self.proj.name})"


def validate_pointed_fibration(P: Fibrationish, p: Functor,
                               require_fibered: bool = True) -> PointedFibration:
    """Check ``P∘p = 1_B`` and, unless relaxed, that every ``p u`` is cartesian."""
    fib = cleave(P)
    proj = fib.proj
    if p.source != fib.base or p.target != fib.total:
        raise ShapeMismatch(f"{p.name} does not run from the base to the total category", {})
    for u in fib.base.morphisms:
        if proj.mor[p.mor[u]] != u:
            raise NotASection(f"P({p.mor[u]}) is not {u}", {"base_morphism": u, "image": p.mor[u]})
    cart = cartesian_morphisms(proj)
    bad = [u for u in fib.base.morphisms if p.mor[u] not in cart]
    if bad and require_fibered:
        raise PointNotFibered(f"the point sends {bad[0]} to a non-cartesian morphism",
                              {"base_morphism": bad[0], "image": p.mor[bad[0]]})
    return PointedFibration(fib, p, not bad)


def point_adjunction(pf: PointedFibration) -> FiberedAdjunction:
    """``P ⊣ p`` over the base, with unit the vertical maps to ``pPx``."""
    P, p = pf.proj, pf.point
    X, B = pf.total, pf.base
    unit = {}
    for x in X.objects:
        target = p.ob[P.ob[x]]
        vs = [h for h in X.hom(x, target) if is_vertical(P, h)]
        if len(vs) != 1:
            raise TriangleViolation(f"no unique vertical map {x} -> {target}",
                                    {"object": x, "candidates": vs})
        unit[x] = vs[0]
    counit = {I: identity_name(I) for I in B.objects}
    return is_fibered_adjunction(P, identity_fibration(B), P, p, unit, counit)


def is_terminally_pointed(pf: PointedFibration, cross_check: bool = True) -> Certificate:
    """``p I`` terminal in every fibre. ``value`` records whether the fibered
    adjunction ``P ⊣ p`` was also found (``None`` when not attempted)."""
    claim = "terminally pointed"
    for I in pf.base.objects:
        if not is_terminal(fiber_category(pf.proj, I), pf.point.ob[I]):
            adj = _try_point_adjunction(pf) if cross_check else None
            return Certificate(claim, False, {"base_object": I, "point": pf.point.ob[I]},
                               {"adjunction": adj})
    adj = _try_point_adjunction(pf) if cross_check else None
    return Certificate(claim, True, value={"adjunction": adj})


def _try_point_adjunction(pf: PointedFibration) -> bool:
    try:
        point_adjunction(pf)
    except CategoryError:
        return False
    return True


def _check_vertical_components(alpha: NatTrans, Q: Functor) -> None:
    for a, c in sorted(alpha.components.items()):
        if not is_vertical(Q, c):
            raise NotVertical(f"component {c} at {a} is not vertical", {"object": a, "component": c})


@dataclass(frozen=True, eq=False)
class PtdFibMor:
    """``(F, α): (p, P) → (q, Q)`` with ``α: F∘p ⇒ q`` vertical."""

    source: PointedFibration
    target: PointedFibration
    functor: FiberedFunctor
    comparison: NatTrans

    def __post_init__(self):
        F = self.functor.functor
        if self.comparison.source != compose_functors(self.source.point, F):
            raise ShapeMismatch("comparison does not start at F∘p", {})
        if self.comparison.target != self.target.point:
            raise ShapeMismatch("comparison does not end at q", {})
        _check_vertical_components(self.comparison, self.target.proj)


def ptdfib_mor(source: PointedFibration, target: PointedFibration, F: Functor,
               components: dict[str, str]) -> PtdFibMor:
    fF = is_fibered_functor(source.proj, target.proj, F)
    alpha = NatTrans("alpha", compose_functors(source.point, F), target.point, components)
    return PtdFibMor(source, target, fF, alpha)


def identity_ptdfib(pf: PointedFibration) -> PtdFibMor:
    return ptdfib_mor(pf, pf, identity_functor(pf.total),
                      {I: identity_name(pf.point.ob[I]) for I in pf.base.objects})


def compose_ptdfib(first: PtdFibMor, second: PtdFibMor) -> PtdFibMor:
    """``(G, β)∘(F, α) = (GF, β∘Gα)``."""
    if first.target.proj != second.source.proj or first.target.point != second.source.point:
        raise ShapeMismatch("pointed fibration morphisms are not composable", {})
    G = second.functor.functor
    Z = second.target.total
    comps = {I: Z.compose(G.mor[first.comparison[I]], second.comparison[I])
             for I in first.source.base.objects}
    return ptdfib_mor(first.source, second.target,
                      compose_functors(first.functor.functor, G), comps)


def check_ptdfib_2cell(gamma: NatTrans, mor1: PtdFibMor, mor2: PtdFibMor) -> Certificate:
    """``β_I ∘ γ_{pI} = α_I`` for every ``I``, with ``γ`` vertical."""
    claim = "2-cell of pointed fibrations"
    Q = mor1.target.proj
    if gamma.source != mor1.functor.functor or gamma.target != mor2.functor.functor:
        return Certificate(claim, False, {"reason": "wrong endpoints"})
    for a, c in sorted(gamma.components.items()):
        if not is_vertical(Q, c):
            return Certificate(claim, False, {"reason": "component not vertical", "object": a})
    Y = mor1.target.total
    p = mor1.source.point
    for I in mor1.source.base.objects:
        got = Y.compose(gamma[p.ob[I]], mor2.comparison[I])
        if got != mor1.comparison[I]:
            return Certificate(claim, False, {"base_object": I, "expected": mor1.comparison[I],
                                              "got": got})
    return Certificate(claim, True)


def check_pullback_square_property(mor: PtdFibMor, u: str) -> Certificate:
    """Is the square ``(α_I, F p u, q u, α_J)`` a pullback in the target total?"""
    F = mor.functor.functor
    p, q = mor.source.point, mor.target.point
    I, J = mor.source.base.ends(u)
    alpha = mor.comparison
    return is_pullback_square(mor.target.total, alpha[J], q.mor[u], F.mor[p.mor[u]], alpha[I])


# ---------------------------------------------------------------------------
# change of base


def change_of_base_pointed(pf: PointedFibration, F: Functor) -> tuple[PointedFibration, ChangeOfBase]:
    """Pull ``(p, P)`` back along ``F``; the new point is ``c ↦ (c, pFc)``."""
    cb = change_of_base(pf.fib, F)
    p = pf.point
    C = F.source
    ob = {c: pair_name(c, p.ob[F.ob[c]]) for c in C.objects}
    mor = {h: cb.morphism(h, p.mor[F.mor[h]]) for h in C.morphisms}
    pF = Functor(f"{p.name}_F", C, cb.total, ob, mor)
    return validate_pointed_fibration(cb.fibration, pF, require_fibered=pf.fibered), cb


# ---------------------------------------------------------------------------
# the slice fibration


@dataclass(frozen=True, eq=False)
class SliceFibration:
    """``P/p`` on pairs ``(I, x: X → pI)`` with ``x`` vertical."""

    source: PointedFibration
    result: CleavedFibration
    overline: Functor
    terminal_point: PointedFibration
    change_of_base: ChangeOfBase
    comparison: Functor
    morphisms_fibration: Functor
    cod_fibered: FiberedFunctor

    @property
    def total(self) -> FinCat:
        return self.result.total

    @property
    def proj(self) -> Functor:
        return self.result.proj

    def object(self, I: str, x: str) -> str:
        return pair_name(I, x)

    def morphism(self, u: str, h: str) -> str:
        return next(m for m in self.total.morphisms if self.total.payload(m) == (u, h))


def _slice_total(pf: PointedFibration) -> tuple[FinCat, dict[str, tuple[str, str]]]:
    P, p = pf.proj, pf.point
    X, B = pf.total, pf.base
    objects = [(I, x) for I in B.objects for x in X.into(p.ob[I]) if is_vertical(P, x)]
    by_base = {}
    for I, x in objects:
        by_base.setdefault(I, []).append(x)
    arrows = []
    for u in B.morphisms:
        I, J = B.ends(u)
        pu = p.mor[u]
        for x in by_base.get(I, ()):
            xpu = X.compose(x, pu)
            for y in by_base.get(J, ()):
                for h in X.hom(X.dom(x), X.dom(y)):
                    if X.compose(h, y) == xpu:
                        arrows.append((pair_name(I, x), pair_name(J, y), (u, h)))
    names = {pair_name(I, x): (I, x) for I, x in objects}
    Y = build_category(
        f"sl({X.name},{p.name})",
        names,
        arrows,
        compose=lambda a, b: (B.compose(a[0], b[0]), X.compose(a[1], b[1])),
        label=lambda a: pair_name(*a),
        identity=lambda o: (identity_name(names[o][0]), identity_name(X.dom(names[o][1]))),
        componentwise=True,
    )
    return Y, names


def slice_fibration(pf: PointedFibration) -> SliceFibration:
    """Build ``P/p`` directly and certify it against the change of base of
    ``cod_P`` along ``p``; add its terminal point and the fibration of
    morphisms ``P∘cod_P``."""
    fib_check = has_fibered_pullbacks(pf.fib)
    if not fib_check:
        raise NoFiberedPullbacks(f"{pf.proj.name} lacks fibered pullbacks", fib_check.witness)
    P, p = pf.proj, pf.point
    B = pf.base
    V = vertical_category(P)
    codP = cleave(V.cod_functor)
    cb = change_of_base(codP, p)

    Y, names = _slice_total(pf)
    first = {o: I for o, (I, _) in names.items()}
    second = {o: x for o, (_, x) in names.items()}
    proj = Functor(f"{P.name}/{p.name}", Y, B, first, {m: Y.payload(m)[0] for m in Y.morphisms})
    over_mor = {}
    for m in Y.morphisms:
        u, h = Y.payload(m)
        a, b = Y.ends(m)
        over_mor[m] = V.square(second[a], h, p.mor[u], second[b])
    overline = Functor(f"{p.name}_bar", Y, V.carrier, second, over_mor)

    comparison = Functor(
        "direct_to_pullback", Y, cb.total, {o: o for o in Y.objects},
        {m: cb.morphism(Y.payload(m)[0], over_mor[m]) for m in Y.morphisms},
    )
    iso = is_isomorphism_functor(comparison)
    if not iso:
        raise ShapeMismatch("direct slice fibration disagrees with the change of base", iso.witness)
    if compose_functors(comparison, cb.projection) != proj:
        raise TriangleViolation("comparison does not commute with the projections", {})

    result = cleave(proj)
    term = Functor(
        f"top({p.name})", B, Y,
        {I: pair_name(I, identity_name(p.ob[I])) for I in B.objects},
        {u: Y.named(pair_name(B.dom(u), identity_name(p.ob[B.dom(u)])),
                    pair_name(B.cod(u), identity_name(p.ob[B.cod(u)])),
                    (u, p.mor[u]))
         for u in B.morphisms},
    )
    terminal_point = validate_pointed_fibration(result, term)
    tp = is_terminally_pointed(terminal_point)
    if not tp or not tp.value["adjunction"]:
        raise TriangleViolation("terminal point is not right adjoint to the projection", tp.witness)

    arrows = compose_functors(V.cod_functor, P)
    cod_fibered = is_fibered_functor(arrows, P, V.cod_functor)
    return SliceFibration(pf, result, overline, terminal_point, cb, comparison, arrows, cod_fibered)


def slice_total_parts(sf: SliceFibration, obj: str) -> tuple[str, str]:
    """``(I, x)`` for an object of the slice total."""
    return sf.proj.ob[obj], sf.overline.ob[obj]


def cartesian_iff_pullback(sf: SliceFibration) -> Certificate:
    """A morphism ``(u, h)`` is cartesian exactly when its square is a pullback."""
    X = sf.source.total
    p = sf.source.point
    cart = cartesian_morphisms(sf.proj)
    Y = sf.total
    for m in Y.morphisms:
        u, h = Y.payload(m)
        a, b = Y.ends(m)
        x, y = sf.overline.ob[a], sf.overline.ob[b]
        is_pb = bool(is_pullback_square(X, y, p.mor[u], h, x))
        if is_pb != (m in cart):
            return Certificate("cartesian iff pullback", False,
                               {"morphism": m, "cartesian": m in cart, "pullback": is_pb})
    return Certificate("cartesian iff pullback", True, value=len(Y.morphisms))


def slice_fiber_equiv(sf: SliceFibration, I: str) -> Certificate:
    """``(P/p)_I ≃ P_I / pI`` via ``(I, x) ↦ x``."""
    Fi = fiber_category(sf.proj, I)
    PI = fiber_category(sf.source.proj, I)
    S = build_slice(PI, sf.source.point.ob[I])
    ob = {o: sf.overline.ob[o] for o in Fi.objects}
    mor = {}
    for m in Fi.morphisms:
        a, b = Fi.ends(m)
        mor[m] = S.morphism(ob[a], sf.total.payload(m)[1], ob[b])
    F = Functor(f"fiber_slice({I})", Fi, S.carrier, ob, mor)
    return check_equivalence(F)


def forgetful_sigma_p(sf: SliceFibration) -> FiberedFunctor:
    """``Σ_p: P/p → P``, ``(I, x) ↦ dom x``."""
    X = sf.source.total
    Y = sf.total
    F = Functor(f"Sigma({sf.source.point.name})", Y, X,
                {o: X.dom(sf.overline.ob[o]) for o in Y.objects},
                {m: Y.payload(m)[1] for m in Y.morphisms})
    return is_fibered_functor(sf.proj, sf.source.proj, F)


# ---------------------------------------------------------------------------
# point comparisons: Σ_α ⊣ α*


def point_comparison(p: PointedFibration, q: PointedFibration, components: dict[str, str],
                     name: str = "alpha") -> NatTrans:
    """A natural ``p ⇒ q`` with vertical components (both points on one fibration)."""
    if p.proj != q.proj:
        raise ShapeMismatch("points live on different fibrations", {})
    alpha = NatTrans(name, p.point, q.point, components)
    _check_vertical_components(alpha, p.proj)
    return alpha


def _unique(candidates: Sequence[str], what: str, witness: dict) -> str:
    if len(candidates) != 1:
        raise MissingPullback(f"{what}: {len(candidates)} candidates", {**witness, "candidates": list(candidates)})
    return candidates[0]


def sigma_alpha(alpha: NatTrans, sfp: SliceFibration, sfq: SliceFibration) -> FiberedFunctor:
    """``Σ_α: P/p → P/q``, ``(I, x) ↦ (I, α_I∘x)``."""
    X = sfp.source.total
    Yp, Yq = sfp.total, sfq.total
    ob = {}
    for o in Yp.objects:
        I, x = slice_total_parts(sfp, o)
        ob[o] = pair_name(I, X.compose(x, alpha[I]))
    mor = {m: Yq.named(ob[Yp.dom(m)], ob[Yp.cod(m)], Yp.payload(m)) for m in Yp.morphisms}
    F = Functor(f"Sigma({alpha.name})", Yp, Yq, ob, mor)
    return is_fibered_functor(sfp.proj, sfq.proj, F)


def _alpha_pullbacks(alpha: NatTrans, sfp: SliceFibration, sfq: SliceFibration) -> dict:
    """For each ``(I, x)`` of ``P/q``: the fibre pullback of ``x`` along ``α_I``."""
    P = sfp.source.proj
    out = {}
    for o in sfq.total.objects:
        I, x = slice_total_parts(sfq, o)
        pb = pullback(fiber_category(P, I), x, alpha[I])
        if pb is None:
            raise MissingPullback(f"no fibre pullback of {x} along {alpha[I]}",
                                  {"base_object": I, "f": x, "g": alpha[I]})
        out[o] = pb
    return out


def alpha_star(alpha: NatTrans, sfp: SliceFibration, sfq: SliceFibration) -> FiberedFunctor:
    """``α*: P/q → P/p`` by fibre pullback along ``α_I``; morphisms by mediation."""
    X = sfp.source.total
    p = sfp.source.point
    Yq, Yp = sfq.total, sfp.total
    pbs = _alpha_pullbacks(alpha, sfp, sfq)
    ob = {o: pair_name(sfq.proj.ob[o], pbs[o].p2) for o in Yq.objects}
    mor = {}
    for m in Yq.morphisms:
        u, h = Yq.payload(m)
        a, b = Yq.ends(m)
        pa, pb = pbs[a], pbs[b]
        want_bottom = X.compose(pa.p2, p.mor[u])
        want_top = X.compose(pa.p1, h)
        k = _unique([k for k in X.hom(pa.apex, pb.apex)
                     if X.compose(k, pb.p2) == want_bottom and X.compose(k, pb.p1) == want_top],
                    "mediating morphism", {"morphism": m})
        mor[m] = Yp.named(ob[a], ob[b], (u, k))
    F = Functor(f"{alpha.name}*", Yq, Yp, ob, mor)
    return is_fibered_functor(sfq.proj, sfp.proj, F)


def fibered_adjunction_sigma_alpha(alpha: NatTrans, sfp: SliceFibration,
                                   sfq: SliceFibration) -> FiberedAdjunction:
    """``Σ_α ⊣ α*`` with unit ``(1, ⟨1, x⟩)`` and counit the pullback legs."""
    X = sfp.source.total
    left = sigma_alpha(alpha, sfp, sfq).functor
    right = alpha_star(alpha, sfp, sfq).functor
    pbs = _alpha_pullbacks(alpha, sfp, sfq)
    Yp, Yq = sfp.total, sfq.total
    unit = {}
    for o in Yp.objects:
        I, x = slice_total_parts(sfp, o)
        pb = pbs[left.ob[o]]
        d = X.dom(x)
        k = _unique([k for k in X.hom(d, pb.apex)
                     if X.compose(k, pb.p1) == identity_name(d) and X.compose(k, pb.p2) == x],
                    "unit component", {"object": o})
        unit[o] = Yp.named(o, right.ob[left.ob[o]], (identity_name(I), k))
    counit = {}
    for o in Yq.objects:
        I = sfq.proj.ob[o]
        counit[o] = Yq.named(left.ob[right.ob[o]], o, (identity_name(I), pbs[o].p1))
    return is_fibered_adjunction(sfp.proj, sfq.proj, left, right, unit, counit)


# ---------------------------------------------------------------------------
# the fiberwise universal arrow


def pointed_over_one(P: PointedCat) -> PointedFibration:
    """A pointed category as a pointed fibration over the terminal category."""
    one = terminal_category()
    point = Functor(f"pick({P.point})", one, P.carrier, {"pt": P.point},
                    {"id:pt": identity_name(P.point)})
    return validate_pointed_fibration(to_terminal(P.carrier), point)


def identity_pointed(B: FinCat) -> PointedFibration:
    return validate_pointed_fibration(identity_fibration(B), identity_functor(B))


def ptdfib_morphisms(source: PointedFibration, target: PointedFibration,
                     budget: int = DEFAULT_BUDGET) -> list[PtdFibMor]:
    """Every pointed-fibration morphism ``source → target``, by enumeration."""
    T, Q = source.proj, target.proj
    Z, X = source.total, target.total
    out = []
    functors = enumerate_functors(
        Z, X,
        ob_candidates=lambda z: [x for x in X.objects if Q.ob[x] == T.ob[z]],
        mor_candidates=lambda k: (lambda m: Q.mor[m] == T.mor[k]),
        budget=budget,
    )
    qcart = cartesian_morphisms(Q)
    for F in functors:
        if any(F.mor[f] not in qcart for f in cartesian_morphisms(T)):
            continue
        base = sorted(source.base.objects)
        options = [[c for c in X.hom(F.ob[source.point.ob[I]], target.point.ob[I]) if is_vertical(Q, c)]
                   for I in base]
        Fp = compose_functors(source.point, F)
        for choice in cartesian_product(*options):
            comps = dict(zip(base, choice))
            alpha = NatTrans("alpha", Fp, target.point, comps, check=False)
            if nat_trans_violation(alpha) is None:
                out.append(PtdFibMor(source, target, FiberedFunctor(T, Q, F), alpha))
    return out


def universal_ptdfib_arrow(sf: SliceFibration) -> PtdFibMor:
    """``(Σ_q, 1_q): (1_{q•}, Q/q) → (q, Q)``."""
    q = sf.source
    sigma = forgetful_sigma_p(sf)
    return ptdfib_mor(sf.terminal_point, q, sigma.functor,
                      {I: identity_name(q.point.ob[I]) for I in q.base.objects})


def fiberwise_factorization(sf: SliceFibration, test: PtdFibMor) -> PtdFibMor:
    """For ``(F, α): (t, T) → (q, Q)`` with ``(t, T)`` terminally pointed:
    ``z ↦ (Tz, α_{Tz}∘F(!_z))`` where ``!_z`` is the vertical map to ``t(Tz)``."""
    src = test.source
    T, t = src.proj, src.point
    Z = src.total
    X = sf.source.total
    F, alpha = test.functor.functor, test.comparison
    Y = sf.total
    ob = {}
    for z in Z.objects:
        I = T.ob[z]
        bang = [h for h in Z.hom(z, t.ob[I]) if is_vertical(T, h)]
        bang = _unique(bang, "vertical map to the point", {"object": z})
        ob[z] = pair_name(I, X.compose(F.mor[bang], alpha[I]))
    mor = {k: Y.named(ob[Z.dom(k)], ob[Z.cod(k)], (T.mor[k], F.mor[k])) for k in Z.morphisms}
    Fbar = Functor(f"{F.name}_bar", Z, Y, ob, mor)
    comps = {}
    for I in src.base.objects:
        top = sf.terminal_point.point.ob[I]
        comps[I] = Y.named(ob[t.ob[I]], top, (identity_name(I), alpha[I]))
    return ptdfib_mor(src, sf.terminal_point, Fbar, comps)


def count_fiberwise_factorizations(sf: SliceFibration, test: PtdFibMor,
                                   budget: int = DEFAULT_BUDGET) -> int:
    """Pointed morphisms ``(t, T) → (1_{q•}, Q/q)`` composing to ``test``."""
    src = test.source
    T = src.proj
    Z = src.total
    F, alpha = test.functor.functor, test.comparison
    Y = sf.total
    top = sf.terminal_point
    ycart = cartesian_morphisms(sf.proj)
    count = 0
    functors = enumerate_functors(
        Z, Y,
        ob_candidates=lambda z: [y for y in Y.objects
                                 if sf.proj.ob[y] == T.ob[z] and sf.source.total.dom(sf.overline.ob[y]) == F.ob[z]],
        mor_candidates=lambda k: (lambda m: Y.payload(m) == (T.mor[k], F.mor[k])),
        budget=budget,
    )
    for G in functors:
        if any(G.mor[f] not in ycart for f in cartesian_morphisms(T)):
            continue
        total = 1
        for I in src.base.objects:
            total *= sum(1 for m in Y.hom(G.ob[src.point.ob[I]], top.point.ob[I])
                         if Y.payload(m) == (identity_name(I), alpha[I]))
        count += total
    return count


def default_fiberwise_probes(qf: PointedFibration) -> list[PointedFibration]:
    """Over the terminal base the pointed-category probes; otherwise the
    identity fibration and ``B × Two`` pointed at ``b``."""
    B = qf.base
    if len(B.morphisms) == 1:
        return [pointed_over_one(P) for P in default_probes()]
    from .fixtures import projection_pointed, two

    return [identity_pointed(B), projection_pointed(B, two(), "b")]


def verify_fiberwise_universal_arrow(
    qf: PointedFibration,
    tests: Sequence[PtdFibMor] | None = None,
    probes: Iterable[PointedFibration] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> Certificate:
    """Universality of ``(Σ_q, 1_q)`` against every test morphism from a
    terminally pointed probe. ``value`` lists ``(test, count)`` pairs."""
    sf = slice_fibration(qf)
    if tests is None:
        if probes is None:
            probes = default_fiberwise_probes(qf)
        tests = []
        for probe in probes:
            if not is_terminally_pointed(probe, cross_check=False):
                raise ShapeMismatch("probe is not terminally pointed", {"probe": probe.proj.name})
            tests.extend(ptdfib_morphisms(probe, qf, budget))
    universal = universal_ptdfib_arrow(sf)
    reports = []
    for i, test in enumerate(tests):
        fac = fiberwise_factorization(sf, test)
        composite = compose_ptdfib(fac, universal)
        if composite.functor.functor != test.functor.functor or composite.comparison != test.comparison:
            return Certificate("fiberwise universal arrow", False,
                               {"error": "FactorizationFailure", "test": i}, reports)
        n = count_fiberwise_factorizations(sf, test, budget)
        reports.append((test, n))
        if n != 1:
            return Certificate("fiberwise universal arrow", False,
                               {"error": "NonUniqueFactorization", "test": i, "factorizations": n},
                               reports)
    return Certificate("fiberwise universal arrow", True, {"tests": len(reports)}, reports)


# ---------------------------------------------------------------------------
# morphisms across bases


@dataclass(frozen=True, eq=False)
class CrossBaseMor:
    """``((H, K), α)``: ``Q∘H = K∘P``, ``H`` cartesian-preserving and
    ``α: H∘p ⇒ q∘K`` with ``Q``-vertical components."""

    source: PointedFibration
    target: PointedFibration
    total_functor: Functor
    base_functor: Functor
    comparison: NatTrans


def cross_base_morphism(source: PointedFibration, target: PointedFibration,
                        H: Functor, K: Functor, components: dict[str, str]) -> CrossBaseMor:
    P, Q = source.proj, target.proj
    if compose_functors(H, Q) != compose_functors(P, K):
        bad = next(f for f in P.source.morphisms if Q.mor[H.mor[f]] != K.mor[P.mor[f]])
        raise TriangleViolation("Q∘H differs from K∘P", {"morphism": bad})
    qcart = cartesian_morphisms(Q)
    for f in sorted(cartesian_morphisms(P)):
        if H.mor[f] not in qcart:
            raise CartesianNotPreserved(f"{H.name} breaks cartesianness of {f}", {"morphism": f})
    alpha = NatTrans("alpha", compose_functors(source.point, H),
                     compose_functors(K, target.point), components)
    _check_vertical_components(alpha, Q)
    return CrossBaseMor(source, target, H, K, alpha)


def compose_cross_base(first: CrossBaseMor, second: CrossBaseMor) -> CrossBaseMor:
    """Component at ``I``: ``β_{KI} ∘ H'(α_I)``."""
    if first.target.proj != second.source.proj or first.target.point != second.source.point:
        raise ShapeMismatch("cross-base morphisms are not composable", {})
    H2, K = second.total_functor, first.base_functor
    Z = second.target.total
    comps = {I: Z.compose(H2.mor[first.comparison[I]], second.comparison[K.ob[I]])
             for I in first.source.base.objects}
    return cross_base_morphism(first.source, second.target,
                               compose_functors(first.total_functor, H2),
                               compose_functors(K, second.base_functor), comps)
