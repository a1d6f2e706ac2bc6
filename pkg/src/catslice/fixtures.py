"""The standard small categories used by the tests, demos and CLI probes."""

from __future__ import annotations

from .core import FinCat, Presentation, product_category, validate_category


def one() -> FinCat:
    return validate_category(Presentation("One", ("pt",)))


def two() -> FinCat:
    """The walking arrow ``f: a → b``."""
    return validate_category(Presentation("Two", ("a", "b"), (("f", "a", "b"),)))


def cospan() -> FinCat:
    """``x → c ← y``; has no pullback of its own cospan."""
    return validate_category(
        Presentation("Cospan", ("c", "x", "y"), (("f", "x", "c"), ("g", "y", "c")))
    )


def span() -> FinCat:
    return validate_category(
        Presentation("Span", ("s", "x", "y"), (("f", "s", "x"), ("g", "s", "y")))
    )


def discrete2() -> FinCat:
    return validate_category(Presentation("Disc2", ("p", "q")))


def pset() -> FinCat:
    """Subsets of {1,2} under inclusion. ``0`` is the empty set, ``12`` the full one."""
    return thin_category(
        "PSet",
        ["0", "1", "2", "12"],
        [("0", "1"), ("0", "2"), ("0", "12"), ("1", "12"), ("2", "12")],
    )


def monoid3() -> FinCat:
    """The left-zero monoid ``{1, a, b}`` with ``x·y = x`` on ``{a, b}``.

    Read as a one-object category with ``g∘f = g``: non-commutative,
    since ``a∘b = a`` while ``b∘a = b``.
    """
    comp = tuple((f, g, g) for f in ("a", "b") for g in ("a", "b"))
    return validate_category(
        Presentation("Monoid3", ("m",), (("a", "m", "m"), ("b", "m", "m")), comp)
    )


def thin_category(name: str, elements: list[str], order: list[tuple[str, str]]) -> FinCat:
    """A poset given by its strict order relation (must be transitively closed).
    The morphism ``x ≤ y`` is named ``x_y``."""
    rel = set(order)
    morphisms = tuple((f"{x}_{y}", x, y) for x, y in order)
    comp = tuple(
        (f"{x}_{y}", f"{y}_{z}", f"{x}_{z}")
        for x, y in order
        for y2, z in order
        if y == y2 and (x, z) in rel
    )
    return validate_category(Presentation(name, tuple(elements), morphisms, comp))


BASE = {
    "One": one,
    "Two": two,
    "Cospan": cospan,
    "Span": span,
    "PSet": pset,
    "Disc2": discrete2,
    "Monoid3": monoid3,
}


def base_fixtures() -> dict[str, FinCat]:
    return {name: make() for name, make in BASE.items()}


def corpus(max_morphisms: int = 40) -> dict[str, FinCat]:
    """Base fixtures plus their products, slices and arrow categories, keeping
    only categories with at most ``max_morphisms`` morphisms."""
    from .constructions import build_arrow_category, build_slice

    base = base_fixtures()
    out = dict(base)
    names = list(base)
    for i, a in enumerate(names):
        for b in names[i:]:
            P = product_category(base[a], base[b]).category
            if len(P.morphisms) <= max_morphisms:
                out[P.name] = P
    for name, C in base.items():
        A = build_arrow_category(C).carrier
        if len(A.morphisms) <= max_morphisms:
            out[A.name] = A
        for obj in C.objects:
            S = build_slice(C, obj).carrier
            if len(S.morphisms) <= max_morphisms:
                out[S.name] = S
    return out


# ---------------------------------------------------------------------------
# pointed fibrations


def constant_point(B: FinCat, X: FinCat, c: str):
    """``I ↦ (I, c)`` as a section of the first projection ``B × X → B``."""
    from .core import Functor, identity_name, pair_name

    prod = product_category(B, X)
    P = prod.category
    mor = {u: P.named(pair_name(B.dom(u), c), pair_name(B.cod(u), c), (u, identity_name(c)))
           for u in B.morphisms}
    return Functor(f"const({c})", B, P, {I: pair_name(I, c) for I in B.objects}, mor)


def projection_pointed(B: FinCat, X: FinCat, c: str):
    """``(κ_c, π₁)`` on ``B × X``."""
    from .slicefib import validate_pointed_fibration

    return validate_pointed_fibration(product_category(B, X).pi1, constant_point(B, X, c))


def diagonal_pointed(C: FinCat):
    """``(Δ, π₁)`` on ``C × C``. The diagonal is a section but not fibered."""
    from .core import diagonal
    from .slicefib import validate_pointed_fibration

    return validate_pointed_fibration(product_category(C, C).pi1, diagonal(C), require_fibered=False)


def codomain_pointed(C: FinCat):
    """``cod_C`` pointed by ``I ↦ 1_I``."""
    from .constructions import build_arrow_category
    from .core import Functor, identity_name
    from .slicefib import validate_pointed_fibration

    A = build_arrow_category(C)
    ob = {I: identity_name(I) for I in C.objects}
    mor = {u: A.square(ob[C.dom(u)], u, u, ob[C.cod(u)]) for u in C.morphisms}
    return validate_pointed_fibration(A.cod_functor, Functor("ids", C, A.carrier, ob, mor))


def pointed_fibration_fixtures() -> dict:
    """Named pointed fibrations with fibered pullbacks used across tests and demos."""
    from .pointed import PointedCat
    from .slicefib import identity_pointed, pointed_over_one

    ps = pset()
    out = {
        "pi1-const12": projection_pointed(ps, ps, "12"),
        "pi1-const1": projection_pointed(ps, ps, "1"),
        "pi1-const0": projection_pointed(ps, ps, "0"),
        "pi1-diag": diagonal_pointed(ps),
        "cod-ids": codomain_pointed(ps),
        "id-PSet": identity_pointed(ps),
        "two-const-b": projection_pointed(two(), two(), "b"),
        "one-PSet-12": pointed_over_one(PointedCat("12", ps)),
        "one-PSet-1": pointed_over_one(PointedCat("1", ps)),
        "one-Two-a": pointed_over_one(PointedCat("a", two())),
    }
    return out


def point_comparisons() -> dict:
    """Vertical comparisons between points of ``π₁`` on ``PSet × PSet``:
    ``κ_0 ⇒ Δ`` and ``κ_1 ⇒ κ_12`` (fibered Σ_α), ``Δ ⇒ κ_12`` (Σ_α not fibered)."""
    from .core import identity_name, product_category
    from .slicefib import point_comparison

    ps = pset()
    P = product_category(ps, ps).category
    pfs = pointed_fibration_fixtures()

    def comps(p, q, second):
        return {I: P.named(p.point.ob[I], q.point.ob[I], (identity_name(I), second(I)))
                for I in ps.objects}

    def incl(a, b):
        return identity_name(a) if a == b else f"{a}_{b}"

    k0, k1, k12, d = pfs["pi1-const0"], pfs["pi1-const1"], pfs["pi1-const12"], pfs["pi1-diag"]
    return {
        "k0-diag": (k0, d, point_comparison(k0, d, comps(k0, d, lambda I: incl("0", I)), "incl0")),
        "k1-k12": (k1, k12, point_comparison(k1, k12, comps(k1, k12, lambda I: "1_12"), "incl1")),
        "diag-k12": (d, k12, point_comparison(d, k12, comps(d, k12, lambda I: incl(I, "12")), "top")),
        "k1-k1": (k1, k1, point_comparison(k1, k1, comps(k1, k1, lambda I: identity_name("1")), "one")),
    }


def write_fixture_files(directory):
    """Write the base categories and the standard bundles as documents."""
    from pathlib import Path

    from .dsl import export_category, export_fibration, export_pointed, nat_trans_document, write_document
    from .fibration import codomain_fibration, projection_fibration

    directory = Path(directory)
    written = [export_category(C, directory, name.lower()) for name, C in base_fixtures().items()]
    written.append(export_fibration(codomain_fibration(cospan()), directory, "cod-cospan"))
    written.append(export_fibration(codomain_fibration(pset()), directory, "cod-pset"))
    written.append(export_fibration(projection_fibration(pset(), two()), directory, "pi1-pset-two"))
    written.append(export_fibration(to_terminal_fibration(cospan()), directory, "cospan-one"))
    pfs = pointed_fibration_fixtures()
    for name in ("pi1-diag", "pi1-const12", "pi1-const1", "pi1-const0", "cod-ids", "one-PSet-1"):
        pf = pfs[name]
        written.append(export_pointed(pf.proj, pf.point, directory, name.lower()))
    for name, (p, q, alpha) in point_comparisons().items():
        src, tgt = _stem_of(p, pfs), _stem_of(q, pfs)
        doc = nat_trans_document(alpha, f"{src}-point.fun", f"{tgt}-point.fun")
        written.append(write_document(doc, directory / f"{name}.nat"))
    return written


def _stem_of(pf, pfs) -> str:
    return next(n for n, v in pfs.items() if v.point == pf.point and v.proj == pf.proj)


def to_terminal_fibration(C: FinCat):
    from .fibration import to_terminal

    return to_terminal(C)
