import itertools

import pytest
from hypothesis import given, settings

from catslice import fixtures as fx
from catslice.core import (
    Functor,
    NatTrans,
    Presentation,
    category_isomorphism,
    category_violations,
    check_equivalence,
    compose_functors,
    constant_functor,
    diagonal,
    enumerate_functors,
    has_pullbacks,
    identity_functor,
    identity_nat_trans,
    is_isomorphism_functor,
    is_pullback_square,
    is_terminal,
    law_violations,
    product_category,
    pullback,
    terminal_object,
    validate_category,
    vertical_compose,
    whisker_left,
)
from catslice.errors import (
    AssociativityViolation,
    BudgetExceeded,
    DanglingReference,
    DuplicateName,
    FunctorLawViolation,
    IdentityLawViolation,
    InvalidName,
    MissingComponent,
    NaturalitySquareViolation,
    NonTotal,
    NotClosed,
    NotComposable,
    UnknownMorphism,
)

from conftest import leq, poset_category, posets


# ---------------------------------------------------------------------------
# validation


def test_identities_are_synthesized(two):
    assert two.morphisms == ("f", "id:a", "id:b")
    assert two.compose("id:a", "f") == "f"
    assert two.compose("f", "id:b") == "f"


def test_composition_is_diagrammatic(pset):
    # first 0_1, then 1_12
    assert pset.compose("0_1", "1_12") == "0_12"
    assert pset.compose_path("0_1", "1_12", "id:12") == "0_12"


def test_compose_rejects_non_composable(pset):
    with pytest.raises(NotComposable):
        pset.compose("1_12", "0_1")
    with pytest.raises(UnknownMorphism):
        pset.compose("nope", "0_1")


def test_monoid_is_non_commutative(monoid3):
    assert monoid3.compose("a", "b") == "b"
    assert monoid3.compose("b", "a") == "a"


@pytest.mark.parametrize(
    "raw, error",
    [
        (Presentation("C", ("a",), (("id:x", "a", "a"),)), InvalidName),
        (Presentation("C", ("a", "a")), DuplicateName),
        (Presentation("C", ("a",), (("f", "a", "b"),)), DanglingReference),
        (Presentation("C", ("a bad",)), InvalidName),
        (Presentation("C", ("a", "b"), (("f", "a", "b"), ("g", "a", "b")), (("f", "g", "f"),)),
         NotComposable),
        (Presentation("C", ("a",), (("e", "a", "a"),)), NonTotal),
        (Presentation("C", ("a", "b"), (("f", "a", "b"), ("g", "b", "a")),
                      (("f", "g", "f"), ("g", "f", "id:b"))), NotClosed),
        (Presentation("C", ("a",), (("e", "a", "a"),), (("id:a", "e", "id:a"), ("e", "e", "e"))),
         IdentityLawViolation),
    ],
)
def test_validation_rejects(raw, error):
    with pytest.raises(error):
        validate_category(raw)


def test_associativity_violation_has_witness():
    comp = (("e", "e", "f"), ("e", "f", "e"), ("f", "e", "f"), ("f", "f", "f"))
    raw = Presentation("M", ("m",), (("e", "m", "m"), ("f", "m", "m")), comp)
    violations = category_violations(raw)
    assert violations and all(isinstance(v, AssociativityViolation) for v in violations)
    w = violations[0].witness
    assert {"first", "second", "third", "left", "right"} <= set(w)
    assert w["left"] != w["right"]


def test_all_violations_are_listed():
    raw = Presentation("C", ("a", "a", "b c"))
    with pytest.raises(DuplicateName) as exc:
        validate_category(raw)
    assert len(exc.value.violations) == 2


def test_presentation_round_trip(corpus):
    for C in corpus.values():
        again = validate_category(C.presentation())
        assert again == C
        assert law_violations(C) == []


@given(posets())
@settings(max_examples=60, deadline=None)
def test_random_posets_are_categories(shape):
    C = poset_category(shape)
    assert law_violations(C) == []
    le = leq(shape)
    for a, b in itertools.product(C.objects, repeat=2):
        assert len(C.hom(a, b)) == (1 if le(a, b) else 0)


# ---------------------------------------------------------------------------
# functors and transformations


def test_functor_law_violation(two, pset):
    with pytest.raises(FunctorLawViolation) as exc:
        Functor("bad", two, pset, {"a": "1", "b": "0"}, {"f": "0_1"})
    assert exc.value.witness["morphism"] == "f"


def test_functor_must_preserve_composition(monoid3):
    # a then b composes to b, which maps to 1, while the images compose to a
    with pytest.raises(FunctorLawViolation) as exc:
        Functor("bad", monoid3, monoid3, {"m": "m"}, {"id:m": "id:m", "a": "a", "b": "id:m"})
    assert exc.value.witness == {"first": "a", "second": "b", "composite": "b"}


def test_compose_and_identity_functors(pset):
    I = identity_functor(pset)
    K = constant_functor(pset, pset, "12")
    assert compose_functors(I, K) == K
    assert compose_functors(K, I) == K


def test_nat_trans_checks(pset):
    I = identity_functor(pset)
    K = constant_functor(pset, pset, "12")
    comps = {a: ("id:12" if a == "12" else f"{a}_12") for a in pset.objects}
    alpha = NatTrans("to_top", I, K, comps)
    assert vertical_compose(identity_nat_trans(K), alpha) == alpha
    with pytest.raises(MissingComponent):
        NatTrans("x", I, K, {a: c for a, c in comps.items() if a != "0"})
    back = NatTrans("x", K, K, {a: "id:12" for a in pset.objects})
    assert whisker_left(identity_functor(pset), back) == back


def test_nat_trans_into_constant(two):
    I = identity_functor(two)
    K = constant_functor(two, two, "b")
    NatTrans("ok", I, K, {"a": "f", "b": "id:b"})
    # no component b → a exists
    with pytest.raises(Exception):
        NatTrans("no", I, constant_functor(two, two, "a"), {"a": "id:a", "b": "f"})


def test_naturality_square_detected(monoid3):
    I = identity_functor(monoid3)
    # component a: naturality for morphism b needs b∘a = a∘b, which fails
    with pytest.raises(NaturalitySquareViolation) as exc:
        NatTrans("a", I, I, {"m": "a"})
    assert exc.value.witness["morphism"] == "b"


# ---------------------------------------------------------------------------
# limits


def test_terminal_objects(base_fixtures):
    expected = {"One": "pt", "Two": "b", "Cospan": "c", "Span": None, "PSet": "12",
                "Disc2": None, "Monoid3": None}
    for name, C in base_fixtures.items():
        assert terminal_object(C) == expected[name], name


def test_pullbacks_in_pset_are_intersections(pset):
    pb = pullback(pset, "1_12", "2_12")
    assert pb.apex == "0"
    assert (pb.p1, pb.p2) == ("0_1", "0_2")
    assert bool(is_pullback_square(pset, "1_12", "2_12", "0_1", "0_2"))


def test_cospan_has_no_pullback(cospan):
    assert pullback(cospan, "f", "g") is None
    cert = has_pullbacks(cospan)
    assert not cert
    assert {cert.witness["f"], cert.witness["g"]} == {"f", "g"}


def test_monoid_has_no_pullbacks(monoid3):
    assert not has_pullbacks(monoid3)


@given(posets())
@settings(max_examples=60, deadline=None)
def test_poset_pullbacks_are_meets(shape):
    C = poset_category(shape)
    le = leq(shape)
    elements = shape[0]
    for a, b in itertools.product(elements, repeat=2):
        uppers = [c for c in elements if le(a, c) and le(b, c)]
        for c in uppers:
            f, g = C.hom(a, c)[0], C.hom(b, c)[0]
            lower = [m for m in elements if le(m, a) and le(m, b)]
            meets = [m for m in lower if all(le(x, m) for x in lower)]
            pb = pullback(C, f, g)
            if meets:
                assert pb is not None and pb.apex == meets[0]
            else:
                assert pb is None
    tops = [t for t in elements if all(le(x, t) for x in elements)]
    assert terminal_object(C) == (tops[0] if tops else None)


def test_pullback_mediator(pset):
    pb = pullback(pset, "1_12", "2_12")
    assert pb.mediate("0_1", "0_2", pset) == "id:0"


# ---------------------------------------------------------------------------
# products, equivalences, isomorphisms and enumeration


def test_product_counts(pset, two):
    P = product_category(pset, two)
    assert len(P.category.objects) == 8
    assert len(P.category.morphisms) == 9 * 3
    assert P.pi1.mor["(0_1,f)"] == "0_1"
    assert P.pi2.mor["(0_1,f)"] == "f"


def test_diagonal(pset):
    D = diagonal(pset)
    assert D.ob["1"] == "(1,1)"
    assert D.mor["0_1"] == "(0_1,0_1)"


def test_equivalence_and_counterexample(pset, two):
    assert check_equivalence(identity_functor(pset))
    K = constant_functor(two, two, "b")
    cert = check_equivalence(K)
    assert not cert
    assert cert.witness["failure"]


def test_isomorphism_detection(pset):
    assert is_isomorphism_functor(identity_functor(pset))
    assert not is_isomorphism_functor(constant_functor(pset, pset, "0"))


def _monotone_count(src, dst):
    le_s, le_d = leq(src), leq(dst)
    count = 0
    for image in itertools.product(dst[0], repeat=len(src[0])):
        m = dict(zip(src[0], image))
        if all(le_d(m[a], m[b]) for a in src[0] for b in src[0] if le_s(a, b)):
            count += 1
    return count


@given(posets(max_size=4), posets(max_size=3))
@settings(max_examples=40, deadline=None)
def test_functor_enumeration_counts_monotone_maps(src, dst):
    C, D = poset_category(src, "S"), poset_category(dst, "T")
    assert sum(1 for _ in enumerate_functors(C, D)) == _monotone_count(src, dst)


def test_functor_enumeration_fixed_counts(two, pset, monoid3):
    assert sum(1 for _ in enumerate_functors(two, two)) == 3
    # up-sets of PSet
    assert sum(1 for _ in enumerate_functors(pset, two)) == 6
    # monoid endomorphisms of the left-zero monoid {1, a, b}
    one_ob = sum(1 for _ in enumerate_functors(monoid3, monoid3))
    brute = 0
    elems = ["id:m", "a", "b"]
    for ia, ib in itertools.product(elems, repeat=2):
        m = {"id:m": "id:m", "a": ia, "b": ib}
        if all(monoid3.compose(m[x], m[y]) == m[monoid3.compose(x, y)] for x in ("a", "b") for y in ("a", "b")):
            brute += 1
    assert one_ob == brute


def test_enumeration_budget(pset):
    with pytest.raises(BudgetExceeded) as exc:
        list(enumerate_functors(pset, pset, budget=10))
    assert exc.value.witness["budget"] == 10


@given(posets(max_size=5))
@settings(max_examples=40, deadline=None)
def test_isomorphism_search_finds_relabelling(shape):
    elements, order = shape
    rename = {e: f"r{len(elements) - i}" for i, e in enumerate(elements)}
    C = poset_category(shape, "A")
    D = fx.thin_category("B", [rename[e] for e in elements], [(rename[a], rename[b]) for a, b in order])
    found = category_isomorphism(C, D)
    assert found is not None
    F, G = found
    assert compose_functors(F, G) == identity_functor(C)


def test_isomorphism_search_rejects(pset, two):
    chain = fx.thin_category("Chain4", ["w", "x", "y", "z"],
                             [("w", "x"), ("x", "y"), ("y", "z"), ("w", "y"), ("w", "z"), ("x", "z")])
    assert category_isomorphism(pset, chain) is None
    assert category_isomorphism(pset, two) is None


def test_terminal_check(pset):
    assert is_terminal(pset, "12")
    assert not is_terminal(pset, "1")
