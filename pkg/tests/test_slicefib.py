import pytest

from catslice import fixtures as fx
from catslice.constructions import build_slice
from catslice.core import (
    Functor,
    Presentation,
    category_isomorphism,
    identity_functor,
    identity_name,
    identity_nat_trans,
    product_category,
    terminal_category,
    validate_category,
)
from catslice.errors import (
    CartesianNotPreserved,
    NoFiberedPullbacks,
    NotASection,
    NotVertical,
    PointNotFibered,
    ShapeMismatch,
    TriangleViolation,
)
from catslice.fibration import (
    cleave,
    codomain_fibration,
    fiber_category,
    has_fibered_pullbacks,
    is_fibration,
    to_terminal,
)
from catslice.pointed import PointedCat, verify_universal_arrow
from catslice.slicefib import (
    alpha_star,
    cartesian_iff_pullback,
    change_of_base_pointed,
    check_ptdfib_2cell,
    check_pullback_square_property,
    compose_cross_base,
    compose_ptdfib,
    count_fiberwise_factorizations,
    cross_base_morphism,
    fibered_adjunction_sigma_alpha,
    fiberwise_factorization,
    forgetful_sigma_p,
    identity_pointed,
    identity_ptdfib,
    is_terminally_pointed,
    point_adjunction,
    point_comparison,
    pointed_over_one,
    ptdfib_mor,
    ptdfib_morphisms,
    sigma_alpha,
    slice_fiber_equiv,
    slice_fibration,
    slice_total_parts,
    universal_ptdfib_arrow,
    validate_pointed_fibration,
    verify_fiberwise_universal_arrow,
)

TERMINALLY_POINTED = ["pi1-const12", "cod-ids", "id-PSet", "two-const-b", "one-PSet-12"]


@pytest.fixture(scope="module")
def slices(pointed_fibrations):
    return {name: slice_fibration(pf) for name, pf in pointed_fibrations.items()}


# ---------------------------------------------------------------------------
# pointed fibrations


def test_section_required(pset):
    P = product_category(pset, pset).pi1
    # I ↦ (12, I) is not a section of the first projection
    X = P.source
    swap = Functor("swap", pset, X, {I: f"(12,{I})" for I in pset.objects},
                   {u: X.named(f"(12,{pset.dom(u)})", f"(12,{pset.cod(u)})", ("id:12", u))
                    for u in pset.morphisms})
    with pytest.raises(NotASection) as exc:
        validate_pointed_fibration(P, swap)
    assert exc.value.witness["base_morphism"] in pset.morphisms


def test_diagonal_is_a_section_but_not_fibered(pset):
    from catslice.core import diagonal

    P = product_category(pset, pset).pi1
    with pytest.raises(PointNotFibered) as exc:
        validate_pointed_fibration(P, diagonal(pset))
    u = exc.value.witness["base_morphism"]
    assert exc.value.witness["image"] == f"({u},{u})"
    relaxed = validate_pointed_fibration(P, diagonal(pset), require_fibered=False)
    assert not relaxed.fibered


def test_constant_points_are_fibered(pointed_fibrations):
    for name in ("pi1-const12", "pi1-const1", "pi1-const0", "cod-ids", "id-PSet"):
        assert pointed_fibrations[name].fibered, name


@pytest.mark.parametrize("name, expected", [
    ("pi1-const12", True),
    ("pi1-const1", False),
    ("pi1-const0", False),
    ("pi1-diag", False),
    ("cod-ids", True),
    ("id-PSet", True),
    ("two-const-b", True),
    ("one-PSet-12", True),
    ("one-PSet-1", False),
    ("one-Two-a", False),
])
def test_terminally_pointed(pointed_fibrations, name, expected):
    cert = is_terminally_pointed(pointed_fibrations[name])
    assert bool(cert) == expected
    # the fibered adjunction P ⊣ p exists exactly in the terminally pointed case
    assert cert.value["adjunction"] == expected


def test_diagonal_witness(pointed_fibrations):
    cert = is_terminally_pointed(pointed_fibrations["pi1-diag"])
    assert cert.witness == {"base_object": "0", "point": "(0,0)"}


def test_point_adjunction(pointed_fibrations):
    adj = point_adjunction(pointed_fibrations["pi1-const12"])
    assert adj.adjunction.right.name == "const(12)"


# ---------------------------------------------------------------------------
# slice fibrations


@pytest.mark.parametrize("name", sorted(fx.pointed_fibration_fixtures()))
def test_slice_fibration_properties(slices, name):
    sf = slices[name]
    assert is_fibration(sf.proj)
    assert is_terminally_pointed(sf.terminal_point)
    assert cartesian_iff_pullback(sf)
    for I in sf.source.base.objects:
        assert slice_fiber_equiv(sf, I), I


def test_slice_fibration_needs_fibered_pullbacks(cospan):
    pf = pointed_over_one(PointedCat("c", cospan))
    with pytest.raises(NoFiberedPullbacks) as exc:
        slice_fibration(pf)
    assert exc.value.witness["fiber"] == "pt"


def test_slice_objects_are_vertical_maps(slices, pointed_fibrations):
    sf = slices["pi1-const12"]
    X = sf.source.total
    for o in sf.total.objects:
        I, x = slice_total_parts(sf, o)
        assert X.cod(x) == f"({I},12)"
        assert sf.source.proj.mor[x] == identity_name(I)


def test_slice_over_terminal_recovers_fibration(slices, pointed_fibrations):
    for name in TERMINALLY_POINTED:
        sf, pf = slices[name], pointed_fibrations[name]
        assert category_isomorphism(sf.total, pf.total, over=(sf.proj, pf.proj)) is not None, name


def test_slice_over_one_is_ordinary_slice(slices, pset):
    for name, A in (("one-PSet-1", "1"), ("one-PSet-12", "12")):
        S = build_slice(pset, A).carrier
        assert category_isomorphism(slices[name].total, S) is not None


def test_codomain_from_diagonal(slices, pset):
    cod = codomain_fibration(pset)
    sf = slices["pi1-diag"]
    assert category_isomorphism(sf.total, cod.source, over=(sf.proj, cod)) is not None


def test_cartesian_iff_pullback_counts(slices):
    # both directions are exercised: some morphisms cartesian, some not
    from catslice.fibration import cartesian_morphisms

    sf = slices["pi1-diag"]
    cart = cartesian_morphisms(sf.proj)
    assert 0 < len(cart) < len(sf.total.morphisms)


def test_forgetful_sigma_fibered_iff_point_fibered(slices):
    for name, sf in slices.items():
        if sf.source.fibered:
            forgetful_sigma_p(sf)
        else:
            with pytest.raises(CartesianNotPreserved):
                forgetful_sigma_p(sf)


# ---------------------------------------------------------------------------
# change of base of pointed fibrations


def _base_changes(pset, two):
    one = terminal_category()
    return [
        identity_functor(pset),
        Functor("u", two, pset, {"a": "0", "b": "1"}, {"f": "0_1"}),
        Functor("pick1", one, pset, {"pt": "1"}, {"id:pt": "id:1"}),
    ]


@pytest.mark.parametrize("name", ["pi1-const12", "pi1-const1", "cod-ids", "id-PSet"])
def test_change_of_base_pointed(pointed_fibrations, pset, two, name):
    pf = pointed_fibrations[name]
    before = bool(is_terminally_pointed(pf))
    for F in _base_changes(pset, two):
        new, cb = change_of_base_pointed(pf, F)
        assert new.base == F.source
        assert has_fibered_pullbacks(new.fib)
        if before:
            assert is_terminally_pointed(new)


def test_change_of_base_point_to_fibre(pointed_fibrations, pset):
    pf = pointed_fibrations["pi1-const1"]
    one = terminal_category()
    new, cb = change_of_base_pointed(pf, Functor("pick2", one, pset, {"pt": "2"}, {"id:pt": "id:2"}))
    assert new.point.ob["pt"] == "(pt,(2,1))"
    assert category_isomorphism(new.total, fiber_category(pf.proj, "2")) is not None


# ---------------------------------------------------------------------------
# morphisms of pointed fibrations


def _k1_to_k12(pointed_fibrations, pset):
    k1, k12 = pointed_fibrations["pi1-const1"], pointed_fibrations["pi1-const12"]
    X = k1.total
    comps = {I: X.named(k1.point.ob[I], k12.point.ob[I], (identity_name(I), "1_12")) for I in pset.objects}
    return ptdfib_mor(k1, k12, identity_functor(X), comps)


def test_ptdfib_identity_and_composition(pointed_fibrations, pset):
    m = _k1_to_k12(pointed_fibrations, pset)
    assert compose_ptdfib(identity_ptdfib(m.source), m).comparison == m.comparison
    assert compose_ptdfib(m, identity_ptdfib(m.target)).comparison == m.comparison


def test_ptdfib_comparison_must_be_vertical(pointed_fibrations, pset):
    k1, k12 = pointed_fibrations["pi1-const1"], pointed_fibrations["pi1-const12"]
    X = k1.total
    comps = {I: X.named(k1.point.ob[I], "(12,12)", (identity_name(I) if I == "12" else f"{I}_12", "1_12"))
             for I in pset.objects}
    with pytest.raises((NotVertical, ShapeMismatch)):
        ptdfib_mor(k1, k12, identity_functor(X), comps)


def test_pullback_square_property(pointed_fibrations, pset):
    m = _k1_to_k12(pointed_fibrations, pset)
    for u in pset.morphisms:
        assert check_pullback_square_property(m, u), u


def test_two_cells(pointed_fibrations, pset):
    m = _k1_to_k12(pointed_fibrations, pset)
    gamma = identity_nat_trans(identity_functor(m.source.total))
    assert check_ptdfib_2cell(gamma, m, m)
    other = identity_nat_trans(identity_functor(pset))
    cert = check_ptdfib_2cell(other, m, m)
    assert not cert and cert.witness["reason"] == "wrong endpoints"


def test_cross_base_composition(pointed_fibrations, pset, two):
    pf = pointed_fibrations["pi1-const12"]
    F = _base_changes(pset, two)[1]
    new, cb = change_of_base_pointed(pf, F)
    comps = {c: identity_name(pf.point.ob[F.ob[c]]) for c in two.objects}
    m = cross_base_morphism(new, pf, cb.over, F, comps)
    X = pf.total
    top = {I: identity_name(pf.point.ob[I]) for I in pset.objects}
    ident = cross_base_morphism(pf, pf, identity_functor(X), identity_functor(pset), top)
    composite = compose_cross_base(m, ident)
    assert dict(composite.comparison.components) == comps
    squash = Functor("squash", pset, pset, {I: "12" for I in pset.objects},
                     {u: "id:12" for u in pset.morphisms})
    with pytest.raises(TriangleViolation):
        cross_base_morphism(pf, pf, identity_functor(X), squash, top)


# ---------------------------------------------------------------------------
# Σ_α ⊣ α*


@pytest.mark.parametrize("name", ["k0-diag", "k1-k12", "k1-k1"])
def test_sigma_alpha_adjunction(comparisons, slices, pointed_fibrations, name):
    p, q, alpha = comparisons[name]
    sfp, sfq = slice_fibration(p), slice_fibration(q)
    sigma_alpha(alpha, sfp, sfq)
    alpha_star(alpha, sfp, sfq)
    adj = fibered_adjunction_sigma_alpha(alpha, sfp, sfq)
    assert adj.left.functor.name == f"Sigma({alpha.name})"


def test_identity_alpha_gives_identity_functors(comparisons):
    p, q, alpha = comparisons["k1-k1"]
    sf = slice_fibration(p)
    assert sigma_alpha(alpha, sf, sf).functor == identity_functor(sf.total)
    assert alpha_star(alpha, sf, sf).functor == identity_functor(sf.total)


def test_sigma_alpha_not_fibered_from_diagonal(comparisons):
    p, q, alpha = comparisons["diag-k12"]
    with pytest.raises(CartesianNotPreserved) as exc:
        sigma_alpha(alpha, slice_fibration(p), slice_fibration(q))
    assert exc.value.witness["morphism"] == "(0_1,(0_1,0_1))"


@pytest.mark.parametrize("name", ["k0-diag", "k1-k12", "k1-k1"])
def test_sigma_alpha_sends_terminal_point_to_alpha(comparisons, name):
    # Σ_α(I, 1) = (I, α_I); that is the terminal point of P/q only up to a
    # vertical iso, and exactly when α_I is invertible
    p, q, alpha = comparisons[name]
    sfp, sfq = slice_fibration(p), slice_fibration(q)
    S = sigma_alpha(alpha, sfp, sfq).functor
    X = p.total
    for I in p.base.objects:
        image = S.ob[sfp.terminal_point.point.ob[I]]
        assert image == f"({I},{alpha[I]})"
        top = sfq.terminal_point.point.ob[I]
        fib = fiber_category(sfq.proj, I)
        isos = [h for h in fib.hom(image, top) if fib.is_iso(h)]
        assert bool(isos) == X.is_iso(alpha[I])


def test_point_comparison_checks(pointed_fibrations, pset):
    k0, d = pointed_fibrations["pi1-const0"], pointed_fibrations["pi1-diag"]
    with pytest.raises(ShapeMismatch):
        point_comparison(k0, pointed_fibrations["cod-ids"], {})
    # over the two-element group the nontrivial loop is natural but not vertical
    Z2 = validate_category(Presentation("Z2", ("o",), (("s", "o", "o"),), (("s", "s", "id:o"),)))
    p = identity_pointed(Z2)
    with pytest.raises(NotVertical) as exc:
        point_comparison(p, p, {"o": "s"})
    assert exc.value.witness == {"object": "o", "component": "s"}
    assert d.fibered is False


# ---------------------------------------------------------------------------
# the fiberwise universal arrow


@pytest.mark.parametrize("name", ["pi1-const12", "cod-ids", "id-PSet", "two-const-b"])
def test_fiberwise_universal_arrow(pointed_fibrations, name):
    cert = verify_fiberwise_universal_arrow(pointed_fibrations[name])
    assert cert, cert.witness
    assert all(n == 1 for _, n in cert.value)


@pytest.mark.parametrize("name, point", [("one-PSet-12", "12"), ("one-PSet-1", "1"), ("one-Two-a", "a")])
def test_fiberwise_agrees_with_pointed_over_one(pointed_fibrations, pset, two, name, point):
    carrier = pset if name.startswith("one-PSet") else two
    fiberwise = verify_fiberwise_universal_arrow(pointed_fibrations[name])
    plain = verify_universal_arrow(PointedCat(point, carrier))
    assert bool(fiberwise) == bool(plain) is True
    assert fiberwise.witness["tests"] == plain.witness["tests"]


def test_fiberwise_against_slice_image(pointed_fibrations):
    for name in ("pi1-const12", "pi1-const1", "cod-ids"):
        pf = pointed_fibrations[name]
        sf = slice_fibration(pf)
        assert verify_fiberwise_universal_arrow(pf, tests=[universal_ptdfib_arrow(sf)])


def test_fiberwise_factorization_count_oracle(pointed_fibrations):
    pf = pointed_fibrations["two-const-b"]
    sf = slice_fibration(pf)
    probe = identity_pointed(pf.base)
    for test in ptdfib_morphisms(probe, pf):
        fac = fiberwise_factorization(sf, test)
        composite = compose_ptdfib(fac, universal_ptdfib_arrow(sf))
        assert composite.functor.functor == test.functor.functor
        assert count_fiberwise_factorizations(sf, test) == 1
        # brute force: all pointed morphisms into the slice, filtered by composite
        hits = [m for m in ptdfib_morphisms(probe, sf.terminal_point)
                if compose_ptdfib(m, universal_ptdfib_arrow(sf)).functor.functor == test.functor.functor
                and compose_ptdfib(m, universal_ptdfib_arrow(sf)).comparison == test.comparison]
        assert len(hits) == 1


def test_probe_must_be_terminally_pointed(pointed_fibrations):
    with pytest.raises(ShapeMismatch):
        verify_fiberwise_universal_arrow(pointed_fibrations["pi1-const12"],
                                         probes=[pointed_fibrations["pi1-const1"]])


def test_to_terminal_fibration_is_cleaved(pset):
    assert cleave(to_terminal(pset)).base.objects == ("pt",)
