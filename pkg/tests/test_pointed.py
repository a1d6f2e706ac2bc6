import pytest

from catslice import fixtures as fx
from catslice.constructions import build_slice
from catslice.core import enumerate_functors, identity_name
from catslice.errors import ShapeMismatch, UnknownObject
from catslice.pointed import (
    G_on_mor,
    G_pointed,
    PointedCat,
    PtdCatMor,
    check_factorization,
    compose_ptd,
    count_factorizations,
    default_probes,
    factorization,
    identity_ptd,
    is_terminally_pointed_cat,
    probe_morphisms,
    terminally_pointed,
    universal_arrow,
    verify_universal_arrow,
)


def test_pointed_cat_validation(pset):
    with pytest.raises(UnknownObject):
        PointedCat("nope", pset)
    assert is_terminally_pointed_cat(PointedCat("12", pset))
    assert not is_terminally_pointed_cat(PointedCat("1", pset))


def test_G_pointed_is_terminally_pointed(pset, monoid3):
    for P in (PointedCat("1", pset), PointedCat("m", monoid3)):
        assert is_terminally_pointed_cat(G_pointed(P))


def test_comparison_shape_checked(pset):
    P = PointedCat("1", pset)
    with pytest.raises(ShapeMismatch):
        PtdCatMor(P, P, identity_ptd(P).functor, "0_1")


def test_identity_and_composition_laws(pset):
    P = PointedCat("1", pset)
    Q = PointedCat("12", pset)
    tests = probe_morphisms(Q, [terminally_pointed(fx.two())])
    one_P = identity_ptd(P)
    arrow = universal_arrow(P)
    assert compose_ptd(identity_ptd(arrow.source), arrow) == arrow
    assert compose_ptd(arrow, one_P) == arrow
    for t in tests[:5]:
        assert compose_ptd(t, identity_ptd(Q)) == t


def _pointed_morphisms(P, Q, limit=8):
    out = []
    for F in enumerate_functors(P.carrier, Q.carrier):
        for alpha in Q.carrier.hom(F.ob[P.point], Q.point):
            out.append(PtdCatMor(P, Q, F, alpha))
    return out[:limit]


def test_G_is_functorial(pset, two):
    P, Q, R = PointedCat("1", pset), PointedCat("2", pset), PointedCat("b", two)
    assert G_on_mor(identity_ptd(P)) == identity_ptd(G_pointed(P))
    for m in _pointed_morphisms(P, Q):
        for n in _pointed_morphisms(Q, R):
            assert G_on_mor(compose_ptd(m, n)) == compose_ptd(G_on_mor(m), G_on_mor(n))


def _brute_force_count(P, test):
    """Count by enumerating every functor into the slice with no pruning."""
    S = build_slice(P.carrier, P.point).carrier
    arrow = universal_arrow(P)
    n = 0
    for F in enumerate_functors(test.source.carrier, S):
        for m in S.hom(F.ob[test.source.point], identity_name(P.point)):
            cand = PtdCatMor(test.source, G_pointed(P), F, m)
            if compose_ptd(cand, arrow) == test:
                n += 1
    return n


@pytest.mark.parametrize("point", ["0", "1", "12"])
def test_factorization_count_matches_brute_force(pset, point):
    P = PointedCat(point, pset)
    for test in probe_morphisms(P, [terminally_pointed(fx.two())]):
        assert count_factorizations(P, test) == _brute_force_count(P, test) == 1
        assert check_factorization(P, test, factorization(P, test))


def test_universal_arrow_on_instances(pset, monoid3, two):
    instances = [
        PointedCat("pt", fx.one()),
        PointedCat("1", pset),
        PointedCat("12", pset),
        PointedCat("a", two),
        PointedCat("m", monoid3),
    ]
    for P in instances:
        cert = verify_universal_arrow(P)
        assert cert, cert.witness
        assert cert.witness["tests"] > 0


def test_default_probes_are_terminally_pointed():
    assert all(is_terminally_pointed_cat(p) for p in default_probes())


def test_tampered_comparison_rejected(pset):
    P = PointedCat("1", pset)
    test = probe_morphisms(P, [terminally_pointed(fx.one())])[0]
    fac = factorization(P, test)
    S = build_slice(pset, "1").carrier
    # any other comparison into 1_A composes to a different comparison, or
    # changing the functor breaks the triangle
    others = [m for m in S.hom(fac.functor.ob["pt"], "id:1") if m != fac.comparison]
    assert others == []
    wrong_point = [F for F in enumerate_functors(fx.one(), S) if F != fac.functor]
    bad = next(F for F in wrong_point if S.hom(F.ob["pt"], "id:1"))
    cand = PtdCatMor(test.source, G_pointed(P), bad, S.hom(bad.ob["pt"], "id:1")[0])
    cert = check_factorization(P, test, cand)
    assert not cert
    assert cert.witness["error"] == "FactorizationFailure"


def test_probe_must_be_terminally_pointed(pset):
    with pytest.raises(ShapeMismatch):
        probe_morphisms(PointedCat("12", pset), [PointedCat("a", fx.two())])
