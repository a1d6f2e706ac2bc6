"""Slicing a fibration at a point.  The first projection on PSet x PSet with
the diagonal as point gives back the codomain fibration; a constant point at
the top gives back the projection itself.

    python3 demos/slice_fibrations.py
"""
from catslice import fixtures as fx
from catslice.core import category_isomorphism
from catslice.fibration import codomain_fibration, is_fibration
from catslice.slicefib import (
    fibered_adjunction_sigma_alpha,
    is_terminally_pointed,
    slice_fiber_equiv,
    slice_fibration,
    verify_fiberwise_universal_arrow,
)


def main():
    pointed = fx.pointed_fibration_fixtures()
    for name, pf in pointed.items():
        cert = is_terminally_pointed(pf)
        print(f"{name:12s} point fibered={pf.fibered!s:5s} terminally pointed={bool(cert)}")

    pset = fx.pset()
    sf = slice_fibration(pointed["pi1-diag"])
    cod = codomain_fibration(pset)
    iso = category_isomorphism(sf.total, cod.source, over=(sf.proj, cod))
    print(f"slice at the diagonal: {len(sf.total.objects)} objects, fibration={bool(is_fibration(sf.proj))}, "
          f"isomorphic to cod over PSet: {iso is not None}")
    print(f"  each fibre is a slice of a fibre: "
          f"{all(slice_fiber_equiv(sf, I) for I in pset.objects)}")

    top = pointed["pi1-const12"]
    sf_top = slice_fibration(top)
    iso = category_isomorphism(sf_top.total, top.total, over=(sf_top.proj, top.proj))
    print(f"slice at the top point recovers the projection: {iso is not None}")

    # a vertical comparison of points induces an adjunction between slices
    p, q, alpha = fx.point_comparisons()["k1-k12"]
    adj = fibered_adjunction_sigma_alpha(alpha, slice_fibration(p), slice_fibration(q))
    print(f"{adj.left.functor.name} is fibered left adjoint to {adj.right.functor.name}")

    cert = verify_fiberwise_universal_arrow(top)
    print(f"fiberwise universal arrow at the top point: {bool(cert)} over {cert.witness['tests']} tests")


if __name__ == "__main__":
    main()
