"""Slices of the subsets of {1, 2}, pullbacks as intersections, and the
adjunction between post-composition and pullback.

    python3 demos/slices_and_pullbacks.py
"""
from catslice import fixtures as fx
from catslice.constructions import adjunction_sigma_reindex, build_slice, reindex, sigma_f
from catslice.core import has_pullbacks, pullback, terminal_object


def main():
    pset = fx.pset()
    print(f"{pset.name}: objects {list(pset.objects)}, {len(pset.morphisms)} morphisms")

    # a slice of a poset is the down-set, and its terminal object is the identity
    for A in pset.objects:
        S = build_slice(pset, A).carrier
        print(f"  PSet/{A}: objects {list(S.objects)}, terminal {terminal_object(S)}")

    # pulling back two inclusions intersects the subsets
    pb = pullback(pset, "1_12", "2_12")
    print(f"pullback of 1 -> 12 <- 2 has apex {pb.apex}")
    print(f"PSet has all pullbacks: {bool(has_pullbacks(pset))}")
    cert = has_pullbacks(fx.cospan())
    print(f"Cospan has all pullbacks: {bool(cert)}; missing for {cert.witness}")

    # along 1 -> 12, post-composition is left adjoint to pullback
    f = "1_12"
    S, R = sigma_f(pset, f), reindex(pset, f)
    print(f"Sigma({f}) sends 0_1 to {S.ob['0_1']}; pulling back 2_12 gives {R.ob['2_12']}")
    adj = adjunction_sigma_reindex(pset, f)
    print(f"unit {dict(adj.unit.components)}")
    print(f"counit {dict(adj.counit.components)}")


if __name__ == "__main__":
    main()
