"""The codomain functor on the arrow category is a fibration exactly when
pullbacks exist; a missing cartesian lift names the offending cospan.

    python3 demos/codomain_fibration.py
"""
from catslice import fixtures as fx
from catslice.core import has_pullbacks
from catslice.fibration import (
    cleave,
    codomain_fibration,
    fiber_category,
    has_fibered_pullbacks,
    is_fibration,
    reindexing_functor,
    vertical_category,
)


def main():
    for C in (fx.pset(), fx.two(), fx.cospan(), fx.span(), fx.monoid3()):
        cert = is_fibration(codomain_fibration(C))
        line = f"{C.name:8s} pullbacks={bool(has_pullbacks(C))!s:5s} cod fibration={bool(cert)!s:5s}"
        if not cert:
            line += f"  no lift: {cert.witness}"
        print(line)

    pset = fx.pset()
    fib = cleave(codomain_fibration(pset))
    print("fibres of cod over PSet:")
    for I in pset.objects:
        F = fiber_category(fib, I)
        print(f"  over {I}: {len(F.objects)} objects, {len(F.morphisms)} morphisms")
    R = reindexing_functor(fib, "1_12")
    print(f"reindexing along 1_12: {dict(R.ob)}")

    # fibred pullbacks are exactly a fibration structure on the vertical arrows
    V = vertical_category(fib)
    print(f"fibered pullbacks: {bool(has_fibered_pullbacks(fib))}; "
          f"cod of V(P) is a fibration: {bool(is_fibration(V.cod_functor))}")


if __name__ == "__main__":
    main()
