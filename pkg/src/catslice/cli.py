"""Command line front end.

Exit codes: 0 the property holds or the construction succeeded, 1 the
property fails (the report carries a witness), 2 the input is invalid.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from . import constructions as cons
from . import fibration as fibm
from . import slicefib as sfm
from .core import (
    DEFAULT_BUDGET,
    Certificate,
    FinCat,
    has_pullbacks,
    product_category,
    pullback,
    terminal_object,
)
from .dsl import (
    DocumentError,
    FibrationValue,
    Loader,
    PointedValue,
    export_category,
    export_fibration,
    export_functor,
    export_pointed,
    file_stem,
)
from .errors import CategoryError
from .pointed import PointedCat, verify_universal_arrow


class InvalidInput(Exception):
    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = dict(witness or {})


@dataclass
class Outcome:
    holds: bool
    witnesses: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    written: list[str] = field(default_factory=list)


@dataclass
class Context:
    loader: Loader
    base: Path | None
    out: Path | None
    budget: int

    def path(self, ref: str) -> Path:
        p = Path(ref)
        if not p.is_absolute() and not p.exists() and self.base is not None:
            p = self.base / p
        return p

    def load(self, ref: str, expect: str) -> Any:
        return self.loader.load(self.path(ref), expect=expect)

    def category(self, ref: str) -> FinCat:
        return self.load(ref, "category")

    def fibration(self, ref: str) -> FibrationValue:
        return self.load(ref, "fibration")

    def pointed(self, ref: str) -> PointedValue:
        return self.load(ref, "pointed")


def _require_object(C: FinCat, a: str) -> None:
    if not C.has_object(a):
        raise InvalidInput(f"{a!r} is not an object of {C.name}", {"object": a})


def _require_morphism(C: FinCat, f: str) -> None:
    if f not in C.morphisms:
        raise InvalidInput(f"{f!r} is not a morphism of {C.name}", {"morphism": f})


def _cert(cert: Certificate, **details) -> Outcome:
    return Outcome(bool(cert), [] if cert else [dict(cert.witness)], details)


def _write(ctx: Context, fn: Callable[[Path], Path | list[Path]]) -> list[str]:
    if ctx.out is None:
        return []
    res = fn(ctx.out)
    return [str(p) for p in (res if isinstance(res, list) else [res])]


# ---------------------------------------------------------------------------
# commands


def cmd_validate(ctx: Context, args) -> Outcome:
    try:
        value = ctx.loader.load(ctx.path(args.file))
    except DocumentError as e:
        if e.kind == "LawViolation":
            return Outcome(False, [e.as_dict()])
        raise
    details: dict = {"kind": type(value).__name__}
    if isinstance(value, FinCat):
        details.update(objects=len(value.objects), morphisms=len(value.morphisms))
    if isinstance(value, PointedValue):
        try:
            pf = sfm.validate_pointed_fibration(value.proj, value.point, require_fibered=False)
        except CategoryError as e:
            return Outcome(False, [{"error": type(e).__name__, **e.witness}], details)
        details["point_fibered"] = pf.fibered
    return Outcome(True, [], details)


def cmd_slice(ctx: Context, args) -> Outcome:
    C = ctx.category(args.category)
    _require_object(C, args.object)
    build = cons.build_opslice if args.command == "opslice" else cons.build_slice
    S = build(C, args.object)
    out = Outcome(True, details={"name": S.carrier.name, "objects": len(S.carrier.objects),
                                 "morphisms": len(S.carrier.morphisms)})
    out.written = _write(ctx, lambda d: export_functor(S.projection, d, file_stem(S.carrier.name) + "-proj"))
    return out


def cmd_arrow(ctx: Context, args) -> Outcome:
    C = ctx.category(args.category)
    A = cons.build_arrow_category(C)
    out = Outcome(True, details={"name": A.carrier.name, "objects": len(A.carrier.objects),
                                 "morphisms": len(A.carrier.morphisms)})
    out.written = _write(ctx, lambda d: [export_fibration(A.cod_functor, d, "cod"),
                                         export_fibration(A.dom_functor, d, "dom")])
    return out


def cmd_product(ctx: Context, args) -> Outcome:
    B, X = ctx.category(args.first), ctx.category(args.second)
    prod = product_category(B, X)
    out = Outcome(True, details={"name": prod.category.name, "objects": len(prod.category.objects),
                                 "morphisms": len(prod.category.morphisms)})
    out.written = _write(ctx, lambda d: export_fibration(prod.pi1, d, "pi1"))
    return out


def cmd_pullback(ctx: Context, args) -> Outcome:
    C = ctx.category(args.category)
    for f in (args.f, args.g):
        _require_morphism(C, f)
    if C.cod(args.f) != C.cod(args.g):
        raise InvalidInput("the two morphisms do not share a codomain", {"f": args.f, "g": args.g})
    pb = pullback(C, args.f, args.g)
    if pb is None:
        return Outcome(False, [{"f": args.f, "g": args.g, "reason": "no pullback"}])
    return Outcome(True, details={"apex": pb.apex, "p1": pb.p1, "p2": pb.p2})


def cmd_terminal(ctx: Context, args) -> Outcome:
    C = ctx.category(args.category)
    t = terminal_object(C)
    if t is None:
        return Outcome(False, [{"category": C.name, "reason": "no terminal object"}])
    return Outcome(True, details={"terminal": t})


def cmd_is_fibration(ctx: Context, args) -> Outcome:
    P = ctx.fibration(args.bundle).proj
    cert = fibm.is_fibration(P)
    out = _cert(cert)
    if not cert:
        Y, u = cert.witness["object"], cert.witness["base_morphism"]
        # for a codomain fibration the missing lift is a cospan with no pullback
        C = P.target
        if P == fibm.codomain_fibration(C):
            out.witnesses[0]["cospan"] = [u, Y]
            out.witnesses[0]["cospan_objects"] = [C.dom(u), C.cod(u), C.dom(Y)]
    else:
        out.details["cleavage_size"] = len(cert.value.cleavage)
    return out


def cmd_fiber(ctx: Context, args) -> Outcome:
    P = ctx.fibration(args.bundle).proj
    _require_object(P.target, args.object)
    F = fibm.fiber_category(P, args.object)
    out = Outcome(True, details={"name": F.name, "objects": list(F.objects),
                                 "morphisms": len(F.morphisms)})
    out.written = _write(ctx, lambda d: export_category(F, d))
    return out


def cmd_vertical(ctx: Context, args) -> Outcome:
    P = ctx.fibration(args.bundle).proj
    V = fibm.vertical_category(P)
    out = Outcome(True, details={"name": V.carrier.name, "objects": len(V.carrier.objects),
                                 "morphisms": len(V.carrier.morphisms)})
    out.written = _write(ctx, lambda d: export_functor(V.cod_functor, d, "vertical-cod"))
    return out


def cmd_fibered_pullbacks(ctx: Context, args) -> Outcome:
    P = ctx.fibration(args.bundle).proj
    cert = fibm.is_fibration(P)
    if not cert:
        return Outcome(False, [{"reason": "not a fibration", **cert.witness}])
    return _cert(fibm.has_fibered_pullbacks(cert.value))


def cmd_change_of_base(ctx: Context, args) -> Outcome:
    P = ctx.fibration(args.bundle).proj
    F = ctx.load(args.functor, "functor")
    if F.target != P.target:
        raise InvalidInput("the functor does not land in the base of the fibration", {})
    cb = fibm.change_of_base(P, F)
    out = Outcome(True, details={"name": cb.total.name, "objects": len(cb.total.objects),
                                 "morphisms": len(cb.total.morphisms),
                                 "fibration": cb.fibration is not None})
    out.written = _write(ctx, lambda d: export_fibration(cb.projection, d, "change-of-base"))
    return out


def _pointed(ctx: Context, ref: str, strict: bool) -> sfm.PointedFibration:
    value = ctx.pointed(ref)
    return sfm.validate_pointed_fibration(value.proj, value.point, require_fibered=strict)


def cmd_slice_fibration(ctx: Context, args) -> Outcome:
    pf = _pointed(ctx, args.bundle, strict=False)
    sf = sfm.slice_fibration(pf)
    out = Outcome(True, details={
        "name": sf.total.name, "objects": len(sf.total.objects), "morphisms": len(sf.total.morphisms),
        "point_fibered": pf.fibered,
        "terminally_pointed": bool(sfm.is_terminally_pointed(sf.terminal_point)),
    })
    out.written = _write(ctx, lambda d: export_pointed(sf.proj, sf.terminal_point.point, d, "slice"))
    return out


def cmd_check_adjunction(ctx: Context, args) -> Outcome:
    C = ctx.category(args.category)
    morphisms = [args.morphism] if args.morphism else list(C.morphisms)
    for f in morphisms:
        _require_morphism(C, f)
        try:
            cons.adjunction_sigma_reindex(C, f)
        except CategoryError as e:
            return Outcome(False, [{"morphism": f, "error": type(e).__name__, **e.witness}])
    return Outcome(True, details={"checked": morphisms})


def cmd_check_fibered_adjunction(ctx: Context, args) -> Outcome:
    p = _pointed(ctx, args.source, strict=False)
    q = _pointed(ctx, args.target, strict=False)
    alpha = ctx.load(args.comparison, "nat_trans")
    if alpha.source != p.point or alpha.target != q.point:
        raise InvalidInput("the comparison must run from the first point to the second", {})
    alpha = sfm.point_comparison(p, q, dict(alpha.components), alpha.name)
    sfp, sfq = sfm.slice_fibration(p), sfm.slice_fibration(q)
    sfm.fibered_adjunction_sigma_alpha(alpha, sfp, sfq)
    return Outcome(True, details={"objects": [len(sfp.total.objects), len(sfq.total.objects)]})


def cmd_check_universal_arrow(ctx: Context, args) -> Outcome:
    value = ctx.loader.load(ctx.path(args.file))
    if isinstance(value, FinCat):
        if args.object is None:
            objs = list(value.objects)
        else:
            _require_object(value, args.object)
            objs = [args.object]
        total = 0
        for a in objs:
            cert = verify_universal_arrow(PointedCat(a, value), budget=ctx.budget)
            if not cert:
                return Outcome(False, [{"point": a, **cert.witness}])
            total += cert.witness["tests"]
        return Outcome(True, details={"points": objs, "tests": total})
    if isinstance(value, PointedValue):
        pf = sfm.validate_pointed_fibration(value.proj, value.point)
        cert = sfm.verify_fiberwise_universal_arrow(pf, budget=ctx.budget)
        return _cert(cert, tests=cert.witness.get("tests"))
    raise InvalidInput("expected a category or a pointed bundle", {"kind": type(value).__name__})


# named propositions; a few short aliases are accepted too
def _prop_slice_terminal_equiv(ctx, C: FinCat) -> Outcome:
    if terminal_object(C) is None:
        raise InvalidInput(f"{C.name} has no terminal object", {})
    _, cert = cons.slice_terminal_equiv(C)
    return _cert(cert)


def _prop_slice_of_slice(ctx, C: FinCat) -> Outcome:
    for f in C.morphisms:
        try:
            cons.slice_of_slice_iso(C, f)
        except CategoryError as e:
            return Outcome(False, [{"morphism": f, "error": type(e).__name__, **e.witness}])
    return Outcome(True, details={"morphisms": len(C.morphisms)})


def _prop_sigma_reindex(ctx, C: FinCat) -> Outcome:
    for f in C.morphisms:
        try:
            cons.adjunction_sigma_reindex(C, f)
        except CategoryError as e:
            return Outcome(False, [{"morphism": f, "error": type(e).__name__, **e.witness}])
    return Outcome(True, details={"morphisms": len(C.morphisms)})


def _prop_slice_terminal(ctx, C: FinCat) -> Outcome:
    for a in C.objects:
        t = terminal_object(cons.build_slice(C, a).carrier)
        if t != f"id:{a}":
            return Outcome(False, [{"object": a, "terminal": t}])
    return Outcome(True)


def _prop_cod_iff_pullbacks(ctx, C: FinCat) -> Outcome:
    fib = fibm.is_fibration(fibm.codomain_fibration(C))
    pbs = has_pullbacks(C)
    if bool(fib) != bool(pbs):
        return Outcome(False, [{"is_fibration": bool(fib), "has_pullbacks": bool(pbs)}])
    return Outcome(True, details={"is_fibration": bool(fib), "has_pullbacks": bool(pbs),
                                  "witness": dict(pbs.witness)})


def _prop_fibered_pullbacks_iff(ctx, value: FibrationValue) -> Outcome:
    fib = value.cleaved()
    a = bool(fibm.has_fibered_pullbacks(fib))
    b = bool(fibm.is_fibration(fibm.vertical_category(fib.proj).cod_functor))
    return Outcome(a == b, [] if a == b else [{"fibered_pullbacks": a, "cod_fibration": b}],
                   {"fibered_pullbacks": a})


def _prop_slice_fiber_equiv(ctx, value: PointedValue) -> Outcome:
    pf = sfm.validate_pointed_fibration(value.proj, value.point, require_fibered=False)
    sf = sfm.slice_fibration(pf)
    for I in pf.base.objects:
        cert = sfm.slice_fiber_equiv(sf, I)
        if not cert:
            return Outcome(False, [{"base_object": I, **cert.witness}])
    return Outcome(True)


def _prop_cartesian_iff_pullback(ctx, value: PointedValue) -> Outcome:
    pf = sfm.validate_pointed_fibration(value.proj, value.point, require_fibered=False)
    return _cert(sfm.cartesian_iff_pullback(sfm.slice_fibration(pf)))


PROPOSITIONS: dict[str, tuple[str, Callable]] = {
    "slice-terminal-equiv": ("category", _prop_slice_terminal_equiv),
    "slice-of-slice": ("category", _prop_slice_of_slice),
    "sigma-reindex-adjunction": ("category", _prop_sigma_reindex),
    "slice-terminal": ("category", _prop_slice_terminal),
    "cod-fibration-iff-pullbacks": ("category", _prop_cod_iff_pullbacks),
    "fibered-pullbacks-iff-cod": ("fibration", _prop_fibered_pullbacks_iff),
    "slice-fiber-equiv": ("pointed", _prop_slice_fiber_equiv),
    "cartesian-iff-pullback": ("pointed", _prop_cartesian_iff_pullback),
}

ALIASES = {
    "fewprop-i": "slice-terminal-equiv",
    "fewprop-ii": "slice-of-slice",
    "fewprop-v": "sigma-reindex-adjunction",
    "fewprop-vi": "slice-terminal",
}


def cmd_check_prop(ctx: Context, args) -> Outcome:
    name = ALIASES.get(args.proposition, args.proposition)
    if name not in PROPOSITIONS:
        raise InvalidInput(f"unknown proposition {args.proposition!r}",
                           {"known": sorted(PROPOSITIONS) + sorted(ALIASES)})
    kind, fn = PROPOSITIONS[name]
    out = fn(ctx, ctx.load(args.file, kind))
    out.details["proposition"] = name
    return out


def cmd_export_fixtures(ctx: Context, args) -> Outcome:
    from .fixtures import write_fixture_files

    written = write_fixture_files(Path(args.directory))
    return Outcome(True, details={"files": len(written)}, written=[str(p) for p in written])


# ---------------------------------------------------------------------------
# parser and dispatch


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, help="directory for exported documents")
    common.add_argument("--report", choices=("json", "text"), default="text")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search step budget")
    common.add_argument("--fixtures", type=Path, help="directory for resolving relative input paths")

    parser = argparse.ArgumentParser(prog="catslice", description="Finite categories, slices and fibrations.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, *positionals, help=None):
        p = sub.add_parser(name, parents=[common], help=help)
        for pos in positionals:
            if isinstance(pos, tuple):
                p.add_argument(pos[0], nargs="?", default=None)
            else:
                p.add_argument(pos)
        p.set_defaults(run=fn)
        return p

    add("validate", cmd_validate, "file", help="parse and validate any document")
    add("slice", cmd_slice, "category", "object", help="build C/A")
    add("opslice", cmd_slice, "category", "object", help="build I\\C")
    add("arrow", cmd_arrow, "category", help="build the arrow category")
    add("product", cmd_product, "first", "second", help="build B x X")
    add("pullback", cmd_pullback, "category", "f", "g", help="canonical pullback of f and g")
    add("terminal", cmd_terminal, "category", help="find a terminal object")
    add("is-fibration", cmd_is_fibration, "bundle", help="certify a fibration bundle")
    add("fiber", cmd_fiber, "bundle", "object", help="fibre over a base object")
    add("vertical-cat", cmd_vertical, "bundle", help="category of vertical morphisms")
    add("fibered-pullbacks", cmd_fibered_pullbacks, "bundle", help="fibre pullbacks stable under reindexing")
    add("change-of-base", cmd_change_of_base, "bundle", "functor", help="pull a fibration back")
    add("slice-fibration", cmd_slice_fibration, "bundle", help="slice fibration of a pointed bundle")
    add("check-adjunction", cmd_check_adjunction, "category", ("morphism",),
        help="post-composition left adjoint to pullback")
    add("check-fibered-adjunction", cmd_check_fibered_adjunction, "source", "target", "comparison",
        help="fibered adjunction between slice fibrations along a point comparison")
    add("check-universal-arrow", cmd_check_universal_arrow, "file", ("object",),
        help="universal arrow for a pointed category or pointed bundle")
    add("check-prop", cmd_check_prop, "proposition", "file", help="check a named proposition")
    add("export-fixtures", cmd_export_fixtures, "directory", help="write the standard fixture documents")
    return parser


def _inputs(args) -> dict:
    skip = {"run", "report", "out", "budget", "fixtures", "command"}
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


def render_text(report: dict) -> str:
    lines = [f"{report['command']}: {report['verdict']}"]
    for k, v in report.get("details", {}).items():
        lines.append(f"  {k}: {v}")
    for w in report["witnesses"]:
        lines.append("  witness: " + ", ".join(f"{k}={v}" for k, v in w.items()))
    for p in report.get("written", []):
        lines.append(f"  wrote {p}")
    return "\n".join(lines)


def run(argv: list[str] | None = None) -> tuple[int, dict]:
    """Dispatch without printing; returns the exit code and the report."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        code = 0 if e.code == 0 else 2
        return code, {"command": None, "inputs": {}, "verdict": "invalid", "witnesses": [],
                      "timings": {}, "format": "text"}
    ctx = Context(Loader(), args.fixtures, args.out, args.budget)
    start = time.perf_counter()
    report: dict[str, Any] = {"command": args.command, "inputs": _inputs(args), "format": args.report}
    try:
        outcome = args.run(ctx, args)
        code = 0 if outcome.holds else 1
        report.update(verdict="holds" if outcome.holds else "fails", witnesses=outcome.witnesses,
                      details=outcome.details, written=outcome.written)
    except DocumentError as e:
        code = 2
        report.update(verdict="invalid", witnesses=[e.as_dict()])
    except InvalidInput as e:
        code = 2
        report.update(verdict="invalid", witnesses=[{"error": "InvalidInput", "message": str(e), **e.witness}])
    except CategoryError as e:
        code = 1
        report.update(verdict="fails", witnesses=[{"error": type(e).__name__, "message": str(e), **e.witness}])
    except (OSError, ValueError, RecursionError) as e:
        code = 2
        report.update(verdict="invalid", witnesses=[{"error": type(e).__name__, "message": str(e)}])
    report["timings"] = {"total_seconds": round(time.perf_counter() - start, 6)}
    return code, report


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, report = run(argv)
    if report["command"] is None:
        # argparse already printed usage or help
        return code
    if report.pop("format") == "json":
        print(json.dumps(report, indent=2, sort_keys=True, default=str))
    else:
        print(render_text(report), file=sys.stderr if code == 2 else sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
