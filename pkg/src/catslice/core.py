"""Finite categories presented by a stored, total composition table.

Composition is always written in diagrammatic order: ``C.compose(f, g)`` is the
composite ``g∘f`` (first ``f``, then ``g``).  Identities are never supplied by
the user; every object ``a`` gets a synthesized identity named ``id:a``.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import (
    AssociativityViolation,
    BudgetExceeded,
    CategoryError,
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
    ShapeMismatch,
    UnknownMorphism,
    UnknownObject,
)

NAME_PATTERN = re.compile(r"[A-Za-z0-9_():,/|\-]+")
ID_PREFIX = "id:"
DEFAULT_BUDGET = 500_000


def identity_name(obj: str) -> str:
    return ID_PREFIX + obj


def valid_name(name: object) -> bool:
    return isinstance(name, str) and NAME_PATTERN.fullmatch(name) is not None


@dataclass(frozen=True)
class Certificate:
    """Outcome of a finite check. Truthy iff the checked claim holds."""

    claim: str
    ok: bool
    witness: dict = field(default_factory=dict)
    value: Any = field(default=None, compare=False, repr=False)

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Presentation:
    """Raw, unvalidated category data as read from a document.

    ``composition`` entries are ``(first, second, result)`` with
    ``result = second∘first``.
    """

    name: str
    objects: tuple[str, ...]
    morphisms: tuple[tuple[str, str, str], ...] = ()
    composition: tuple[tuple[str, str, str], ...] = ()


class FinCat:
    """A validated finite category. Immutable; compare structurally (names ignored)."""

    def __init__(
        self,
        name: str,
        objects: Iterable[str],
        arrows: Mapping[str, tuple[str, str]],
        table: Mapping[tuple[str, str], str],
        payloads: Mapping[str, Hashable] | None = None,
    ):
        self.name = name
        self.objects: tuple[str, ...] = tuple(sorted(objects))
        self._arrows = dict(arrows)
        self._table = dict(table)
        self.morphisms: tuple[str, ...] = tuple(sorted(self._arrows))
        self._hom: dict[tuple[str, str], list[str]] = defaultdict(list)
        self._into: dict[str, list[str]] = defaultdict(list)
        self._out: dict[str, list[str]] = defaultdict(list)
        for f in self.morphisms:
            a, b = self._arrows[f]
            self._hom[a, b].append(f)
            self._into[b].append(f)
            self._out[a].append(f)
        self._payload = dict(payloads or {})
        self._by_payload = {
            (self._arrows[n][0], self._arrows[n][1], p): n for n, p in self._payload.items()
        }
        self._key = None
        self._memo: dict = {}

    # -- basic structure -------------------------------------------------

    def dom(self, f: str) -> str:
        try:
            return self._arrows[f][0]
        except KeyError:
            raise UnknownMorphism(f"no morphism {f!r} in {self.name}", {"morphism": f}) from None

    def cod(self, f: str) -> str:
        try:
            return self._arrows[f][1]
        except KeyError:
            raise UnknownMorphism(f"no morphism {f!r} in {self.name}", {"morphism": f}) from None

    def ends(self, f: str) -> tuple[str, str]:
        return self._arrows[f]

    def has_object(self, a: str) -> bool:
        return a in self._objset

    @property
    def _objset(self) -> frozenset:
        s = self._memo.get("objset")
        if s is None:
            s = self._memo["objset"] = frozenset(self.objects)
        return s

    def require_object(self, a: str) -> None:
        if a not in self._objset:
            raise UnknownObject(f"no object {a!r} in {self.name}", {"object": a})

    def require_morphism(self, f: str) -> None:
        if f not in self._arrows:
            raise UnknownMorphism(f"no morphism {f!r} in {self.name}", {"morphism": f})

    def identity(self, a: str) -> str:
        self.require_object(a)
        return identity_name(a)

    def is_identity(self, f: str) -> bool:
        a, b = self._arrows[f]
        return a == b and f == identity_name(a)

    def compose(self, f: str, g: str) -> str:
        """Return ``g∘f``."""
        try:
            return self._table[f, g]
        except KeyError:
            self.require_morphism(f)
            self.require_morphism(g)
            raise NotComposable(
                f"cod({f}) != dom({g})", {"first": f, "second": g}
            ) from None

    def compose_path(self, *path: str) -> str:
        """Compose a path given in diagrammatic order."""
        result = path[0]
        for g in path[1:]:
            result = self.compose(result, g)
        return result

    def hom(self, a: str, b: str) -> tuple[str, ...]:
        return tuple(self._hom.get((a, b), ()))

    def into(self, b: str) -> tuple[str, ...]:
        return tuple(self._into.get(b, ()))

    def out_of(self, a: str) -> tuple[str, ...]:
        return tuple(self._out.get(a, ()))

    def non_identity(self) -> tuple[str, ...]:
        return tuple(f for f in self.morphisms if not self.is_identity(f))

    def composable_pairs(self) -> Iterator[tuple[str, str]]:
        return iter(sorted(self._table))

    def is_iso(self, f: str) -> bool:
        return self.inverse(f) is not None

    def inverse(self, f: str) -> str | None:
        a, b = self._arrows[f]
        for g in self.hom(b, a):
            if self._table[f, g] == identity_name(a) and self._table[g, f] == identity_name(b):
                return g
        return None

    # -- payload lookup for constructed categories -------------------------

    def payload(self, f: str) -> Hashable:
        return self._payload[f]

    def named(self, dom: str, cod: str, payload: Hashable) -> str:
        try:
            return self._by_payload[dom, cod, payload]
        except KeyError:
            raise UnknownMorphism(
                f"no morphism {dom}->{cod} with payload {payload!r} in {self.name}",
                {"dom": dom, "cod": cod, "payload": repr(payload)},
            ) from None

    # -- conversions ---------------------------------------------------------

    def presentation(self) -> Presentation:
        morphisms = tuple((f, *self._arrows[f]) for f in self.non_identity())
        composition = tuple(
            (f, g, h)
            for (f, g), h in sorted(self._table.items())
            if not self.is_identity(f) and not self.is_identity(g)
        )
        return Presentation(self.name, self.objects, morphisms, composition)

    def renamed(self, name: str) -> "FinCat":
        return FinCat(name, self.objects, self._arrows, self._table, self._payload)

    # -- equality ------------------------------------------------------------

    def _structure(self):
        if self._key is None:
            self._key = (
                self.objects,
                tuple(sorted(self._arrows.items())),
                tuple(sorted(self._table.items())),
            )
        return self._key

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, FinCat):
            return NotImplemented
        return self._structure() == other._structure()

    def __hash__(self) -> int:
        h = self._memo.get("hash")
        if h is None:
            h = self._memo["hash"] = hash(self._structure())
        return h

    def __repr__(self) -> str:
        return f"FinCat({self.name!r}, {len(self.objects)} objects, {len(self.morphisms)} morphisms)"


# ---------------------------------------------------------------------------
# validation


def category_violations(raw: Presentation) -> list[CategoryError]:
    """Every law violated by ``raw``, each with a witness. Empty means valid."""
    out: list[CategoryError] = []
    if not valid_name(raw.name):
        out.append(InvalidName(f"bad category name {raw.name!r}", {"name": raw.name}))

    objects: set[str] = set()
    for a in raw.objects:
        if not valid_name(a):
            out.append(InvalidName(f"bad object name {a!r}", {"object": a}))
        if a in objects:
            out.append(DuplicateName(f"object {a!r} declared twice", {"object": a}))
        objects.add(a)

    arrows: dict[str, tuple[str, str]] = {identity_name(a): (a, a) for a in objects}
    for name, dom, cod in raw.morphisms:
        if not valid_name(name):
            out.append(InvalidName(f"bad morphism name {name!r}", {"morphism": name}))
        elif name.startswith(ID_PREFIX):
            out.append(
                InvalidName(f"morphism name {name!r} uses the reserved 'id:' prefix", {"morphism": name})
            )
            continue
        if name in arrows:
            out.append(DuplicateName(f"morphism {name!r} declared twice", {"morphism": name}))
            continue
        for end in (dom, cod):
            if end not in objects:
                out.append(
                    DanglingReference(f"morphism {name!r} mentions unknown object {end!r}",
                                      {"morphism": name, "object": end})
                )
        arrows[name] = (dom, cod)

    table: dict[tuple[str, str], str] = {}
    for first, second, result in raw.composition:
        bad = [m for m in (first, second, result) if m not in arrows]
        if bad:
            out.append(
                DanglingReference(f"composition entry mentions unknown morphism {bad[0]!r}",
                                  {"first": first, "second": second, "result": result, "unknown": bad[0]})
            )
            continue
        if arrows[first][1] != arrows[second][0]:
            out.append(
                NotComposable(f"{first} then {second} is not composable",
                              {"first": first, "second": second})
            )
            continue
        if arrows[result] != (arrows[first][0], arrows[second][1]):
            out.append(
                NotClosed(f"{second}∘{first} = {result} has the wrong domain/codomain",
                          {"first": first, "second": second, "result": result})
            )
            continue
        if first.startswith(ID_PREFIX) or second.startswith(ID_PREFIX):
            expected = second if first.startswith(ID_PREFIX) else first
            if result != expected:
                out.append(
                    IdentityLawViolation(f"{second}∘{first} must be {expected}",
                                         {"first": first, "second": second, "result": result})
                )
            continue
        if (first, second) in table and table[first, second] != result:
            out.append(
                DuplicateName(f"conflicting entries for {second}∘{first}",
                              {"first": first, "second": second,
                               "results": [table[first, second], result]})
            )
            continue
        table[first, second] = result

    if out:
        return out

    for f, (a, b) in sorted(arrows.items()):
        table[identity_name(a), f] = f
        table[f, identity_name(b)] = f
    out_of: dict[str, list[str]] = defaultdict(list)
    for f, (a, _) in sorted(arrows.items()):
        out_of[a].append(f)
    for f, (_, b) in sorted(arrows.items()):
        for g in out_of[b]:
            if (f, g) not in table:
                out.append(NonTotal(f"missing composite {g}∘{f}", {"first": f, "second": g}))
    if out:
        return out
    return _associativity_violations(arrows, table, out_of)


def _associativity_violations(arrows, table, out_of) -> list[CategoryError]:
    out = []
    for (f, g), gf in sorted(table.items()):
        for h in out_of[arrows[g][1]]:
            left = table[gf, h]
            right = table[f, table[g, h]]
            if left != right:
                out.append(
                    AssociativityViolation(
                        f"({h}∘{g})∘{f} = {right} but {h}∘({g}∘{f}) = {left}",
                        {"first": f, "second": g, "third": h, "left": left, "right": right},
                    )
                )
    return out


def validate_category(raw: Presentation) -> FinCat:
    """Validate a presentation. Raises the first violation found; the raised
    exception's ``violations`` attribute lists all of them."""
    violations = category_violations(raw)
    if violations:
        err = violations[0]
        err.violations = violations
        raise err
    arrows = {identity_name(a): (a, a) for a in raw.objects}
    arrows.update({n: (d, c) for n, d, c in raw.morphisms})
    table = {(f, g): h for f, g, h in raw.composition}
    for f, (a, b) in arrows.items():
        table[identity_name(a), f] = f
        table[f, identity_name(b)] = f
    return FinCat(raw.name, raw.objects, arrows, table)


def law_violations(C: FinCat, associativity: bool = True) -> list[CategoryError]:
    """Re-run the closure, identity and associativity checks on a built category."""
    out: list[CategoryError] = []
    for (f, g), h in C._table.items():
        if C._arrows[f][1] != C._arrows[g][0] or C._arrows[h] != (C._arrows[f][0], C._arrows[g][1]):
            out.append(NotClosed(f"bad composite {g}∘{f} = {h}", {"first": f, "second": g, "result": h}))
    for f in C.morphisms:
        a, b = C._arrows[f]
        if C._table.get((identity_name(a), f)) != f or C._table.get((f, identity_name(b))) != f:
            out.append(IdentityLawViolation(f"identity law fails at {f}", {"morphism": f}))
    if out or not associativity:
        return out
    return _associativity_violations(C._arrows, C._table, C._out)


def build_category(
    name: str,
    objects: Iterable[str],
    arrows: Iterable[tuple[str, str, Hashable]],
    compose: Callable[[Hashable, Hashable], Hashable],
    label: Callable[[Hashable], str],
    identity: Callable[[str], Hashable],
    check: bool = True,
    componentwise: bool = False,
) -> FinCat:
    """Materialize a concrete category whose morphisms carry payloads.

    ``arrows`` lists ``(dom, cod, payload)`` for every morphism; identity
    payloads may be omitted. ``compose(p, q)`` composes payloads
    diagrammatically. Names come from ``label``; clashing labels are
    qualified with their endpoints. Payloads stay attached to the result, so
    ``C.named(dom, cod, payload)`` finds a morphism again.

    Pass ``componentwise=True`` when payloads compose coordinatewise in
    already validated categories: associativity is then inherited and only
    the closure and identity checks run (the full triple scan is cubic).
    """
    objects = sorted(set(objects))
    ids = {a: identity(a) for a in objects}
    entries = {(a, a, ids[a]) for a in objects}
    entries.update(arrows)

    names: dict[tuple, str] = {(a, a, ids[a]): identity_name(a) for a in objects}
    groups: dict[str, list[tuple]] = defaultdict(list)
    for e in entries:
        if e not in names:
            groups[label(e[2])].append(e)
    for lab, members in groups.items():
        if lab.startswith(ID_PREFIX):
            raise InvalidName(f"constructed label {lab!r} collides with identity naming", {"label": lab})
        if len(members) == 1:
            names[members[0]] = lab
            continue
        by_ends: dict[tuple[str, str], list[tuple]] = defaultdict(list)
        for m in members:
            by_ends[m[0], m[1]].append(m)
        for (d, c), ms in by_ends.items():
            base = f"{lab}|{d}|{c}"
            if len(ms) == 1:
                names[ms[0]] = base
            else:
                for i, m in enumerate(sorted(ms, key=repr)):
                    names[m] = f"{base}|{i}"
    if len(set(names.values())) != len(names):
        seen: dict[str, tuple] = {}
        for k, v in names.items():
            if v in seen:
                raise DuplicateName(f"constructed name {v!r} is not unique", {"name": v})
            seen[v] = k

    arrow_ends = {n: (e[0], e[1]) for e, n in names.items()}
    payloads = {n: e[2] for e, n in names.items()}
    into: dict[str, list[tuple]] = defaultdict(list)
    out_of: dict[str, list[tuple]] = defaultdict(list)
    for e in names:
        into[e[1]].append(e)
        out_of[e[0]].append(e)
    table = {}
    for b in objects:
        for f in into[b]:
            for g in out_of[b]:
                key = (f[0], g[1], compose(f[2], g[2]))
                h = names.get(key)
                if h is None:
                    raise NotClosed(
                        f"composite of {names[f]} and {names[g]} is not a listed morphism",
                        {"first": names[f], "second": names[g], "payload": repr(key[2])},
                    )
                table[names[f], names[g]] = h
    C = FinCat(name, objects, arrow_ends, table, payloads)
    if check:
        violations = law_violations(C, associativity=not componentwise)
        if violations:
            raise violations[0]
    return C


def terminal_category(name: str = "One", obj: str = "pt") -> FinCat:
    return validate_category(Presentation(name, (obj,)))


def discrete_category(name: str, objects: Sequence[str]) -> FinCat:
    return validate_category(Presentation(name, tuple(objects)))


# ---------------------------------------------------------------------------
# functors and natural transformations


class Functor:
    """A validated functor. ``ob`` and ``mor`` are total maps (identities included)."""

    def __init__(
        self,
        name: str,
        source: FinCat,
        target: FinCat,
        ob: Mapping[str, str],
        mor: Mapping[str, str],
        check: bool = True,
    ):
        self.name = name
        self.source = source
        self.target = target
        ob = dict(ob)
        mor = dict(mor)
        for a in source.objects:
            if a in ob and identity_name(a) not in mor:
                mor[identity_name(a)] = identity_name(ob[a])
        self.ob: Mapping[str, str] = MappingProxyType(ob)
        self.mor: Mapping[str, str] = MappingProxyType(mor)
        self._memo: dict = {}
        if check:
            violation = functor_violation(self)
            if violation is not None:
                raise violation

    def __call__(self, f: str) -> str:
        return self.mor[f]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Functor):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and dict(self.ob) == dict(other.ob)
            and dict(self.mor) == dict(other.mor)
        )

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.mor.items())))

    def __repr__(self) -> str:
        return f"Functor({self.name!r}: {self.source.name} -> {self.target.name})"


def functor_violation(F: Functor) -> CategoryError | None:
    C, D = F.source, F.target
    for a in C.objects:
        if a not in F.ob:
            return FunctorLawViolation(f"{F.name} has no image for object {a}", {"object": a})
        if F.ob[a] not in D._objset:
            return FunctorLawViolation(f"{F.name}({a}) = {F.ob[a]} is not an object of {D.name}",
                                       {"object": a, "image": F.ob[a]})
    for f in C.morphisms:
        if f not in F.mor:
            return FunctorLawViolation(f"{F.name} has no image for morphism {f}", {"morphism": f})
        img = F.mor[f]
        if img not in D._arrows:
            return FunctorLawViolation(f"{F.name}({f}) = {img} is not a morphism of {D.name}",
                                       {"morphism": f, "image": img})
        a, b = C.ends(f)
        if D.ends(img) != (F.ob[a], F.ob[b]):
            return FunctorLawViolation(
                f"{F.name}({f}) = {img} has the wrong domain/codomain",
                {"morphism": f, "image": img, "expected": [F.ob[a], F.ob[b]]},
            )
    for a in C.objects:
        if F.mor[identity_name(a)] != identity_name(F.ob[a]):
            return FunctorLawViolation(f"{F.name} does not preserve the identity of {a}", {"object": a})
    for (f, g), h in C._table.items():
        if D.compose(F.mor[f], F.mor[g]) != F.mor[h]:
            return FunctorLawViolation(
                f"{F.name} does not preserve {g}∘{f}",
                {"first": f, "second": g, "composite": h},
            )
    return None


def identity_functor(C: FinCat) -> Functor:
    return Functor(f"1({C.name})", C, C, {a: a for a in C.objects},
                   {f: f for f in C.morphisms}, check=False)


def compose_functors(F: Functor, G: Functor) -> Functor:
    """``G∘F`` (first ``F``, then ``G``)."""
    if F.target != G.source:
        raise ShapeMismatch(f"cannot compose {F.name} then {G.name}",
                            {"first": F.name, "second": G.name})
    return Functor(
        f"{G.name}.{F.name}",
        F.source,
        G.target,
        {a: G.ob[b] for a, b in F.ob.items()},
        {f: G.mor[g] for f, g in F.mor.items()},
        check=False,
    )


def constant_functor(C: FinCat, D: FinCat, d: str) -> Functor:
    D.require_object(d)
    return Functor(f"const({d})", C, D, {a: d for a in C.objects},
                   {f: identity_name(d) for f in C.morphisms}, check=False)


class NatTrans:
    """A natural transformation ``source ⇒ target``, components indexed by objects."""

    def __init__(self, name: str, source: Functor, target: Functor,
                 components: Mapping[str, str], check: bool = True):
        self.name = name
        self.source = source
        self.target = target
        self.components: Mapping[str, str] = MappingProxyType(dict(components))
        if check:
            violation = nat_trans_violation(self)
            if violation is not None:
                raise violation

    def __getitem__(self, a: str) -> str:
        return self.components[a]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NatTrans):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and dict(self.components) == dict(other.components))

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.components.items())))

    def __repr__(self) -> str:
        return f"NatTrans({self.name!r}: {self.source.name} => {self.target.name})"


def nat_trans_violation(alpha: NatTrans) -> CategoryError | None:
    F, G = alpha.source, alpha.target
    if F.source != G.source or F.target != G.target:
        return ShapeMismatch(f"{F.name} and {G.name} are not parallel", {"source": F.name, "target": G.name})
    C, D = F.source, F.target
    for a in C.objects:
        if a not in alpha.components:
            return MissingComponent(f"{alpha.name} has no component at {a}", {"object": a})
        comp = alpha.components[a]
        if comp not in D._arrows or D.ends(comp) != (F.ob[a], G.ob[a]):
            return ShapeMismatch(
                f"component {comp} at {a} is not a morphism {F.ob[a]} -> {G.ob[a]}",
                {"object": a, "component": comp},
            )
    for f in C.non_identity():
        a, b = C.ends(f)
        left = D.compose(F.mor[f], alpha.components[b])
        right = D.compose(alpha.components[a], G.mor[f])
        if left != right:
            return NaturalitySquareViolation(
                f"naturality square of {alpha.name} fails at {f}",
                {"morphism": f, "component_dom": alpha.components[a],
                 "component_cod": alpha.components[b], "left": left, "right": right},
            )
    return None


def check_nat_trans(components: Mapping[str, str], F: Functor, G: Functor,
                    name: str = "alpha") -> NatTrans:
    return NatTrans(name, F, G, components)


def identity_nat_trans(F: Functor) -> NatTrans:
    return NatTrans(f"1({F.name})", F, F,
                    {a: identity_name(F.ob[a]) for a in F.source.objects}, check=False)


def whisker_left(G: Functor, alpha: NatTrans) -> NatTrans:
    """``Gα``: apply ``G`` to every component of ``alpha``."""
    F1, F2 = alpha.source, alpha.target
    if F1.target != G.source:
        raise ShapeMismatch(f"cannot whisker {alpha.name} by {G.name}", {"functor": G.name})
    return NatTrans(
        f"{G.name}{alpha.name}",
        compose_functors(F1, G),
        compose_functors(F2, G),
        {a: G.mor[c] for a, c in alpha.components.items()},
        check=False,
    )


def whisker_right(gamma: NatTrans, p: Functor) -> NatTrans:
    """``γp``: components ``γ_{pI}``."""
    if p.target != gamma.source.source:
        raise ShapeMismatch(f"cannot whisker {gamma.name} by {p.name}", {"functor": p.name})
    return NatTrans(
        f"{gamma.name}{p.name}",
        compose_functors(p, gamma.source),
        compose_functors(p, gamma.target),
        {a: gamma.components[p.ob[a]] for a in p.source.objects},
        check=False,
    )


def vertical_compose(beta: NatTrans, alpha: NatTrans) -> NatTrans:
    """``β∘α`` for ``α: F ⇒ G`` and ``β: G ⇒ H``."""
    if alpha.target != beta.source:
        raise ShapeMismatch(f"cannot compose {alpha.name} then {beta.name}",
                            {"first": alpha.name, "second": beta.name})
    D = alpha.source.target
    return NatTrans(
        f"{beta.name}.{alpha.name}",
        alpha.source,
        beta.target,
        {a: D.compose(alpha.components[a], beta.components[a]) for a in alpha.source.source.objects},
        check=False,
    )


# ---------------------------------------------------------------------------
# terminal objects and pullbacks


def compose(C: FinCat, f: str, g: str) -> str:
    return C.compose(f, g)


def terminal_object(C: FinCat) -> str | None:
    for t in C.objects:
        if all(len(C.hom(x, t)) == 1 for x in C.objects):
            return t
    return None


def is_terminal(C: FinCat, t: str) -> bool:
    return all(len(C.hom(x, t)) == 1 for x in C.objects)


@dataclass(frozen=True)
class Cone:
    apex: str
    legs: tuple[str, ...]


@dataclass(frozen=True, eq=False)
class Pullback:
    cospan: tuple[str, str]
    cone: Cone
    mediators: Mapping[Cone, str]

    @property
    def apex(self) -> str:
        return self.cone.apex

    @property
    def p1(self) -> str:
        return self.cone.legs[0]

    @property
    def p2(self) -> str:
        return self.cone.legs[1]

    def mediate(self, q1: str, q2: str, C: FinCat) -> str:
        return self.mediators[Cone(C.dom(q1), (q1, q2))]


def cones_over(C: FinCat, f: str, g: str) -> list[Cone]:
    """All commuting cones ``(P, p1, p2)`` with ``f∘p1 = g∘p2``, in canonical order."""
    x, a = C.ends(f)
    y, b = C.ends(g)
    if a != b:
        raise NotComposable(f"{f} and {g} do not form a cospan", {"f": f, "g": g})
    out = []
    for apex in C.objects:
        for p1 in C.hom(apex, x):
            fp1 = C.compose(p1, f)
            for p2 in C.hom(apex, y):
                if C.compose(p2, g) == fp1:
                    out.append(Cone(apex, (p1, p2)))
    return out


def _mediators(C: FinCat, cone: Cone, cones: Sequence[Cone]) -> dict[Cone, str] | None:
    p1, p2 = cone.legs
    found = {}
    for q in cones:
        ms = [m for m in C.hom(q.apex, cone.apex)
              if C.compose(m, p1) == q.legs[0] and C.compose(m, p2) == q.legs[1]]
        if len(ms) != 1:
            return None
        found[q] = ms[0]
    return found


def pullback(C: FinCat, f: str, g: str) -> Pullback | None:
    """The canonical pullback of the cospan ``f: X→A ← Y: g``, or ``None``.

    Candidates are tried in (apex, p1, p2) name order; the first cone through
    which every cone factors uniquely wins.
    """
    key = ("pullback", f, g)
    if key in C._memo:
        return C._memo[key]
    cones = cones_over(C, f, g)
    result = None
    for cone in cones:
        med = _mediators(C, cone, cones)
        if med is not None:
            result = Pullback((f, g), cone, MappingProxyType(med))
            break
    C._memo[key] = result
    return result


def is_pullback_square(C: FinCat, f: str, g: str, p1: str, p2: str) -> Certificate:
    """Is ``(dom p1, p1, p2)`` a pullback of the cospan ``(f, g)``?"""
    claim = "pullback square"
    if C.compose(p1, f) != C.compose(p2, g):
        return Certificate(claim, False, {"reason": "square does not commute", "f": f, "g": g,
                                          "p1": p1, "p2": p2})
    cone = Cone(C.dom(p1), (p1, p2))
    for q in cones_over(C, f, g):
        ms = [m for m in C.hom(q.apex, cone.apex)
              if C.compose(m, p1) == q.legs[0] and C.compose(m, p2) == q.legs[1]]
        if len(ms) != 1:
            return Certificate(claim, False, {"reason": "cone does not factor uniquely",
                                              "cone_apex": q.apex, "cone_legs": list(q.legs),
                                              "mediators": ms})
    return Certificate(claim, True)


def has_pullbacks(C: FinCat) -> Certificate:
    for b in C.objects:
        into = C.into(b)
        for i, f in enumerate(into):
            for g in into[i:]:
                if pullback(C, f, g) is None:
                    return Certificate("has pullbacks", False, {"f": f, "g": g, "cod": b})
    return Certificate("has pullbacks", True)


# ---------------------------------------------------------------------------
# products


@dataclass(frozen=True, eq=False)
class Product:
    category: FinCat
    pi1: Functor
    pi2: Functor


def pair_name(a: str, b: str) -> str:
    return f"({a},{b})"


def product_category(B: FinCat, X: FinCat) -> Product:
    key = ("product", X)
    if key not in B._memo:
        B._memo[key] = _product_category(B, X)
    return B._memo[key]


def _product_category(B: FinCat, X: FinCat) -> Product:
    objects = [pair_name(a, x) for a in B.objects for x in X.objects]
    pairs = {pair_name(a, x): (a, x) for a in B.objects for x in X.objects}
    arrows = [
        (pair_name(B.dom(u), X.dom(f)), pair_name(B.cod(u), X.cod(f)), (u, f))
        for u in B.morphisms for f in X.morphisms
    ]
    P = build_category(
        f"prod({B.name},{X.name})",
        objects,
        arrows,
        compose=lambda p, q: (B.compose(p[0], q[0]), X.compose(p[1], q[1])),
        label=lambda p: pair_name(*p),
        identity=lambda o: tuple(map(identity_name, pairs[o])),
        check=False,
    )
    pi1 = Functor(f"pi1({P.name})", P, B, {o: pairs[o][0] for o in P.objects},
                  {m: P.payload(m)[0] for m in P.morphisms}, check=False)
    pi2 = Functor(f"pi2({P.name})", P, X, {o: pairs[o][1] for o in P.objects},
                  {m: P.payload(m)[1] for m in P.morphisms}, check=False)
    return Product(P, pi1, pi2)


def diagonal(C: FinCat, product: Product | None = None) -> Functor:
    product = product or product_category(C, C)
    P = product.category
    mor = {}
    for f in C.morphisms:
        a, b = C.ends(f)
        mor[f] = P.named(pair_name(a, a), pair_name(b, b), (f, f))
    return Functor(f"Delta({C.name})", C, P, {a: pair_name(a, a) for a in C.objects}, mor)


# ---------------------------------------------------------------------------
# isomorphism, equivalence, functor enumeration


def find_isomorphism(C: FinCat, a: str, b: str) -> str | None:
    for f in C.hom(a, b):
        if C.is_iso(f):
            return f
    return None


def check_equivalence(F: Functor) -> Certificate:
    """Full, faithful and essentially surjective, with a counterexample on failure."""
    C, D = F.source, F.target
    claim = f"{F.name} is an equivalence"
    for a in C.objects:
        for b in C.objects:
            images = [F.mor[f] for f in C.hom(a, b)]
            if len(set(images)) != len(images):
                dup = next(f for f in C.hom(a, b)
                           if images.count(F.mor[f]) > 1)
                return Certificate(claim, False, {"failure": "not faithful", "dom": a, "cod": b,
                                                  "morphism": dup, "image": F.mor[dup]})
            target = D.hom(F.ob[a], F.ob[b])
            if len(target) != len(images):
                missing = next(g for g in target if g not in images)
                return Certificate(claim, False, {"failure": "not full", "dom": a, "cod": b,
                                                  "missed": missing})
    image = set(F.ob.values())
    for d in D.objects:
        if d in image:
            continue
        if not any(find_isomorphism(D, d, e) is not None for e in sorted(image)):
            return Certificate(claim, False, {"failure": "not essentially surjective", "object": d})
    return Certificate(claim, True)


def is_isomorphism_functor(F: Functor) -> Certificate:
    claim = f"{F.name} is an isomorphism of categories"
    D = F.target
    if sorted(F.ob.values()) != list(D.objects):
        missing = sorted(set(D.objects) - set(F.ob.values()))
        return Certificate(claim, False, {"failure": "not bijective on objects", "missed": missing[:1]})
    if sorted(F.mor.values()) != list(D.morphisms):
        missing = sorted(set(D.morphisms) - set(F.mor.values()))
        return Certificate(claim, False, {"failure": "not bijective on morphisms", "missed": missing[:1]})
    return Certificate(claim, True)


def inverse_functor(F: Functor) -> Functor:
    if not is_isomorphism_functor(F):
        raise ShapeMismatch(f"{F.name} is not invertible", {"functor": F.name})
    return Functor(
        f"inv({F.name})", F.target, F.source,
        {b: a for a, b in F.ob.items()}, {g: f for f, g in F.mor.items()},
    )


class _Budget:
    def __init__(self, limit: int, what: str):
        self.limit = limit
        self.used = 0
        self.what = what

    def tick(self) -> None:
        self.used += 1
        if self.used > self.limit:
            raise BudgetExceeded(f"{self.what} exceeded its search budget of {self.limit} steps",
                                 {"budget": self.limit})


def _composition_checks(C: FinCat, order: Sequence[str]) -> dict[str, list[tuple[str, str, str]]]:
    """Index every composite ``(f, g, g∘f)`` of non-identities by the member
    assigned last in ``order``, so it is checked exactly when it becomes decidable."""
    rank = {m: i for i, m in enumerate(order)}
    checks: dict[str, list[tuple[str, str, str]]] = defaultdict(list)
    for (f, g), h in C._table.items():
        if C.is_identity(f) or C.is_identity(g):
            continue
        last = max((f, g, h), key=lambda m: rank.get(m, -1))
        checks[last].append((f, g, h))
    return checks


def _extend_morphisms(C, D, ob, order, candidates, checks, budget, injective) -> Iterator[dict]:
    mor = {identity_name(a): identity_name(ob[a]) for a in C.objects}
    used = set(mor.values()) if injective else None

    def rec(i):
        if i == len(order):
            yield dict(mor)
            return
        f = order[i]
        a, b = C.ends(f)
        for img in candidates(f, D.hom(ob[a], ob[b])):
            budget.tick()
            if injective and img in used:
                continue
            mor[f] = img
            if all(D.compose(mor[x], mor[y]) == mor[z] for x, y, z in checks.get(f, ())):
                if injective:
                    used.add(img)
                yield from rec(i + 1)
                if injective:
                    used.discard(img)
            del mor[f]

    yield from rec(0)


def enumerate_functors(
    C: FinCat,
    D: FinCat,
    ob_candidates: Callable[[str], Iterable[str]] | None = None,
    mor_candidates: Callable[[str], Callable[[str], bool]] | None = None,
    budget: int = DEFAULT_BUDGET,
    name: str = "F",
) -> Iterator[Functor]:
    """Every functor ``C → D`` in a deterministic order.

    ``ob_candidates(a)`` restricts the image of ``a``; ``mor_candidates(f)``
    returns a predicate on candidate images of ``f``. Exceeding ``budget``
    search steps raises :class:`BudgetExceeded`.
    """
    meter = _Budget(budget, "functor enumeration")
    cand = {a: sorted(ob_candidates(a)) if ob_candidates else list(D.objects) for a in C.objects}
    # objects and morphisms interleaved: a morphism is placed as soon as both
    # of its ends are, so composition checks prune early
    steps: list[tuple[str, str]] = []
    placed: set[str] = set()
    pending = list(C.non_identity())
    for a in _connected_order(C):
        steps.append(("ob", a))
        placed.add(a)
        ready = [f for f in pending if C.dom(f) in placed and C.cod(f) in placed]
        steps.extend(("mor", f) for f in ready)
        pending = [f for f in pending if f not in ready]
    checks = _composition_checks(C, [x for kind, x in steps if kind == "mor"])
    keep = {f: mor_candidates(f) for f in C.non_identity()} if mor_candidates else None

    ob: dict[str, str] = {}
    mor: dict[str, str] = {}

    def rec(i):
        if i == len(steps):
            yield Functor(name, C, D, dict(ob), dict(mor), check=False)
            return
        kind, x = steps[i]
        if kind == "ob":
            for d in cand[x]:
                meter.tick()
                ob[x] = d
                mor[identity_name(x)] = identity_name(d)
                yield from rec(i + 1)
            ob.pop(x, None)
            mor.pop(identity_name(x), None)
            return
        a, b = C.ends(x)
        for img in D.hom(ob[a], ob[b]):
            meter.tick()
            if keep is not None and not keep[x](img):
                continue
            mor[x] = img
            if all(D.compose(mor[f], mor[g]) == mor[h] for f, g, h in checks.get(x, ())):
                yield from rec(i + 1)
        mor.pop(x, None)

    yield from rec(0)


def _connected_order(C: FinCat) -> list[str]:
    """Objects in breadth-first order along morphisms (either direction)."""
    seen: list[str] = []
    for start in C.objects:
        if start in seen:
            continue
        queue = [start]
        seen.append(start)
        while queue:
            a = queue.pop(0)
            for f in C.out_of(a) + C.into(a):
                for b in C.ends(f):
                    if b not in seen:
                        seen.append(b)
                        queue.append(b)
    return seen


def _object_signature(C: FinCat, a: str) -> tuple:
    return (
        len(C.hom(a, a)),
        tuple(sorted(len(C.hom(a, b)) for b in C.objects)),
        tuple(sorted(len(C.hom(b, a)) for b in C.objects)),
    )


def category_isomorphism(
    C: FinCat,
    D: FinCat,
    budget: int = DEFAULT_BUDGET,
    over: tuple[Functor, Functor] | None = None,
) -> tuple[Functor, Functor] | None:
    """Search for an isomorphism ``C ≅ D`` and return it with its inverse.

    With ``over=(P, Q)`` the isomorphism must satisfy ``Q∘F = P`` (both
    functors into one base category). The search is deterministic; it raises
    :class:`BudgetExceeded` rather than giving up silently.
    """
    if len(C.objects) != len(D.objects) or len(C.morphisms) != len(D.morphisms):
        return None
    if over is not None:
        P, Q = over
        if P.target != Q.target or P.source != C or Q.source != D:
            raise ShapeMismatch("projections do not match the categories", {})
    sig_d = defaultdict(list)
    for d in D.objects:
        sig_d[_object_signature(D, d)].append(d)
    cand = {}
    for a in C.objects:
        options = sig_d.get(_object_signature(C, a), [])
        if over is not None:
            options = [d for d in options if Q.ob[d] == P.ob[a]]
        if not options:
            return None
        cand[a] = options
    objs = sorted(C.objects, key=lambda a: (len(cand[a]), a))
    meter = _Budget(budget, "isomorphism search")
    order = sorted(C.non_identity(), key=lambda f: (objs.index(C.dom(f)), objs.index(C.cod(f)), f))
    checks = _composition_checks(C, order)

    def morphism_candidates(f, homset):
        if over is None:
            return homset
        return [g for g in homset if Q.mor[g] == P.mor[f]]

    ob: dict[str, str] = {}
    used: set[str] = set()

    def consistent(a, d):
        for b, e in ob.items():
            if len(C.hom(a, b)) != len(D.hom(d, e)) or len(C.hom(b, a)) != len(D.hom(e, d)):
                return False
        return True

    def rec(i):
        if i == len(objs):
            yield from _extend_morphisms(C, D, ob, order, morphism_candidates, checks, meter, True)
            return
        a = objs[i]
        for d in cand[a]:
            meter.tick()
            if d in used or not consistent(a, d):
                continue
            ob[a] = d
            used.add(d)
            yield from rec(i + 1)
            used.discard(d)
            del ob[a]

    for mor in rec(0):
        F = Functor(f"iso({C.name},{D.name})", C, D, dict(ob), mor)
        return F, inverse_functor(F)
    return None
