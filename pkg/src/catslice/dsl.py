"""JSON documents for categories, functors, transformations and fibration
bundles, with located errors and a canonical printed form.

Document kinds are told apart by their field sets::

    category      {name, objects, morphisms, composition}
    functor       {name, source, target, object_map, morphism_map}
    nat_trans     {name, source, target, components}
    fibration     {total, base, functor}
    pointed       {fibration, point}

Composition entries ``{first, second, result}`` mean ``result = second∘first``
(diagrammatic order). Identities are never written; they are synthesized as
``id:<object>``. Paths inside documents are resolved against the directory of
the document that mentions them.
"""

from __future__ import annotations

import json
import json.decoder
import json.scanner
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

from .core import FinCat, Functor, NatTrans, Presentation, category_violations
from .errors import CategoryError, DanglingReference, InvalidName, DuplicateName
from .fibration import CleavedFibration, cleave


# ---------------------------------------------------------------------------
# errors


class DocumentError(Exception):
    """A problem with a document, located by line and column (1-based)."""

    kind = "DocumentError"

    def __init__(self, message: str, path: str | None = None, line: int | None = None,
                 column: int | None = None, witness: dict | None = None):
        super().__init__(message)
        self.message = message
        self.path = path
        self.line = line
        self.column = column
        self.witness = dict(witness or {})

    def location(self) -> str:
        where = self.path or "<text>"
        if self.line is not None:
            where += f":{self.line}:{self.column}"
        return where

    def __str__(self) -> str:
        return f"{self.location()}: {self.kind}: {self.message}"

    def as_dict(self) -> dict:
        return {"error": self.kind, "message": self.message, "path": self.path,
                "line": self.line, "column": self.column, **self.witness}


class DocumentSyntaxError(DocumentError):
    kind = "SyntaxError"


class UnknownField(DocumentError):
    kind = "UnknownField"


class MissingField(DocumentError):
    kind = "MissingField"


class WrongType(DocumentError):
    kind = "WrongType"


class UnresolvedReference(DocumentError):
    kind = "UnresolvedReference"


class InvalidDocument(DocumentError):
    kind = "InvalidDocument"


class LawViolation(DocumentError):
    """Well-formed document whose data breaks a category or functor law."""

    kind = "LawViolation"


# ---------------------------------------------------------------------------
# located JSON


class _LocDict(dict):
    pos = 0


class _LocList(list):
    pos = 0


class _DuplicateKey(Exception):
    pass


def _pairs(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise _DuplicateKey(k)
        out[k] = v
    return out


class _LocatingDecoder(json.JSONDecoder):
    """Standard decoder whose objects and arrays remember their start offset."""

    def __init__(self):
        super().__init__(object_pairs_hook=_pairs)

        def parse_object(s_and_end, *args):
            start = s_and_end[1] - 1
            try:
                obj, end = json.decoder.JSONObject(s_and_end, *args)
            except _DuplicateKey as e:
                key = e.args[0]
                text = s_and_end[0]
                hits = [m.start() for m in re.finditer(re.escape(json.dumps(key)) + r"\s*:", text[start:])]
                pos = start + hits[1] if len(hits) > 1 else start
                raise json.JSONDecodeError(f"duplicate field {key!r}", text, pos)
            loc = _LocDict(obj)
            loc.pos = start
            return loc, end

        def parse_array(s_and_end, scan_once):
            arr, end = json.decoder.JSONArray(s_and_end, scan_once)
            loc = _LocList(arr)
            loc.pos = s_and_end[1] - 1
            return loc, end

        self.parse_object = parse_object
        self.parse_array = parse_array
        self.scan_once = json.scanner.py_make_scanner(self)


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Source:
    def __init__(self, text: str, path: str | None):
        self.text = text
        self.path = path

    def error(self, cls, message: str, node: Any = None, **witness) -> DocumentError:
        pos = getattr(node, "pos", None)
        line, col = _line_col(self.text, pos) if pos is not None else (1, 1)
        return cls(message, self.path, line, col, witness)


# ---------------------------------------------------------------------------
# document types


@dataclass(frozen=True)
class CategoryDocument:
    name: str
    objects: tuple[str, ...]
    morphisms: tuple[tuple[str, str, str], ...]
    composition: tuple[tuple[str, str, str], ...]


@dataclass(frozen=True)
class FunctorDocument:
    name: str
    source: str
    target: str
    object_map: tuple[tuple[str, str], ...]
    morphism_map: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class NatTransDocument:
    name: str
    source: str
    target: str
    components: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class FibrationBundle:
    total: str
    base: str
    functor: str


@dataclass(frozen=True)
class PointedBundle:
    fibration: str
    point: str


Document = Union[CategoryDocument, FunctorDocument, NatTransDocument, FibrationBundle, PointedBundle]

KINDS: dict[str, tuple[type, tuple[str, ...]]] = {
    "category": (CategoryDocument, ("name", "objects", "morphisms", "composition")),
    "functor": (FunctorDocument, ("name", "source", "target", "object_map", "morphism_map")),
    "nat_trans": (NatTransDocument, ("name", "source", "target", "components")),
    "fibration": (FibrationBundle, ("total", "base", "functor")),
    "pointed": (PointedBundle, ("fibration", "point")),
}

# one field that only a given kind has, checked in this order
_MARKERS = (("objects", "category"), ("object_map", "functor"), ("components", "nat_trans"),
            ("functor", "fibration"), ("point", "pointed"))


def kind_of(doc: Document) -> str:
    return next(k for k, (cls, _) in KINDS.items() if isinstance(doc, cls))


# ---------------------------------------------------------------------------
# parsing


def parse_text(text: str, path: str | None = None) -> Document:
    src = _Source(text, path)
    try:
        data = _LocatingDecoder().decode(text)
    except json.JSONDecodeError as e:
        raise DocumentSyntaxError(e.msg, path, e.lineno, e.colno) from None
    if not isinstance(data, dict):
        raise src.error(WrongType, "a document must be a JSON object", data)
    kind = next((k for marker, k in _MARKERS if marker in data), None)
    if kind is None:
        raise src.error(InvalidDocument, "cannot tell the document kind from its fields", data,
                        fields=sorted(data))
    cls, fields = KINDS[kind]
    extra = sorted(set(data) - set(fields))
    if extra:
        raise src.error(UnknownField, f"unknown field {extra[0]!r} in a {kind} document", data,
                        field=extra[0])
    missing = [f for f in fields if f not in data]
    if missing:
        raise src.error(MissingField, f"missing field {missing[0]!r} in a {kind} document", data,
                        field=missing[0])
    return _BUILDERS[kind](src, data)


def parse(path: str | Path) -> Document:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise UnresolvedReference(f"cannot read {path}: {e.strerror}", str(path)) from None
    except UnicodeDecodeError:
        raise DocumentSyntaxError("file is not UTF-8", str(path)) from None
    return parse_text(text, str(path))


def _string(src: _Source, value: Any, where: Any, what: str) -> str:
    if not isinstance(value, str):
        raise src.error(WrongType, f"{what} must be a string", where, value=repr(value))
    return value


def _strings(src: _Source, value: Any, what: str) -> list[str]:
    if not isinstance(value, list):
        raise src.error(WrongType, f"{what} must be a list", value)
    return [_string(src, v, value, f"every entry of {what}") for v in value]


def _records(src: _Source, value: Any, what: str, keys: tuple[str, ...]) -> list[tuple[str, ...]]:
    if not isinstance(value, list):
        raise src.error(WrongType, f"{what} must be a list", value)
    out = []
    for entry in value:
        if not isinstance(entry, dict):
            raise src.error(WrongType, f"entries of {what} must be objects", value)
        extra = sorted(set(entry) - set(keys))
        if extra:
            raise src.error(UnknownField, f"unknown field {extra[0]!r} in {what}", entry, field=extra[0])
        missing = [k for k in keys if k not in entry]
        if missing:
            raise src.error(MissingField, f"missing field {missing[0]!r} in {what}", entry,
                            field=missing[0])
        out.append(tuple(_string(src, entry[k], entry, f"{what}.{k}") for k in keys))
    return out


def _mapping(src: _Source, value: Any, what: str) -> tuple[tuple[str, str], ...]:
    if not isinstance(value, dict):
        raise src.error(WrongType, f"{what} must be an object", value)
    return tuple(sorted((k, _string(src, v, value, f"{what} values")) for k, v in value.items()))


def _build_category(src: _Source, data: dict) -> CategoryDocument:
    name = _string(src, data["name"], data, "name")
    objects = _strings(src, data["objects"], "objects")
    morphisms = _records(src, data["morphisms"], "morphisms", ("name", "dom", "cod"))
    composition = _records(src, data["composition"], "composition", ("first", "second", "result"))
    doc = CategoryDocument(name, tuple(objects), tuple(morphisms), tuple(composition))
    _check_category(src, data, doc)
    return doc


def _check_category(src: _Source, data: dict, doc: CategoryDocument) -> None:
    """Report naming and reference problems at the entry that causes them."""
    def entry(listing: str, pred):
        nodes = data[listing]
        return next((e for e in nodes if isinstance(e, dict) and pred(e)), nodes)

    violations = category_violations(Presentation(doc.name, doc.objects, doc.morphisms, doc.composition))
    for v in violations:
        w = v.witness
        if isinstance(v, DanglingReference):
            if "unknown" in w:
                node = entry("composition", lambda e: (e["first"], e["second"], e["result"])
                             == (w["first"], w["second"], w["result"]))
                raise src.error(UnresolvedReference, str(v), node, **w)
            node = entry("morphisms", lambda e: e["name"] == w["morphism"])
            raise src.error(UnresolvedReference, str(v), node, **w)
        if isinstance(v, (InvalidName, DuplicateName)):
            if "morphism" in w:
                node = entry("morphisms", lambda e: e["name"] == w["morphism"])
            elif "object" in w:
                node = data["objects"]
            elif "first" in w:
                node = entry("composition", lambda e: (e["first"], e["second"]) == (w["first"], w["second"]))
            else:
                node = data
            raise src.error(InvalidDocument, str(v), node, **w)


def _build_functor(src: _Source, data: dict) -> FunctorDocument:
    return FunctorDocument(
        _string(src, data["name"], data, "name"),
        _string(src, data["source"], data, "source"),
        _string(src, data["target"], data, "target"),
        _mapping(src, data["object_map"], "object_map"),
        _mapping(src, data["morphism_map"], "morphism_map"),
    )


def _build_nat_trans(src: _Source, data: dict) -> NatTransDocument:
    return NatTransDocument(
        _string(src, data["name"], data, "name"),
        _string(src, data["source"], data, "source"),
        _string(src, data["target"], data, "target"),
        _mapping(src, data["components"], "components"),
    )


def _build_fibration(src: _Source, data: dict) -> FibrationBundle:
    return FibrationBundle(*(_string(src, data[k], data, k) for k in ("total", "base", "functor")))


def _build_pointed(src: _Source, data: dict) -> PointedBundle:
    return PointedBundle(*(_string(src, data[k], data, k) for k in ("fibration", "point")))


_BUILDERS = {
    "category": _build_category,
    "functor": _build_functor,
    "nat_trans": _build_nat_trans,
    "fibration": _build_fibration,
    "pointed": _build_pointed,
}


# ---------------------------------------------------------------------------
# canonical printing


def to_json(doc: Document) -> dict:
    if isinstance(doc, CategoryDocument):
        return {
            "name": doc.name,
            "objects": sorted(doc.objects),
            "morphisms": [{"name": n, "dom": d, "cod": c} for n, d, c in sorted(doc.morphisms)],
            "composition": [{"first": f, "second": g, "result": h}
                            for f, g, h in sorted(doc.composition)],
        }
    if isinstance(doc, FunctorDocument):
        return {"name": doc.name, "source": doc.source, "target": doc.target,
                "object_map": dict(sorted(doc.object_map)), "morphism_map": dict(sorted(doc.morphism_map))}
    if isinstance(doc, NatTransDocument):
        return {"name": doc.name, "source": doc.source, "target": doc.target,
                "components": dict(sorted(doc.components))}
    if isinstance(doc, FibrationBundle):
        return {"total": doc.total, "base": doc.base, "functor": doc.functor}
    return {"fibration": doc.fibration, "point": doc.point}


def print_document(doc: Document) -> str:
    """Canonical text: fixed key order, sorted lists and maps, two-space indent."""
    return json.dumps(to_json(doc), indent=2, ensure_ascii=False) + "\n"


def canonical(doc: Document) -> Document:
    return parse_text(print_document(doc))


# ---------------------------------------------------------------------------
# documents from values


def category_document(C: FinCat) -> CategoryDocument:
    raw = C.presentation()
    return CategoryDocument(raw.name, tuple(sorted(raw.objects)), tuple(sorted(raw.morphisms)),
                            tuple(sorted(raw.composition)))


def functor_document(F: Functor, source: str, target: str) -> FunctorDocument:
    mor = tuple(sorted((f, g) for f, g in F.mor.items() if not F.source.is_identity(f)))
    return FunctorDocument(F.name, source, target, tuple(sorted(F.ob.items())), mor)


def nat_trans_document(alpha: NatTrans, source: str, target: str) -> NatTransDocument:
    return NatTransDocument(alpha.name, source, target, tuple(sorted(alpha.components.items())))


# ---------------------------------------------------------------------------
# loading into live values


def category_from_document(doc: CategoryDocument, path: str | None = None) -> FinCat:
    from .core import validate_category

    try:
        return validate_category(Presentation(doc.name, doc.objects, doc.morphisms, doc.composition))
    except CategoryError as e:
        raise LawViolation(str(e), path, witness={"violation": type(e).__name__, **e.witness}) from None


@dataclass
class Loader:
    """Resolves and caches documents by absolute path."""

    cache: dict[Path, Any] = field(default_factory=dict)

    def _resolve(self, ref: str, base: Path | None) -> Path:
        p = Path(ref)
        if not p.is_absolute() and base is not None:
            p = base / p
        return p.resolve()

    def document(self, path: str | Path) -> Document:
        return parse(path)

    def load(self, ref: str | Path, base: Path | None = None, expect: str | None = None) -> Any:
        path = self._resolve(str(ref), base)
        if path in self.cache:
            value = self.cache[path]
        else:
            doc = parse(path)
            value = self._realize(doc, path)
            self.cache[path] = value
        if expect is not None and _kind_of_value(value) != expect:
            raise UnresolvedReference(f"{path} is not a {expect} document", str(path),
                                      witness={"expected": expect, "found": _kind_of_value(value)})
        return value

    def _realize(self, doc: Document, path: Path) -> Any:
        here = path.parent
        where = str(path)
        if isinstance(doc, CategoryDocument):
            return category_from_document(doc, where)
        if isinstance(doc, FunctorDocument):
            C = self.load(doc.source, here, "category")
            D = self.load(doc.target, here, "category")
            return _functor(doc, C, D, where)
        if isinstance(doc, NatTransDocument):
            F = self.load(doc.source, here, "functor")
            G = self.load(doc.target, here, "functor")
            try:
                return NatTrans(doc.name, F, G, dict(doc.components))
            except CategoryError as e:
                raise LawViolation(str(e), where, witness={"violation": type(e).__name__, **e.witness}) from None
        if isinstance(doc, FibrationBundle):
            X = self.load(doc.total, here, "category")
            B = self.load(doc.base, here, "category")
            P = self.load(doc.functor, here, "functor")
            if P.source != X or P.target != B:
                raise UnresolvedReference("bundle functor does not run from total to base", where)
            return FibrationValue(P)
        P = self.load(doc.fibration, here, "fibration")
        p = self.load(doc.point, here, "functor")
        return PointedValue(P.proj, p)


def _functor(doc: FunctorDocument, C: FinCat, D: FinCat, where: str) -> Functor:
    ob = dict(doc.object_map)
    mor = dict(doc.morphism_map)
    for a in ob:
        if not C.has_object(a):
            raise UnresolvedReference(f"object_map mentions unknown object {a!r}", where, witness={"object": a})
    for f in mor:
        if f not in C.morphisms:
            raise UnresolvedReference(f"morphism_map mentions unknown morphism {f!r}", where,
                                      witness={"morphism": f})
    for b in ob.values():
        if not D.has_object(b):
            raise UnresolvedReference(f"object_map targets unknown object {b!r}", where, witness={"object": b})
    for g in mor.values():
        if g not in D.morphisms:
            raise UnresolvedReference(f"morphism_map targets unknown morphism {g!r}", where,
                                      witness={"morphism": g})
    try:
        return Functor(doc.name, C, D, ob, mor)
    except CategoryError as e:
        raise LawViolation(str(e), where, witness={"violation": type(e).__name__, **e.witness}) from None


@dataclass(frozen=True)
class FibrationValue:
    """A loaded fibration bundle; not yet certified as a fibration."""

    proj: Functor

    def cleaved(self) -> CleavedFibration:
        return cleave(self.proj)


@dataclass(frozen=True)
class PointedValue:
    proj: Functor
    point: Functor


def _kind_of_value(value: Any) -> str:
    if isinstance(value, FinCat):
        return "category"
    if isinstance(value, Functor):
        return "functor"
    if isinstance(value, NatTrans):
        return "nat_trans"
    if isinstance(value, FibrationValue):
        return "fibration"
    return "pointed"


def load(path: str | Path) -> Any:
    return Loader().load(path)


# ---------------------------------------------------------------------------
# writing


def file_stem(name: str) -> str:
    """A filesystem-safe stem for a category or functor name."""
    out = "".join(c if c.isalnum() or c in "-_" else "_" for c in name).strip("_")
    return out or "unnamed"


def write_document(doc: Document, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(print_document(doc), encoding="utf-8")
    return path


def export_category(C: FinCat, directory: str | Path, stem: str | None = None) -> Path:
    return write_document(category_document(C), Path(directory) / f"{stem or file_stem(C.name)}.cat")


def export_functor(F: Functor, directory: str | Path, stem: str | None = None,
                   source: Path | None = None, target: Path | None = None) -> Path:
    """Write ``F`` plus its source and target categories (unless given)."""
    directory = Path(directory)
    source = source or export_category(F.source, directory)
    target = target or export_category(F.target, directory)
    doc = functor_document(F, source.name if source.parent == directory else str(source),
                           target.name if target.parent == directory else str(target))
    return write_document(doc, directory / f"{stem or file_stem(F.name)}.fun")


def export_fibration(P: Functor, directory: str | Path, stem: str) -> Path:
    directory = Path(directory)
    total = export_category(P.source, directory, f"{stem}-total")
    base = export_category(P.target, directory, f"{stem}-base")
    functor = export_functor(P, directory, f"{stem}-proj", total, base)
    return write_document(FibrationBundle(total.name, base.name, functor.name),
                          directory / f"{stem}.bundle")


def export_pointed(P: Functor, p: Functor, directory: str | Path, stem: str) -> Path:
    directory = Path(directory)
    bundle = export_fibration(P, directory, stem)
    point = export_functor(p, directory, f"{stem}-point",
                           directory / f"{stem}-base.cat", directory / f"{stem}-total.cat")
    return write_document(PointedBundle(bundle.name, point.name), directory / f"{stem}.ptd")
