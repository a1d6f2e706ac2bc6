import json
import random

import pytest
from hypothesis import given, settings

from catslice import fixtures as fx
from catslice.dsl import (
    CategoryDocument,
    DocumentError,
    FibrationValue,
    Loader,
    PointedValue,
    category_document,
    category_from_document,
    export_functor,
    load,
    parse,
    parse_text,
    print_document,
)
from catslice.core import Functor, NatTrans, identity_functor
from catslice.fibration import codomain_fibration, is_fibration
from catslice.slicefib import slice_fibration, validate_pointed_fibration

from conftest import poset_category, posets


def _round_trip(C):
    text = print_document(category_document(C))
    doc = parse_text(text)
    again = category_from_document(doc)
    assert again == C
    assert print_document(category_document(again)) == text


def test_corpus_round_trip(corpus):
    for C in corpus.values():
        _round_trip(C)


@given(posets(max_size=6))
@settings(max_examples=40, deadline=None)
def test_random_posets_round_trip(shape):
    _round_trip(poset_category(shape))


def test_constructed_categories_round_trip(pointed_fibrations):
    for pf in pointed_fibrations.values():
        sf = slice_fibration(pf)
        _round_trip(sf.total)
        _round_trip(pf.total)


def test_exported_files_are_canonical(tmp_path):
    written = fx.write_fixture_files(tmp_path)
    assert len(written) >= 15
    for path in sorted(tmp_path.iterdir()):
        text = path.read_text()
        assert print_document(parse(path)) == text, path.name
        load(path)


def test_loaded_bundles(tmp_path):
    fx.write_fixture_files(tmp_path)
    loader = Loader()
    cod = loader.load(tmp_path / "cod-pset.bundle")
    assert isinstance(cod, FibrationValue)
    assert cod.proj.source == codomain_fibration(fx.pset()).source
    assert is_fibration(cod.proj)
    ptd = loader.load(tmp_path / "pi1-diag.ptd")
    assert isinstance(ptd, PointedValue)
    pf = validate_pointed_fibration(ptd.proj, ptd.point, require_fibered=False)
    assert not pf.fibered
    alpha = loader.load(tmp_path / "k1-k12.nat")
    assert isinstance(alpha, NatTrans)


def test_shuffled_presentation_prints_identically(pset):
    data = json.loads(print_document(category_document(pset)))
    rng = random.Random(7)
    for _ in range(5):
        shuffled = {
            "composition": rng.sample(data["composition"], len(data["composition"])),
            "objects": rng.sample(data["objects"], len(data["objects"])),
            "name": data["name"],
            "morphisms": rng.sample(data["morphisms"], len(data["morphisms"])),
        }
        text = json.dumps(shuffled, indent=rng.choice([None, 1, 4]))
        assert print_document(parse_text(text)) == print_document(category_document(pset))


def test_functor_round_trip(tmp_path, pset):
    F = Functor("top", pset, pset, {a: "12" for a in pset.objects},
                {f: "id:12" for f in pset.morphisms})
    path = export_functor(F, tmp_path, "top")
    assert load(path) == F
    assert load(export_functor(identity_functor(pset), tmp_path, "ident")) == identity_functor(pset)


def test_document_kinds():
    doc = parse_text('{"name": "E", "objects": [], "morphisms": [], "composition": []}')
    assert isinstance(doc, CategoryDocument)


# ---------------------------------------------------------------------------
# malformed input

MALFORMED = [
    # (label, text, kind, line, column)
    ("truncated", '{\n  "name": "C",\n  "objects": [\n', "SyntaxError", 4, 1),
    ("trailing comma", '{"name": "C", "objects": ["a",], "morphisms": [], "composition": []}',
     "SyntaxError", 1, 31),
    ("duplicate key", '{\n  "name": "C",\n  "name": "D",\n  "objects": [], "morphisms": [], "composition": []\n}',
     "SyntaxError", 3, 3),
    ("not an object", '[1, 2]', "WrongType", 1, 1),
    ("unknown kind", '{"colour": "red"}', "InvalidDocument", 1, 1),
    ("unknown field", '{"name": "C", "objects": [], "morphisms": [], "composition": [], "extra": 1}',
     "UnknownField", 1, 1),
    ("missing field", '{"name": "C", "objects": [], "morphisms": []}', "MissingField", 1, 1),
    ("object not string", '{"name": "C", "objects": ["a", 3], "morphisms": [], "composition": []}',
     "WrongType", 1, 26),
    ("morphism missing cod",
     '{"name": "C", "objects": ["a"],\n "morphisms": [\n  {"name": "f", "dom": "a"}\n ], "composition": []}',
     "MissingField", 3, 3),
    ("dangling morphism end",
     '{"name": "C", "objects": ["a"],\n "morphisms": [\n  {"name": "f", "dom": "a", "cod": "z"}\n ],\n'
     ' "composition": []}', "UnresolvedReference", 3, 3),
    ("dangling composite",
     '{"name": "C", "objects": ["a"],\n "morphisms": [{"name": "e", "dom": "a", "cod": "a"}],\n'
     ' "composition": [\n   {"first": "e", "second": "e", "result": "q"}\n ]}', "UnresolvedReference", 4, 4),
    ("reserved identity name",
     '{"name": "C", "objects": ["a"],\n "morphisms": [\n  {"name": "id:x", "dom": "a", "cod": "a"}\n ],'
     ' "composition": []}', "InvalidDocument", 3, 3),
    ("bad character", '{"name": "C", "objects": ["a b"], "morphisms": [], "composition": []}',
     "InvalidDocument", 1, 26),
    ("functor map not object",
     '{"name": "F", "source": "a.cat", "target": "b.cat",\n "object_map": [], "morphism_map": {}}',
     "WrongType", 2, 16),
]


@pytest.mark.parametrize("label, text, kind, line, column", MALFORMED, ids=[m[0] for m in MALFORMED])
def test_malformed_documents_are_located(label, text, kind, line, column):
    with pytest.raises(DocumentError) as exc:
        parse_text(text, "doc.json")
    err = exc.value
    assert err.kind == kind
    assert (err.line, err.column) == (line, column)
    assert str(err).startswith(f"doc.json:{line}:{column}: {kind}")


def test_law_violation_on_load(tmp_path):
    path = tmp_path / "bad.cat"
    path.write_text(json.dumps({
        "name": "M", "objects": ["m"],
        "morphisms": [{"name": "e", "dom": "m", "cod": "m"}],
        "composition": [],
    }))
    with pytest.raises(DocumentError) as exc:
        load(path)
    assert exc.value.kind == "LawViolation"
    assert exc.value.witness["violation"] == "NonTotal"


def test_missing_reference(tmp_path):
    path = tmp_path / "f.fun"
    path.write_text(json.dumps({"name": "F", "source": "nowhere.cat", "target": "nowhere.cat",
                                "object_map": {}, "morphism_map": {}}))
    with pytest.raises(DocumentError) as exc:
        load(path)
    assert exc.value.kind == "UnresolvedReference"


def test_wrong_reference_kind(tmp_path, pset):
    fx.write_fixture_files(tmp_path)
    path = tmp_path / "wrong.bundle"
    path.write_text(json.dumps({"total": "pset.cat", "base": "pset.cat", "functor": "pset.cat"}))
    with pytest.raises(DocumentError) as exc:
        load(path)
    assert exc.value.witness == {"expected": "functor", "found": "category"}
