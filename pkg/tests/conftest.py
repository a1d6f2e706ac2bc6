import itertools
import sys

import pytest
from hypothesis import strategies as st

from catslice import fixtures as fx


def closure(n, pairs):
    """Transitive closure of a strict order on range(n)."""
    rel = set(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(rel), list(rel)):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True
    return rel


@st.composite
def posets(draw, max_size=5):
    """A random finite poset as ``(elements, strict order)`` with names ``e0..``."""
    n = draw(st.integers(1, max_size))
    candidates = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(candidates), unique=True)) if candidates else []
    rel = closure(n, chosen)
    names = [f"e{i}" for i in range(n)]
    return names, sorted((names[i], names[j]) for i, j in rel)


def poset_category(shape, name="P"):
    elements, order = shape
    return fx.thin_category(name, elements, order)


def leq(shape):
    elements, order = shape
    rel = set(order)
    return lambda a, b: a == b or (a, b) in rel


@pytest.fixture(scope="session")
def pset():
    return fx.pset()


@pytest.fixture(scope="session")
def two():
    return fx.two()


@pytest.fixture(scope="session")
def cospan():
    return fx.cospan()


@pytest.fixture(scope="session")
def monoid3():
    return fx.monoid3()


@pytest.fixture(scope="session")
def base_fixtures():
    return fx.base_fixtures()


@pytest.fixture(scope="session")
def corpus():
    return fx.corpus()


@pytest.fixture(scope="session")
def pointed_fibrations():
    return fx.pointed_fibration_fixtures()


@pytest.fixture(scope="session")
def comparisons():
    return fx.point_comparisons()


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.RESULTS:
        terminalreporter.write_line(line)
