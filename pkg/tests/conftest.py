import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

from icfam.setsys import Family, RawFamily, intersection_closure, mask_of

sys.path.insert(0, str(Path(__file__).parent))

WITNESS_DIR = Path(__file__).parent / "_witnesses"

CHAIN = [(), (1,), (1, 2), (1, 2, 3)]
POWER2 = [(), (1,), (2,), (1, 2)]
FIVE = [(), (1,), (2,), (1, 2), (1, 2, 3)]
ROOTED = [(), (1,), (1, 3), (1, 2, 3)]


def fam(n, sets):
    return Family.of(n, sets)


def as_oracle(f):
    """Family -> frozenset of frozensets with 1-based elements."""
    return frozenset(frozenset(s) for s in f.to_lists())


@st.composite
def closed_families(draw, min_n=1, max_n=6, max_gens=8):
    n = draw(st.integers(min_n, max_n))
    gens = draw(st.lists(st.integers(0, (1 << n) - 1), max_size=max_gens, unique=True))
    return intersection_closure(RawFamily(n, tuple(gens)))


@st.composite
def raw_families(draw, min_n=1, max_n=5, max_size=10):
    n = draw(st.integers(min_n, max_n))
    masks = draw(st.lists(st.integers(0, (1 << n) - 1), max_size=max_size, unique=True))
    return RawFamily(n, tuple(masks))


def m(*elements):
    return mask_of(elements)


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k, title): acceptance criterion k")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    k, title = marker.args
    ok = rep.passed
    prev = _criteria.get((k, title))
    _criteria[(k, title)] = ok if prev is None else prev and ok


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for (k, title), ok in sorted(_criteria.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        tr.write_line(f"criterion {k} [{'PASS' if ok else 'FAIL'}] {title}")
