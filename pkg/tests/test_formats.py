import json

import pytest
from hypothesis import given

from conftest import CHAIN, POWER2, closed_families, fam
from icfam.claims import full_report
from icfam.errors import InputError
from icfam.formats import (
    REPORT_SCHEMA,
    format_family_json,
    format_family_text,
    input_digest,
    parse_family,
    parse_structured,
    parse_text,
    report_document,
    report_text,
    serialize_report,
)
from icfam.setsys import Family, RawFamily


class TestText:
    def test_basic(self):
        raw = parse_text("n=3\n-\n1\n1,2\n1, 2, 3\n")
        assert raw == RawFamily.of(3, CHAIN)

    def test_comments_and_blanks(self):
        raw = parse_text("# chain\n\nn=2\n-  # empty\n\n2\n")
        assert raw == RawFamily.of(2, [(), (2,)])

    def test_header_only(self):
        assert len(parse_text("n=4\n")) == 0

    @pytest.mark.parametrize("text,where", [
        ("n=2\n1,3\n", "line 2"),
        ("n=2\n1\n1\n", "duplicate of line 2"),
        ("n=2\n1,x\n", "line 2, position 2"),
        ("n=2\n2,1\n", "line 2"),
        ("n=2\n0\n", "line 2"),
        ("m=2\n", "line 1"),
        ("n=0\n", "outside"),
        ("n=25\n", "outside"),
        ("", "empty"),
    ])
    def test_errors(self, text, where):
        with pytest.raises(InputError, match=where):
            parse_text(text)


class TestStructured:
    def test_basic(self):
        assert parse_structured({"n": 2, "sets": [[], [1], [2], [1, 2]]}) == RawFamily.of(2, POWER2)

    @pytest.mark.parametrize("doc,where", [
        ({"n": 2}, "sets"),
        ({"n": 2, "sets": [[3]]}, r"sets\[0\]"),
        ({"n": 2, "sets": [[1], [1]]}, r"sets\[1\]: duplicate of sets\[0\]"),
        ({"n": 2, "sets": [["1"]]}, "not an integer"),
        ({"n": True, "sets": []}, "outside"),
        ({"n": 2, "sets": [1]}, "list of lists"),
    ])
    def test_errors(self, doc, where):
        with pytest.raises(InputError, match=where):
            parse_structured(doc)

    def test_dispatch(self):
        assert parse_family('{"n": 1, "sets": [[]]}') == RawFamily.of(1, [()])
        assert parse_family(b"n=1\n-\n") == RawFamily.of(1, [()])
        with pytest.raises(InputError, match="invalid JSON"):
            parse_family("{nope")


@given(closed_families(max_n=10))
def test_text_roundtrip(f):
    assert Family.from_raw(parse_family(format_family_text(f))) == f


@given(closed_families(max_n=10))
def test_json_roundtrip(f):
    assert Family.from_raw(parse_family(format_family_json(f))) == f


def test_digest_is_order_free():
    a = parse_text("n=2\n1\n-\n")
    b = parse_text("n=2\n-\n1\n")
    assert input_digest(a) == input_digest(b)
    assert input_digest(a).startswith("sha256:")


class TestReport:
    def test_chain_fields(self):
        doc = report_document(full_report(fam(3, CHAIN)))
        assert list(doc) == ["schema", "tool_version", "input_digest", "input", "reduction",
                             "permutation", "label_map", "family", "degenerate", "preconditions",
                             "frequencies", "trace", "claims", "violations", "error"]
        assert doc["schema"] == REPORT_SCHEMA
        assert doc["frequencies"] == [3, 2, 1]
        assert doc["trace"]["t"] == [4, 4, 2, 0]
        claims = {c["id"]: c for c in doc["claims"]}
        ineq4 = claims["thm1_ineq4"]
        assert ineq4["status"] == "fail"
        assert ineq4["witnesses"][0] == {"level": 3, "t": 0, "frequency": 1}
        assert doc["violations"] == {"count": 2, "claims": ["thm1_ineq4", "lemma5"]}
        assert claims["equ3_chain"]["status"] == "n/a" and claims["equ3_chain"]["holds"] is None
        assert doc["error"] is None

    def test_power_set_passes(self):
        doc = report_document(full_report(fam(2, POWER2)))
        assert {c["status"] for c in doc["claims"]} == {"pass"}
        assert doc["violations"]["count"] == 0
        assert all(lv["discarding"] == [] for lv in doc["trace"]["levels"])

    def test_refused_family(self):
        doc = report_document(full_report(fam(2, [(1, 2)])))
        assert doc["degenerate"] and doc["trace"] is None and doc["error"]
        assert doc["claims"] == []

    def test_reduction_recorded(self):
        doc = report_document(full_report(fam(3, [(), (1, 2), (1, 2, 3)])))
        assert doc["reduction"]["steps"] == [["merge", 2, 1]]
        assert doc["label_map"] == {"1": 1, "2": None, "3": 2}

    def test_bytes_stable(self):
        f = fam(3, CHAIN)
        a = serialize_report(full_report(f))
        b = serialize_report(full_report(Family.of(3, list(reversed(CHAIN)))))
        assert a == b
        json.loads(a)
        assert serialize_report(full_report(f), "text") == report_text(full_report(f)).encode()

    def test_unknown_format(self):
        with pytest.raises(InputError):
            serialize_report(full_report(fam(2, POWER2)), "xml")

    def test_text_table(self):
        out = report_text(full_report(fam(3, CHAIN)))
        assert "thm1_ineq4     FAIL" in out
        assert "violations: 2 (thm1_ineq4, lemma5)" in out
