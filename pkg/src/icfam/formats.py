"""Family and report (de)serialization.

Two family formats are accepted. Structured: ``{"n": 3, "sets": [[], [1], [1, 2]]}``.
Plain text: a first line ``n=3`` followed by one set per line, elements
comma-separated, ``-`` for the empty set. Blank lines and ``#`` comments are
ignored. Elements are 1-based everywhere outside the package.
"""
from __future__ import annotations

import hashlib
import json

from . import __version__
from .claims import ClaimReport
from .errors import InputError
from .setsys import MAX_N, Family, RawFamily, elements_of, mask_of

REPORT_SCHEMA = "icfam.report/1"


def _check_elements(elems, n, where):
    for e in elems:
        if isinstance(e, bool) or not isinstance(e, int):
            raise InputError(f"{where}: element {e!r} is not an integer")
        if not 1 <= e <= n:
            raise InputError(f"{where}: element {e} out of range 1..{n}")
    if any(a >= b for a, b in zip(elems, elems[1:])):
        raise InputError(f"{where}: elements must be strictly increasing")


def _build(n, entries):
    """entries: list of (where, elements) in input order."""
    if isinstance(n, bool) or not isinstance(n, int) or not 1 <= n <= MAX_N:
        raise InputError(f"n={n!r} outside supported range 1..{MAX_N}")
    seen = {}
    masks = []
    for where, elems in entries:
        _check_elements(elems, n, where)
        m = mask_of(elems)
        if m in seen:
            raise InputError(f"{where}: duplicate of {seen[m]}")
        seen[m] = where
        masks.append(m)
    return RawFamily(n, tuple(masks))


def parse_text(text: str) -> RawFamily:
    lines = [(k, ln.split("#", 1)[0].strip()) for k, ln in enumerate(text.splitlines(), 1)]
    lines = [(k, ln) for k, ln in lines if ln]
    if not lines:
        raise InputError("empty input")
    k, head = lines[0]
    key, _, value = head.partition("=")
    if key.strip() != "n" or not value.strip().isdigit():
        raise InputError(f"line {k}: expected 'n=<k>', got {head!r}")
    n = int(value)
    entries = []
    for k, ln in lines[1:]:
        if ln == "-":
            entries.append((f"line {k}", []))
            continue
        elems = []
        for pos, tok in enumerate(ln.split(","), 1):
            tok = tok.strip()
            if not tok.lstrip("-").isdigit():
                raise InputError(f"line {k}, position {pos}: {tok!r} is not an element")
            elems.append(int(tok))
        entries.append((f"line {k}", elems))
    return _build(n, entries)


def parse_structured(doc) -> RawFamily:
    if not isinstance(doc, dict) or "n" not in doc or "sets" not in doc:
        raise InputError('structured input must be an object with "n" and "sets"')
    if not isinstance(doc["sets"], list) or not all(isinstance(s, list) for s in doc["sets"]):
        raise InputError('"sets" must be a list of lists')
    return _build(doc["n"], [(f"sets[{k}]", s) for k, s in enumerate(doc["sets"])])


def parse_family(source) -> RawFamily:
    """Parse text in either format, or an already-decoded structured document."""
    if isinstance(source, (bytes, bytearray)):
        source = source.decode("utf-8")
    if isinstance(source, str):
        if source.lstrip().startswith("{"):
            try:
                doc = json.loads(source)
            except json.JSONDecodeError as exc:
                raise InputError(f"invalid JSON: {exc}") from exc
            return parse_structured(doc)
        return parse_text(source)
    return parse_structured(source)


def family_document(f) -> dict:
    return {"n": f.n, "sets": [elements_of(m) for m in f.sets]}


def format_family_text(f) -> str:
    lines = [f"n={f.n}"]
    for m in f.sets:
        lines.append(",".join(map(str, elements_of(m))) or "-")
    return "\n".join(lines) + "\n"


def format_family_json(f) -> str:
    return json.dumps(family_document(f)) + "\n"


def input_digest(f: Family) -> str:
    payload = json.dumps(family_document(f), separators=(",", ":")).encode("utf-8")
    return "sha256:" + hashlib.sha256(payload).hexdigest()


def _record_doc(r):
    return {"a": elements_of(r.a), "root": r.root, "h_size": r.h_size}


def report_document(r: ClaimReport) -> dict:
    pre = r.preconditions
    doc = {
        "schema": REPORT_SCHEMA,
        "tool_version": __version__,
        "input_digest": input_digest(r.input_family),
        "input": {"n": r.input_family.n, "size": len(r.input_family)},
        "reduction": {
            "applied": r.reduction is not None,
            "steps": [list(s) for s in r.reduction.steps] if r.reduction else [],
            "n": r.family.n,
        },
        "permutation": {"source": r.permutation_source, "old_to_new": list(r.permutation)},
        "label_map": {str(k): v for k, v in r.label_map().items()},
        "family": family_document(r.family),
        "degenerate": r.degenerate,
        "preconditions": {
            "ordered": pre.ordered,
            "f1_proper": pre.f1_proper,
            "pairwise_distinct": pre.pairwise_distinct,
            "empty_in_f": pre.empty_in_f,
            "passed": pre.passed and not r.degenerate,
            "failures": list(pre.failures),
        },
        "frequencies": list(r.frequencies),
        "trace": None,
        "claims": [],
        "violations": {"count": 0, "claims": []},
        "error": r.error or None,
    }
    if r.trace is not None:
        doc["trace"] = {
            "t": list(r.trace.t),
            "levels": [{"level": lv.level, "discarding": [_record_doc(x) for x in lv.records],
                        "excluded": lv.excluded} for lv in r.trace.levels],
        }
    for c in r.claims:
        doc["claims"].append({
            "id": c.claim,
            "status": {True: "pass", False: "fail", None: "n/a"}[c.holds],
            "holds": c.holds,
            "details": c.details,
            "witnesses": c.witnesses,
            "note": c.note or None,
        })
    failed = r.failed_claims
    doc["violations"] = {"count": len(failed), "claims": failed}
    return doc


def report_json(r: ClaimReport) -> str:
    return json.dumps(report_document(r), indent=2) + "\n"


def _fmt_set(elems):
    return "{" + ",".join(map(str, elems)) + "}"


def report_text(r: ClaimReport) -> str:
    out = []
    f = r.family
    out.append(f"family: n={r.input_family.n} |F|={len(r.input_family)}")
    if r.reduction is not None and r.reduction.changed:
        steps = ", ".join(" ".join(map(str, s)) for s in r.reduction.steps)
        out.append(f"reduced to n={f.n}: {steps}")
    out.append(f"permutation ({r.permutation_source}, old->new): {list(r.permutation)}")
    out.append(f"frequencies: {list(r.frequencies)}")
    pre = r.preconditions
    out.append(f"preconditions: ordered={pre.ordered} f1_proper={pre.f1_proper} "
               f"pairwise_distinct={pre.pairwise_distinct} empty_in_f={pre.empty_in_f}")
    if r.error:
        out.append(f"not checked: {r.error}")
        return "\n".join(out) + "\n"
    out.append("")
    out.append("level  t    excluded  discarding sets (root, |H|)")
    out.append(f"0      {r.trace.t[0]:<4}")
    for lv in r.trace.levels:
        recs = " ".join(f"{_fmt_set(elements_of(x.a))}({x.root or '-'},{x.h_size})"
                        for x in lv.records)
        out.append(f"{lv.level:<6} {r.trace.t[lv.level]:<4} {lv.excluded:<9} {recs}")
    out.append("")
    out.append("claim          verdict  notes")
    for c in r.claims:
        verdict = {True: "pass", False: "FAIL", None: "n/a"}[c.holds]
        note = c.note
        if c.failed and c.witnesses:
            note = json.dumps(c.witnesses[0], separators=(",", ":"))
        out.append(f"{c.claim:<14} {verdict:<8} {note}".rstrip())
    failed = r.failed_claims
    out.append("")
    out.append(f"violations: {len(failed)}" + (f" ({', '.join(failed)})" if failed else ""))
    return "\n".join(out) + "\n"


def serialize_report(r: ClaimReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return report_json(r).encode("utf-8")
    if fmt == "text":
        return report_text(r).encode("utf-8")
    raise InputError(f"unknown report format {fmt!r}")
