"""Per-claim checkers and the aggregated report.

Every checker returns a ClaimResult; a false claim is data, not an error.
``holds`` is None when the claim's premise does not apply to the family.
Checkers raise PreconditionError when ``strict`` and the family violates the
ordering/distinctness assumptions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import InputError, PreconditionError
from .machinery import (
    DEFAULT_BUDGET,
    BoundTrace,
    bound_trace,
    cylinders_disjoint,
    exclusions_hit_family,
    extensions,
)
from .setsys import (
    Family,
    PreconditionReport,
    ReductionLog,
    apply_permutation,
    canonical_relabel,
    check_preconditions,
    element_frequencies,
    elements_of,
    is_admissible,
    is_degenerate,
    reduce_family,
)

CLAIM_IDS = (
    "lemma1",
    "lemma2",
    "lemma3",
    "thm1_ineq4",
    "thm1_ineq5",
    "cor1_frankl",
    "rare_element",
    "lemma5",
    "cor2_boolean",
    "equ3_chain",
)


@dataclass
class ClaimResult:
    claim: str
    holds: bool | None
    details: list[dict] = field(default_factory=list)
    witnesses: list[dict] = field(default_factory=list)
    note: str = ""

    @property
    def failed(self) -> bool:
        return self.holds is False


def _gate(f: Family, strict: bool) -> None:
    if f.n == 0:
        raise PreconditionError("degenerate family over an empty ground set")
    if strict:
        pre = check_preconditions(f)
        if not pre.passed:
            raise PreconditionError("; ".join(pre.failures))


def _trace(f, trace, strict):
    _gate(f, strict)
    return trace if trace is not None else bound_trace(f, check=False)


def _below_count(f: Family, i: int) -> int:
    """|F minus (F_i u ... u F_n)|: members contained in [i-1]."""
    limit = 1 << (i - 1)
    return sum(1 for m in f.sets if m < limit)


def _top_count(f: Family, i: int) -> int:
    """|F_i minus (F_{i+1} u ... u F_n)|."""
    lo, hi = 1 << (i - 1), 1 << i
    return sum(1 for m in f.sets if lo <= m < hi)


def check_lemma1(f: Family, trace: BoundTrace | None = None, strict: bool = True) -> ClaimResult:
    """Extensions of every discarding set pairwise meet, and their common part
    completes A+i to a member."""
    trace = _trace(f, trace, strict)
    res = ClaimResult("lemma1", True)
    for r in trace.records():
        ext = extensions(f, r.a, r.level)
        if not ext:
            continue
        head = r.a | 1 << (r.level - 1)
        for x, p in enumerate(ext):
            for q in ext[x + 1:]:
                if p & q == 0:
                    res.holds = False
                    res.witnesses.append({"level": r.level, "a": elements_of(r.a),
                                          "x": elements_of(p), "y": elements_of(q)})
        common = -1
        for p in ext:
            common &= p
        ok = common != 0 and (head | common) in f
        res.details.append({"level": r.level, "a": elements_of(r.a), "extensions": len(ext),
                            "common": elements_of(common) if common > 0 else [], "holds": ok})
        if not ok:
            res.holds = False
            res.witnesses.append({"level": r.level, "a": elements_of(r.a),
                                  "common": elements_of(common) if common > 0 else []})
    return res


def check_lemma2(f: Family, trace: BoundTrace | None = None, strict: bool = True,
                 budget: int = DEFAULT_BUDGET) -> ClaimResult:
    """Exclusion sets have the stated size (exactly) and contain no member of F."""
    trace = _trace(f, trace, strict)
    res = ClaimResult("lemma2", True)
    for r in trace.records():
        if r.level > f.n - 1:
            continue
        c = r.cylinder(f.n)
        if c.size <= budget:
            size = sum(1 for _ in c.members())
        else:
            size = c.size
        bound = 1 << (f.n - r.level) if r.root is None else 1 << (f.n - r.level - 1)
        ok = size >= bound and size == r.h_size
        res.details.append({"level": r.level, "a": elements_of(r.a), "root": r.root,
                            "lhs": size, "rhs": bound, "holds": ok})
        if not ok:
            res.holds = False
            res.witnesses.append({"level": r.level, "a": elements_of(r.a), "size": size,
                                  "bound": bound})
    for r, m in exclusions_hit_family(f, trace, budget):
        res.holds = False
        res.witnesses.append({"level": r.level, "a": elements_of(r.a),
                              "member_in_h": elements_of(m)})
    return res


def check_lemma3(f: Family, trace: BoundTrace | None = None, strict: bool = True) -> ClaimResult:
    trace = _trace(f, trace, strict)
    res = ClaimResult("lemma3", True)
    recs = list(trace.records())
    cyls = [r.cylinder(f.n) for r in recs]
    for x in range(len(cyls)):
        for y in range(x + 1, len(cyls)):
            if not cylinders_disjoint(cyls[x], cyls[y]):
                hi = cyls[x] if cyls[x].level >= cyls[y].level else cyls[y]
                res.holds = False
                res.witnesses.append({
                    "first": {"level": recs[x].level, "a": elements_of(recs[x].a)},
                    "second": {"level": recs[y].level, "a": elements_of(recs[y].a)},
                    "common": elements_of(hi.prefix),
                })
    res.details.append({"cylinders": len(cyls), "pairs": len(cyls) * (len(cyls) - 1) // 2})
    return res


def check_theorem1(f: Family, trace: BoundTrace | None = None,
                   strict: bool = True) -> tuple[ClaimResult, ClaimResult]:
    """Both inequalities at every level; reported, never assumed."""
    trace = _trace(f, trace, strict)
    freq = element_frequencies(f)
    ineq4 = ClaimResult("thm1_ineq4", True)
    ineq5 = ClaimResult("thm1_ineq5", True)
    for i in range(1, f.n + 1):
        lhs, rhs = trace.t[i], freq[i - 1]
        ineq4.details.append({"level": i, "lhs": lhs, "rhs": rhs, "holds": lhs >= rhs})
        if lhs < rhs:
            ineq4.holds = False
            ineq4.witnesses.append({"level": i, "t": lhs, "frequency": rhs})
        lhs, rhs = (1 << (f.n - i)) * _below_count(f, i), trace.t[i - 1]
        ineq5.details.append({"level": i, "lhs": lhs, "rhs": rhs, "holds": lhs >= rhs})
        if lhs < rhs:
            ineq5.holds = False
            ineq5.witnesses.append({"level": i, "lhs": lhs, "t_prev": rhs})
    return ineq4, ineq5


def check_frankl(f: Family, strict: bool = True) -> ClaimResult:
    _gate(f, strict)
    if f.n < 2:
        return ClaimResult("cor1_frankl", None, note="needs n >= 2")
    freq = element_frequencies(f)
    lhs, rhs = len(f), freq[-2] + freq[-1]
    res = ClaimResult("cor1_frankl", lhs >= rhs,
                      [{"lhs": lhs, "rhs": rhs, "holds": lhs >= rhs}])
    if not res.holds:
        res.witnesses.append({"size": lhs, "freq_n_minus_1": freq[-2], "freq_n": freq[-1]})
    return res


def check_rare_element(f: Family) -> ClaimResult:
    """Some element lies in at most half the members (the least frequent one)."""
    if len(f) == 0 or f.n == 0 or f.sets == (f.ground,):
        raise PreconditionError("rare-element check needs a family other than {N} and the empty family")
    rarest = min(element_frequencies(f))
    ok = 2 * rarest <= len(f)
    res = ClaimResult("rare_element", ok, [{"lhs": 2 * rarest, "rhs": len(f), "holds": ok}])
    if not ok:
        freq = element_frequencies(f)
        res.witnesses.append({"element": freq.index(rarest) + 1, "frequency": rarest,
                              "size": len(f)})
    return res


def check_lemma5(f: Family, trace: BoundTrace | None = None, strict: bool = True) -> ClaimResult:
    """Where the counting condition holds at level i, A in F iff A+i in F for all A in [i-1]."""
    trace = _trace(f, trace, strict)
    res = ClaimResult("lemma5", True)
    for lv in trace.levels:
        i = lv.level
        below, d, top = _below_count(f, i), len(lv.records), _top_count(f, i)
        cond = below - d == top
        row = {"level": i, "lhs": below - d, "rhs": top, "condition": cond}
        if cond:
            ibit = 1 << (i - 1)
            bad = [a for a in range(ibit) if (a in f) != ((a | ibit) in f)]
            row["holds"] = not bad
            if bad:
                res.holds = False
                res.witnesses.extend({"level": i, "a": elements_of(a), "a_in_f": a in f,
                                      "a_plus_i_in_f": (a | ibit) in f} for a in bad)
        res.details.append(row)
    return res


@dataclass(frozen=True)
class BooleanDecomposition:
    base: int
    blocks: tuple[int, ...]


def is_boolean_algebra(f: Family) -> tuple[bool, BooleanDecomposition | None]:
    """Test F = {B0 + union of some blocks} for disjoint nonempty blocks.

    B0 is the meet of all members; the blocks are the atoms minus B0.
    """
    if len(f) == 0:
        raise InputError("boolean-algebra test needs a nonempty family")
    base = f.ground
    for m in f.sets:
        base &= m
    if base not in f:
        return False, None
    above = [m for m in f.sets if m != base]
    atoms = [m for m in above if not any(o != m and o & m == o and o != base for o in above)]
    blocks = sorted((m & ~base for m in atoms), key=lambda b: (b & -b))
    seen = 0
    for b in blocks:
        if b & seen:
            return False, None
        seen |= b
    if len(f) != 1 << len(blocks):
        return False, None
    generated = set()
    for s in range(1 << len(blocks)):
        m = base
        for k, b in enumerate(blocks):
            if s >> k & 1:
                m |= b
        generated.add(m)
    if generated != set(f.sets):
        return False, None
    return True, BooleanDecomposition(base, tuple(blocks))


def check_boolean_characterization(f: Family, strict: bool = True) -> ClaimResult:
    _gate(f, strict)
    freq = element_frequencies(f)
    lhs = 2 * freq[-1] == len(f)
    rhs, dec = is_boolean_algebra(f)
    res = ClaimResult("cor2_boolean", lhs == rhs, [{
        "two_freq_n": 2 * freq[-1], "size": len(f), "equal": lhs, "boolean": rhs,
        "holds": lhs == rhs,
    }])
    if dec is not None:
        res.details[0]["base"] = elements_of(dec.base)
        res.details[0]["blocks"] = [elements_of(b) for b in dec.blocks]
    if lhs != rhs:
        res.witnesses.append({"two_freq_n": 2 * freq[-1], "size": len(f), "boolean": rhs})
    return res


def check_equ3(f: Family, trace: BoundTrace | None = None, strict: bool = True) -> ClaimResult:
    """2^(n-k) |F minus (F_k u ... u F_n)| = t^(k-1) for k = n..1, given 2|F_n| = |F|."""
    trace = _trace(f, trace, strict)
    freq = element_frequencies(f)
    if 2 * freq[-1] != len(f):
        raise PreconditionError(f"premise 2|F_n| = |F| not met ({2 * freq[-1]} != {len(f)})")
    res = ClaimResult("equ3_chain", True)
    for k in range(f.n, 0, -1):
        lhs, rhs = (1 << (f.n - k)) * _below_count(f, k), trace.t[k - 1]
        res.details.append({"level": k, "lhs": lhs, "rhs": rhs, "holds": lhs == rhs})
        if lhs != rhs:
            res.holds = False
            res.witnesses.append({"level": k, "lhs": lhs, "t_prev": rhs})
    return res


@dataclass
class ClaimReport:
    input_family: Family
    family: Family
    reduction: ReductionLog | None
    permutation: tuple[int, ...]
    permutation_source: str
    preconditions: PreconditionReport
    frequencies: tuple[int, ...]
    trace: BoundTrace | None
    claims: list[ClaimResult]
    degenerate: bool = False
    error: str = ""

    @property
    def failed_claims(self) -> list[str]:
        return [c.claim for c in self.claims if c.failed]

    @property
    def usable(self) -> bool:
        return not self.degenerate and self.preconditions.passed

    def label_map(self) -> dict[int, int | None]:
        """Original element -> label in the checked family (None if reduced away)."""
        base = self.reduction.label_map if self.reduction else {
            e: e for e in range(1, self.input_family.n + 1)}
        return {o: (None if c is None else self.permutation[c - 1]) for o, c in base.items()}


def _run_claims(f: Family, trace: BoundTrace, wanted: Sequence[str]) -> list[ClaimResult]:
    out = []
    want = set(wanted)
    if "lemma1" in want:
        out.append(check_lemma1(f, trace, strict=False))
    if "lemma2" in want:
        out.append(check_lemma2(f, trace, strict=False))
    if "lemma3" in want:
        out.append(check_lemma3(f, trace, strict=False))
    if want & {"thm1_ineq4", "thm1_ineq5"}:
        ineq4, ineq5 = check_theorem1(f, trace, strict=False)
        out.extend(r for r in (ineq4, ineq5) if r.claim in want)
    if "cor1_frankl" in want:
        out.append(check_frankl(f, strict=False))
    if "rare_element" in want:
        if f.sets == (f.ground,):
            out.append(ClaimResult("rare_element", None, note="family is {N}"))
        else:
            out.append(check_rare_element(f))
    if "lemma5" in want:
        out.append(check_lemma5(f, trace, strict=False))
    if "cor2_boolean" in want:
        out.append(check_boolean_characterization(f, strict=False))
    if "equ3_chain" in want:
        try:
            out.append(check_equ3(f, trace, strict=False))
        except PreconditionError as exc:
            out.append(ClaimResult("equ3_chain", None, note=str(exc)))
    return out


def full_report(f: Family, *, perm: Sequence[int] | None = None, reduce: bool = True,
                claims: Sequence[str] = CLAIM_IDS) -> ClaimReport:
    """Reduce, relabel, check preconditions, trace, and run every requested claim.

    Precondition failures and degenerate families are reported, not raised;
    a user permutation that does not order frequencies raises InputError.
    """
    unknown = set(claims) - set(CLAIM_IDS)
    if unknown:
        raise InputError(f"unknown claim ids: {sorted(unknown)}")
    log = None
    g = f
    if reduce:
        g, log = reduce_family(f)
    if perm is not None:
        perm = tuple(perm)
        if len(perm) != g.n:
            raise InputError(f"permutation has {len(perm)} entries, family has n={g.n}")
        if not is_admissible(g, perm):
            raise InputError(f"permutation {list(perm)} does not order frequencies nonincreasingly")
        h, source = apply_permutation(g, perm), "user"
    else:
        h, perm = canonical_relabel(g)
        source = "canonical"
    pre = check_preconditions(h)
    report = ClaimReport(f, h, log, perm, source, pre, element_frequencies(h), None, [])
    if is_degenerate(h):
        report.degenerate = True
        report.error = "degenerate family after reduction" if reduce else "degenerate family"
        return report
    if not pre.passed:
        report.error = "; ".join(pre.failures)
        return report
    report.trace = bound_trace(h, check=False)
    order = {c: k for k, c in enumerate(CLAIM_IDS)}
    report.claims = sorted(_run_claims(h, report.trace, claims), key=lambda c: order[c.claim])
    return report
