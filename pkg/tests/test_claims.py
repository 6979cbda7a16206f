import pytest
from hypothesis import given

import oracle
from conftest import CHAIN, FIVE, POWER2, ROOTED, as_oracle, closed_families, fam, m
from icfam.claims import (
    CLAIM_IDS,
    check_boolean_characterization,
    check_equ3,
    check_frankl,
    check_lemma1,
    check_lemma2,
    check_lemma3,
    check_lemma5,
    check_rare_element,
    check_theorem1,
    full_report,
    is_boolean_algebra,
)
from icfam.errors import InputError, PreconditionError
from icfam.explore import iter_closed
from icfam.setsys import Family, canonical_relabel, check_preconditions, element_frequencies


def rows(result, *keys):
    return [tuple(d[k] for k in keys) for d in result.details]


class TestLemma1:
    def test_chain(self):
        assert check_lemma1(fam(3, CHAIN)).holds

    def test_rooted_unordered(self):
        res = check_lemma1(fam(3, ROOTED), strict=False)
        assert res.holds
        assert res.details == [{"level": 2, "a": [1], "extensions": 1, "common": [3], "holds": True}]

    def test_power_set_vacuous(self):
        res = check_lemma1(fam(2, POWER2))
        assert res.holds and res.details == []

    def test_rooted_strict_refuses(self):
        with pytest.raises(PreconditionError):
            check_lemma1(fam(3, ROOTED))


class TestLemma2:
    def test_chain(self):
        res = check_lemma2(fam(3, CHAIN))
        assert res.holds
        assert rows(res, "level", "lhs", "rhs") == [(2, 2, 2)]

    def test_rooted(self):
        res = check_lemma2(fam(3, ROOTED), strict=False)
        assert res.holds
        assert (2, [1], 3, 1, 1) in rows(res, "level", "a", "root", "lhs", "rhs")

    def test_vacuous(self):
        assert check_lemma2(fam(2, POWER2)).holds

    def test_counted_beyond_budget(self):
        f = Family.of(8, [(), (1,)])
        res = check_lemma2(f, strict=False, budget=4)
        assert res.holds
        got = rows(res, "level", "lhs", "rhs")
        assert got[:2] == [(2, 64, 64), (2, 64, 64)]
        assert all(lhs == rhs for _, lhs, rhs in got)


class TestLemma3:
    @pytest.mark.parametrize("n,sets", [(3, CHAIN), (3, FIVE)])
    def test_examples(self, n, sets):
        res = check_lemma3(fam(n, sets))
        assert res.holds and res.details == [{"cylinders": 3, "pairs": 3}]

    def test_vacuous(self):
        assert check_lemma3(fam(2, POWER2)).holds


class TestTheorem1:
    def test_chain_violates_ineq4(self):
        ineq4, ineq5 = check_theorem1(fam(3, CHAIN))
        assert not ineq4.holds
        assert rows(ineq4, "level", "lhs", "rhs", "holds") == [
            (1, 4, 3, True), (2, 2, 2, True), (3, 0, 1, False)]
        assert ineq4.witnesses == [{"level": 3, "t": 0, "frequency": 1}]
        assert ineq5.holds
        assert rows(ineq5, "level", "lhs", "rhs") == [(1, 4, 4), (2, 4, 4), (3, 3, 2)]

    def test_power_set_equalities(self):
        ineq4, ineq5 = check_theorem1(fam(2, POWER2))
        assert ineq4.holds and ineq5.holds
        assert all(d["lhs"] == d["rhs"] for d in ineq4.details + ineq5.details)

    def test_five(self):
        ineq4, ineq5 = check_theorem1(fam(3, FIVE))
        assert ineq4.holds and ineq5.holds
        assert rows(ineq4, "lhs", "rhs") == [(4, 3), (4, 3), (1, 1)]
        assert rows(ineq5, "lhs") == [(4,), (4,), (4,)]


class TestFrankl:
    @pytest.mark.parametrize("n,sets,lhs,rhs", [
        (3, CHAIN, 4, 3),
        (2, POWER2, 4, 4),
        (3, FIVE, 5, 4),
    ])
    def test_examples(self, n, sets, lhs, rhs):
        res = check_frankl(fam(n, sets))
        assert res.holds
        assert rows(res, "lhs", "rhs") == [(lhs, rhs)]

    def test_needs_two_elements(self):
        assert check_frankl(fam(1, [(), (1,)])).holds is None


class TestRareElement:
    @pytest.mark.parametrize("n,sets,lhs,rhs", [
        (3, CHAIN, 2, 4),
        (2, POWER2, 4, 4),
        (3, [(), (1, 2, 3)], 2, 2),
    ])
    def test_examples(self, n, sets, lhs, rhs):
        res = check_rare_element(fam(n, sets))
        assert res.holds and rows(res, "lhs", "rhs") == [(lhs, rhs)]

    def test_ground_set_only(self):
        with pytest.raises(PreconditionError):
            check_rare_element(fam(2, [(1, 2)]))


class TestLemma5:
    def test_power_set(self):
        res = check_lemma5(fam(2, POWER2))
        assert res.holds
        assert res.details[1] == {"level": 2, "lhs": 2, "rhs": 2, "condition": True, "holds": True}

    def test_chain_literal_failure(self):
        # the counting condition holds at level 3 (3 - 2 = 1 = |{{1,2,3}}|) but {} in F, {3} not
        res = check_lemma5(fam(3, CHAIN))
        assert not res.holds
        assert res.details[2] == {"level": 3, "lhs": 1, "rhs": 1, "condition": True, "holds": False}
        bad = {(w["level"], tuple(w["a"])) for w in res.witnesses}
        assert (3, ()) in bad

    def test_vacuous_when_condition_never_holds(self):
        # {1} in F but {} not: the counting condition fails at the only level
        res = check_lemma5(fam(1, [(1,)]), strict=False)
        assert res.holds and not res.details[0]["condition"]

    def test_matches_oracle_up_to_4(self):
        for n in range(1, 5):
            for f in iter_closed(n):
                res = check_lemma5(f, strict=False)
                expect = oracle.lemma5_rows(as_oracle(f), n)
                got = [(d["level"], d["condition"]) for d in res.details]
                assert got == [(i, c) for i, c, _ in expect]
                bad = sorted((w["level"], tuple(w["a"])) for w in res.witnesses)
                assert bad == sorted((i, tuple(sorted(a))) for i, _, xs in expect for a in xs)


class TestBoolean:
    def test_power_set(self):
        ok, dec = is_boolean_algebra(fam(2, POWER2))
        assert ok and dec.base == 0 and dec.blocks == (m(1), m(2))

    def test_chain(self):
        assert is_boolean_algebra(fam(3, CHAIN)) == (False, None)

    def test_trivial(self):
        ok, dec = is_boolean_algebra(fam(1, [()]))
        assert ok and dec.blocks == ()

    def test_base_and_blocks(self):
        f = fam(5, [(5,), (1, 2, 5), (3, 5), (1, 2, 3, 5)])
        ok, dec = is_boolean_algebra(f)
        assert ok and dec.base == m(5) and dec.blocks == (m(1, 2), m(3))

    def test_empty_family(self):
        with pytest.raises(InputError):
            is_boolean_algebra(Family(2, []))

    def test_matches_oracle_up_to_4(self):
        for n in range(1, 5):
            for f in iter_closed(n):
                if len(f):
                    assert is_boolean_algebra(f)[0] == oracle.is_boolean(as_oracle(f))

    @pytest.mark.parametrize("n,sets,two_fn,boolean", [
        (2, POWER2, 4, True),
        (3, FIVE, 2, False),
        (3, CHAIN, 2, False),
    ])
    def test_characterization_examples(self, n, sets, two_fn, boolean):
        res = check_boolean_characterization(fam(n, sets))
        assert res.holds
        assert res.details[0]["two_freq_n"] == two_fn and res.details[0]["boolean"] is boolean

    def test_characterization_reports_disagreement(self):
        # a Boolean algebra on {1} inside a two-element ground set: |F_2| = 0
        res = check_boolean_characterization(fam(2, [(), (1,)]))
        assert res.holds is False and res.witnesses

    def test_forward_direction_when_blocks_cover(self):
        for n in range(1, 5):
            for f in iter_closed(n):
                ok, dec = is_boolean_algebra(f) if len(f) else (False, None)
                if ok and dec.blocks and dec.base | sum(dec.blocks) == f.ground:
                    g, _ = canonical_relabel(f)
                    assert len(f) == 1 << len(dec.blocks)
                    assert 2 * element_frequencies(g)[-1] == len(f)


class TestEqu3:
    def test_power_set(self):
        res = check_equ3(fam(2, POWER2))
        assert res.holds
        assert rows(res, "level", "lhs", "rhs") == [(2, 2, 2), (1, 2, 2)]

    def test_precondition_gate(self):
        with pytest.raises(PreconditionError):
            check_equ3(fam(2, [(), (1, 2)]))

    def test_premise_gate(self):
        with pytest.raises(PreconditionError, match="premise"):
            check_equ3(fam(3, CHAIN))


def test_checker_values_match_oracle_up_to_4():
    for n in range(1, 5):
        for f in iter_closed(n):
            o = as_oracle(f)
            ineq4, ineq5 = check_theorem1(f, strict=False)
            assert rows(ineq4, "level", "lhs", "rhs") == oracle.ineq4_rows(o, n)
            assert rows(ineq5, "level", "lhs", "rhs") == oracle.ineq5_rows(o, n)
            if len(f) and 2 * element_frequencies(f)[-1] == len(f):
                res = check_equ3(f, strict=False)
                assert rows(res, "level", "lhs", "rhs") == oracle.equ3_rows(o, n)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sound_lemmas_exhaustive(n):
    for f in iter_closed(n):
        for check in (check_lemma1, check_lemma2, check_lemma3):
            assert check(f, strict=False).holds, (check.__name__, f)


@given(closed_families(max_n=8))
def test_sound_lemmas_random(f):
    for check in (check_lemma1, check_lemma2, check_lemma3):
        assert check(f, strict=False).holds


def test_failed_claims_have_recheckable_witnesses():
    for n in range(1, 4):
        for f in iter_closed(n):
            rep = full_report(f)
            for c in rep.claims:
                if c.failed:
                    assert c.witnesses


class TestFullReport:
    def test_chain(self):
        rep = full_report(fam(3, CHAIN))
        assert rep.trace.t == (4, 4, 2, 0)
        assert [c.claim for c in rep.claims] == list(CLAIM_IDS)
        # lemma5 fails literally on this family as well (see its test above)
        assert rep.failed_claims == ["thm1_ineq4", "lemma5"]

    def test_power_set(self):
        rep = full_report(fam(2, POWER2))
        assert rep.failed_claims == []
        assert all(c.holds for c in rep.claims)

    def test_degenerate(self):
        rep = full_report(fam(2, [(1, 2)]))
        assert rep.degenerate and rep.family.n == 0 and rep.claims == []
        assert not rep.usable

    def test_precondition_failure_reported(self):
        rep = full_report(fam(2, [(1,), (1, 2)]), reduce=False)
        assert not rep.usable and "F_1 = F" in rep.error

    def test_reduction_then_canonical(self):
        f = fam(3, [(), (3,), (2, 3), (1, 2, 3)])
        rep = full_report(f)
        assert rep.permutation == (3, 2, 1)
        assert rep.family == fam(3, CHAIN)
        assert rep.label_map() == {1: 3, 2: 2, 3: 1}

    def test_user_permutation(self):
        f = fam(2, POWER2)
        rep = full_report(f, perm=(2, 1))
        assert rep.permutation_source == "user" and rep.family == f

    def test_rejects_inadmissible_permutation(self):
        with pytest.raises(InputError):
            full_report(fam(3, CHAIN), perm=(3, 2, 1))

    def test_unknown_claim(self):
        with pytest.raises(InputError):
            full_report(fam(3, CHAIN), claims=("lemma4",))

    def test_deterministic(self):
        f = fam(4, [(), (1,), (2,), (1, 2), (1, 3), (1, 2, 3, 4)])
        a, b = full_report(f), full_report(f)
        assert [(c.claim, c.holds, c.details, c.witnesses) for c in a.claims] == \
            [(c.claim, c.holds, c.details, c.witnesses) for c in b.claims]

    def test_preconditions_pass_after_reduction(self):
        for f in iter_closed(3):
            rep = full_report(f)
            if not rep.degenerate:
                assert check_preconditions(rep.family).passed
