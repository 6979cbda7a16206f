"""Discarding sets, their extensions and roots, exclusion cylinders, and the
bound trace t^0..t^n.

An exclusion set is kept symbolic as a cylinder: every set whose trace on
[i] equals ``prefix`` and whose higher part avoids the root, if any. Its
size is a power of two, so the trace never materializes it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import BudgetExceeded, InputError, PreconditionError
from .setsys import Family, check_preconditions, format_mask

DEFAULT_BUDGET = 1 << 20


def _low(i: int) -> int:
    return (1 << i) - 1


def _check_level(f: Family, i: int) -> None:
    if not 1 <= i <= f.n:
        raise InputError(f"level {i} outside 1..{f.n}")


def is_discarding(f: Family, a: int, i: int) -> bool:
    return a & ~_low(i - 1) == 0 and a in f and (a | 1 << (i - 1)) not in f


def discarding_sets(f: Family, i: int) -> list[int]:
    """All A in F with A a subset of [i-1] and A+i not in F, ascending."""
    _check_level(f, i)
    limit = 1 << (i - 1)
    ibit = limit
    out = []
    for m in f.sets:
        if m >= limit:
            break  # sets are sorted, so nothing later fits in [i-1]
        if (m | ibit) not in f:
            out.append(m)
    return out


def extensions(f: Family, a: int, i: int) -> list[int]:
    """All X in {i+1..n} with A+i+X in F, as masks in the original bit positions."""
    _check_level(f, i)
    if a & ~_low(i - 1):
        raise InputError(f"{format_mask(a)} is not a subset of [{i - 1}]")
    low = _low(i)
    head = a | 1 << (i - 1)
    return [m & ~low for m in f.sets if m & low == head]


def root_of(f: Family, a: int, i: int) -> int | None:
    """Least element common to all extensions of a discarding set, or None."""
    if not is_discarding(f, a, i):
        raise InputError(f"{format_mask(a)} is not discarding at level {i}")
    ext = extensions(f, a, i)
    if not ext:
        return None
    common = -1
    for x in ext:
        common &= x
    if common == 0:
        raise AssertionError(
            f"extensions of {format_mask(a)} at level {i} share no element; family is not closed")
    return (common & -common).bit_length()


@dataclass(frozen=True)
class ExclusionCylinder:
    """{prefix + X : X in {level+1..n}, forbidden not in X}."""

    n: int
    level: int
    prefix: int
    forbidden: int | None = None

    @property
    def free(self) -> int:
        m = _low(self.n) & ~_low(self.level)
        if self.forbidden is not None:
            m &= ~(1 << (self.forbidden - 1))
        return m

    @property
    def size(self) -> int:
        return 1 << self.free.bit_count()

    def __contains__(self, mask: int) -> bool:
        if mask & _low(self.level) != self.prefix:
            return False
        return mask & ~_low(self.level) & ~self.free == 0

    def members(self) -> Iterator[int]:
        free = self.free
        sub = 0
        while True:
            yield self.prefix | sub
            if sub == free:
                return
            sub = (sub - free) & free


def h_cylinder(f: Family, a: int, i: int) -> ExclusionCylinder:
    return ExclusionCylinder(f.n, i, a | 1 << (i - 1), root_of(f, a, i))


def h_materialize(c: ExclusionCylinder, budget: int = DEFAULT_BUDGET) -> list[int]:
    if c.size > budget:
        raise BudgetExceeded(
            f"exclusion set at level {c.level} has {c.size} members, budget is {budget}", c)
    return sorted(c.members())


def cylinders_disjoint(c1: ExclusionCylinder, c2: ExclusionCylinder) -> bool:
    """Decide emptiness of the intersection without enumerating either side."""
    if c1.level < c2.level:
        c1, c2 = c2, c1
    # c1 fixes [c1.level] which covers everything c2 fixes
    if c1.prefix & _low(c2.level) != c2.prefix:
        return True
    if c2.forbidden is not None and c2.forbidden <= c1.level:
        return bool(c1.prefix >> (c2.forbidden - 1) & 1)
    # remaining forbidden elements lie in the free part of both; the bare prefix is common
    return False


@dataclass(frozen=True)
class DiscardingRecord:
    level: int
    a: int
    root: int | None
    h_size: int

    def cylinder(self, n: int) -> ExclusionCylinder:
        return ExclusionCylinder(n, self.level, self.a | 1 << (self.level - 1), self.root)


@dataclass(frozen=True)
class LevelTrace:
    level: int
    records: tuple[DiscardingRecord, ...]
    excluded: int


@dataclass(frozen=True)
class BoundTrace:
    n: int
    t: tuple[int, ...]
    levels: tuple[LevelTrace, ...]

    def records(self) -> Iterator[DiscardingRecord]:
        for lv in self.levels:
            yield from lv.records

    def cylinders(self) -> list[ExclusionCylinder]:
        return [r.cylinder(self.n) for r in self.records()]


def discarding_records(f: Family, i: int) -> list[DiscardingRecord]:
    out = []
    for a in discarding_sets(f, i):
        root = root_of(f, a, i)
        h = 1 << (f.n - i) if root is None else 1 << (f.n - i - 1)
        out.append(DiscardingRecord(i, a, root, h))
    return out


def bound_trace(f: Family, *, check: bool = True) -> BoundTrace:
    """t[0] = 2^(n-1), then each level subtracts its total exclusion size.

    With ``check`` the family must satisfy the ordering preconditions;
    pass ``check=False`` to trace an arbitrary closed family.
    """
    if check:
        pre = check_preconditions(f)
        if not pre.passed:
            raise PreconditionError("; ".join(pre.failures))
    if f.n == 0:
        raise PreconditionError("bound trace needs a nonempty ground set")
    t = [1 << (f.n - 1)]
    levels = []
    for i in range(1, f.n + 1):
        recs = tuple(discarding_records(f, i))
        excluded = sum(r.h_size for r in recs)
        levels.append(LevelTrace(i, recs, excluded))
        t.append(t[-1] - excluded)
    return BoundTrace(f.n, tuple(t), tuple(levels))


def exclusions_hit_family(f: Family, trace: BoundTrace,
                          budget: int = DEFAULT_BUDGET) -> list[tuple[DiscardingRecord, int]]:
    """(record, member) pairs where an excluded set is actually in F.

    Checks membership of each cylinder member when the cylinder fits the
    budget, otherwise scans F against the cylinder.
    """
    hits = []
    for r in trace.records():
        c = r.cylinder(f.n)
        if c.size <= budget and c.size <= len(f):
            found = [m for m in c.members() if m in f]
        else:
            found = [m for m in f.sets if m in c]
        hits.extend((r, m) for m in sorted(found))
    return hits
