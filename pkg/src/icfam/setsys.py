"""Subsets as bitmasks, intersection-closed families, and the basic
operations on them: closure, frequencies, relabeling, precondition checks
and ground-set reduction.

Element ``e`` of the ground set {1..n} lives in bit ``e - 1``. Everything
that crosses the package boundary uses 1-based elements.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InputError, NotClosedError

MAX_N = 24
TABLE_MAX_N = 20


def bit(e: int) -> int:
    return 1 << (e - 1)


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << (e - 1)
    return m


def elements_of(mask: int) -> list[int]:
    out = []
    e = 1
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return out


def format_mask(mask: int) -> str:
    return "{" + ",".join(map(str, elements_of(mask))) + "}"


def _check_n(n: int) -> None:
    if not isinstance(n, int) or not 0 <= n <= MAX_N:
        raise InputError(f"ground-set size n={n!r} outside supported range 0..{MAX_N}")


def _check_masks(n: int, masks: Sequence[int]) -> None:
    limit = 1 << n
    for m in masks:
        if not 0 <= m < limit:
            raise InputError(f"set {format_mask(m)} is not a subset of [{n}]")


@dataclass(frozen=True)
class RawFamily:
    """A duplicate-free collection of subsets, not necessarily closed."""

    n: int
    sets: tuple[int, ...]

    def __post_init__(self):
        _check_n(self.n)
        masks = tuple(self.sets)
        _check_masks(self.n, masks)
        if len(set(masks)) != len(masks):
            seen = set()
            for m in masks:
                if m in seen:
                    raise InputError(f"duplicate set {format_mask(m)}")
                seen.add(m)
        object.__setattr__(self, "sets", tuple(sorted(masks)))

    @classmethod
    def of(cls, n: int, sets: Iterable[Iterable[int]]) -> "RawFamily":
        return cls(n, tuple(mask_of(s) for s in sets))

    def __len__(self):
        return len(self.sets)


class Family:
    """An intersection-closed family over [n], sorted by mask value.

    ``Family(n, masks)`` validates closedness and raises NotClosedError with
    a violating pair otherwise.
    """

    __slots__ = ("n", "sets", "_table", "_lookup")

    def __init__(self, n: int, sets: Iterable[int], *, _trusted: bool = False):
        masks = tuple(sorted(sets))
        if not _trusted:
            raw = RawFamily(n, masks)
            ok, pair = is_intersection_closed(raw)
            if not ok:
                a, b = pair
                raise NotClosedError(
                    f"not intersection-closed: {format_mask(a)} & {format_mask(b)} "
                    f"= {format_mask(a & b)} is missing", pair)
        self.n = n
        self.sets = masks
        if n <= TABLE_MAX_N:
            table = bytearray(((1 << n) + 7) >> 3)
            for m in masks:
                table[m >> 3] |= 1 << (m & 7)
            self._table = table
            self._lookup = None
        else:
            self._table = None
            self._lookup = frozenset(masks)

    @classmethod
    def of(cls, n: int, sets: Iterable[Iterable[int]]) -> "Family":
        return cls(n, [mask_of(s) for s in sets])

    @classmethod
    def from_raw(cls, raw: RawFamily) -> "Family":
        return cls(raw.n, raw.sets)

    def __contains__(self, mask: int) -> bool:
        if self._table is not None:
            if not 0 <= mask < (1 << self.n):
                return False
            return bool(self._table[mask >> 3] >> (mask & 7) & 1)
        return mask in self._lookup

    def __len__(self):
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def __eq__(self, other):
        if not isinstance(other, Family):
            return NotImplemented
        return self.n == other.n and self.sets == other.sets

    def __hash__(self):
        return hash((self.n, self.sets))

    def __repr__(self):
        body = ", ".join(format_mask(m) for m in self.sets)
        return f"Family(n={self.n}, [{body}])"

    def to_lists(self) -> list[list[int]]:
        return [elements_of(m) for m in self.sets]

    @property
    def ground(self) -> int:
        return (1 << self.n) - 1


def intersection_closure(raw: RawFamily) -> Family:
    """Smallest intersection-closed superfamily of ``raw``.

    Each new generator contributes itself plus its intersections with what
    has been built so far.
    """
    built: set[int] = set()
    for g in raw.sets:
        if g in built:
            continue
        new = {g & c for c in built}
        new.add(g)
        built |= new
    return Family(raw.n, built, _trusted=True)


def is_intersection_closed(raw) -> tuple[bool, tuple[int, int] | None]:
    """Return (True, None) or (False, (A, B)) for the first violating pair."""
    masks = raw.sets
    present = set(masks)
    for x, a in enumerate(masks):
        for b in masks[x + 1:]:
            if (a & b) not in present:
                return False, (a, b)
    return True, None


def columns(f: Family) -> list[int]:
    """For each element, the bitmask over member indices of the sets containing it."""
    cols = [0] * f.n
    for k, m in enumerate(f.sets):
        e = 0
        while m:
            if m & 1:
                cols[e] |= 1 << k
            m >>= 1
            e += 1
    return cols


def element_frequencies(f: Family) -> tuple[int, ...]:
    """counts[i-1] = |F_i|."""
    counts = [0] * f.n
    for m in f.sets:
        e = 0
        while m:
            if m & 1:
                counts[e] += 1
            m >>= 1
            e += 1
    return tuple(counts)


def relabel_mask(mask: int, perm: Sequence[int]) -> int:
    """Image of ``mask`` under ``perm`` (perm[old-1] = new, 1-based)."""
    out = 0
    e = 0
    while mask:
        if mask & 1:
            out |= 1 << (perm[e] - 1)
        mask >>= 1
        e += 1
    return out


def apply_permutation(f: Family, perm: Sequence[int]) -> Family:
    perm = tuple(perm)
    if sorted(perm) != list(range(1, f.n + 1)):
        raise InputError(f"{list(perm)} is not a permutation of 1..{f.n}")
    return Family(f.n, (relabel_mask(m, perm) for m in f.sets), _trusted=True)


def canonical_relabel(f: Family) -> tuple[Family, tuple[int, ...]]:
    """Renumber elements by descending frequency, ties in original order.

    Returns the relabeled family and the permutation old -> new.
    """
    freq = element_frequencies(f)
    order = sorted(range(f.n), key=lambda e: -freq[e])
    perm = [0] * f.n
    for new, old in enumerate(order):
        perm[old] = new + 1
    perm = tuple(perm)
    if perm == tuple(range(1, f.n + 1)):
        return f, perm
    return apply_permutation(f, perm), perm


def is_admissible(f: Family, perm: Sequence[int]) -> bool:
    """True if relabeling by ``perm`` gives nonincreasing frequencies."""
    g = apply_permutation(f, perm)
    freq = element_frequencies(g)
    return all(freq[k] >= freq[k + 1] for k in range(len(freq) - 1))


@dataclass(frozen=True)
class PreconditionReport:
    ordered: bool
    f1_proper: bool
    pairwise_distinct: bool
    empty_in_f: bool
    failures: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.ordered and self.f1_proper and self.pairwise_distinct


def check_preconditions(f: Family) -> PreconditionReport:
    failures = []
    freq = element_frequencies(f)
    ordered = True
    for k in range(f.n - 1):
        if freq[k] < freq[k + 1]:
            ordered = False
            failures.append(f"not ordered: |F_{k + 1}| = {freq[k]} < |F_{k + 2}| = {freq[k + 1]}")
            break
    if f.n == 0:
        f1_proper = False
        failures.append("degenerate: empty ground set")
    else:
        f1_proper = freq[0] != len(f)
        if not f1_proper:
            failures.append("F_1 = F: element 1 lies in every member")
    cols = columns(f)
    pairwise_distinct = True
    first_with = {}
    for e, c in enumerate(cols):
        if c in first_with:
            pairwise_distinct = False
            failures.append(f"F_{first_with[c] + 1} = F_{e + 1}")
        else:
            first_with[c] = e
    empty_in_f = 0 in f
    if f1_proper and ordered and not empty_in_f:
        # every F_i != F, so the meet of all members is empty and closedness puts it in F
        raise AssertionError(f"closedness/ordering implies the empty set is in {f!r}")
    return PreconditionReport(ordered, f1_proper, pairwise_distinct, empty_in_f, tuple(failures))


@dataclass
class ReductionLog:
    steps: list[tuple] = field(default_factory=list)
    label_map: dict[int, int | None] = field(default_factory=dict)
    n_in: int = 0
    n_out: int = 0

    @property
    def changed(self) -> bool:
        return bool(self.steps)


def _drop_element(masks: Iterable[int], e: int) -> list[int]:
    """Delete element e (1-based) and shift higher elements down by one."""
    low = (1 << (e - 1)) - 1
    return [(m & low) | ((m >> e) << (e - 1)) for m in masks]


def reduce_family(f: Family) -> tuple[Family, ReductionLog]:
    """Remove universal elements and merge co-occurring ones until neither applies.

    Labels are compacted after each step; ``label_map`` sends each original
    element to its final label, or None when it was removed or merged away.
    """
    log = ReductionLog(n_in=f.n)
    current = {e: e for e in range(1, f.n + 1)}  # original -> current label
    masks = list(f.sets)
    n = f.n

    def remove(label):
        nonlocal masks, n
        masks = _drop_element(masks, label)
        n -= 1
        for orig, cur in current.items():
            if cur is None:
                continue
            if cur == label:
                current[orig] = None
            elif cur > label:
                current[orig] = cur - 1

    def original(label):
        return min(o for o, c in current.items() if c == label)

    while True:
        g = Family(n, masks, _trusted=True)
        freq = element_frequencies(g)
        universal = [e + 1 for e in range(n) if freq[e] == len(g)]
        if universal:
            label = universal[0]
            log.steps.append(("delete", original(label)))
            remove(label)
            continue
        cols = columns(g)
        pair = next(((i, j) for j in range(n) for i in range(j) if cols[i] == cols[j]), None)
        if pair is None:
            break
        i, j = pair
        # F_i = F_j: element j+1 carries no information beyond i+1
        log.steps.append(("merge", original(j + 1), original(i + 1)))
        remove(j + 1)

    log.label_map = dict(current)
    log.n_out = n
    return Family(n, masks, _trusted=True), log


def is_degenerate(f: Family) -> bool:
    return f.n == 0 or len(f) == 0
