"""Exhaustive and random generation of intersection-closed families, and
claim sweeps over them.

The pruned enumerator decides membership of every subset of [n] in
ascending mask order. When a subset comes up, all of its proper subsets are
already decided, so including it is legal exactly when its intersection
with every current member is present. Excluding is always legal. Every
branch therefore ends in a closed family and there are no dead ends.

Shards fix the decisions for the first few subsets; they partition the
search space independently of worker count, and summaries are merged in
shard order.
"""
from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Sequence

import numpy as np

from .claims import CLAIM_IDS, full_report
from .errors import InputError, LimitExceeded
from .setsys import (
    MAX_N,
    Family,
    RawFamily,
    canonical_relabel,
    check_preconditions,
    intersection_closure,
    is_degenerate,
    reduce_family,
)

log = logging.getLogger(__name__)

NAIVE_MAX_N = 4
EXHAUSTIVE_MAX_N = 5
CHECKPOINT_VERSION = 1
MINE_CHUNK = 500
SHARD_DEPTH = {1: 2, 2: 4, 3: 4, 4: 6, 5: 8}


def encode_family(f: Family) -> str:
    """Characteristic vector over the 2^n subsets, as lowercase hex."""
    bits = 0
    for m in f.sets:
        bits |= 1 << m
    width = max(1, (1 << f.n) // 4)
    return format(bits, f"0{width}x")


def decode_family(n: int, code: str) -> Family:
    bits = int(code, 16)
    return Family(n, [m for m in range(1 << n) if bits >> m & 1])


@dataclass(frozen=True)
class Filters:
    preconditions_only: bool = False
    require_empty_set: bool = False

    @property
    def name(self) -> str:
        parts = []
        if self.preconditions_only:
            parts.append("preconditions")
        if self.require_empty_set:
            parts.append("empty-set")
        return "+".join(parts) or "all"

    def accepts(self, f: Family) -> bool:
        if self.require_empty_set and 0 not in f:
            return False
        if self.preconditions_only:
            g, _ = canonical_relabel(f)
            return check_preconditions(g).passed
        return True


def _check_exhaustive_n(n: int, allow_n5: bool) -> None:
    if not 1 <= n <= EXHAUSTIVE_MAX_N:
        raise LimitExceeded(f"exhaustive enumeration supports 1 <= n <= {EXHAUSTIVE_MAX_N}, got {n}")
    if n == EXHAUSTIVE_MAX_N and not allow_n5:
        raise LimitExceeded("n = 5 exhaustive runs are long; pass the explicit n=5 flag")


def naive_enumerate(n: int, visitor: Callable[[Family], None] | None = None,
                    filters: Filters | None = None) -> int:
    """Scan all 2^(2^n) candidate subfamilies and visit the closed ones."""
    if not 1 <= n <= NAIVE_MAX_N:
        raise LimitExceeded(f"naive enumeration supports 1 <= n <= {NAIVE_MAX_N}, got {n}")
    size = 1 << n
    count = 0
    for bits in range(1 << size):
        members = [m for m in range(size) if bits >> m & 1]
        if all(bits >> (a & b) & 1 for x, a in enumerate(members) for b in members[x + 1:]):
            f = Family(n, members, _trusted=True)
            if filters is not None and not filters.accepts(f):
                continue
            count += 1
            if visitor is not None:
                visitor(f)
    return count


def shard_count(n: int) -> int:
    return 1 << SHARD_DEPTH[n]


def iter_shard(n: int, shard: int) -> Iterator[tuple[int, ...]]:
    """Closed families (as sorted mask tuples) whose first decisions match ``shard``."""
    size = 1 << n
    depth = SHARD_DEPTH[n]
    present = bytearray(size)
    members: list[int] = []

    for idx in range(depth):
        if shard >> idx & 1:
            if not all(present[idx & m] for m in members):
                return
            members.append(idx)
            present[idx] = 1

    # explicit stack of (next subset to decide, member count at that point, include tried)
    stack = [(depth, len(members), False)]
    while stack:
        idx, k, tried = stack.pop()
        while len(members) > k:
            present[members.pop()] = 0
        if idx == size:
            yield tuple(members)
            continue
        if not tried:
            stack.append((idx, k, True))
            if all(present[idx & m] for m in members):
                members.append(idx)
                present[idx] = 1
                stack.append((idx + 1, k + 1, False))
        else:
            stack.append((idx + 1, k, False))


def iter_closed(n: int, allow_n5: bool = False) -> Iterator[Family]:
    _check_exhaustive_n(n, allow_n5)
    for shard in range(shard_count(n)):
        for masks in iter_shard(n, shard):
            yield Family(n, masks, _trusted=True)


def enumerate_closed(n: int, visitor: Callable[[Family], None] | None = None,
                     filters: Filters | None = None, allow_n5: bool = False) -> int:
    count = 0
    for f in iter_closed(n, allow_n5):
        if filters is not None and not filters.accepts(f):
            continue
        count += 1
        if visitor is not None:
            visitor(f)
    return count


def random_closed(n: int, k: int, seed) -> Family:
    """Intersection closure of k uniform draws from 2^[n].

    ``seed`` is anything numpy's ``default_rng`` accepts; a sequence such as
    (seed, sample_index) gives independent reproducible streams.
    """
    if not 1 <= n <= MAX_N:
        raise InputError(f"n={n} outside 1..{MAX_N}")
    if k < 0:
        raise InputError("generator count must be nonnegative")
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, 1 << n, size=k, dtype=np.int64)
    return intersection_closure(RawFamily(n, tuple(sorted({int(d) for d in draws}))))


@dataclass
class SweepConfig:
    n: int
    preconditions_only: bool = False
    require_empty_set: bool = False
    claims: tuple[str, ...] = CLAIM_IDS
    jobs: int = 1
    witness_limit: int = 20
    allow_n5: bool = False
    checkpoint_dir: str | None = None
    checkpoint_every: int = 10**7

    def validate(self) -> None:
        unknown = set(self.claims) - set(CLAIM_IDS)
        if unknown:
            raise InputError(f"unknown claim ids: {sorted(unknown)}")
        if self.jobs < 1:
            raise InputError("jobs must be at least 1")
        if self.witness_limit < 0:
            raise InputError("witness limit must be nonnegative")


@dataclass
class MineConfig(SweepConfig):
    samples: int = 1000
    gens: int = 4
    seed: int = 0

    def validate(self) -> None:
        super().validate()
        if not 1 <= self.n <= MAX_N:
            raise LimitExceeded(f"n={self.n} outside 1..{MAX_N}")
        if self.samples < 0 or self.gens < 0:
            raise InputError("samples and gens must be nonnegative")


def _new_counts(claims):
    return {c: {"hold": 0, "fail": 0, "n/a": 0} for c in claims}


@dataclass
class SweepSummary:
    mode: str
    n: int
    filter: str
    claims: dict = field(default_factory=dict)
    visited: int = 0
    passing_preconditions: int = 0
    passing_after_reduction: int = 0
    checked: int = 0
    refused: int = 0
    discarding_records: int = 0
    rooted_records: int = 0
    families_with_root: int = 0
    witnesses: list = field(default_factory=list)
    witness_limit: int = 20

    @property
    def failures(self) -> int:
        return sum(v["fail"] for v in self.claims.values())

    def merge(self, other: "SweepSummary") -> "SweepSummary":
        out = SweepSummary(self.mode, self.n, self.filter, witness_limit=self.witness_limit)
        out.claims = {c: {k: self.claims[c][k] + other.claims[c][k] for k in self.claims[c]}
                      for c in self.claims}
        for name in ("visited", "passing_preconditions", "passing_after_reduction", "checked",
                     "refused", "discarding_records", "rooted_records", "families_with_root"):
            setattr(out, name, getattr(self, name) + getattr(other, name))
        out.witnesses = (self.witnesses + other.witnesses)[:self.witness_limit]
        return out

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSummary":
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _visit(summary: SweepSummary, fam: Family, cfg: SweepConfig) -> None:
    summary.visited += 1
    if cfg.require_empty_set and 0 not in fam:
        return
    relabeled, _ = canonical_relabel(fam)
    raw_ok = not is_degenerate(relabeled) and check_preconditions(relabeled).passed
    reduced, _ = reduce_family(fam)
    summary.passing_preconditions += raw_ok
    summary.passing_after_reduction += not is_degenerate(reduced)
    if cfg.preconditions_only and not raw_ok:
        return
    report = full_report(fam, reduce=not cfg.preconditions_only, claims=cfg.claims)
    if not report.usable:
        summary.refused += 1
        return
    summary.checked += 1
    rooted = 0
    for r in report.trace.records():
        summary.discarding_records += 1
        rooted += r.root is not None
    summary.rooted_records += rooted
    summary.families_with_root += rooted > 0
    for c in report.claims:
        key = {True: "hold", False: "fail", None: "n/a"}[c.holds]
        summary.claims[c.claim][key] += 1
        if c.failed and len(summary.witnesses) < summary.witness_limit:
            summary.witnesses.append({
                "claim": c.claim,
                "n": fam.n,
                "encoding": encode_family(fam),
                "sets": fam.to_lists(),
                "checked_n": report.family.n,
                "checked_sets": report.family.to_lists(),
                "witness": c.witnesses[0] if c.witnesses else {},
            })


def _empty_summary(mode: str, cfg: SweepConfig) -> SweepSummary:
    name = Filters(cfg.preconditions_only, cfg.require_empty_set).name
    return SweepSummary(mode, cfg.n, name, _new_counts(cfg.claims), witness_limit=cfg.witness_limit)


def _fingerprint(cfg: SweepConfig) -> dict:
    return {"n": cfg.n, "preconditions_only": cfg.preconditions_only,
            "require_empty_set": cfg.require_empty_set, "claims": list(cfg.claims),
            "witness_limit": cfg.witness_limit}


def _write_checkpoint(path: Path, shard: int, cfg: SweepConfig, summary: SweepSummary,
                      done: bool) -> None:
    doc = {"version": CHECKPOINT_VERSION, "shard": shard, "cursor": summary.visited,
           "done": done, "config": _fingerprint(cfg), "summary": summary.to_dict()}
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(doc), encoding="utf-8")
    os.replace(tmp, path)


def _load_checkpoint(path: Path, shard: int, cfg: SweepConfig):
    if not path.exists():
        return None
    doc = json.loads(path.read_text(encoding="utf-8"))
    if doc.get("version") != CHECKPOINT_VERSION or doc.get("shard") != shard:
        raise InputError(f"{path}: incompatible checkpoint")
    if doc.get("config") != _fingerprint(cfg):
        raise InputError(f"{path}: checkpoint was written for a different sweep configuration")
    return doc


def _sweep_shard(args) -> SweepSummary:
    cfg, shard = args
    summary = _empty_summary("exhaustive", cfg)
    path = None
    cursor = 0
    if cfg.checkpoint_dir:
        path = Path(cfg.checkpoint_dir) / f"shard-{shard:04d}.json"
        doc = _load_checkpoint(path, shard, cfg)
        if doc is not None:
            summary = SweepSummary.from_dict(doc["summary"])
            if doc["done"]:
                return summary
            cursor = doc["cursor"]
    for pos, masks in enumerate(iter_shard(cfg.n, shard)):
        if pos < cursor:
            continue
        _visit(summary, Family(cfg.n, masks, _trusted=True), cfg)
        if path is not None and summary.visited % cfg.checkpoint_every == 0:
            _write_checkpoint(path, shard, cfg, summary, done=False)
            log.info("shard %d: %d families", shard, summary.visited)
    if path is not None:
        _write_checkpoint(path, shard, cfg, summary, done=True)
    return summary


def _run(fn, tasks: Sequence, jobs: int) -> list:
    if jobs == 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def sweep(cfg: SweepConfig) -> SweepSummary:
    """Run the claim checkers over every closed family on [n]."""
    cfg.validate()
    _check_exhaustive_n(cfg.n, cfg.allow_n5)
    if cfg.checkpoint_dir:
        Path(cfg.checkpoint_dir).mkdir(parents=True, exist_ok=True)
    parts = _run(_sweep_shard, [(cfg, s) for s in range(shard_count(cfg.n))], cfg.jobs)
    total = _empty_summary("exhaustive", cfg)
    for p in parts:
        total = total.merge(p)
    return total


def _mine_chunk(args) -> SweepSummary:
    cfg, start = args
    summary = _empty_summary("random", cfg)
    for s in range(start, min(start + MINE_CHUNK, cfg.samples)):
        _visit(summary, random_closed(cfg.n, cfg.gens, (cfg.seed, s)), cfg)
    return summary


def mine(cfg: MineConfig) -> SweepSummary:
    """Run the claim checkers over ``samples`` seeded random families.

    Sample s is drawn from the stream seeded by (seed, s), so the result does
    not depend on how samples are split across workers.
    """
    cfg.validate()
    parts = _run(_mine_chunk, [(cfg, s) for s in range(0, cfg.samples, MINE_CHUNK)], cfg.jobs)
    total = _empty_summary("random", cfg)
    for p in parts:
        total = total.merge(p)
    return total


def read_golden(path) -> dict[tuple[int, str], int]:
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            fields = dict(part.split("=", 1) for part in line.split())
            out[int(fields["n"]), fields["filter"]] = int(fields["count"])
        except (KeyError, ValueError) as exc:
            raise InputError(f"{path}:{lineno}: malformed golden line {line!r}") from exc
    return out


def write_golden(path, counts: dict[tuple[int, str], int]) -> None:
    lines = [f"n={n} count={v} filter={name}" for (n, name), v in sorted(counts.items())]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def witness_sets(summary: SweepSummary) -> list[tuple[str, Family]]:
    return [(w["claim"], decode_family(w["n"], w["encoding"])) for w in summary.witnesses]

