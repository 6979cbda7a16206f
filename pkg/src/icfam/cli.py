"""Command-line entry point.

Exit codes: 0 ran and no checked claim failed, 1 ran and some claim failed,
2 input or precondition error, 3 internal limit exceeded.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .claims import CLAIM_IDS, full_report
from .errors import InputError, LimitExceeded, PreconditionError
from .explore import (
    Filters,
    MineConfig,
    SweepConfig,
    enumerate_closed,
    mine,
    naive_enumerate,
    read_golden,
    sweep,
    witness_sets,
    write_golden,
)
from .formats import (
    format_family_json,
    format_family_text,
    parse_family,
    report_document,
    serialize_report,
)
from .setsys import Family, elements_of, intersection_closure, reduce_family

EXIT_OK, EXIT_CLAIM_FAILED, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _load_family(path: str) -> Family:
    return Family.from_raw(parse_family(_read(path)))


def _parse_perm(text):
    if text is None:
        return None
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError as exc:
        raise InputError(f"--perm expects comma-separated integers, got {text!r}") from exc


def _parse_claims(text):
    if not text:
        return CLAIM_IDS
    claims = tuple(c.strip() for c in text.split(",") if c.strip())
    unknown = set(claims) - set(CLAIM_IDS)
    if unknown:
        raise InputError(f"unknown claim ids {sorted(unknown)}; choose from {', '.join(CLAIM_IDS)}")
    return claims


def _write(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


def cmd_check(args) -> int:
    f = _load_family(args.file)
    report = full_report(f, perm=_parse_perm(args.perm), reduce=not args.no_reduce)
    _write(serialize_report(report, "json" if args.json else "text").decode("utf-8"))
    if not report.usable:
        return EXIT_INPUT
    return EXIT_CLAIM_FAILED if report.failed_claims else EXIT_OK


def cmd_trace(args) -> int:
    f = _load_family(args.file)
    report = full_report(f, perm=_parse_perm(args.perm), reduce=not args.no_reduce, claims=())
    if not report.usable:
        raise PreconditionError(report.error)
    doc = report_document(report)
    if args.json:
        _write(json.dumps({"family": doc["family"], "permutation": doc["permutation"],
                           "trace": doc["trace"]}, indent=2) + "\n")
        return EXIT_OK
    tr = report.trace
    lines = [f"t = {tuple(tr.t)}"]
    for lv in tr.levels:
        recs = ", ".join(
            "{" + ",".join(map(str, elements_of(r.a))) + "}"
            + (f" root={r.root}" if r.root is not None else "") + f" |H|={r.h_size}"
            for r in lv.records)
        lines.append(f"D_{lv.level}: [{recs}]  excluded={lv.excluded}  t^{lv.level}={tr.t[lv.level]}")
    _write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_closure(args) -> int:
    f = intersection_closure(parse_family(_read(args.file)))
    _write(format_family_json(f) if args.json else format_family_text(f))
    return EXIT_OK


def cmd_reduce(args) -> int:
    f = _load_family(args.file)
    g, log = reduce_family(f)
    if args.json:
        doc = {"n": g.n, "sets": g.to_lists(), "steps": [list(s) for s in log.steps],
               "label_map": {str(k): v for k, v in log.label_map.items()}}
        _write(json.dumps(doc) + "\n")
        return EXIT_OK
    comments = [f"# {' '.join(map(str, s))}" for s in log.steps]
    _write("\n".join(comments) + ("\n" if comments else "") + format_family_text(g))
    return EXIT_OK


def _dump_witnesses(summary, out: str) -> None:
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / "summary.json").write_text(summary.to_json(), encoding="utf-8")
    for k, (claim, fam) in enumerate(witness_sets(summary)):
        path = d / f"{k:03d}-{claim}.fam"
        path.write_text(format_family_text(fam), encoding="utf-8")


def _summary_exit(summary, args) -> int:
    _write(summary.to_json())
    if args.out:
        _dump_witnesses(summary, args.out)
    return EXIT_CLAIM_FAILED if summary.failures else EXIT_OK


def cmd_sweep(args) -> int:
    cfg = SweepConfig(
        n=args.n, preconditions_only=args.preconditions_only,
        require_empty_set=args.require_empty_set, claims=_parse_claims(args.claims),
        jobs=args.jobs, witness_limit=args.witness_limit, allow_n5=args.allow_n5,
        checkpoint_dir=args.checkpoint_dir, checkpoint_every=args.checkpoint_every)
    return _summary_exit(sweep(cfg), args)


def cmd_mine(args) -> int:
    cfg = MineConfig(
        n=args.n, preconditions_only=args.preconditions_only,
        require_empty_set=args.require_empty_set, claims=_parse_claims(args.claims),
        jobs=args.jobs, witness_limit=args.witness_limit,
        samples=args.samples, gens=args.gens, seed=args.seed)
    return _summary_exit(mine(cfg), args)


def cmd_count(args) -> int:
    filters = Filters(args.preconditions_only, args.require_empty_set)
    if args.oracle:
        count = naive_enumerate(args.n, filters=filters)
    else:
        count = enumerate_closed(args.n, filters=filters, allow_n5=args.allow_n5)
    _write(f"{count}\n")
    if args.golden:
        path = Path(args.golden)
        counts = read_golden(path) if path.exists() else {}
        counts[args.n, filters.name] = count
        write_golden(path, counts)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="icfam", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"icfam {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def family_cmd(name, fn, help):
        s = sub.add_parser(name, help=help)
        s.add_argument("file", help="family file (plain text or JSON), '-' for stdin")
        s.add_argument("--json", action="store_true", help="machine-readable output")
        s.set_defaults(fn=fn)
        return s

    for name, fn, help in (("check", cmd_check, "check every claim on one family"),
                           ("trace", cmd_trace, "print the bound trace of one family")):
        s = family_cmd(name, fn, help)
        s.add_argument("--perm", help="old->new labels 'p1,p2,...' instead of canonical order")
        s.add_argument("--no-reduce", action="store_true",
                       help="do not remove universal or co-occurring elements first")
    family_cmd("closure", cmd_closure, "print the intersection closure of a set collection")
    family_cmd("reduce", cmd_reduce, "remove universal and co-occurring elements")

    def stream_cmd(name, fn, help):
        s = sub.add_parser(name, help=help)
        s.add_argument("--n", type=int, required=True)
        s.add_argument("--jobs", type=int, default=1)
        s.add_argument("--out", help="directory for summary.json and witness families")
        s.add_argument("--preconditions-only", action="store_true",
                       help="only check families that meet the preconditions without reduction")
        s.add_argument("--require-empty-set", action="store_true")
        s.add_argument("--claims", help="comma-separated claim ids (default: all)")
        s.add_argument("--witness-limit", type=int, default=20)
        s.set_defaults(fn=fn)
        return s

    s = stream_cmd("sweep", cmd_sweep, "check claims on every closed family over [n]")
    s.add_argument("--allow-n5", action="store_true", help="permit the long n=5 exhaustive run")
    s.add_argument("--checkpoint-dir", help="per-shard resumable checkpoints")
    s.add_argument("--checkpoint-every", type=int, default=10**7)
    s = stream_cmd("mine", cmd_mine, "check claims on seeded random families")
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--gens", type=int, required=True, help="random generators per family")
    s.add_argument("--seed", type=int, required=True)

    s = sub.add_parser("count", help="count closed families over [n]")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--oracle", action="store_true", help="use the naive 2^(2^n) scan")
    s.add_argument("--preconditions-only", action="store_true")
    s.add_argument("--require-empty-set", action="store_true")
    s.add_argument("--allow-n5", action="store_true")
    s.add_argument("--golden", help="record the count in this golden file")
    s.set_defaults(fn=cmd_count)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except LimitExceeded as exc:
        print(f"icfam: limit exceeded: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (InputError, PreconditionError) as exc:
        print(f"icfam: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # keep the exit-code contract even on bugs
        print(f"icfam: internal error: {exc!r}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
