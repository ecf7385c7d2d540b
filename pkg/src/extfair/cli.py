"""extfair command-line interface.

Exit codes: 0 success (every checked notion holds), 1 some notion fails,
2 usage or input error, 3 enumeration guard exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import io
from .allocators import (
    bag_fill_half_mms,
    double_round_robin,
    envy_cycle,
    exhaustive_opt,
    round_robin,
    search_predicate,
)
from .checkers import MMS_TAGS, Notion, Tag, Verdict, check
from .core import Allocation, ExtfairError, Instance1D, Instance2D, TooLarge, as_rational
from .generate import EXTERNALITIES, KINDS, random_instance
from .instances import BuiltinId, builtin
from .mms import best_alpha, mms_profile
from .paperlab import run_suite
from .transform import transform

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _plain(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Allocation):
        return list(x.assignment)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


def _verdict_doc(v: Verdict, space: str) -> dict:
    return {"notion": v.notion, "space": space, "holds": v.holds, "witness": _plain(v.witness)}


def _verdict_line(v: Verdict, space: str) -> str:
    status = "holds" if v.holds else "FAILS"
    line = f"{v.notion:<22} [{space}] {status}"
    if v.witness:
        line += "  " + ", ".join(f"{k}={_plain(x)}" for k, x in v.witness.items() if x is not None)
    return line


def _emit(args, doc: dict, lines: list[str]) -> None:
    if args.json:
        sys.stdout.write(io.dumps(doc))
    else:
        print("\n".join(lines))


def _parse_notions(text: str, alpha) -> list[Notion]:
    out = []
    for name in filter(None, (x.strip() for x in text.split(","))):
        try:
            out.append(Notion.parse(name, alpha))
        except ValueError as e:
            raise UsageError(str(e)) from None
    if not out:
        raise UsageError("no notions given")
    return out


def _needs_profile(notions) -> bool:
    return any(n.tag in MMS_TAGS for n in notions)


# --------------------------------------------------------------------------- commands


def cmd_check(args) -> int:
    inst = io.load_instance(args.instance)
    alloc = io.load_allocation(args.allocation)
    alpha = as_rational(args.alpha) if args.alpha is not None else None
    notions = _parse_notions(args.notions, alpha)
    space = args.space.upper()
    profile = mms_profile(inst, args.threads) if _needs_profile(notions) else None
    verdicts = [check(n, space, inst, alloc, profile, args.threads) for n in notions]
    _emit(args, {"verdicts": [_verdict_doc(v, space) for v in verdicts]},
          [_verdict_line(v, space) for v in verdicts])
    return EXIT_OK if all(v.holds for v in verdicts) else EXIT_FAIL


def cmd_transform(args) -> int:
    inst = io.load_instance(args.instance)
    if not isinstance(inst, Instance2D):
        raise UsageError("transform needs a 2-D instance")
    res = transform(inst)
    doc = io.instance_to_doc(res.one_d, shift=res.shift)
    if args.out:
        io.save(doc, args.out)
    else:
        sys.stdout.write(io.dumps(doc))
    return EXIT_OK


def cmd_mms(args) -> int:
    inst = io.load_instance(args.instance)
    prof = mms_profile(inst, args.threads)
    space = args.space.upper()
    agents, lines = [], []
    for i, a in enumerate(prof.agents):
        rec = {"agent": i, "shift": str(a.shift), "partition": list(a.partition.assignment),
               "min_bundle": a.min_bundle}
        parts = [f"agent {i}:"]
        if space in ("W", "BOTH"):
            rec["mu_w"] = str(a.mu_w)
            parts.append(f"mu_W={a.mu_w}")
        if space in ("V", "BOTH") and a.mu_v is not None:
            rec["mu_v"] = str(a.mu_v)
            parts.append(f"mu_V={a.mu_v}")
        if args.decompose:
            if a.mu_plus is None:
                raise UsageError("mu+/mu- needs a 2-D GOODS or CHORES instance")
            rec["mu_plus"], rec["mu_minus"] = str(a.mu_plus), str(a.mu_minus)
            parts.append(f"mu+={a.mu_plus} mu-={a.mu_minus}")
        parts.append(f"v'(M)={a.shift}")
        agents.append(rec)
        lines.append(" ".join(parts))
    doc = {"agents": agents}
    if args.best_alpha:
        variant = Tag(args.best_alpha.lower().replace("_", "-"))
        ba_space = "W" if isinstance(inst, Instance1D) else ("W" if space == "W" else "V")
        res = best_alpha(inst, prof, variant, ba_space, args.threads)
        doc["best_alpha"] = {
            "variant": variant.value, "space": ba_space, "status": res.status,
            "alpha": None if res.alpha is None else str(res.alpha), "exact": res.exact,
            "upper": None if res.upper is None else str(res.upper),
            "witness": None if res.witness is None else list(res.witness.assignment),
        }
        lines.append(f"best alpha ({variant.value}, {ba_space}): {res}"
                     + ("" if res.witness is None else f" witness {list(res.witness.assignment)}"))
    _emit(args, doc, lines)
    return EXIT_OK


ALGORITHMS = (
    "round-robin", "double-round-robin", "envy-cycle", "bag-fill",
    "muw", "mew", "leximin", "mnw", "search",
)


def _advertised(name: str) -> list[tuple[Notion, str]]:
    if name in ("round-robin", "double-round-robin", "envy-cycle"):
        return [(Notion(Tag.EF1), "W"), (Notion(Tag.EF1), "V")]
    if name == "bag-fill":
        half = Fraction(1, 2)
        return [(Notion(Tag.ALPHA_MMS, half), "W"), (Notion(Tag.SHIFTED_ALPHA_MMS, half), "V")]
    if name == "mnw":
        return [(Notion(Tag.EF1), "W"), (Notion(Tag.PO), "W"), (Notion(Tag.EF1), "V"), (Notion(Tag.PO), "V")]
    return []


def cmd_allocate(args) -> int:
    inst = io.load_instance(args.instance)
    name = args.algorithm
    space = args.space.upper() if args.space else None
    if name == "round-robin":
        order = [int(x) for x in args.order.split(",")] if args.order else None
        alloc = round_robin(inst, order)
    elif name == "double-round-robin":
        alloc = double_round_robin(inst)
    elif name == "envy-cycle":
        alloc = envy_cycle(inst)
    elif name == "bag-fill":
        alloc = bag_fill_half_mms(inst, mms_profile(inst, args.threads).mu("W"))
    elif name == "search":
        if not args.notions:
            raise UsageError("search needs --notions")
        alpha = as_rational(args.alpha) if args.alpha is not None else None
        found = search_predicate(inst, _parse_notions(args.notions, alpha), space or "V", None, args.threads)
        if found is None:
            _emit(args, {"schema": io.SCHEMA_ALLOC, "assignment": None}, ["no allocation satisfies the notions"])
            return EXIT_FAIL
        alloc = found
    else:
        alloc = exhaustive_opt(inst, name, space, args.threads)

    checks = [(n, s) for n, s in _advertised(name) if s == "W" or isinstance(inst, Instance2D)]
    if name in ("muw", "mew", "leximin"):
        tag = {"muw": Tag.MUW, "mew": Tag.MEW, "leximin": Tag.LEXIMIN_OPT}[name]
        checks = [(Notion(tag), space or ("W" if isinstance(inst, Instance1D) else "V"))]
    one_d = transform(inst).one_d if isinstance(inst, Instance2D) else inst
    profile = None
    verdicts = []
    for n, s in checks:
        target = one_d if s == "W" else inst
        if n.tag in MMS_TAGS and profile is None:
            profile = mms_profile(inst, args.threads)
        verdicts.append((check(n, s, target, alloc, profile, args.threads), s))
    doc = io.allocation_to_doc(alloc)
    doc["verdicts"] = [_verdict_doc(v, s) for v, s in verdicts]
    if args.out:
        io.save(io.allocation_to_doc(alloc), args.out)
    _emit(args, doc, [f"assignment {list(alloc.assignment)}"] + [_verdict_line(v, s) for v, s in verdicts])
    return EXIT_OK if all(v.holds for v, _ in verdicts) else EXIT_FAIL


def cmd_gen(args) -> int:
    try:
        inst = random_instance(args.seed, args.agents, args.items, args.kind, args.externality, args.max_den)
    except ValueError as e:
        raise UsageError(str(e)) from None
    doc = io.instance_to_doc(inst)
    if args.out:
        io.save(doc, args.out)
    else:
        sys.stdout.write(io.dumps(doc))
    return EXIT_OK


def cmd_builtin(args) -> int:
    try:
        which = BuiltinId.parse(args.name)
    except KeyError as e:
        raise UsageError(e.args[0]) from None
    inst = builtin(which, args.eps1, args.eps2, args.eps3)
    doc = io.instance_to_doc(inst)
    if args.out:
        io.save(doc, args.out)
    else:
        sys.stdout.write(io.dumps(doc))
    return EXIT_OK


def cmd_paper_suite(args) -> int:
    wanted = None
    if args.filter is not None:
        wanted = [x for x in (s.strip() for s in args.filter.split(",")) if x]
    try:
        results = run_suite(wanted)
    except KeyError as e:
        raise UsageError(e.args[0]) from None
    for r in results:
        print(r.line())
    counts = {s: sum(r.status == s for r in results) for s in ("PASS", "DISCREPANCY", "FAIL")}
    print(f"{counts['PASS']} pass, {counts['DISCREPANCY']} discrepancy, {counts['FAIL']} fail")
    if counts["DISCREPANCY"]:
        print("warning: discrepancies mark stated values that brute force does not reproduce", file=sys.stderr)
    if args.json:
        io.save({"schema": "extfair/suite/1", "results": [r.to_doc() for r in results]}, args.json)
    return EXIT_FAIL if counts["FAIL"] else EXIT_OK


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="extfair", description="Fair division with 2-D externalities.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, json_flag=True):
        sp.add_argument("--threads", type=int, default=1, help="worker threads for exhaustive scans")
        if json_flag:
            sp.add_argument("--json", action="store_true", help="print a JSON report")

    c = sub.add_parser("check", help="decide fairness / efficiency notions for an allocation")
    c.add_argument("--instance", required=True)
    c.add_argument("--allocation", required=True)
    c.add_argument("--notions", required=True, help="comma-separated, e.g. ef1,prop-e,alpha-mms")
    c.add_argument("--space", default="V", type=str.upper, choices=["V", "W", "FULL"])
    c.add_argument("--alpha", help="rational parameter for alpha notions, e.g. 1/2")
    common(c)
    c.set_defaults(fn=cmd_check)

    t = sub.add_parser("transform", help="write the 1-D instance and the per-agent shift")
    t.add_argument("--instance", required=True)
    t.add_argument("--out")
    t.set_defaults(fn=cmd_transform, threads=1, json=False)

    m = sub.add_parser("mms", help="maximin shares and best supported alpha")
    m.add_argument("--instance", required=True)
    m.add_argument("--space", default="BOTH", type=str.upper, choices=["V", "W", "BOTH"])
    m.add_argument("--decompose", action="store_true", help="also report mu+ and mu-")
    m.add_argument("--best-alpha", metavar="VARIANT",
                   choices=[t.value for t in (Tag.ALPHA_MMS, Tag.ALPHA_MMS_I, Tag.ALPHA_MMS_II, Tag.SHIFTED_ALPHA_MMS)])
    common(m)
    m.set_defaults(fn=cmd_mms)

    a = sub.add_parser("allocate", help="run an allocation algorithm and check its guarantees")
    a.add_argument("--instance", required=True)
    a.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    a.add_argument("--order", help="agent order for round robin, e.g. 1,0,2")
    a.add_argument("--space", type=str.upper, choices=["V", "W"])
    a.add_argument("--notions", help="notions for --algorithm search")
    a.add_argument("--alpha")
    a.add_argument("--out")
    common(a)
    a.set_defaults(fn=cmd_allocate)

    g = sub.add_parser("gen", help="random instance with a given sign pattern")
    g.add_argument("--agents", type=int, required=True)
    g.add_argument("--items", type=int, required=True)
    g.add_argument("--kind", choices=KINDS, default="goods")
    g.add_argument("--externality", choices=EXTERNALITIES, default="mixed")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-den", type=int, default=1)
    g.add_argument("--out")
    g.set_defaults(fn=cmd_gen, threads=1, json=False)

    b = sub.add_parser("builtin", help="write a named reference instance")
    b.add_argument("name", help="|".join(x.value for x in BuiltinId))
    b.add_argument("--eps1")
    b.add_argument("--eps2")
    b.add_argument("--eps3")
    b.add_argument("--out")
    b.set_defaults(fn=cmd_builtin, threads=1, json=False)

    s = sub.add_parser("paper-suite", help="re-verify every reference claim")
    s.add_argument("--filter", help="comma-separated claim ids")
    s.add_argument("--json", metavar="FILE", help="also write the report as JSON")
    s.set_defaults(fn=cmd_paper_suite, threads=1)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.fn(args)
    except TooLarge as e:
        print(f"extfair: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (ExtfairError, UsageError, ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        print(f"extfair: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
