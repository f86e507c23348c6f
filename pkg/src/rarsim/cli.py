"""Command-line driver.

Exit codes: 0 all expectations met, 1 violation found, 2 usage or parse
error, 3 the state budget ran out (or no execution terminated) before a
verdict could be reached.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import corpus
from .assertions.outline import check_outline
from .assertions.rules import RULESETS, check_ruleset
from .core import UsageError
from .explorer import Bounds, explore
from .impls import BUILTIN_IMPLS
from .objects import ABSTRACT_KINDS
from .refinement import RELATIONS, instantiate, check_refinement, check_simulation
from .report import dumps, program_report, state_violations, text_report

OK, VIOLATION, USAGE, EXHAUSTED = 0, 1, 2, 3


def _bounds(args, name: str) -> Bounds:
    bound = args.bound if args.bound is not None else corpus.default_bound(name)
    return Bounds(loop_bound=bound, max_states=args.max_states)


def _emit(args, report: dict) -> None:
    sys.stdout.write(dumps(report) if args.format == "json" else text_report(report))


def cmd_explore(args) -> int:
    spec = corpus.load(args.program)
    res = explore(spec, _bounds(args, args.program))
    _emit(args, program_report(spec, res))
    return EXHAUSTED if res.budget_exhausted else OK


def cmd_check(args) -> int:
    spec = corpus.load(args.program)
    res = explore(spec, _bounds(args, args.program))
    outline = check_outline(spec, res.bounds, res)
    violations = state_violations(spec, res)
    _emit(args, program_report(spec, res, outline, violations=violations))
    if not outline.valid or violations:
        return VIOLATION
    if res.budget_exhausted or (spec.post is not None and not res.terminals):
        return EXHAUSTED
    return OK


def cmd_refine(args) -> int:
    client = corpus.load(args.program)
    a, c = instantiate(client, args.abstract, args.concrete)
    r = check_refinement(a, c, _bounds(args, args.program))
    _emit(args, program_report(c, r.concrete, refinement=r.to_json()))
    return {"pass": OK, "fail": VIOLATION}.get(r.verdict, EXHAUSTED)


def cmd_simulate(args) -> int:
    client = corpus.load(args.program)
    a, c = instantiate(client, args.abstract, args.concrete)
    bounds = _bounds(args, args.program)
    r = check_simulation(args.relation, a, c, bounds)
    res = explore(c, bounds, fused=True)
    _emit(args, program_report(c, res, refinement=r.to_json()))
    return {"pass": OK, "fail": VIOLATION}.get(r.verdict, EXHAUSTED)


def cmd_rules(args) -> int:
    names = sorted(RULESETS) if args.ruleset == "all" else [args.ruleset]
    bounds = Bounds(loop_bound=args.bound or 2, max_states=args.max_states)
    out, failed = {}, False
    for name in names:
        results = check_ruleset(name, bounds, tuple(args.extra))
        rows = []
        for r in results:
            row = {"rule": r.rule.name, "status": r.status, "counted": r.rule.counted,
                   "transitions": r.transitions, "exercised": r.exercised}
            if r.rule.note:
                row["note"] = r.rule.note
            if r.witness is not None:
                row["witness"] = r.witness
            rows.append(row)
            failed |= r.rule.counted and r.status == "fail"
        out[name] = {"programs": list(RULESETS[name][1]) + list(args.extra), "rules": rows}
    if args.format == "json":
        sys.stdout.write(dumps(out))
    else:
        for name, block in out.items():
            print(f"{name} over {', '.join(block['programs'])}")
            for row in block["rules"]:
                extra = "" if row["counted"] else "  (alternative reading, not counted)"
                print(f"  {row['status']:<8} {row['rule']:<18} {row['exercised']:>6} exercised{extra}")
                if "witness" in row:
                    print(f"           witness: {row['witness']}")
    return VIOLATION if failed else OK


def cmd_list(args) -> int:
    print("programs:")
    for n in corpus.names():
        print(f"  {n:<20} {corpus.describe(n)}")
    print("object kinds: " + ", ".join(ABSTRACT_KINDS + tuple(BUILTIN_IMPLS)))
    print("relations:    " + ", ".join(RELATIONS))
    print("rule sets:    " + ", ".join(sorted(RULESETS)))
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rarsim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, program=True):
        if program:
            sp.add_argument("program", help="corpus name or path to a .lit file")
        sp.add_argument("--bound", type=int, default=None, help="loop unrolling bound")
        sp.add_argument("--max-states", type=int, default=Bounds().max_states,
                        help="state budget")
        sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("explore", help="enumerate reachable configurations")
    common(sp)
    sp.set_defaults(func=cmd_explore)
    sp = sub.add_parser("check", help="check the proof outline, wellformedness and object oracles")
    common(sp)
    sp.set_defaults(func=cmd_check)
    for name, func, hlp in (("refine", cmd_refine, "check client-trace refinement"),
                            ("simulate", cmd_simulate, "check a forward simulation relation")):
        sp = sub.add_parser(name, help=hlp)
        common(sp)
        sp.add_argument("--abstract", required=True, help="abstract object kind, e.g. lock")
        sp.add_argument("--concrete", required=True, help="implementation kind, e.g. seqlock")
        if name == "simulate":
            sp.add_argument("--relation", required=True, choices=sorted(RELATIONS))
        sp.set_defaults(func=func)
    sp = sub.add_parser("rules", help="check Hoare-rule schemas on their corpus programs")
    sp.add_argument("ruleset", choices=sorted(RULESETS) + ["all"])
    sp.add_argument("--extra", action="append", default=[], help="additional corpus program")
    common(sp, program=False)
    sp.set_defaults(func=cmd_rules)
    sp = sub.add_parser("list", help="list corpus programs, object kinds and relations")
    sp.set_defaults(func=cmd_list)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors this way
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"rarsim: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
