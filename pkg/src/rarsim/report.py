"""Deterministic JSON and text reports.

Every report has the same top-level keys in the same order; dictionaries are
built in a fixed order and lists are sorted, so equal inputs give
byte-identical output.
"""

from __future__ import annotations

import json
from typing import Iterable, Optional

from .assertions.outline import OutlineReport, Verdict
from .core import Tok, Violation, show_value, value_key, wellformed
from .explorer import ExplorationResult, local_value
from .lang.ast import ProgramSpec
from .objects import oracle_violations
from .refinement import hidden_registers, treiber_invariants


def value_json(v):
    """JSON rendering of a program value: tokens and bottom become strings."""
    if isinstance(v, bool) or isinstance(v, int):
        return v
    if v is None or isinstance(v, Tok):
        return show_value(v)
    return str(v)


def result_registers(spec: ProgramSpec, res: ExplorationResult) -> list[str]:
    """Client registers reported in final valuations, as ``r`` or ``r@t`` when ambiguous."""
    if not res.states:
        return []
    hidden = hidden_registers(spec) | {"rval"}
    s0 = res.states[0]
    per_thread = [(t, [r for r, _ in ls if "." not in r and r not in hidden])
                  for t, ls in zip(s0.threads, s0.locals)]
    count: dict[str, int] = {}
    for _, regs in per_thread:
        for r in regs:
            count[r] = count.get(r, 0) + 1
    return [r if count[r] == 1 else f"{r}@{t}" for t, regs in per_thread for r in regs]


def final_valuations(res: ExplorationResult, names: list[str]) -> list[list]:
    vals = {tuple(local_value(res.states[n], x) for x in names) for n in res.terminals}
    return [[value_json(v) for v in row] for row in sorted(vals, key=lambda r: tuple(map(value_key, r)))]


def _witness(res: ExplorationResult, n: int) -> dict:
    cfg = res.states[n]
    return {"node": n, "pc": {str(t): p for t, p in cfg.pc.items()},
            "path": [str(lab) for lab, _ in res.path_to(n)]}


def verdict_json(v: Verdict, res: ExplorationResult) -> dict:
    out = {"kind": v.kind, "where": v.where, "text": v.text, "holds": v.holds, "checked": v.checked}
    if v.witness is not None:
        out["witness"] = _witness(res, v.witness)
    return out


def state_violations(spec: ProgramSpec, res: ExplorationResult) -> list[dict]:
    """Wellformedness, object-oracle and Treiber-invariant violations over all reachable states.

    Each distinct violation is reported once, at the first state showing it.
    """
    treibers = [n for n, k in spec.objects if k == "treiber"]
    seen, out = set(), []
    for n, cfg in enumerate(res.states):
        found: list[tuple[str, Violation]] = []
        lib_locs, cli_locs = cfg.library.locations, cfg.client.locations
        found += [("wellformed", v) for v in wellformed(cfg.client, other_locs=lib_locs)]
        found += [("wellformed", v) for v in wellformed(cfg.library, other_locs=cli_locs)]
        found += [("oracle", v) for v in oracle_violations(cfg.library)]
        for obj in treibers:
            found += [("treiber", v) for v in treiber_invariants(cfg, obj)]
        for kind, v in found:
            key = (kind, v.name, v.detail)
            if key in seen:
                continue
            seen.add(key)
            item = {"kind": kind, "name": v.name, "detail": v.detail}
            item.update(_witness(res, n))
            out.append(item)
    return out


def program_report(spec: ProgramSpec, res: ExplorationResult,
                   outline: Optional[OutlineReport] = None,
                   refinement: Optional[dict] = None,
                   violations: Iterable[dict] = ()) -> dict:
    names = result_registers(spec, res)
    return {
        "program": spec.name,
        "bounds": {"loop_bound": res.bounds.loop_bound, "max_states": res.bounds.max_states},
        "truncated": bool(res.truncated),
        "reachable_count": len(res.states),
        "final_registers": names,
        "final_valuations": final_valuations(res, names),
        "assertion_verdicts": [verdict_json(v, res) for v in outline.verdicts] if outline else [],
        "refinement": refinement,
        "invariant_violations": list(violations),
        "budget_exhausted": res.budget_exhausted,
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


# --------------------------------------------------------------------------
# text rendering


def _row(vals: list) -> str:
    return "(" + ", ".join(str(v) for v in vals) + ")"


def text_report(report: dict) -> str:
    b = report["bounds"]
    lines = [f"program {report['program'] or '<anonymous>'}: {report['reachable_count']} reachable "
             f"configurations (loop bound {b['loop_bound']})"]
    if report["truncated"]:
        lines.append("  some executions were cut off by the loop bound")
    if report["budget_exhausted"]:
        lines.append(f"  state budget of {b['max_states']} exhausted; results are partial")
    if report["final_registers"]:
        rows = ", ".join(_row(r) for r in report["final_valuations"]) or "none"
        lines.append(f"  final {_row(report['final_registers'])}: {{{rows}}}")
    for v in report["assertion_verdicts"]:
        mark = "ok  " if v["holds"] else "FAIL"
        lines.append(f"  {mark} {v['where']:<10} {v['text']}")
        if not v["holds"]:
            w = v["witness"]
            lines.append(f"       witness at pc {w['pc']} via {' '.join(w['path']) or '(initial)'}")
    for v in report["invariant_violations"]:
        lines.append(f"  FAIL {v['kind']} {v['name']}: {v['detail']} (pc {v['pc']})")
    ref = report["refinement"]
    if ref is not None:
        lines.append(f"  refinement: {ref['verdict']}")
        for o in ref.get("obligations", []):
            lines.append(f"    {'ok  ' if o['holds'] else 'FAIL'} {o['name']}"
                         + (f": {o['detail']}" if o.get("detail") else ""))
        cex = ref.get("counterexample")
        if cex:
            lines.append(f"    counterexample ({len(cex['steps'])} steps): {' '.join(cex['steps'])}")
            last = cex["trace"][-1]
            lines.append(f"    unmatched client state: {json.dumps(last, sort_keys=True)}")
    return "\n".join(lines) + "\n"
