"""Proof-outline checking by exhaustive exploration.

An annotation at control point ``p`` of thread ``t`` must hold in every
reachable configuration where ``t`` is about to execute ``p``.  Invariants
must hold everywhere, the init annotation in the initial configuration and
the postcondition in every terminal configuration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..core import Configuration
from ..explorer import Bounds, ExplorationResult, explore
from ..lang.ast import ProgramSpec
from ..lang.semantics import current_points, is_done
from .evaluate import Context, holds
from .syntax import parse_assertion


@dataclass(frozen=True)
class Verdict:
    kind: str  # "annotation", "invariant", "init" or "post"
    thread: Optional[int]
    label: object
    text: str
    holds: bool
    checked: int  # configurations the assertion was evaluated in
    witness: Optional[int] = None  # node id of a violating configuration

    @property
    def where(self) -> str:
        if self.kind == "annotation":
            return f"{self.thread}:{self.label}"
        return self.kind


@dataclass
class OutlineReport:
    verdicts: list[Verdict]
    result: ExplorationResult

    @property
    def valid(self) -> bool:
        return all(v.holds for v in self.verdicts)

    @property
    def truncated(self) -> bool:
        return bool(self.result.truncated)

    @property
    def budget_exhausted(self) -> bool:
        return self.result.budget_exhausted


def _at_point(cfg: Configuration, t: int, label) -> bool:
    cmd = cfg.program[cfg.index(t)]
    if label == "exit":
        return is_done(cmd)
    return label in current_points(cmd)


def _check(kind, t, label, text, nodes, res, ctx) -> Verdict:
    f = parse_assertion(text)
    n_checked = 0
    for n in nodes:
        n_checked += 1
        if not holds(f, res.states[n], ctx):
            return Verdict(kind, t, label, text, False, n_checked, n)
    return Verdict(kind, t, label, text, True, n_checked)


def check_outline(spec: ProgramSpec, bounds: Bounds = Bounds(),
                  result: Optional[ExplorationResult] = None) -> OutlineReport:
    res = result if result is not None else explore(spec, bounds)
    ctx = Context(spec.lets)
    out = []
    if spec.init_annotation is not None:
        out.append(_check("init", None, None, spec.init_annotation, [0], res, ctx))
    for a in spec.annotations:
        nodes = (n for n, c in enumerate(res.states) if _at_point(c, a.thread, a.label))
        out.append(_check("annotation", a.thread, a.label, a.text, nodes, res, ctx))
    for text in spec.invariants:
        out.append(_check("invariant", None, None, text, range(len(res.states)), res, ctx))
    if spec.post is not None:
        out.append(_check("post", None, None, spec.post, res.terminals, res, ctx))
    return OutlineReport(out, res)
