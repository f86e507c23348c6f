"""Combined client/library steps and bounded exhaustive exploration.

Exploration is a deterministic breadth-first search over canonical
configurations.  Loops are unrolled at most ``Bounds.loop_bound`` times per
entry; a thread that would exceed this is blocked and its configuration is
recorded as truncated.  ``Bounds.max_states`` caps the search; hitting it sets
``budget_exhausted`` and the result is partial.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, NamedTuple, Optional

from .core import (
    MEMORY_KINDS, Action, ComponentState, Configuration, UsageError, canonicalize,
    show_value,
)
from .lang.ast import ProgramSpec
from .lang.semantics import addr_loc, is_done, thread_steps
from .memory import ADDRESS_BASE, init_configuration, mem_step
from .objects import object_step


@dataclass(frozen=True)
class Bounds:
    loop_bound: int = 3
    max_states: int = 10 ** 6

    def __post_init__(self):
        if self.loop_bound < 1 or self.max_states < 1:
            raise UsageError("bounds must be positive")


class EdgeLabel(NamedTuple):
    """How a transition was taken: ``action`` is ``None`` for a silent step."""

    thread: int
    lib: bool
    action: Optional[Action]
    stmt: Any

    def __str__(self) -> str:
        what = str(self.action) if self.action is not None else "eps"
        return f"t{self.thread}{'L' if self.lib else 'C'}:{what}"


def _apply_ghost(ghost: dict, upds) -> None:
    for name, op, v in upds:
        cur = ghost.get(name, frozenset())
        ghost[name] = cur | {v} if op == "+=" else cur - {v}


def _alloc(cfg: Configuration) -> Optional[int]:
    used = cfg.ghost_of("usedAddr")
    a = ADDRESS_BASE
    while addr_loc(a) in cfg.library.timelines:
        if a not in used and a + 1 not in used:
            return a
        a += 2
    return None


def _resolve(cfg: Configuration, t: int, tpl: Action):
    """Resolved ``(client', library', action)`` triples for one action template."""
    cli, lib = cfg.client, cfg.library
    if tpl.kind == "alloc":
        a = _alloc(cfg)
        if a is None:
            raise UsageError("address pool exhausted")
        return [(cli, lib, Action("alloc", "", rv=a, thread=t))]
    if tpl.kind in MEMORY_KINDS:
        if tpl.loc in cli.timelines:
            return [(c2, l2, a._replace(thread=t)) for c2, l2, a in mem_step(cli, lib, t, tpl)]
        if tpl.loc in lib.timelines:
            return [(c2, l2, a._replace(thread=t)) for l2, c2, a in mem_step(lib, cli, t, tpl)]
        raise UsageError(f"unknown location {tpl.loc!r}")
    return [(c2, l2, a) for l2, c2, a in object_step(lib, cli, t, tpl)]


def successors(cfg: Configuration) -> tuple[list[tuple[EdgeLabel, Configuration]], bool]:
    """All combined steps of ``cfg`` and whether some thread was blocked by the loop bound."""
    out = []
    blocked = False
    for i, t in enumerate(cfg.threads):
        ls = dict(cfg.locals[i])
        for step in thread_steps(cfg.program[i], ls):
            if step.blocked_by_fuel:
                blocked = True
                continue
            if step.template is None:
                results = [(cfg.client, cfg.library, None)]
            else:
                results = _resolve(cfg, t, step.template)
            for cli, lib, act in results:
                o = step.cont(act)
                ls2 = dict(ls)
                ls2.update(o.updates)
                ghost = dict(cfg.ghost)
                if o.ghost:
                    _apply_ghost(ghost, o.ghost)
                nxt = cfg.replace(
                    program=cfg.program[:i] + (o.cmd,) + cfg.program[i + 1:],
                    locals=cfg.locals[:i] + (tuple(sorted(ls2.items())),) + cfg.locals[i + 1:],
                    client=cli, library=lib, ghost=tuple(sorted(ghost.items())))
                out.append((EdgeLabel(t, step.lib, act, step.stmt), canonicalize(nxt)))
    return out, blocked


def finish_silently(cfg: Configuration, t: int) -> Configuration:
    """Run the silent library steps that deterministically follow a library step of ``t``."""
    while True:
        mine = [(lab, d) for lab, d in successors(cfg)[0] if lab.thread == t]
        if len(mine) != 1 or not mine[0][0].lib or mine[0][0].action is not None:
            return cfg
        cfg = mine[0][1]


def fused_successors(cfg: Configuration) -> tuple[list[tuple[EdgeLabel, Configuration]], bool]:
    """Like :func:`successors`, with each library step followed by its silent epilogue.

    A method's return then happens in the same step as the operation that
    decides it, as it does for the abstract objects.
    """
    outs, blocked = successors(cfg)
    return [(lab, finish_silently(d, lab.thread) if lab.lib else d) for lab, d in outs], blocked


def combined_steps(cfg: Configuration) -> list[tuple[EdgeLabel, Configuration]]:
    return successors(cfg)[0]


def is_terminal(cfg: Configuration) -> bool:
    return all(is_done(c) for c in cfg.program)


@dataclass
class ExplorationResult:
    """Reachable graph.  Node ids index ``states``; ``states[0]`` is initial."""

    states: list[Configuration]
    succ: list[list[tuple[EdgeLabel, int]]]
    parent: list[Optional[tuple[int, EdgeLabel]]]
    terminals: list[int]
    truncated: list[int]
    deadlocks: list[int]
    budget_exhausted: bool
    bounds: Bounds
    index: dict = field(default_factory=dict, repr=False)

    @property
    def reachable(self) -> list[Configuration]:
        return self.states

    @property
    def edges(self) -> Iterable[tuple[int, EdgeLabel, int]]:
        for s, outs in enumerate(self.succ):
            for lab, d in outs:
                yield s, lab, d

    def path_to(self, n: int) -> list[tuple[EdgeLabel, int]]:
        """Labelled path from the initial state to node ``n``."""
        path = []
        while self.parent[n] is not None:
            p, lab = self.parent[n]
            path.append((lab, n))
            n = p
        return list(reversed(path))


def explore(start: Configuration | ProgramSpec, bounds: Bounds = Bounds(),
            fused: bool = False) -> ExplorationResult:
    """Reachable graph from ``start``; ``fused`` uses :func:`fused_successors`."""
    step = fused_successors if fused else successors
    if isinstance(start, ProgramSpec):
        start = init_configuration(start, bounds.loop_bound)
    start = canonicalize(start)
    states = [start]
    index = {start: 0}
    succ: list[list[tuple[EdgeLabel, int]]] = []
    parent: list = [None]
    terminals, truncated, deadlocks = [], [], []
    budget = False
    queue = deque([0])
    while queue:
        n = queue.popleft()
        cfg = states[n]
        outs, blocked = step(cfg)
        ids = []
        for lab, nxt in outs:
            m = index.get(nxt)
            if m is None:
                if len(states) >= bounds.max_states:
                    budget = True
                    continue
                m = len(states)
                index[nxt] = m
                states.append(nxt)
                parent.append((n, lab))
                queue.append(m)
            ids.append((lab, m))
        while len(succ) <= n:
            succ.append([])
        succ[n] = ids
        if is_terminal(cfg):
            terminals.append(n)
        elif blocked:
            truncated.append(n)
        elif not outs:
            deadlocks.append(n)
    while len(succ) < len(states):
        succ.append([])
    return ExplorationResult(states, succ, parent, sorted(terminals), sorted(truncated),
                             sorted(deadlocks), budget, bounds, index)


def _owner(cfg: Configuration, name: str) -> int:
    if "@" in name:
        reg, t = name.rsplit("@", 1)
        return int(t)
    owners = [t for t, ls in zip(cfg.threads, cfg.locals) if name in dict(ls)]
    if len(owners) != 1:
        raise UsageError(f"local {name!r} is {'ambiguous' if owners else 'unbound'}; use {name}@<thread>")
    return owners[0]


def local_value(cfg: Configuration, name: str):
    t = _owner(cfg, name)
    reg = name.rsplit("@", 1)[0]
    ls = cfg.locals_of(t)
    if reg not in ls:
        raise UsageError(f"thread {t} has no local {reg!r}")
    return ls[reg]


def final_valuations(res: ExplorationResult, names: list[str]) -> set[tuple]:
    """Values of ``names`` (``r`` or ``r@t``) across terminal configurations."""
    return {tuple(local_value(res.states[n], x) for x in names) for n in res.terminals}


def describe(cfg: Configuration) -> dict:
    """Plain-data rendering of a configuration for reports."""

    def comp(s: ComponentState) -> dict:
        return {
            "ops": {x: [{"ts": str(o.ts), "action": str(o.action),
                         "covered": s.is_covered(o)} for o in line] for x, line in s.ops},
            "tview": {str(t): {x: str(q) for x, q in v} for t, v in s.tview},
        }

    return {
        "pc": {str(t): cfg.pc[t] for t in cfg.threads},
        "locals": {str(t): {r: show_value(v) for r, v in ls} for t, ls in zip(cfg.threads, cfg.locals)},
        "client": comp(cfg.client),
        "library": comp(cfg.library),
        "ghost": {k: sorted(v) for k, v in cfg.ghost},
    }
