"""Client-observable refinement between an abstract object and an implementation.

A client snapshot keeps what a client can see: its registers and the client
memory component.  Library registers (``obj.name``) and ghost version registers
of lock acquires are dropped.  Operations of the two systems are compared by
``(action, rank)``: timestamps are canonical per-location ranks, so client
operations line up whenever the client histories agree.

``check_refinement`` decides bounded trace inclusion exactly by a subset
construction over the two reachable graphs: each concrete node is paired with
the set of abstract nodes that can have produced a matching client trace.
``check_simulation`` checks the obligations of a forward simulation relation.

Both checks explore with fused library steps: a method's silent epilogue,
such as its ``return``, runs atomically with the step that decided it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Optional

from .core import (
    NULL, ComponentState, Configuration, Mode, UsageError, Violation, is_releasing, observable,
    restrict_view, show_value, value_key, view_get, wrval,
)
from .explorer import Bounds, ExplorationResult, explore, fused_successors
from .lang.ast import Call, Cas, Fai, ProgramSpec, Read, Write
from .lang.semantics import addr_loc, lib_pc_of, walk
from .memory import init_configuration, is_abstract_kind, resolve_impl

# --------------------------------------------------------------------------
# snapshots


def hidden_registers(spec: ProgramSpec) -> frozenset[str]:
    """Registers excluded from client snapshots: lock-acquire version registers."""
    return frozenset(c.vreg for _, cmd in spec.threads for c in walk(cmd)
                     if isinstance(c, Call) and c.vreg is not None)


def _client_part(s: ComponentState) -> ComponentState:
    locs = set(s.locations)
    return s.replace(mview=tuple((r, restrict_view(v, locs)) for r, v in s.mview))


@dataclass(frozen=True)
class ClientSnapshot:
    """Client registers per thread and the client memory state."""

    locals: tuple[tuple[int, tuple[tuple[str, object], ...]], ...]
    client: ComponentState

    @cached_property
    def obs(self) -> frozenset:
        """Observable operations as ``(thread, location, action, rank)``."""
        return frozenset((t, x, o.action, o.ts) for t in self.client.threads
                         for x in self.client.locations for o in observable(self.client, t, x))

    @cached_property
    def covered(self) -> frozenset:
        by_ref = self.client.by_ref
        return frozenset((x, by_ref[(x, q)].action, q) for x, q in self.client.cvd)

    def vocabulary(self) -> tuple:
        return (tuple((t, tuple(r for r, _ in ls)) for t, ls in self.locals),
                self.client.locations)

    def to_json(self) -> dict:
        s = self.client
        return {
            "locals": {str(t): {r: show_value(v) for r, v in ls} for t, ls in self.locals},
            "observable": {str(t): {x: [show_value(wrval(o.action)) for o in observable(s, t, x)]
                                    for x in s.locations} for t in s.threads},
        }


def snapshot(cfg: Configuration, hidden: Iterable[str] = ()) -> ClientSnapshot:
    hidden = set(hidden)
    ls = tuple((t, tuple((r, v) for r, v in regs if "." not in r and r not in hidden))
               for t, regs in zip(cfg.threads, cfg.locals))
    return ClientSnapshot(ls, _client_part(cfg.client))


def project_client_trace(execution: Iterable[Configuration],
                         hidden: Iterable[str] = ()) -> list[ClientSnapshot]:
    hidden = frozenset(hidden)
    return [snapshot(c, hidden) for c in execution]


def remove_stutter(trace: Iterable) -> list:
    out = []
    for s in trace:
        if not out or out[-1] != s:
            out.append(s)
    return out


def state_refines(abs_: ClientSnapshot, conc: ClientSnapshot) -> bool:
    """Concrete snapshot refines the abstract one: same registers and covered
    set, and every operation the concrete client may observe is observable in
    the abstract."""
    if abs_.vocabulary() != conc.vocabulary():
        raise UsageError("snapshots over different threads, registers or locations")
    return abs_.locals == conc.locals and abs_.covered == conc.covered and conc.obs <= abs_.obs


# --------------------------------------------------------------------------
# program pairs


def instantiate(client: ProgramSpec, abstract: str, concrete: str) -> tuple[ProgramSpec, ProgramSpec]:
    """Fill every object of ``client`` compatible with ``abstract`` by each kind."""
    targets = [n for n, k in client.objects if _implements(client, k) == _implements(client, abstract)]
    if not targets:
        raise UsageError(f"{client.name or 'program'} has no object of kind {_implements(client, abstract)}")
    if _implements(client, concrete) != _implements(client, abstract):
        raise UsageError(f"{concrete} does not implement {_implements(client, abstract)}")
    return (client.with_objects({n: abstract for n in targets}),
            client.with_objects({n: concrete for n in targets}))


def _implements(spec: ProgramSpec, kind: str) -> str:
    return kind if is_abstract_kind(kind) else resolve_impl(spec, kind).implements


def _check_compatible(a: ProgramSpec, c: ProgramSpec) -> None:
    if [t for t, _ in a.threads] != [t for t, _ in c.threads]:
        raise UsageError("abstract and concrete programs have different threads")
    if a.globals != c.globals:
        raise UsageError("abstract and concrete programs have different client locations")


# --------------------------------------------------------------------------
# trace refinement


@dataclass
class Counterexample:
    """A concrete execution no abstract execution matches.

    ``labels`` replays the execution from the initial configuration;
    ``trace`` is its stutter-free client trace and ``failing_index`` the
    position in ``trace`` that no abstract trace can refine.  ``frontier``
    holds the distinct abstract snapshots that matched up to the previous
    position.
    """

    labels: list[str]
    trace: list[ClientSnapshot]
    failing_index: int
    frontier: list[ClientSnapshot]
    final_pc: dict

    def to_json(self) -> dict:
        return {
            "steps": self.labels,
            "trace": [s.to_json() for s in self.trace],
            "failing_index": self.failing_index,
            "frontier": [s.to_json() for s in self.frontier],
            "final_pc": {str(t): p for t, p in self.final_pc.items()},
        }


@dataclass
class RefinementResult:
    verdict: str  # "pass", "fail" or "exhausted"
    counterexample: Optional[Counterexample]
    pairs: int
    abstract: ExplorationResult
    concrete: ExplorationResult

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    @property
    def truncated(self) -> bool:
        return bool(self.abstract.truncated or self.concrete.truncated)

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "pairs": self.pairs}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample.to_json()
        return out


class _Abstract:
    """Abstract graph with snapshot-preserving closure and visible successors."""

    def __init__(self, res: ExplorationResult, hidden):
        self.res = res
        self.snap = _intern(snapshot(c, hidden) for c in res.states)
        self._closure: dict[int, frozenset] = {}

    def closure(self, n: int) -> frozenset:
        got = self._closure.get(n)
        if got is None:
            seen, todo = {n}, [n]
            while todo:
                m = todo.pop()
                for _, d in self.res.succ[m]:
                    if d not in seen and self.snap[d] == self.snap[m]:
                        seen.add(d)
                        todo.append(d)
            got = self._closure[n] = frozenset(seen)
        return got

    def step(self, S: frozenset, target: ClientSnapshot) -> frozenset:
        """Abstract nodes reached from ``S`` by at most one visible step that refine ``target``."""
        cand = set(S)
        for a in S:
            cand.update(d for _, d in self.res.succ[a])
        out: set[int] = set()
        for a in cand:
            if a not in out and state_refines(self.snap[a], target):
                out |= self.closure(a)
        return frozenset(out)


def _intern(snaps: Iterable[ClientSnapshot]) -> list[ClientSnapshot]:
    pool: dict = {}
    return [pool.setdefault(s, s) for s in snaps]


def check_refinement(abstract: ProgramSpec, concrete: ProgramSpec,
                     bounds: Bounds = Bounds()) -> RefinementResult:
    """Does every client trace of ``concrete`` refine some client trace of ``abstract``?"""
    _check_compatible(abstract, concrete)
    hidden = hidden_registers(abstract) | hidden_registers(concrete)
    A = _Abstract(explore(abstract, bounds, fused=True), hidden)
    C = explore(concrete, bounds, fused=True)
    csnap = _intern(snapshot(c, hidden) for c in C.states)
    S0 = A.step(frozenset({0}), csnap[0]) if state_refines(A.snap[0], csnap[0]) else frozenset()
    start = (0, S0)
    parent: dict = {start: None}
    if not S0:
        return _failed(A, C, csnap, parent, start, None, 1)
    queue = deque([start])
    exhausted = A.res.budget_exhausted or C.budget_exhausted
    while queue:
        node = queue.popleft()
        c, S = node
        for lab, d in C.succ[c]:
            S2 = S if csnap[d] == csnap[c] else A.step(S, csnap[d])
            nxt = (d, S2)
            if nxt in parent:
                continue
            parent[nxt] = (node, lab)
            if not S2:
                return _failed(A, C, csnap, parent, nxt, S, len(parent))
            if len(parent) >= bounds.max_states:
                exhausted = True
                queue.clear()
                break
            queue.append(nxt)
    return RefinementResult("exhausted" if exhausted else "pass", None, len(parent), A.res, C)


def _failed(A, C, csnap, parent, node, before, pairs) -> RefinementResult:
    path = []
    n = node
    while parent[n] is not None:
        n, lab = parent[n]
        path.append(lab)
    path.reverse()
    nodes = [0]
    for lab in path:
        nodes.append(next(d for l, d in C.succ[nodes[-1]] if l == lab))
    trace = remove_stutter(csnap[m] for m in nodes)
    frontier = sorted({A.snap[a] for a in (before or ())}, key=lambda s: repr(s.to_json()))
    cex = Counterexample([str(l) for l in path], trace, len(trace) - 1, frontier,
                         C.states[nodes[-1]].pc)
    return RefinementResult("fail", cex, pairs, A.res, C)


def replay(cex: Counterexample, abstract: ProgramSpec, concrete: ProgramSpec,
           bounds: Bounds = Bounds()) -> bool:
    """Re-execute the counterexample and confirm that no abstract trace matches it."""
    hidden = hidden_registers(abstract) | hidden_registers(concrete)
    A = _Abstract(explore(abstract, bounds, fused=True), hidden)
    cfg = init_configuration(concrete, bounds.loop_bound)
    cur = snapshot(cfg, hidden)
    S = A.step(frozenset({0}), cur) if state_refines(A.snap[0], cur) else frozenset()
    trace = [cur]
    for text in cex.labels:
        if not S:
            return False
        nxt = [d for lab, d in fused_successors(cfg)[0] if str(lab) == text]
        if not nxt:
            return False
        # equal labels mean equal actions, so any successor reproduces the snapshot
        cfg = nxt[0]
        snap = snapshot(cfg, hidden)
        if snap != cur:
            S = A.step(S, snap)
            trace.append(snap)
        cur = snap
    return not S and trace == cex.trace


def refine(client: ProgramSpec, abstract: str, concrete: str,
           bounds: Bounds = Bounds()) -> RefinementResult:
    a, c = instantiate(client, abstract, concrete)
    return check_refinement(a, c, bounds)


# --------------------------------------------------------------------------
# forward simulation


@dataclass(frozen=True)
class SimContext:
    """What relations may need to know about the two programs."""

    objects: tuple[tuple[str, str], ...]  # (object, concrete kind)
    hidden: frozenset
    client_locs: tuple[str, ...]


Relation = Callable[[Configuration, Configuration, SimContext], list[str]]


def _locals_equal(a: Configuration, c: Configuration, ctx: SimContext) -> list[str]:
    sa, sc = snapshot(a, ctx.hidden), snapshot(c, ctx.hidden)
    return [] if sa.locals == sc.locals else ["client registers differ"]


def _ranked_ops(s: ComponentState) -> frozenset:
    return frozenset((x, o.action, o.ts) for x, line in s.ops for o in line)


def rel_client_obs(a: Configuration, c: Configuration, ctx: SimContext) -> list[str]:
    """Concrete client views are at least as advanced, with equal operations and covered sets."""
    out = []
    ca, cc = a.client, c.client
    if _ranked_ops(ca) != _ranked_ops(cc):
        out.append("client operations differ")
    elif ca.cvd != cc.cvd:
        out.append("client covered sets differ")
    else:
        for t in cc.threads:
            for x in cc.locations:
                if view_get(cc.view_of(t), x) < view_get(ca.view_of(t), x):
                    out.append(f"thread {t} view of {x} behind the abstract")
    return out


def _client_mview(s: ComponentState, op, locs) -> tuple:
    return restrict_view(s.mview_of(op) or (), locs)


def _lock_rel(op) -> bool:
    return op.action.kind in ("acq", "rel")


def rel_seqlock(a: Configuration, c: Configuration, ctx: SimContext) -> list[str]:
    """Every observable write to the version counter has an abstract lock operation
    with the same value, client-side message view, releasing flag and coveredness."""
    out = []
    for obj, kind in ctx.objects:
        x = f"{obj}.glb"
        if x not in c.library.timelines:
            continue
        for t in c.threads:
            abs_obs = observable(a.library, t, obj)
            for w in observable(c.library, t, x):
                ok = any(wrval(wa.action) == wrval(w.action)
                         and _client_mview(c.library, w, ctx.client_locs)
                         == _client_mview(a.library, wa, ctx.client_locs)
                         and is_releasing(w.action) == _lock_rel(wa)
                         and c.library.is_covered(w) == a.library.is_covered(wa)
                         for wa in abs_obs)
                if not ok:
                    out.append(f"thread {t}: {w.action} has no abstract counterpart")
    return out


def rel_ticketlock(a: Configuration, c: Configuration, ctx: SimContext) -> list[str]:
    """A thread inside acquire that can observe its own ticket being served has an
    observable, uncovered even-indexed abstract lock operation to acquire from."""
    out = []
    for obj, kind in ctx.objects:
        sn = f"{obj}.sn"
        if sn not in c.library.timelines:
            continue
        for i, t in enumerate(c.threads):
            if lib_pc_of(c.program[i]) not in (1, 2):
                continue
            ticket = dict(c.locals[i]).get(f"{obj}.m_t")
            if ticket is None:
                continue
            abs_obs = observable(a.library, t, obj)
            for w in observable(c.library, t, sn):
                if wrval(w.action) != ticket:
                    continue
                ok = any(isinstance(wrval(wa.action), int) and wrval(wa.action) % 2 == 0
                         and not a.library.is_covered(wa)
                         and _client_mview(c.library, w, ctx.client_locs)
                         == _client_mview(a.library, wa, ctx.client_locs)
                         and is_releasing(w.action) == _lock_rel(wa)
                         for wa in abs_obs)
                if not ok:
                    out.append(f"thread {t}: ticket {ticket} served by {w.action} without an abstract release")
    return out


def rel_treiber(a: Configuration, c: Configuration, ctx: SimContext) -> list[str]:
    out = []
    for obj, kind in ctx.objects:
        if f"{obj}.Top" in c.library.timelines:
            f = build_node_map(a, c, obj)
            out.extend(str(v) for v in node_map_conditions(f, a, c, obj))
    return out


def _conj(*rels: Relation) -> Relation:
    def rel(a, c, ctx):
        out = []
        for r in rels:
            out.extend(r(a, c, ctx))
        return out
    return rel


RELATIONS: dict[str, Relation] = {
    "true": lambda a, c, ctx: [],
    "client-obs": _conj(_locals_equal, rel_client_obs),
    "seqlock": _conj(_locals_equal, rel_client_obs, rel_seqlock),
    "ticketlock": _conj(_locals_equal, rel_client_obs, rel_ticketlock),
    "treiber": _conj(_locals_equal, rel_client_obs, rel_treiber),
}


@dataclass(frozen=True)
class Obligation:
    name: str  # "client observation", "initialisation", "step"
    holds: bool
    detail: str = ""
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        out = {"name": self.name, "holds": self.holds}
        if self.detail:
            out["detail"] = self.detail
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class SimulationResult:
    relation: str
    obligations: list[Obligation]
    pairs: int
    exhausted: bool = False
    truncated: bool = False

    @property
    def passed(self) -> bool:
        return all(o.holds for o in self.obligations)

    @property
    def verdict(self) -> str:
        if not self.passed:
            return "fail"
        return "exhausted" if self.exhausted else "pass"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "relation": self.relation, "pairs": self.pairs,
                "obligations": [o.to_json() for o in self.obligations]}


def check_sync_free(spec: ProgramSpec) -> None:
    """Reject clients that synchronise outside object calls."""
    for t, cmd in spec.threads:
        for c in walk(cmd):
            if isinstance(c, (Write, Read, Cas, Fai)) and c.mode != Mode.RLX:
                raise UsageError(f"thread {t} synchronises outside the object ({type(c).__name__.lower()}"
                                 f" with mode {c.mode.name}); simulation needs a synchronisation-free client")


def _pair_json(a: Configuration, c: Configuration, hidden) -> dict:
    return {"abstract": snapshot(a, hidden).to_json(), "concrete": snapshot(c, hidden).to_json(),
            "abstract_pc": {str(t): p for t, p in a.pc.items()},
            "concrete_pc": {str(t): p for t, p in c.pc.items()}}


def check_simulation(relation: str | Relation, abstract: ProgramSpec, concrete: ProgramSpec,
                     bounds: Bounds = Bounds()) -> SimulationResult:
    """Check the forward-simulation obligations of ``relation`` on the reachable pairs.

    Library steps are taken together with the silent library steps of the same
    thread that follow them, so a method's return is part of the step that
    decides it.  A client step must be matched by the abstract client taking
    the same action; a library step by stuttering or by one abstract library
    step of the same thread.
    """
    name = relation if isinstance(relation, str) else getattr(relation, "__name__", "custom")
    if isinstance(relation, str):
        if relation not in RELATIONS:
            raise UsageError(f"unknown relation {relation!r}; choose from {', '.join(RELATIONS)}")
        relation = RELATIONS[relation]
    _check_compatible(abstract, concrete)
    check_sync_free(concrete)
    hidden = hidden_registers(abstract) | hidden_registers(concrete)
    ctx = SimContext(tuple((n, k) for n, k in concrete.objects), hidden,
                     tuple(abstract.globals))
    a0 = init_configuration(abstract, bounds.loop_bound)
    c0 = init_configuration(concrete, bounds.loop_bound)

    def observation(a, c) -> Optional[Obligation]:
        sa, sc = snapshot(a, hidden), snapshot(c, hidden)
        if sa.locals != sc.locals or not sc.obs <= sa.obs:
            return Obligation("client observation", False,
                              "related states differ in client registers or observations",
                              _pair_json(a, c, hidden))
        return None

    why = relation(a0, c0, ctx)
    if why:
        return SimulationResult(name, [Obligation("initialisation", False, "; ".join(why),
                                                  _pair_json(a0, c0, hidden))], 1)
    obligations = [Obligation("initialisation", True)]
    seen = {(a0, c0)}
    queue = deque([(a0, c0)])
    exhausted = truncated = False
    abs_steps: dict = {}
    while queue:
        a, c = queue.popleft()
        bad = observation(a, c)
        if bad:
            return SimulationResult(name, obligations + [bad], len(seen))
        if a not in abs_steps:
            abs_steps[a] = fused_successors(a)[0]
        outs, blocked = fused_successors(c)
        truncated |= blocked
        for lab, c2 in outs:
            if lab.lib:
                cands = [a] + [a2 for l2, a2 in abs_steps[a] if l2.thread == lab.thread and l2.lib]
            else:
                cands = [a2 for l2, a2 in abs_steps[a]
                         if l2.thread == lab.thread and not l2.lib and str(l2.action) == str(lab.action)]
            matched = [a2 for a2 in cands if not relation(a2, c2, ctx)]
            if not matched:
                why = relation(cands[0], c2, ctx) if cands else ["no abstract step with the same action"]
                w = _pair_json(a, c, hidden)
                w["step"] = str(lab)
                w["after"] = snapshot(c2, hidden).to_json()
                return SimulationResult(name, obligations + [Obligation(
                    "step", False, f"{lab}: " + "; ".join(why), w)], len(seen))
            for a2 in matched:
                if (a2, c2) in seen:
                    continue
                if len(seen) >= bounds.max_states:
                    exhausted = True
                    continue
                seen.add((a2, c2))
                queue.append((a2, c2))
    obligations += [Obligation("client observation", True), Obligation("step", True)]
    return SimulationResult(name, obligations, len(seen), exhausted, truncated)


def simulate(client: ProgramSpec, abstract: str, concrete: str, relation: str,
             bounds: Bounds = Bounds()) -> SimulationResult:
    a, c = instantiate(client, abstract, concrete)
    return check_simulation(relation, a, c, bounds)


# --------------------------------------------------------------------------
# Treiber stack invariants and the timestamp-based relation


def _last_val(lib: ComponentState, x: str):
    return wrval(lib.timeline(x)[-1].action)


def _next(lib: ComponentState, a: int):
    return _last_val(lib, addr_loc(a + 1))


def treiber_invariants(cfg: Configuration, obj: str = "s") -> list[Violation]:
    """Invariants (1)-(6) of the Treiber stack in ``cfg``; empty when all hold."""
    lib = cfg.library
    top = f"{obj}.Top"
    if top not in lib.timelines:
        raise UsageError(f"{obj!r} is not a Treiber stack")
    pushed, used = cfg.ghost_of("pushedAddr"), cfg.ghost_of("usedAddr")
    out = []
    # (1) the next-pointer relation over pushed nodes is a chain from Top to null
    seen, a = [], _last_val(lib, top)
    while a is not NULL and a in pushed and a not in seen:
        seen.append(a)
        a = _next(lib, a)
    if a is not NULL or set(seen) != set(pushed):
        out.append(Violation("1", f"pushed nodes {sorted(pushed)} do not form a chain from Top to null"))
    # (2) writes to Top are releasing and name used addresses
    for w in lib.timeline(top):
        v = wrval(w.action)
        if not is_releasing(w.action) or (v is not NULL and v not in used):
            out.append(Violation("2", f"write {w.action} to Top is not a releasing write of a used address"))
    # (3) a non-null Top is a pushed address
    t = _last_val(lib, top)
    if t is not NULL and t not in pushed:
        out.append(Violation("3", f"Top = {show_value(t)} is not a pushed address"))
    # (4) pushed addresses are used addresses
    if not pushed <= used:
        out.append(Violation("4", f"pushed addresses {sorted(pushed - used)} were never allocated"))
    # (5) distinct pushed nodes have distinct next pointers
    nexts = [_next(lib, a) for a in sorted(pushed)]
    if len(set(map(value_key, nexts))) != len(nexts):
        out.append(Violation("5", "two pushed nodes share a next pointer"))
    # (6) a non-null next pointer of a pushed node is pushed
    for a in sorted(pushed):
        n = _next(lib, a)
        if n is not NULL and n not in pushed:
            out.append(Violation("6", f"node {a} points to {show_value(n)}, which is not pushed"))
    return out


ANCHOR = "anchor"  # f(null): a virtual pop(empty) older than every push


@dataclass
class NodeMap:
    """The node-to-push map: pushed address to abstract push, ``null`` to the anchor."""

    nodes: dict = field(default_factory=dict)

    def ts(self, a):
        if a is NULL:
            return -1
        op = self.nodes.get(a)
        return None if op is None else op.ts

    def __call__(self, a):
        return ANCHOR if a is NULL else self.nodes.get(a)


def _unmatched_pushes(lib: ComponentState, obj: str) -> list:
    popped = {p for (x, p, _) in lib.matched if x == obj}
    return [o for o in lib.timeline(obj) if o.action.kind == "push" and o.ts not in popped]


def build_node_map(a: Configuration, c: Configuration, obj: str = "s") -> NodeMap:
    """Map pushed nodes, top first, to unmatched pushes of equal value, newest first."""
    lib = c.library
    chain, n = [], _last_val(lib, f"{obj}.Top")
    pushed = c.ghost_of("pushedAddr")
    while n is not NULL and n in pushed and n not in chain:
        chain.append(n)
        n = _next(lib, n)
    chain += sorted(pushed - set(chain))
    free = sorted(_unmatched_pushes(a.library, obj), key=lambda o: o.ts, reverse=True)
    f = NodeMap()
    for node in chain:
        v = _last_val(lib, addr_loc(node))
        for op in free:
            if op.action.wv == v:
                f.nodes[node] = op
                free.remove(op)
                break
    return f


def node_map_conditions(f: NodeMap, a: Configuration, c: Configuration, obj: str = "s") -> list[Violation]:
    """Conditions (7)-(13) relating a Treiber state to an abstract stack state."""
    lib, alib = c.library, a.library
    pushed = sorted(c.ghost_of("pushedAddr"))
    unmatched = _unmatched_pushes(alib, obj)
    out = []
    images = [f(n) for n in pushed]
    if None in images or len(set(images)) != len(images):
        out.append(Violation("7", "node map is not an injective map of every pushed node"))
    for n in pushed:
        op, nxt = f(n), _next(lib, n)
        if op is None:
            continue
        t_next = f.ts(nxt)
        if op not in unmatched or op.action.wv != _last_val(lib, addr_loc(n)) \
                or t_next is None or not op.ts > t_next:
            out.append(Violation("8", f"node {n} is not mapped to a matching unmatched push above its successor"))
            continue
        for o in unmatched:
            if o != op and o != f(nxt) and t_next < o.ts < op.ts:
                out.append(Violation("9", f"push {o.action} lies between node {n} and its successor"))
    top = _last_val(lib, f"{obj}.Top")
    if top is not NULL:
        pushes = [o for o in alib.timeline(obj) if o.action.kind == "push"]
        last = max(pushes, key=lambda o: o.ts) if pushes else None
        if last is None or last not in unmatched or f(top) != last:
            out.append(Violation("10", "Top is not mapped to the newest push"))
    locs = [x for x in c.client.locations]
    for n in pushed:
        op = f(n)
        if op is None or op.action.thread is None:
            continue
        mv = alib.mview_of(op) or ()
        if any(view_get(mv, x) is not None and view_get(mv, x) > view_get(c.client.view_of(op.action.thread), x)
               for x in locs):
            out.append(Violation("11", f"pusher of node {n} sees less than the push published"))
        for w in lib.timeline(f"{obj}.Top"):
            if wrval(w.action) == n:
                wv = lib.mview_of(w) or ()
                if any(view_get(mv, x) is not None and view_get(wv, x) is not None
                       and view_get(mv, x) > view_get(wv, x) for x in locs):
                    out.append(Violation("12", f"write of node {n} to Top publishes less than its push"))
    for t in c.client.threads:
        for x in locs:
            if view_get(a.client.view_of(t), x) > view_get(c.client.view_of(t), x):
                out.append(Violation("13", f"thread {t} view of {x} behind the abstract"))
    return out
