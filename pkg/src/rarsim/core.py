"""Domain types for the timestamped RC11-RAR state and its basic algebra.

A component state (client or library) is a set of timestamped operations,
one viewfront per thread, a modification view per operation, a covered set
and a ``matched`` relation used by queues and stacks.

Representation notes
--------------------
* Timestamps are ``int`` or :class:`fractions.Fraction`.  Canonical states use
  the ranks ``0..k-1`` per location.
* An operation is referenced inside views, ``cvd`` and ``mview`` keys by the
  pair ``(location, timestamp)``; per-location timestamp uniqueness makes this
  unambiguous.
* A :data:`View` is a tuple of ``(location, timestamp)`` pairs sorted by
  location, so states are hashable and compare structurally.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Mapping, NamedTuple, Optional, Union

Timestamp = Union[int, Fraction]
OpRef = tuple[str, Timestamp]
View = tuple[tuple[str, Timestamp], ...]


class UsageError(Exception):
    """Malformed input: unknown location, thread, name or bad arguments."""


class Tok(str, enum.Enum):
    """Distinguished non-integer values."""

    NULL = "null"
    EMPTY = "empty"

    def __repr__(self) -> str:
        return self.value

    __str__ = __repr__


NULL = Tok.NULL
EMPTY = Tok.EMPTY
BOT = None  # the undefined value, written ⊥ / bot

Value = Union[int, bool, Tok, None]


def show_value(v: Value) -> str:
    if v is None:
        return "bot"
    if v is True:
        return "true"
    if v is False:
        return "false"
    return str(v)


def value_key(v: Value) -> tuple:
    """Total order on values, used wherever values must be sorted."""
    if v is None:
        return (0, 0)
    if isinstance(v, bool):
        return (1, int(v))
    if isinstance(v, Tok):
        return (2, v.value)
    return (3, v)


def same_value(a: Value, b: Value) -> bool:
    # bool is an int subclass; keep true/false apart from 1/0
    return a == b and isinstance(a, bool) == isinstance(b, bool)


class Mode(str, enum.Enum):
    RLX = ""
    R = "R"
    A = "A"
    RA = "RA"

    def __repr__(self) -> str:
        return self.name

    @property
    def releasing(self) -> bool:
        return "R" in self.value

    @property
    def acquiring(self) -> bool:
        return "A" in self.value


# Action kinds.  Memory: rd, wr, upd.  Lock: linit, acq, rel.
# Queue: qinit, enq, deq.  Stack: sinit, push, pop.
MEMORY_KINDS = frozenset({"rd", "wr", "upd"})
LOCK_KINDS = frozenset({"linit", "acq", "rel"})
QUEUE_KINDS = frozenset({"qinit", "enq", "deq"})
STACK_KINDS = frozenset({"sinit", "push", "pop"})
INIT_KINDS = frozenset({"linit", "qinit", "sinit"})


class Action(NamedTuple):
    """A labelled event.

    ``rv`` is the value read (reads, updates) or returned (deq/pop);
    ``wv`` the value written (writes, updates) or passed (enq/push);
    ``index`` is the lock-operation index.
    """

    kind: str
    loc: str
    rv: Any = None
    wv: Any = None
    mode: Mode = Mode.RLX
    thread: Optional[int] = None
    index: Optional[int] = None

    def __str__(self) -> str:
        m = f"^{self.mode.value}" if self.mode.value else ""
        who = f"@{self.thread}" if self.thread is not None else ""
        k, x = self.kind, self.loc
        if k == "rd":
            return f"rd{m}({x},{show_value(self.rv)}){who}"
        if k == "wr":
            return f"wr{m}({x},{show_value(self.wv)}){who}"
        if k == "upd":
            return f"upd{m}({x},{show_value(self.rv)},{show_value(self.wv)}){who}"
        if k == "linit":
            return f"{x}.init_0"
        if k == "acq":
            return f"{x}.acquire_{self.index}{who}"
        if k == "rel":
            return f"{x}.release_{self.index}{who}"
        if k in ("qinit", "sinit"):
            return f"{x}.init"
        if k in ("enq", "push"):
            return f"{x}.{k}{m}({show_value(self.wv)}){who}"
        return f"{x}.{k}{m}({show_value(self.rv)}){who}"


def is_write(a: Action) -> bool:
    """Modifying memory operation (write or update)."""
    return a.kind in ("wr", "upd")


def wrval(a: Action) -> Value:
    """Value a reader of this operation would obtain.  Lock ops expose their index."""
    if a.kind in LOCK_KINDS:
        return a.index
    return a.wv


def is_releasing(a: Action) -> bool:
    """Membership of W_R: releasing writes and updates."""
    return a.kind in ("wr", "upd") and a.mode.releasing


def in_sync(a: Action) -> bool:
    """Sync set for method conditional observations: lock releases, releasing enq/push."""
    if a.kind == "rel":
        return True
    return a.kind in ("enq", "push") and a.mode.releasing


class TOp(NamedTuple):
    action: Action
    ts: Timestamp

    @property
    def ref(self) -> OpRef:
        return (self.action.loc, self.ts)


# --------------------------------------------------------------------------
# views


def view_get(view: View, x: str) -> Optional[Timestamp]:
    for loc, ts in view:
        if loc == x:
            return ts
    return None


def view_set(view: View, x: str, ts: Timestamp) -> View:
    d = dict(view)
    d[x] = ts
    return tuple(sorted(d.items()))


def make_view(items: Mapping[str, Timestamp] | Iterable[tuple[str, Timestamp]]) -> View:
    return tuple(sorted(dict(items).items()))


def merge_views(v1: View, v2: View) -> View:
    """``v1 ⊗ v2`` over ``dom(v1)``: later timestamps win, ties keep ``v1``."""
    d2 = dict(v2)
    out = []
    for x, q in v1:
        q2 = d2.get(x)
        out.append((x, q2 if q2 is not None and q2 > q else q))
    return tuple(out)


def union_views(v1: View, v2: View) -> View:
    """Disjoint union of two views (tview ∪ ctview)."""
    d = dict(v1)
    for x, q in v2:
        if x in d and d[x] != q:
            raise UsageError(f"overlapping view union on {x}")
        d[x] = q
    return tuple(sorted(d.items()))


def restrict_view(view: View, locs: Iterable[str]) -> View:
    keep = set(locs)
    return tuple((x, q) for x, q in view if x in keep)


# --------------------------------------------------------------------------
# component state


def _freeze_ops(ops: Mapping[str, Iterable[TOp]]) -> tuple[tuple[str, tuple[TOp, ...]], ...]:
    return tuple(
        (x, tuple(sorted(line, key=lambda o: o.ts))) for x, line in sorted(ops.items())
    )


@dataclass(frozen=True)
class ComponentState:
    """One component's weak-memory state.  Treat as immutable."""

    ops: tuple[tuple[str, tuple[TOp, ...]], ...] = ()
    tview: tuple[tuple[int, View], ...] = ()
    mview: tuple[tuple[OpRef, View], ...] = ()
    cvd: frozenset = frozenset()
    matched: frozenset = frozenset()  # (object location, ts, ts')

    # -- cached lookups (not part of equality) --
    @cached_property
    def timelines(self) -> dict[str, tuple[TOp, ...]]:
        return dict(self.ops)

    @cached_property
    def tviews(self) -> dict[int, View]:
        return dict(self.tview)

    @cached_property
    def mviews(self) -> dict[OpRef, View]:
        return dict(self.mview)

    @cached_property
    def by_ref(self) -> dict[OpRef, TOp]:
        return {o.ref: o for _, line in self.ops for o in line}

    @property
    def locations(self) -> tuple[str, ...]:
        return tuple(x for x, _ in self.ops)

    @property
    def threads(self) -> tuple[int, ...]:
        return tuple(t for t, _ in self.tview)

    def all_ops(self) -> set[TOp]:
        return {o for _, line in self.ops for o in line}

    def timeline(self, x: str) -> tuple[TOp, ...]:
        try:
            return self.timelines[x]
        except KeyError:
            raise UsageError(f"unknown location {x!r}") from None

    def view_of(self, t: int) -> View:
        try:
            return self.tviews[t]
        except KeyError:
            raise UsageError(f"unknown thread {t!r}") from None

    def viewfront(self, t: int, x: str) -> TOp:
        q = view_get(self.view_of(t), x)
        if q is None:
            raise UsageError(f"thread {t} has no view of {x!r}")
        return self.by_ref[(x, q)]

    def mview_of(self, op: TOp | OpRef) -> Optional[View]:
        ref = op.ref if isinstance(op, TOp) else op
        return self.mviews.get(ref)

    def is_covered(self, op: TOp | OpRef) -> bool:
        ref = op.ref if isinstance(op, TOp) else op
        return ref in self.cvd

    def matched_on(self, x: str) -> list[tuple[Timestamp, Timestamp]]:
        return sorted((a, b) for (loc, a, b) in self.matched if loc == x)

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.ops, self.tview, self.mview, self.cvd, self.matched))
            object.__setattr__(self, "_hash", h)
        return h

    def replace(self, **kw) -> "ComponentState":
        fields = dict(ops=self.ops, tview=self.tview, mview=self.mview,
                      cvd=self.cvd, matched=self.matched)
        fields.update(kw)
        return ComponentState(**fields)


def build_state(ops: Mapping[str, Iterable[TOp]] | Iterable[TOp],
                tview: Mapping[int, Mapping[str, Timestamp]],
                mview: Mapping[OpRef, Mapping[str, Timestamp]] | None = None,
                cvd: Iterable[OpRef] = (),
                matched: Iterable[tuple[str, Timestamp, Timestamp]] = ()) -> ComponentState:
    """Convenience constructor from plain dicts (used by tests and scripted states)."""
    if not isinstance(ops, Mapping):
        grouped: dict[str, list[TOp]] = {}
        for o in ops:
            grouped.setdefault(o.action.loc, []).append(o)
        ops = grouped
    return ComponentState(
        ops=_freeze_ops(ops),
        tview=tuple(sorted((t, make_view(v)) for t, v in tview.items())),
        mview=tuple(sorted(((r, make_view(v)) for r, v in (mview or {}).items()),
                           key=lambda kv: (kv[0][0], kv[0][1]))),
        cvd=frozenset(cvd),
        matched=frozenset(matched),
    )


# --------------------------------------------------------------------------
# basic algebra


def observable(state: ComponentState, t: int, x: str) -> list[TOp]:
    """Operations on ``x`` at or after thread ``t``'s viewfront, in timestamp order."""
    line = state.timeline(x)
    q = view_get(state.view_of(t), x)
    if q is None:
        raise UsageError(f"thread {t} has no view of {x!r}")
    return [o for o in line if o.ts >= q]


def last_op(ops: Iterable[TOp] | ComponentState, x: str) -> TOp:
    """The operation on ``x`` with maximal timestamp."""
    if isinstance(ops, ComponentState):
        line = ops.timelines.get(x, ())
        if not line:
            raise LookupError(f"no operation on {x!r}")
        return line[-1]
    best = None
    for o in ops:
        if o.action.loc == x and (best is None or o.ts > best.ts):
            best = o
    if best is None:
        raise LookupError(f"no operation on {x!r}")
    return best


def dview(view: View, state: ComponentState, x: str) -> Optional[Value]:
    """Definite value of ``x`` under ``view``: defined only when the view is at the last op."""
    q = view_get(view, x)
    line = state.timelines.get(x)
    if q is None or not line or line[-1].ts != q:
        return None
    return wrval(line[-1].action)


class Violation(NamedTuple):
    name: str
    detail: str

    def __str__(self) -> str:
        return f"{self.name}: {self.detail}"


def wellformed(state: ComponentState, *, other_locs: Iterable[str] = ()) -> list[Violation]:
    """Check the ComponentState invariants; an empty list means well-formed.

    ``other_locs`` lists locations of the other component, which mview entries
    may legitimately reference.
    """
    out: list[Violation] = []
    own = set(state.locations)
    known = own | set(other_locs)
    refs = set()
    for x, line in state.ops:
        seen: dict[Timestamp, TOp] = {}
        for o in line:
            if o.action.loc != x:
                out.append(Violation("op location", f"{o.action} filed under {x}"))
            if o.ts in seen:
                out.append(Violation("timestamp unique", f"{seen[o.ts].action} and {o.action} at {o.ts} on {x}"))
            seen[o.ts] = o
            refs.add((x, o.ts))
        if [o.ts for o in line] != sorted(o.ts for o in line):
            out.append(Violation("timeline order", x))
    bad = [r for r in state.cvd if r not in refs]
    if bad:
        out.append(Violation("cvd subset", f"covered refs not in ops: {sorted(map(str, bad))}"))
    for t, v in state.tview:
        for x, q in v:
            if x not in own:
                out.append(Violation("tview component", f"thread {t} views foreign location {x}"))
            elif (x, q) not in refs:
                out.append(Violation("tview points into ops", f"thread {t} at {x}@{q}"))
        missing = own - {x for x, _ in v}
        if missing:
            out.append(Violation("tview total", f"thread {t} lacks {sorted(missing)}"))
    for r, v in state.mview:
        if r not in refs:
            out.append(Violation("mview key", f"{r} not an op"))
        for x, q in v:
            if x not in known:
                out.append(Violation("mview location", f"{r} views unknown {x}"))
            elif x in own and (x, q) not in refs:
                out.append(Violation("mview points into ops", f"{r} at {x}@{q}"))
    firsts: dict[tuple[str, Timestamp], Timestamp] = {}
    seconds: dict[tuple[str, Timestamp], Timestamp] = {}
    for loc, a, b in state.matched:
        if (loc, a) not in refs or (loc, b) not in refs:
            out.append(Violation("matched refs", f"({a},{b}) on {loc}"))
        if (loc, a) in firsts or (loc, b) in seconds:
            out.append(Violation("matched injective", f"({a},{b}) on {loc}"))
        firsts[(loc, a)] = b
        seconds[(loc, b)] = a
    return out


# --------------------------------------------------------------------------
# canonicalisation


def rank_maps(*states: ComponentState) -> dict[str, dict[Timestamp, int]]:
    maps: dict[str, dict[Timestamp, int]] = {}
    for s in states:
        for x, line in s.ops:
            maps[x] = {o.ts: i for i, o in enumerate(line)}
    return maps


def _is_identity(m: dict[Timestamp, int]) -> bool:
    return all(type(k) is int and k == v for k, v in m.items())


def renumber(state: ComponentState, maps: dict[str, dict[Timestamp, int]]) -> ComponentState:
    """Apply per-location timestamp maps to every reference in ``state``."""
    dirty = {x for x, m in maps.items() if not _is_identity(m)}
    if not dirty:
        return state

    def rv(view: View) -> View:
        return tuple((x, maps[x][q]) if x in dirty else (x, q) for x, q in view)

    def rr(ref: OpRef) -> OpRef:
        x, q = ref
        return (x, maps[x][q]) if x in dirty else ref

    ops = tuple(
        (x, tuple(TOp(o.action, maps[x][o.ts]) for o in line)) if x in dirty else (x, line)
        for x, line in state.ops
    )
    return ComponentState(
        ops=ops,
        tview=tuple((t, rv(v)) for t, v in state.tview),
        mview=tuple(sorted(((rr(r), rv(v)) for r, v in state.mview), key=lambda kv: kv[0])),
        cvd=frozenset(rr(r) for r in state.cvd),
        matched=frozenset(
            (x, maps[x][a], maps[x][b]) if x in dirty else (x, a, b) for x, a, b in state.matched
        ),
    )


def canonical_pair(client: ComponentState, library: ComponentState) -> tuple[ComponentState, ComponentState]:
    maps = rank_maps(client, library)
    return renumber(client, maps), renumber(library, maps)


def canonicalize(cfg):
    """Renumber timestamps per location to ranks; see :class:`Configuration`."""
    c, l = canonical_pair(cfg.client, cfg.library)
    if c is cfg.client and l is cfg.library:
        return cfg
    return cfg.replace(client=c, library=l)


def fresh_after(line: tuple[TOp, ...], q: Timestamp) -> Timestamp:
    """Timestamp immediately after ``q``: midpoint to the next op, or ``q + 1``."""
    later = [o.ts for o in line if o.ts > q]
    if not later:
        return q + 1
    return Fraction(q + min(later)) / 2


# --------------------------------------------------------------------------
# configurations

Locals = tuple[tuple[str, Any], ...]


@dataclass(frozen=True)
class Configuration:
    """Whole-system snapshot.

    ``program`` and ``locals`` are aligned with ``threads``.  ``ghost`` holds
    auxiliary variables (e.g. Treiber's usedAddr/pushedAddr) as sorted
    ``(name, frozenset)`` pairs.
    """

    threads: tuple[int, ...]
    program: tuple[Any, ...]
    locals: tuple[Locals, ...]
    client: ComponentState
    library: ComponentState
    ghost: tuple[tuple[str, frozenset], ...] = ()

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.threads, self.program, self.locals, self.client, self.library, self.ghost))
            object.__setattr__(self, "_hash", h)
        return h

    def replace(self, **kw) -> "Configuration":
        fields = dict(threads=self.threads, program=self.program, locals=self.locals,
                      client=self.client, library=self.library, ghost=self.ghost)
        fields.update(kw)
        return Configuration(**fields)

    def index(self, t: int) -> int:
        try:
            return self.threads.index(t)
        except ValueError:
            raise UsageError(f"unknown thread {t!r}") from None

    def locals_of(self, t: int) -> dict[str, Any]:
        return dict(self.locals[self.index(t)])

    def ghost_of(self, name: str) -> frozenset:
        return dict(self.ghost).get(name, frozenset())

    @property
    def pc(self) -> dict[int, Any]:
        from .lang.semantics import pc_of
        return {t: pc_of(c) for t, c in zip(self.threads, self.program)}
