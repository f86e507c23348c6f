"""Abstract object semantics: lock, queue and stack.

Each ``*_step(lib, cli, t, template)`` returns ``(lib', cli', resolved_action)``
triples; an empty list means the call is disabled in this state.  Queue and
stack operations are inserted at every legal gap of the object's timeline.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .core import (
    EMPTY, INIT_KINDS, Action, ComponentState, Mode, TOp, Timestamp, UsageError, Violation, in_sync,
    merge_views, union_views, view_get, view_set,
)
from .lang.semantics import value_matches
from .memory import update_state

ABSTRACT_KINDS = ("lock", "queue", "stack")


def known_kinds() -> tuple[str, ...]:
    from .impls import BUILTIN_IMPLS
    return ABSTRACT_KINDS + tuple(BUILTIN_IMPLS)


def _new_op_views(lib: ComponentState, cli: ComponentState, t: int, obj: str, ts: Timestamp,
                  src: Optional[TOp], sync: bool):
    """Library and client views of ``t`` after placing an op at ``ts``, merging ``src`` if ``sync``."""
    view = view_set(lib.view_of(t), obj, ts)
    ctview = cli.view_of(t)
    if sync and src is not None:
        mv = lib.mview_of(src) or ()
        view, ctview = merge_views(view, mv), merge_views(ctview, mv)
    return view, ctview


def _commit(lib, cli, t, op, view, ctview, covered=None, matched=None):
    lib2 = update_state(lib, t, view, op, union_views(view, ctview), covered=covered, matched=matched)
    cli2 = update_state(cli, t, ctview) if ctview != cli.view_of(t) else cli
    return lib2, cli2


# --------------------------------------------------------------------------
# lock


def lock_step(lib: ComponentState, cli: ComponentState, t: int, a: Action):
    line = lib.timeline(a.loc)
    if not line or line[0].action.kind != "linit":
        raise UsageError(f"{a.loc} is not a lock")
    last = line[-1]
    q2 = last.ts + 1
    if a.kind == "acq":
        if last.action.kind not in ("linit", "rel"):
            return []
        b = Action("acq", a.loc, mode=a.mode, thread=t, index=last.action.index + 1)
        op = TOp(b, q2)
        view, ctview = _new_op_views(lib, cli, t, a.loc, q2, last, a.mode.acquiring)
        lib2, cli2 = _commit(lib, cli, t, op, view, ctview, covered=last.ref)
        return [(lib2, cli2, b)]
    if a.kind == "rel":
        if last.action.kind != "acq" or last.action.thread != t:
            return []
        b = Action("rel", a.loc, mode=Mode.R, thread=t, index=last.action.index + 1)
        op = TOp(b, q2)
        view = view_set(lib.view_of(t), a.loc, q2)
        lib2 = update_state(lib, t, view, op, union_views(view, cli.view_of(t)))
        return [(lib2, cli, b)]
    raise UsageError(f"not a lock action: {a}")


# --------------------------------------------------------------------------
# queue and stack


def _slots(line: tuple[TOp, ...], after: Timestamp) -> list[Timestamp]:
    """One fresh timestamp per gap strictly after ``after`` (midpoints, plus past-the-end)."""
    out = []
    for i, o in enumerate(line):
        if o.ts < after:
            continue
        nxt = line[i + 1].ts if i + 1 < len(line) else None
        out.append(Fraction(o.ts + nxt) / 2 if nxt is not None else o.ts + 1)
    return out


def _matched(lib: ComponentState, obj: str):
    pairs = lib.matched_on(obj)
    return {a for a, _ in pairs}, {b for _, b in pairs}, pairs


def _obj_line(lib: ComponentState, obj: str, init_kind: str):
    line = lib.timeline(obj)
    if not line or line[0].action.kind != init_kind:
        raise UsageError(f"{obj} is not a {'queue' if init_kind == 'qinit' else 'stack'}")
    return line


def _empty_ok(line, ts2, supp, empty_kind):
    return all(o.ts in supp or o.action.kind in INIT_KINDS
               or (o.action.kind == empty_kind and o.action.rv == EMPTY)
               for o in line if o.ts < ts2)


def queue_step(lib: ComponentState, cli: ComponentState, t: int, a: Action):
    obj = a.loc
    line = _obj_line(lib, obj, "qinit")
    tv = view_get(lib.view_of(t), obj)
    dom, ran, _ = _matched(lib, obj)
    out = []
    if a.kind == "enq":
        b = Action("enq", obj, wv=a.wv, mode=a.mode, thread=t)
        for ts2 in _slots(line, tv):
            later = [o for o in line if o.ts > ts2]
            if any(o.action.kind == "enq" and o.ts in dom for o in later):
                continue
            if any(o.action.kind == "deq" and o.action.rv == EMPTY for o in later):
                continue
            view, ctview = _new_op_views(lib, cli, t, obj, ts2, None, False)
            out.append((*_commit(lib, cli, t, TOp(b, ts2), view, ctview), b))
        return out
    if a.kind == "deq":
        for w in line:
            if w.action.kind != "enq" or w.ts in dom or not value_matches(a.rv, w.action.wv):
                continue
            if any(o.action.kind == "enq" and o.ts < w.ts and o.ts not in dom for o in line):
                continue
            b = Action("deq", obj, rv=w.action.wv, mode=a.mode, thread=t)
            sync = a.mode.acquiring and w.action.mode.releasing
            for ts2 in _slots(line, max(tv, w.ts)):
                if any(ts2 <= r for r in ran):
                    continue
                view, ctview = _new_op_views(lib, cli, t, obj, ts2, w, sync)
                out.append((*_commit(lib, cli, t, TOp(b, ts2), view, ctview,
                                     matched=(obj, w.ts, ts2)), b))
        if value_matches(a.rv, EMPTY):
            b = Action("deq", obj, rv=EMPTY, mode=a.mode, thread=t)
            for ts2 in _slots(line, tv):
                if not _empty_ok(line, ts2, dom | ran, "deq"):
                    continue
                view, ctview = _new_op_views(lib, cli, t, obj, ts2, None, False)
                out.append((*_commit(lib, cli, t, TOp(b, ts2), view, ctview), b))
        return out
    raise UsageError(f"not a queue action: {a}")


def _outside_intervals(ts2, pairs) -> bool:
    return all(ts2 < a or ts2 > b for a, b in pairs)


def stack_step(lib: ComponentState, cli: ComponentState, t: int, a: Action):
    obj = a.loc
    line = _obj_line(lib, obj, "sinit")
    tv = view_get(lib.view_of(t), obj)
    dom, ran, pairs = _matched(lib, obj)
    out = []
    if a.kind == "push":
        b = Action("push", obj, wv=a.wv, mode=a.mode, thread=t)
        for ts2 in _slots(line, tv):
            if not _outside_intervals(ts2, pairs):
                continue
            view, ctview = _new_op_views(lib, cli, t, obj, ts2, None, False)
            out.append((*_commit(lib, cli, t, TOp(b, ts2), view, ctview), b))
        return out
    if a.kind == "pop":
        slots = [ts2 for ts2 in _slots(line, tv) if _outside_intervals(ts2, pairs)]
        for w in line:
            if w.action.kind != "push" or w.ts in dom or not value_matches(a.rv, w.action.wv):
                continue
            b = Action("pop", obj, rv=w.action.wv, mode=a.mode, thread=t)
            sync = a.mode.acquiring and w.action.mode.releasing
            for ts2 in slots:
                if ts2 <= w.ts:
                    continue
                if any(o.action.kind == "push" and w.ts < o.ts < ts2 and o.ts not in dom
                       for o in line):
                    continue
                view, ctview = _new_op_views(lib, cli, t, obj, ts2, w, sync)
                out.append((*_commit(lib, cli, t, TOp(b, ts2), view, ctview,
                                     matched=(obj, w.ts, ts2)), b))
        if value_matches(a.rv, EMPTY):
            b = Action("pop", obj, rv=EMPTY, mode=a.mode, thread=t)
            for ts2 in _slots(line, tv):
                if not _empty_ok(line, ts2, dom | ran, "pop"):
                    continue
                view, ctview = _new_op_views(lib, cli, t, obj, ts2, None, False)
                out.append((*_commit(lib, cli, t, TOp(b, ts2), view, ctview), b))
        return out
    raise UsageError(f"not a stack action: {a}")


def object_step(lib: ComponentState, cli: ComponentState, t: int, a: Action):
    if a.kind in ("acq", "rel"):
        return lock_step(lib, cli, t, a)
    if a.kind in ("enq", "deq"):
        return queue_step(lib, cli, t, a)
    if a.kind in ("push", "pop"):
        return stack_step(lib, cli, t, a)
    raise UsageError(f"not an object action: {a}")


def possible_returns(lib: ComponentState, cli: ComponentState, t: int, obj: str) -> dict:
    """Values a pop/dequeue by ``t`` could return now, each with the pushes/enqueues it could match.

    Keys are return values; each maps to the set of matched operations (``None`` for empty).
    """
    line = lib.timeline(obj)
    kind = "pop" if line[0].action.kind == "sinit" else "deq"
    from .lang.semantics import ANY
    out: dict = {}
    for lib2, _cli2, b in object_step(lib, cli, t, Action(kind, obj, rv=ANY, mode=Mode.A)):
        src = None
        if b.rv != EMPTY:
            new = lib2.matched - lib.matched
            (_, ts, _ts2), = new
            src = lib.by_ref[(obj, ts)]
        out.setdefault(b.rv, set()).add(src)
    return out


def is_sync_op(op: TOp) -> bool:
    return in_sync(op.action)


# --------------------------------------------------------------------------
# ordering oracles


def fifo_violations(lib: ComponentState, obj: str) -> list[Violation]:
    """Matched dequeues, in timestamp order, return their enqueues' values in timestamp order."""
    pairs = lib.matched_on(obj)
    by_ts = {o.ts: o for o in lib.timeline(obj)}
    enqs = [by_ts[a].action.wv for a, _ in sorted(pairs)]
    deqs = [by_ts[b].action.rv for _, b in sorted(pairs, key=lambda p: p[1])]
    if enqs != deqs:
        return [Violation("FIFO", f"{obj}: enqueued {enqs} but dequeued {deqs}")]
    return []


def lifo_violations(lib: ComponentState, obj: str) -> list[Violation]:
    """Matched push/pop timestamp intervals are well nested."""
    pairs = lib.matched_on(obj)
    out = []
    for i, (a1, b1) in enumerate(pairs):
        for a2, b2 in pairs[i + 1:]:
            if a1 < a2 < b1 < b2:
                out.append(Violation("LIFO", f"{obj}: intervals ({a1},{b1}) and ({a2},{b2}) overlap"))
    return out


def oracle_violations(lib: ComponentState) -> list[Violation]:
    """FIFO for every queue and LIFO for every stack in ``lib``."""
    out = []
    for x, line in lib.ops:
        kind = line[0].action.kind if line else None
        if kind == "qinit":
            out += fifo_violations(lib, x)
        elif kind == "sinit":
            out += lifo_violations(lib, x)
    return out
