"""Evaluation of assertions against configurations.

``env`` binds variables introduced by ``exists`` or by rule schemas; a bound
name may stand for a value, a thread, a location or an object.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Mapping, Optional

from ..core import (
    EMPTY, INIT_KINDS, ComponentState, Configuration, TOp, UsageError, in_sync,
    is_releasing, observable, same_value, value_key, view_get, wrval,
)
from ..objects import possible_returns
from .syntax import (
    And, Arith, Bool, Compare, Cond, Covered, CoveredWrite, Def, Exists, Formula, Hidden, Implies,
    Lit, Loc, Member, Method, Name, Not, Or, PcIn, Pos, Ref, parse_assertion,
)

_METHOD_KINDS = {"acquire": "acq", "release": "rel", "push": "push", "pop": "pop", "enq": "enq",
                 "deq": "deq"}


class Context:
    """Everything an assertion may mention besides the configuration."""

    def __init__(self, lets: Mapping[str, str] = (), env: Optional[dict] = None):
        self.lets = dict(lets)
        self.env = dict(env or {})

    def bind(self, name: str, value) -> "Context":
        c = Context(self.lets, self.env)
        c.env[name] = value
        return c


# --------------------------------------------------------------------------
# terms and names


def term_value(term, cfg: Configuration, ctx: Context):
    if isinstance(term, Lit):
        return term.value
    if isinstance(term, Name):
        if term.thread is None and term.name in ctx.env:
            return ctx.env[term.name]
        if term.thread is not None:
            t = term_value(term.thread, cfg, ctx)
            ls = cfg.locals_of(t)
            if term.name not in ls:
                raise UsageError(f"thread {t} has no local {term.name!r}")
            return ls[term.name]
        owners = [t for t, ls in zip(cfg.threads, cfg.locals) if term.name in dict(ls)]
        if len(owners) != 1:
            what = "ambiguous" if owners else "unbound"
            raise UsageError(f"name {term.name!r} is {what}")
        return cfg.locals_of(owners[0])[term.name]
    if isinstance(term, Arith):
        a, b = term_value(term.left, cfg, ctx), term_value(term.right, cfg, ctx)
        if not (isinstance(a, int) and isinstance(b, int)) or isinstance(a, bool) or isinstance(b, bool):
            return None
        return a + b if term.op == "+" else a - b
    raise UsageError(f"not a term: {term!r}")


def _thread(term, cfg, ctx) -> int:
    t = term_value(term, cfg, ctx)
    if t not in cfg.threads:
        raise UsageError(f"unknown thread {t!r}")
    return t


def _loc(loc: Loc, ctx: Context) -> str:
    v = ctx.env.get(loc.name, loc.name)
    return v if isinstance(v, str) else loc.name


def _component(cfg: Configuration, comp: Optional[str], x: str) -> ComponentState:
    if comp == "C":
        s = cfg.client
    elif comp == "L":
        s = cfg.library
    elif x in cfg.client.timelines:
        s = cfg.client
    else:
        s = cfg.library
    if x not in s.timelines:
        raise UsageError(f"unknown location {x!r} in {'client' if s is cfg.client else 'library'}")
    return s


# --------------------------------------------------------------------------
# method targets


class _MethodRef:
    def __init__(self, m: Method, cfg: Configuration, ctx: Context):
        self.obj = ctx.env.get(m.obj, m.obj)
        line = cfg.library.timelines.get(self.obj)
        if not line or line[0].action.kind not in INIT_KINDS:
            raise UsageError(f"{self.obj!r} is not an abstract object")
        self.line = line
        self.method = m.method
        self.arg = None if m.arg is None else term_value(m.arg, cfg, ctx)
        self.has_arg = m.arg is not None
        if m.method == "init":
            self.kind = line[0].action.kind
        else:
            self.kind = _METHOD_KINDS.get(m.method)
            if self.kind is None:
                raise UsageError(f"unknown method {m.method!r}")

    @property
    def by_return(self) -> bool:
        return self.kind in ("pop", "deq")

    def matches(self, op: TOp) -> bool:
        a = op.action
        if a.kind == "linit" and self.kind == "rel":
            # the initialisation is the lock's version-0 release
            return not self.has_arg or same_value(self.arg, 0)
        if a.kind != self.kind:
            return False
        if not self.has_arg:
            return True
        if a.kind in INIT_KINDS:
            return same_value(self.arg, 0) or self.arg is None
        if a.kind in ("acq", "rel"):
            return same_value(a.index, self.arg)
        if a.kind in ("push", "enq"):
            return same_value(a.wv, self.arg)
        return same_value(a.rv, self.arg)


@lru_cache(maxsize=1 << 16)
def _returns(lib: ComponentState, cli: ComponentState, t: int, obj: str) -> dict:
    return possible_returns(lib, cli, t, obj)


def _return_values(cfg, t, m: _MethodRef) -> dict:
    return _returns(cfg.library, cfg.client, t, m.obj)


def _arg_matches(m: _MethodRef, v) -> bool:
    if not m.has_arg:
        return not same_value(v, EMPTY)
    return same_value(v, m.arg)


# --------------------------------------------------------------------------
# formulas


def value_domain(cfg: Configuration) -> list:
    vals = set()
    for s in (cfg.client, cfg.library):
        for _, line in s.ops:
            for o in line:
                for v in (o.action.rv, o.action.wv, o.action.index):
                    if v is not None and not isinstance(v, (set, frozenset)):
                        vals.add(v)
    for ls in cfg.locals:
        for _, v in ls:
            if v is not None:
                vals.add(v)
    return sorted(vals, key=value_key)


def holds(f: Formula | str, cfg: Configuration, ctx: Optional[Context] = None) -> bool:
    """Truth of ``f`` in ``cfg``."""
    if isinstance(f, str):
        f = parse_assertion(f)
    ctx = ctx or Context()
    return _holds(f, cfg, ctx)


def _holds(f, cfg: Configuration, ctx: Context) -> bool:
    if isinstance(f, Bool):
        return f.value
    if isinstance(f, Not):
        return not _holds(f.arg, cfg, ctx)
    if isinstance(f, And):
        return _holds(f.left, cfg, ctx) and _holds(f.right, cfg, ctx)
    if isinstance(f, Or):
        return _holds(f.left, cfg, ctx) or _holds(f.right, cfg, ctx)
    if isinstance(f, Implies):
        return not _holds(f.left, cfg, ctx) or _holds(f.right, cfg, ctx)
    if isinstance(f, Exists):
        return any(_holds(f.body, cfg, ctx.bind(f.var, v)) for v in value_domain(cfg))
    if isinstance(f, Ref):
        if f.name in ctx.env and isinstance(ctx.env[f.name], bool):
            return ctx.env[f.name]
        if f.name in ctx.lets:
            return _holds(parse_assertion(ctx.lets[f.name]), cfg, ctx)
        v = term_value(Name(f.name), cfg, ctx)
        return v is True
    if isinstance(f, PcIn):
        return cfg.pc[_thread(f.thread, cfg, ctx)] in f.labels
    if isinstance(f, Compare):
        return _compare(f.op, term_value(f.left, cfg, ctx), term_value(f.right, cfg, ctx))
    if isinstance(f, Member):
        v = term_value(f.term, cfg, ctx)
        return any(same_value(v, term_value(o, cfg, ctx)) for o in f.options)
    if isinstance(f, Pos):
        return _pos(f, cfg, ctx)
    if isinstance(f, Def):
        return _def(f, cfg, ctx)
    if isinstance(f, Cond):
        return _cond(f, cfg, ctx)
    if isinstance(f, Covered):
        return _covered(f.comp, f.target, cfg, ctx)
    if isinstance(f, CoveredWrite):
        x = _loc(f.loc, ctx)
        s = _component(cfg, f.comp, x)
        return _covered_loc(s, x) and same_value(wrval(s.timeline(x)[-1].action),
                                                 term_value(f.value, cfg, ctx))
    if isinstance(f, Hidden):
        m = _MethodRef(f.target, cfg, ctx)
        ops = [o for o in m.line if m.matches(o)]
        return bool(ops) and all(cfg.library.is_covered(o) for o in ops)
    raise UsageError(f"cannot evaluate {f!r}")


def _compare(op: str, a, b) -> bool:
    if op == "=":
        return same_value(a, b)
    if op == "!=":
        return not same_value(a, b)
    if not (isinstance(a, int) and isinstance(b, int)) or isinstance(a, bool) or isinstance(b, bool):
        return False
    return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]


def _pos(f: Pos, cfg, ctx) -> bool:
    t = _thread(f.thread, cfg, ctx)
    if isinstance(f.target, Method):
        m = _MethodRef(f.target, cfg, ctx)
        if m.by_return:
            return any(_arg_matches(m, v) for v in _return_values(cfg, t, m))
        q = view_get(cfg.library.view_of(t), m.obj)
        return any(m.matches(o) for o in m.line if o.ts >= q)
    x = _loc(f.target, ctx)
    s = _component(cfg, f.comp, x)
    u = term_value(f.value, cfg, ctx)
    return any(same_value(wrval(w.action), u) for w in observable(s, t, x))


def _def(f: Def, cfg, ctx) -> bool:
    t = _thread(f.thread, cfg, ctx)
    if isinstance(f.target, Method):
        m = _MethodRef(f.target, cfg, ctx)
        if m.by_return:
            vals = list(_return_values(cfg, t, m))
            return len(vals) == 1 and _arg_matches(m, vals[0])
        last = m.line[-1]
        return view_get(cfg.library.view_of(t), m.obj) == last.ts and m.matches(last)
    x = _loc(f.target, ctx)
    s = _component(cfg, f.comp, x)
    return _definite(s.view_of(t), s, x, term_value(f.value, cfg, ctx))


def _definite(view, state: ComponentState, x: str, v) -> bool:
    """``dview(view, state, x) = v``, false when the view is not at the last operation."""
    last = state.timeline(x)[-1]
    return view_get(view, x) == last.ts and same_value(wrval(last.action), v)


def _cond(f: Cond, cfg, ctx) -> bool:
    t = _thread(f.thread, cfg, ctx)
    y = _loc(f.dst, ctx)
    ys = _component(cfg, f.dst_comp, y)
    v = term_value(f.dst_value, cfg, ctx)

    def good(state: ComponentState, w: TOp, sync: bool) -> bool:
        return sync and _definite(state.mview_of(w) or (), ys, y, v)

    if isinstance(f.src, Method):
        m = _MethodRef(f.src, cfg, ctx)
        lib = cfg.library
        if m.by_return:
            wit = [w for val, ws in _return_values(cfg, t, m).items() if _arg_matches(m, val)
                   for w in ws]
            return all(w is not None and good(lib, w, in_sync(w.action)) for w in wit)
        q = view_get(lib.view_of(t), m.obj)
        return all(good(lib, o, in_sync(o.action) or o.action.kind == "linit")
                   for o in m.line if o.ts >= q and m.matches(o))
    x = _loc(f.src, ctx)
    xs = _component(cfg, f.src_comp, x)
    u = term_value(f.src_value, cfg, ctx)
    return all(good(xs, w, is_releasing(w.action))
               for w in observable(xs, t, x) if same_value(wrval(w.action), u))


def _covered_loc(s: ComponentState, x: str) -> bool:
    line = s.timeline(x)
    return all(s.is_covered(o) for o in line[:-1])


def _covered(comp, target, cfg, ctx) -> bool:
    if isinstance(target, Method):
        m = _MethodRef(target, cfg, ctx)
        lib = cfg.library
        last = m.line[-1]
        return m.matches(last) and all(lib.is_covered(o) for o in m.line[:-1])
    x = _loc(target, ctx)
    return _covered_loc(_component(cfg, comp, x), x)
