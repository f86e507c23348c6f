"""Thread-local small-step semantics.

``thread_steps`` returns the steps one thread can take.  Each step carries an
action *template* (``None`` for a silent step) and a continuation that, given
the resolved action chosen by the memory or object semantics, yields the
residual command and the local-register updates.
"""

from __future__ import annotations

from typing import Any, Callable, Iterable, NamedTuple, Optional

from ..core import Action, Mode, UsageError, Value, same_value
from .ast import (
    SKIP, Alloc, Assign, At, Bin, Call, Cas, Command, Const, Deref, DoUntil, Fai, Fn, If, Read,
    Reg, Return, Seq, Skip, Un, UntilCheck, Var, While, Write, seq,
)


class EvalError(UsageError):
    pass


class _AnyValue:
    def __repr__(self):
        return "ANY"


ANY = _AnyValue()


class Except(NamedTuple):
    """Read-value constraint: any value other than ``value``."""

    value: Value


class _Incr:
    def __repr__(self):
        return "INC"


INC = _Incr()  # FAI writes the value read plus one


def value_matches(template_value, v) -> bool:
    if template_value is ANY:
        return True
    if isinstance(template_value, Except):
        return not same_value(v, template_value.value)
    return same_value(template_value, v)


# --------------------------------------------------------------------------
# expressions


def _num(v, e):
    if isinstance(v, bool) or not isinstance(v, int):
        raise EvalError(f"arithmetic on non-integer {v!r} in {e}")
    return v


def eval_expr(e, ls: dict[str, Value]) -> Value:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Reg):
        try:
            return ls[e.name]
        except KeyError:
            raise EvalError(f"unbound local {e.name!r}") from None
    if isinstance(e, Un):
        v = eval_expr(e.arg, ls)
        if e.op == "!":
            return not truthy(v, e)
        return -_num(v, e)
    if isinstance(e, Fn):
        args = [eval_expr(a, ls) for a in e.args]
        if e.name == "even" and len(args) == 1:
            return _num(args[0], e) % 2 == 0
        if e.name == "odd" and len(args) == 1:
            return _num(args[0], e) % 2 == 1
        raise EvalError(f"unknown function {e.name}")
    if isinstance(e, Bin):
        op = e.op
        if op == "&&":
            return truthy(eval_expr(e.left, ls), e) and truthy(eval_expr(e.right, ls), e)
        if op == "||":
            return truthy(eval_expr(e.left, ls), e) or truthy(eval_expr(e.right, ls), e)
        a, b = eval_expr(e.left, ls), eval_expr(e.right, ls)
        if op == "=":
            return same_value(a, b)
        if op == "!=":
            return not same_value(a, b)
        a, b = _num(a, e), _num(b, e)
        if op in ("/", "%") and b == 0:
            raise EvalError(f"division by zero in {e}")
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            return a // b
        if op == "%":
            return a % b
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
    raise EvalError(f"cannot evaluate {e!r}")


def truthy(v, e=None) -> bool:
    if isinstance(v, bool):
        return v
    raise EvalError(f"guard {e} is not boolean: {v!r}")


def addr_loc(a: int) -> str:
    return f"[{a}]"


def loc_name(loc, ls) -> str:
    if isinstance(loc, Var):
        return loc.name
    a = eval_expr(loc.addr, ls)
    if isinstance(a, bool) or not isinstance(a, int):
        raise EvalError(f"dereferencing non-address {a!r}")
    return addr_loc(a)


# --------------------------------------------------------------------------
# steps


class Outcome(NamedTuple):
    cmd: Any
    updates: tuple[tuple[str, Value], ...] = ()
    ghost: tuple[tuple[str, str, Value], ...] = ()


class Step(NamedTuple):
    lib: bool
    template: Optional[Action]
    cont: Callable[[Optional[Action]], Outcome]
    stmt: Any
    blocked_by_fuel: bool = False


class _Returned(NamedTuple):
    value: Value


METHOD_KINDS = {
    "acquire": "acq", "acquire_rlx": "acq", "release": "rel", "push": "push", "pop": "pop",
    "enq": "enq", "deq": "deq",
}


def _const(out: Outcome):
    return lambda _a, _o=out: _o


def _fuel_block(stmt) -> Step:
    return Step(False, None, _const(Outcome(stmt)), stmt, True)


def thread_steps(cmd: Command, ls: dict[str, Value], lib: bool = False) -> list[Step]:
    """Enabled program steps of one thread (before memory/object resolution)."""
    if isinstance(cmd, Skip):
        return []
    if isinstance(cmd, Seq):
        out = []
        for s in thread_steps(cmd.first, ls, lib):
            out.append(s._replace(cont=_then(s.cont, cmd.second)))
        return out
    if isinstance(cmd, At):
        if isinstance(cmd.cmd, Skip):
            return []
        return [s._replace(cont=_at(s.cont, cmd.label)) for s in thread_steps(cmd.cmd, ls, lib)]
    if isinstance(cmd, Assign):
        return [Step(lib, None, _const(Outcome(SKIP, ((cmd.reg, eval_expr(cmd.expr, ls)),))), cmd)]
    if isinstance(cmd, Write):
        a = Action("wr", loc_name(cmd.loc, ls), wv=eval_expr(cmd.expr, ls), mode=cmd.mode)
        return [Step(lib, a, _const(Outcome(SKIP)), cmd)]
    if isinstance(cmd, Read):
        a = Action("rd", loc_name(cmd.loc, ls), rv=ANY, mode=cmd.mode)
        return [Step(lib, a, lambda act, r=cmd.reg: Outcome(SKIP, ((r, act.rv),)), cmd)]
    if isinstance(cmd, Cas):
        x = loc_name(cmd.loc, ls)
        u, v = eval_expr(cmd.expect, ls), eval_expr(cmd.new, ls)
        ghost = tuple((g.name, g.op, eval_expr(g.expr, ls)) for g in cmd.ghost)
        ok = Action("upd", x, rv=u, wv=v, mode=cmd.mode)
        fail = Action("rd", x, rv=Except(u), mode=Mode.RLX)
        return [
            Step(lib, ok, _const(Outcome(SKIP, ((cmd.reg, True),), ghost)), cmd),
            Step(lib, fail, _const(Outcome(SKIP, ((cmd.reg, False),))), cmd),
        ]
    if isinstance(cmd, Fai):
        a = Action("upd", loc_name(cmd.loc, ls), rv=ANY, wv=INC, mode=cmd.mode)
        return [Step(lib, a, lambda act, r=cmd.reg: Outcome(SKIP, ((r, act.rv),)), cmd)]
    if isinstance(cmd, Alloc):
        a = Action("alloc", "")
        return [Step(lib, a, lambda act, r=cmd.reg: Outcome(SKIP, ((r, act.rv),),
                                                             (("usedAddr", "+=", act.rv),
                                                              ("usedAddr", "+=", act.rv + 1))), cmd)]
    if isinstance(cmd, If):
        branch = cmd.then if truthy(eval_expr(cmd.cond, ls), cmd.cond) else cmd.els
        return [Step(lib, None, _const(Outcome(branch)), cmd)]
    if isinstance(cmd, While):
        if not truthy(eval_expr(cmd.cond, ls), cmd.cond):
            return [Step(lib, None, _const(Outcome(SKIP)), cmd)]
        if cmd.fuel is not None and cmd.fuel <= 0:
            return [_fuel_block(cmd)]
        nxt = While(cmd.cond, cmd.body, None if cmd.fuel is None else cmd.fuel - 1)
        return [Step(lib, None, _const(Outcome(seq(cmd.body, nxt))), cmd)]
    if isinstance(cmd, DoUntil):
        if cmd.fuel is not None and cmd.fuel <= 0:
            return [_fuel_block(cmd)]
        rest = UntilCheck(cmd.body, cmd.cond, None if cmd.fuel is None else cmd.fuel - 1)
        return thread_steps(seq(cmd.body, rest), ls, lib)
    if isinstance(cmd, UntilCheck):
        if truthy(eval_expr(cmd.cond, ls), cmd.cond):
            return [Step(lib, None, _const(Outcome(SKIP)), cmd)]
        # re-entering the loop restores its control point
        return [Step(lib, None, _const(Outcome(DoUntil(cmd.body, cmd.cond, cmd.fuel))), cmd)]
    if isinstance(cmd, Return):
        v = eval_expr(cmd.expr, ls)
        return [Step(lib, None, _const(Outcome(_Returned(v))), cmd)]
    if isinstance(cmd, Call):
        return _call_steps(cmd, ls)
    raise UsageError(f"cannot step {cmd!r}")


def _then(k, rest):
    def cont(act):
        o = k(act)
        if isinstance(o.cmd, _Returned):
            return o
        return o._replace(cmd=seq(o.cmd, rest))
    return cont


def _at(k, label):
    def cont(act):
        o = k(act)
        if isinstance(o.cmd, (_Returned, Skip)):
            return o
        return o._replace(cmd=At(label, o.cmd, True))
    return cont


def _finish(call: Call, value: Value, extra=()) -> tuple:
    ups = [("rval", value)]
    if call.target is not None:
        ups.append((call.target, value))
    ups.extend(extra)
    return tuple(ups)


def _call_steps(cmd: Call, ls) -> list[Step]:
    if cmd.impl is None:
        kind = METHOD_KINDS.get(cmd.method)
        if kind is None:
            raise UsageError(f"unknown method {cmd.obj}.{cmd.method}")
        mode = cmd.mode
        if kind == "acq":
            mode = Mode.RLX if cmd.method == "acquire_rlx" else Mode.A
        elif kind == "rel":
            mode = Mode.R
        arg = eval_expr(cmd.arg, ls) if cmd.arg is not None else None
        a = Action(kind, cmd.obj, rv=ANY if kind in ("pop", "deq") else None, wv=arg, mode=mode)

        def cont(act, c=cmd, kind=kind):
            if kind == "acq":
                ret = True
            elif kind in ("pop", "deq"):
                ret = act.rv
            else:
                ret = None
            extra = ((c.vreg, act.index),) if c.vreg is not None else ()
            return Outcome(SKIP, _finish(c, ret, extra))
        return [Step(True, a, cont, cmd)]
    if cmd.running is None:
        ups = []
        if cmd.params:
            arg = eval_expr(cmd.arg, ls) if cmd.arg is not None else None
            ups.append((cmd.params[0], arg))
        started = Call(cmd.obj, cmd.method, cmd.arg, cmd.mode, cmd.target, cmd.vreg, cmd.impl,
                       cmd.params, cmd.impl)
        return [Step(True, None, _const(Outcome(started, tuple(ups))), cmd)]
    out = []
    for s in thread_steps(cmd.running, ls, True):
        out.append(s._replace(cont=_in_call(s.cont, cmd)))
    return out


def _in_call(k, call: Call):
    def cont(act):
        o = k(act)
        if isinstance(o.cmd, _Returned):
            return Outcome(SKIP, o.updates + _finish(call, o.cmd.value), o.ghost)
        if isinstance(o.cmd, Skip):
            return Outcome(SKIP, o.updates + _finish(call, None), o.ghost)
        nxt = Call(call.obj, call.method, call.arg, call.mode, call.target, call.vreg, call.impl,
                   call.params, o.cmd)
        return o._replace(cmd=nxt)
    return cont


# --------------------------------------------------------------------------
# control points and syntactic queries


def is_done(cmd: Command) -> bool:
    return isinstance(cmd, Skip) or (isinstance(cmd, At) and isinstance(cmd.cmd, Skip))


def _head(cmd):
    while isinstance(cmd, Seq):
        cmd = cmd.first
    return cmd


def pc_of(cmd: Command):
    """Innermost client control-point label of the residual command (``None`` when done)."""
    h = _head(cmd)
    if isinstance(h, At):
        inner = pc_of(h.cmd)
        return inner if inner is not None else h.label
    if isinstance(h, (DoUntil,)):
        return pc_of(h.body)
    return None


def lib_pc_of(cmd: Command):
    """Control point inside a running method implementation, if any."""
    h = _head(cmd)
    if isinstance(h, At):
        return lib_pc_of(h.cmd)
    if isinstance(h, Call) and h.running is not None:
        return pc_of(h.running)
    return None


def current_points(cmd: Command) -> list[int]:
    """Labels of statements the thread is about to start (or re-enter, for loops)."""
    h = _head(cmd)
    out = []
    while True:
        if isinstance(h, At):
            inner = _head(h.cmd)
            if not h.started or isinstance(inner, (DoUntil, While)):
                out.append(h.label)
            h = inner
            continue
        if isinstance(h, DoUntil):
            h = _head(h.body)
            continue
        break
    return out


def in_call(cmd: Command) -> Optional[Call]:
    h = _head(cmd)
    while isinstance(h, At):
        h = _head(h.cmd)
    return h if isinstance(h, Call) and h.running is not None else None


def walk(cmd) -> Iterable:
    yield cmd
    if isinstance(cmd, Seq):
        yield from walk(cmd.first)
        yield from walk(cmd.second)
    elif isinstance(cmd, At):
        yield from walk(cmd.cmd)
    elif isinstance(cmd, If):
        yield from walk(cmd.then)
        yield from walk(cmd.els)
    elif isinstance(cmd, (While, DoUntil, UntilCheck)):
        yield from walk(cmd.body)
    elif isinstance(cmd, Call):
        if cmd.running is not None:
            yield from walk(cmd.running)


def labels_of(cmd: Command) -> list[int]:
    return [c.label for c in walk(cmd) if isinstance(c, At)]


def _expr_regs(e) -> Iterable[str]:
    if isinstance(e, Reg):
        yield e.name
    elif isinstance(e, Bin):
        yield from _expr_regs(e.left)
        yield from _expr_regs(e.right)
    elif isinstance(e, Un):
        yield from _expr_regs(e.arg)
    elif isinstance(e, Fn):
        for a in e.args:
            yield from _expr_regs(a)


def registers_of(cmd: Command) -> set[str]:
    regs: set[str] = set()
    for c in walk(cmd):
        for attr in ("reg", "target", "vreg"):
            r = getattr(c, attr, None)
            if isinstance(r, str):
                regs.add(r)
        for attr in ("expr", "cond", "expect", "new", "arg"):
            e = getattr(c, attr, None)
            if e is not None:
                regs.update(_expr_regs(e))
        loc = getattr(c, "loc", None)
        if isinstance(loc, Deref):
            regs.update(_expr_regs(loc.addr))
    return regs


def map_commands(cmd, f):
    """Rebuild ``cmd`` bottom-up, applying ``f`` to every node."""
    if isinstance(cmd, Seq):
        cmd = Seq(map_commands(cmd.first, f), map_commands(cmd.second, f))
    elif isinstance(cmd, At):
        cmd = At(cmd.label, map_commands(cmd.cmd, f), cmd.started)
    elif isinstance(cmd, If):
        cmd = If(cmd.cond, map_commands(cmd.then, f), map_commands(cmd.els, f))
    elif isinstance(cmd, While):
        cmd = While(cmd.cond, map_commands(cmd.body, f), cmd.fuel)
    elif isinstance(cmd, DoUntil):
        cmd = DoUntil(map_commands(cmd.body, f), cmd.cond, cmd.fuel)
    return f(cmd)


def with_fuel(cmd, n: int):
    def f(c):
        if isinstance(c, While):
            return While(c.cond, c.body, n)
        if isinstance(c, DoUntil):
            return DoUntil(c.body, c.cond, n)
        if isinstance(c, Call) and c.impl is not None:
            return Call(c.obj, c.method, c.arg, c.mode, c.target, c.vreg, with_fuel(c.impl, n),
                        c.params, c.running)
        return c
    return map_commands(cmd, f)
