"""Memory transitions for reads, writes and updates, plus initial configurations.

``mem_step(exec, ctx, t, template)`` runs one action of thread ``t`` against
the executing component ``exec`` with ``ctx`` as the other component.  It
returns every successor as ``(exec', ctx', resolved_action)``; an empty list
means the action is disabled.
"""

from __future__ import annotations

from typing import Optional

from .core import (
    Action, ComponentState, Configuration, Mode, TOp, UsageError, View, build_state, canonicalize,
    fresh_after, is_releasing, make_view, merge_views, observable, union_views, view_set,
    wrval,
)
from .lang.ast import Call, Command, ProgramSpec, Var, Deref, Reg, Write, Read, Cas, \
    Fai, Alloc, Assign, Return, At, Seq, If, While, DoUntil, Bin, Un, Fn, GhostUpd, SKIP, seq
from .lang.semantics import INC, addr_loc, map_commands, registers_of, value_matches, walk, with_fuel


# --------------------------------------------------------------------------
# state surgery


def update_state(state: ComponentState, t: Optional[int] = None, view: Optional[View] = None,
                 op: Optional[TOp] = None, mview: Optional[View] = None,
                 covered: Optional[tuple] = None, matched: Optional[tuple] = None) -> ComponentState:
    """Functional update of one component state."""
    ops = state.ops
    if op is not None:
        x = op.action.loc
        new = []
        for loc, line in ops:
            if loc == x:
                line = tuple(sorted(line + (op,), key=lambda o: o.ts))
            new.append((loc, line))
        ops = tuple(new)
    tview = state.tview
    if view is not None:
        tview = tuple((u, view if u == t else v) for u, v in tview)
    mv = state.mview
    if mview is not None:
        mv = tuple(sorted(mv + ((op.ref, mview),), key=lambda kv: kv[0]))
    cvd = state.cvd | {covered} if covered is not None else state.cvd
    m = state.matched | {matched} if matched is not None else state.matched
    return ComponentState(ops=ops, tview=tview, mview=mv, cvd=cvd, matched=m)


def _sync_views(exec_: ComponentState, ctx: ComponentState, t: int, base: View,
                src: TOp, sync: bool) -> tuple[View, View]:
    """Executing and context views after (optionally) synchronising with ``src``."""
    ctview = ctx.view_of(t)
    if not sync:
        return base, ctview
    mv = exec_.mview_of(src) or ()
    return merge_views(base, mv), merge_views(ctview, mv)


# --------------------------------------------------------------------------
# memory transitions


def mem_step(exec_: ComponentState, ctx: ComponentState, t: int,
             template: Action) -> list[tuple[ComponentState, ComponentState, Action]]:
    x = template.loc
    if x not in exec_.timelines:
        raise UsageError(f"unknown location {x!r}")
    kind = template.kind
    out = []
    line = exec_.timeline(x)
    obs = observable(exec_, t, x)
    tv = exec_.view_of(t)
    if kind == "rd":
        for w in obs:
            v = wrval(w.action)
            if not value_matches(template.rv, v):
                continue
            sync = is_releasing(w.action) and template.mode.acquiring
            if sync:
                view, ctview = _sync_views(exec_, ctx, t, tv, w, True)
            else:
                view, ctview = view_set(tv, x, w.ts), ctx.view_of(t)
            a = Action("rd", x, rv=v, mode=template.mode, thread=t)
            e2 = update_state(exec_, t, view)
            c2 = update_state(ctx, t, ctview) if ctview != ctx.view_of(t) else ctx
            out.append((e2, c2, a))
        return out
    if kind == "wr":
        a = Action("wr", x, wv=template.wv, mode=template.mode, thread=t)
        for w in obs:
            if exec_.is_covered(w):
                continue
            q2 = fresh_after(line, w.ts)
            op = TOp(a, q2)
            view = view_set(tv, x, q2)
            mv = union_views(view, ctx.view_of(t))
            out.append((update_state(exec_, t, view, op, mv), ctx, a))
        return out
    if kind == "upd":
        for w in obs:
            if exec_.is_covered(w):
                continue
            u = wrval(w.action)
            if not value_matches(template.rv, u):
                continue
            if template.wv is INC:
                if isinstance(u, bool) or not isinstance(u, int):
                    continue
                nv = u + 1
            else:
                nv = template.wv
            a = Action("upd", x, rv=u, wv=nv, mode=template.mode, thread=t)
            q2 = fresh_after(line, w.ts)
            op = TOp(a, q2)
            base = view_set(tv, x, q2)
            sync = template.mode == Mode.RA and is_releasing(w.action)
            view, ctview = _sync_views(exec_, ctx, t, base, w, sync)
            mv = union_views(view, ctview)
            e2 = update_state(exec_, t, view, op, mv, covered=w.ref)
            c2 = update_state(ctx, t, ctview) if ctview != ctx.view_of(t) else ctx
            out.append((e2, c2, a))
        return out
    raise UsageError(f"not a memory action: {template}")


# --------------------------------------------------------------------------
# initialisation


def _qualify_expr(e, regs: set[str], prefix: str):
    if isinstance(e, Reg):
        return Reg(prefix + e.name) if e.name in regs else e
    if isinstance(e, Bin):
        return Bin(e.op, _qualify_expr(e.left, regs, prefix), _qualify_expr(e.right, regs, prefix))
    if isinstance(e, Un):
        return Un(e.op, _qualify_expr(e.arg, regs, prefix))
    if isinstance(e, Fn):
        return Fn(e.name, tuple(_qualify_expr(a, regs, prefix) for a in e.args))
    return e


def _qualify(cmd: Command, prefix: str, globals_: set[str], params: tuple[str, ...]) -> Command:
    """Rename an implementation body's registers and globals into ``prefix`` namespace."""
    regs = registers_of(cmd) | set(params)

    def q(name):
        return prefix + name if name is not None and name in regs else name

    def qe(e):
        return _qualify_expr(e, regs, prefix) if e is not None else None

    def ql(loc):
        if isinstance(loc, Var):
            return Var(prefix + loc.name) if loc.name in globals_ else loc
        return Deref(qe(loc.addr))

    def f(c):
        if isinstance(c, Assign):
            return Assign(q(c.reg), qe(c.expr))
        if isinstance(c, Write):
            return Write(ql(c.loc), qe(c.expr), c.mode)
        if isinstance(c, Read):
            return Read(q(c.reg), ql(c.loc), c.mode)
        if isinstance(c, Cas):
            g = tuple(GhostUpd(x.name, x.op, qe(x.expr)) for x in c.ghost)
            return Cas(q(c.reg), ql(c.loc), qe(c.expect), qe(c.new), c.mode, g)
        if isinstance(c, Fai):
            return Fai(q(c.reg), ql(c.loc), c.mode)
        if isinstance(c, Alloc):
            return Alloc(q(c.reg))
        if isinstance(c, Return):
            return Return(qe(c.expr))
        if isinstance(c, If):
            return If(qe(c.cond), c.then, c.els)
        if isinstance(c, While):
            return While(qe(c.cond), c.body, c.fuel)
        if isinstance(c, DoUntil):
            return DoUntil(c.body, qe(c.cond), c.fuel)
        return c
    return map_commands(cmd, f)


def resolve_impl(spec: ProgramSpec, kind: str):
    for impl in spec.impls:
        if impl.name == kind:
            return impl
    from .impls import builtin_impl
    return builtin_impl(kind)


def is_abstract_kind(kind: str) -> bool:
    return kind in ("lock", "queue", "stack")


def _fill_calls(cmd: Command, spec: ProgramSpec) -> Command:
    kinds = dict(spec.objects)

    def f(c):
        if isinstance(c, Call) and c.impl is None and not is_abstract_kind(kinds[c.obj]):
            impl = resolve_impl(spec, kinds[c.obj])
            meth = "acquire" if c.method == "acquire_rlx" else c.method
            try:
                m = impl.method(meth)
            except KeyError:
                raise UsageError(f"{kinds[c.obj]} has no method {c.method}") from None
            prefix = c.obj + "."
            body = _qualify(m.body, prefix, {i.name for i in impl.init}, m.params)
            return Call(c.obj, c.method, c.arg, c.mode, c.target, c.vreg, body,
                        tuple(prefix + p for p in m.params))
        return c
    return map_commands(cmd, f)


def _alloc_sites(cmd: Command, bound: int, depth: int = 0) -> int:
    """Upper bound on executed ``alloc`` statements, with loops unrolled ``bound`` times."""
    if isinstance(cmd, Seq):
        return _alloc_sites(cmd.first, bound, depth) + _alloc_sites(cmd.second, bound, depth)
    if isinstance(cmd, At):
        return _alloc_sites(cmd.cmd, bound, depth)
    if isinstance(cmd, If):
        return max(_alloc_sites(cmd.then, bound, depth), _alloc_sites(cmd.els, bound, depth))
    if isinstance(cmd, (While, DoUntil)):
        return bound * _alloc_sites(cmd.body, bound, depth + 1)
    if isinstance(cmd, Call) and cmd.impl is not None:
        return _alloc_sites(cmd.impl, bound, depth)
    if isinstance(cmd, Alloc):
        return 1
    return 0


ADDRESS_BASE = 2  # first node address; 0 and 1 stay unused so null-ish values never alias


def init_configuration(spec: ProgramSpec, loop_bound: int = 3) -> Configuration:
    """Initial configuration: every location at its initial write, all views at timestamp 0."""
    tids = tuple(t for t, _ in spec.threads)
    programs = []
    for t, cmd in spec.threads:
        c = with_fuel(_fill_calls(cmd, spec), loop_bound)
        exit_label = dict(spec.exits).get(t)
        if exit_label is not None:
            c = seq(c, At(exit_label, SKIP))
        programs.append(c)

    client_ops = {i.name: [TOp(Action("wr", i.name, wv=i.value, mode=i.mode), 0)] for i in spec.init}
    lib_ops: dict[str, list[TOp]] = {}
    n_addr = 0
    for name, kind in spec.objects:
        if kind == "lock":
            lib_ops[name] = [TOp(Action("linit", name, index=0), 0)]
        elif kind == "queue":
            lib_ops[name] = [TOp(Action("qinit", name), 0)]
        elif kind == "stack":
            lib_ops[name] = [TOp(Action("sinit", name), 0)]
        else:
            impl = resolve_impl(spec, kind)
            for i in impl.init:
                x = f"{name}.{i.name}"
                lib_ops[x] = [TOp(Action("wr", x, wv=i.value, mode=i.mode), 0)]
    for c in programs:
        n_addr += _alloc_sites(c, loop_bound)
    for k in range(2 * n_addr):
        x = addr_loc(ADDRESS_BASE + k)
        lib_ops[x] = [TOp(Action("wr", x, wv=0), 0)]

    cview = make_view((x, 0) for x in client_ops)
    lview = make_view((x, 0) for x in lib_ops)
    init_mview = union_views(cview, lview)
    client = build_state(client_ops, {t: cview for t in tids},
                         {(x, 0): init_mview for x in client_ops})
    library = build_state(lib_ops, {t: lview for t in tids},
                          {(x, 0): init_mview for x in lib_ops})
    locals_ = []
    for c in programs:
        regs = {r for r in registers_of(c)} | {"rval"}
        for node in walk(c):
            if isinstance(node, Call) and node.params:
                regs.update(node.params)
            if isinstance(node, Call) and node.impl is not None:
                regs.update(registers_of(node.impl))
        locals_.append(tuple(sorted((r, None) for r in regs)))
    ghost = ()
    if n_addr:
        ghost = (("pushedAddr", frozenset()), ("usedAddr", frozenset()))
    cfg = Configuration(threads=tids, program=tuple(programs), locals=tuple(locals_),
                        client=client, library=library, ghost=ghost)
    return canonicalize(cfg)
