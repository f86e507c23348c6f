"""Printer producing litmus text that parses back to the same program."""

from __future__ import annotations

from ..core import Mode, show_value
from .ast import (
    Alloc, Assign, At, Bin, Call, Cas, Const, Deref, DoUntil, Fai, Fn, If, ImplDef, InitAssign,
    ProgramSpec, Read, Reg, Return, Seq, Skip, Un, UntilCheck, Var, While, Write, flatten,
)


def _m(mode: Mode) -> str:
    return f"^{mode.value}" if mode.value else ""


def expr(e) -> str:
    if isinstance(e, Const):
        return show_value(e.value)
    if isinstance(e, Reg):
        return e.name
    if isinstance(e, Bin):
        return f"({expr(e.left)} {e.op} {expr(e.right)})"
    if isinstance(e, Un):
        return f"{e.op}({expr(e.arg)})"
    if isinstance(e, Fn):
        return f"{e.name}({', '.join(expr(a) for a in e.args)})"
    raise TypeError(f"not an expression: {e!r}")


def _cond(e) -> str:
    text = expr(e)
    return text if isinstance(e, Bin) else f"({text})"


def loc(x) -> str:
    if isinstance(x, Var):
        return x.name
    if isinstance(x, Deref):
        return f"[{expr(x.addr)}]"
    raise TypeError(f"not a location: {x!r}")


def simple(c) -> str:
    if isinstance(c, Skip):
        return "skip"
    if isinstance(c, Assign):
        return f"{c.reg} := {expr(c.expr)}"
    if isinstance(c, Write):
        return f"{loc(c.loc)} :={_m(c.mode)} {expr(c.expr)}"
    if isinstance(c, Read):
        return f"{c.reg} <-{_m(c.mode)} {loc(c.loc)}"
    if isinstance(c, Cas):
        g = ""
        if c.ghost:
            g = " ghost { " + " ".join(f"{u.name} {u.op} {expr(u.expr)};" for u in c.ghost) + " }"
        return f"{c.reg} := CAS^{c.mode.value or 'RA'}({loc(c.loc)}, {expr(c.expect)}, {expr(c.new)}){g}"
    if isinstance(c, Fai):
        return f"{c.reg} := FAI^{c.mode.value or 'RA'}({loc(c.loc)})"
    if isinstance(c, Alloc):
        return f"{c.reg} := alloc()"
    if isinstance(c, Return):
        return f"return {expr(c.expr)}"
    if isinstance(c, Call):
        arg = c.vreg if c.vreg is not None else (expr(c.arg) if c.arg is not None else "")
        lhs = f"{c.target} := " if c.target is not None else ""
        return f"{lhs}{c.obj}.{c.method}{_m(c.mode)}({arg})"
    raise TypeError(f"not a simple statement: {c!r}")


class _Printer:
    def __init__(self, annots: dict):
        self.annots = annots
        self.lines: list[str] = []

    def emit(self, depth: int, text: str) -> None:
        self.lines.append("  " * depth + text)

    def body(self, cmd, depth: int) -> None:
        for c in flatten(cmd):
            self.stmt(c, depth)

    def stmt(self, c, depth: int) -> None:
        label = None
        if isinstance(c, At):
            label, c = c.label, c.cmd
            for text in self.annots.get(label, ()):
                self.emit(depth, f"{{| {text} |}}")
        head = f"{label}: " if label is not None else ""
        if isinstance(c, If):
            self.emit(depth, f"{head}if {_cond(c.cond)} {{")
            self.body(c.then, depth + 1)
            if isinstance(c.els, Skip):
                self.emit(depth, "}")
            else:
                self.emit(depth, "} else {")
                self.body(c.els, depth + 1)
                self.emit(depth, "}")
        elif isinstance(c, While):
            self.emit(depth, f"{head}while {_cond(c.cond)} {{")
            self.body(c.body, depth + 1)
            self.emit(depth, "}")
        elif isinstance(c, (DoUntil, UntilCheck)) and not isinstance(c.body, (At, Seq)):
            self.emit(depth, f"{head}do {simple(c.body)}; until {_cond(c.cond)};")
        elif isinstance(c, (DoUntil, UntilCheck)):
            self.emit(depth, f"{head}do {{")
            self.body(c.body, depth + 1)
            self.emit(depth, f"}} until {_cond(c.cond)};")
        else:
            self.emit(depth, f"{head}{simple(c)};")


def _init_lines(init: tuple[InitAssign, ...]) -> str:
    return " ".join(f"{i.name} :={_m(i.mode)} {show_value(i.value)};" for i in init)


def _impl(impl: ImplDef) -> list[str]:
    out = [f"impl {impl.name} : {impl.implements} {{"]
    if impl.init:
        out.append(f"  init {{ {_init_lines(impl.init)} }}")
    for m in impl.methods:
        out.append(f"  method {m.name}({', '.join(m.params)}) {{")
        p = _Printer({})
        p.body(m.body, 2)
        out.extend(p.lines)
        out.append("  }")
    out.append("}")
    return out


def pretty(spec: ProgramSpec) -> str:
    """Render ``spec`` as litmus text with every label and mode explicit."""
    out: list[str] = []
    for impl in spec.impls:
        out.extend(_impl(impl))
    init = f"init {{ {_init_lines(spec.init)} }}"
    if spec.init_annotation is not None:
        init += f" {{| {spec.init_annotation} |}}"
    out.append(init)
    for name, kind in spec.objects:
        out.append(f"object {name} : {kind};")
    for name, text in spec.lets:
        out.append(f"let {name} = {{| {text} |}}")
    for text in spec.invariants:
        out.append(f"invariant {{| {text} |}}")
    exits = dict(spec.exits)
    for t, cmd in spec.threads:
        annots: dict = {}
        for a in spec.annotations:
            if a.thread == t:
                annots.setdefault(a.label, []).append(a.text)
        out.append(f"thread {t} {{")
        p = _Printer(annots)
        p.body(cmd, 1)
        out.extend(p.lines)
        for text in annots.get("exit", ()):
            out.append(f"  {{| {text} |}}")
        if t in exits:
            out.append(f"  {exits[t]}:")
        out.append("}")
    if spec.post is not None:
        out.append(f"post {{| {spec.post} |}}")
    return "\n".join(out) + "\n"
