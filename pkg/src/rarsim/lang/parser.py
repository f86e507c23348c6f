"""Litmus text format parser.

Example::

    init { d := 0; }
    object s : stack;
    thread 1 {
      {| def(C, 1, d = 0) |}
      1: d := 5;
      2: s.push^R(1);
    }
    thread 2 {
      3: do r1 := s.pop^A(); until (r1 = 1);
      4: r2 <- d;
    }
    post {| r2 = 5 |}

Statements without an explicit ``N:`` label are labelled with their source
line.  A trailing ``N:`` in a thread names its exit point, and annotations
after the last statement attach there.
"""

from __future__ import annotations

from typing import Any, Optional

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import LarkError, UnexpectedInput

from ..core import EMPTY, NULL, Mode, UsageError
from .ast import (
    OBJECT_KINDS, IMPL_KINDS, SKIP, Alloc, Annotation, Assign, At, Bin, Call, Cas, Const,
    Deref, DoUntil, Fai, Fn, GhostUpd, If, ImplDef, InitAssign, MethodDef, ProgramSpec, Read,
    Reg, Return, Un, Var, While, Write, seq_all,
)


class ParseError(UsageError):
    def __init__(self, msg: str, line: int = 0, column: int = 0):
        super().__init__(f"{msg} (line {line}, column {column})" if line else msg)
        self.line = line
        self.column = column


GRAMMAR = r"""
start: item*

?item: init_block | object_decl | thread_decl | post_decl | inv_decl | let_decl | impl_decl

init_block: "init" "{" init_stmt* "}" ANNOT?
init_stmt: NAME ":=" [mode] expr ";"
object_decl: "object" NAME ":" NAME ";"
thread_decl: "thread" INT "{" body "}"
post_decl: "post" ANNOT
inv_decl: "invariant" ANNOT
let_decl: "let" NAME "=" ANNOT
impl_decl: "impl" NAME ":" NAME "{" impl_init? method_def* "}"
impl_init: "init" "{" init_stmt* "}"
method_def: "method" NAME "(" params ")" "{" body "}"
params: [NAME ("," NAME)*]

body: body_item*
?body_item: ANNOT -> annot
          | LABEL -> label
          | stmt

block: "{" body "}"

?stmt: simple ";"
     | "if" "(" expr ")" block ("else" block)?  -> if_stmt
     | "while" "(" expr ")" block              -> while_stmt
     | "do" dobody "until" "(" expr ")" ";"    -> do_stmt

?dobody: block | simple ";" -> single

?simple: NAME ":=" [mode] expr                          -> assign
       | "[" expr "]" ":=" [mode] expr                  -> write_deref
       | NAME "<-" [mode] loc                           -> read
       | NAME ":=" "CAS" [mode] "(" loc "," expr "," expr ")" [ghost] -> cas
       | NAME ":=" "FAI" [mode] "(" loc ")"             -> fai
       | NAME ":=" "alloc" "(" ")"                     -> alloc
       | NAME ":=" NAME "." NAME [mode] "(" [expr] ")"  -> call_assign
       | NAME "." NAME [mode] "(" [expr] ")"            -> call_stmt
       | "skip"                                        -> skip
       | "return" expr                                 -> ret

ghost: "ghost" "{" (NAME GOP expr ";")* "}"
GOP: "+=" | "-="

?loc: NAME -> loc_var
    | "[" expr "]" -> loc_deref

mode: "^" MODE
MODE: "RA" | "R" | "A"

?expr: or_e
?or_e: and_e | or_e "||" and_e -> or_
?and_e: not_e | and_e "&&" not_e -> and_
?not_e: cmp | "!" not_e -> not_
?cmp: sum | sum CMPOP sum -> cmp_
CMPOP: "!=" | "<=" | ">=" | "=" | "<" | ">"
?sum: prod | sum ADDOP prod -> bin_
ADDOP: "+" | "-"
?prod: atom | prod MULOP atom -> bin_
MULOP: "*" | "/" | "%"
?atom: INT -> int_
     | "-" atom -> neg
     | "null" -> null
     | "empty" -> empty
     | "bot" -> bot
     | "true" -> true
     | "false" -> false
     | NAME "(" [expr ("," expr)*] ")" -> fn
     | NAME -> reg
     | "(" expr ")"

LABEL: /\d+[ \t]*:(?!=)/
ANNOT: /\{\|(.|\n)*?\|\}/
NAME: /[A-Za-z_][A-Za-z0-9_]*/
COMMENT: /#[^\n]*/
%import common.INT
%import common.WS
%ignore WS
%ignore COMMENT
"""

_KEYWORDS = {"init", "object", "thread", "post", "invariant", "let", "impl", "method", "if",
             "else", "while", "do", "until", "skip", "return", "CAS", "FAI", "alloc", "ghost",
             "null", "empty", "bot", "true", "false"}

_parser = Lark(GRAMMAR, parser="lalr", propagate_positions=True, maybe_placeholders=True)


def _mode(m) -> Mode:
    return Mode(str(m.children[0])) if m is not None else Mode.RLX


class _Line:
    """A statement tagged with its source line (labels are resolved later)."""

    def __init__(self, cmd, line: int):
        self.cmd = cmd
        self.line = line


class _Build(Transformer):
    # expressions ---------------------------------------------------------
    def int_(self, c):
        return Const(int(c[0]))

    def neg(self, c):
        a = c[0]
        return Const(-a.value) if isinstance(a, Const) and isinstance(a.value, int) else Un("-", a)

    def null(self, c):
        return Const(NULL)

    def empty(self, c):
        return Const(EMPTY)

    def bot(self, c):
        return Const(None)

    def true(self, c):
        return Const(True)

    def false(self, c):
        return Const(False)

    def reg(self, c):
        return Reg(str(c[0]))

    def fn(self, c):
        return Fn(str(c[0]), tuple(a for a in c[1:] if a is not None))

    def bin_(self, c):
        return Bin(str(c[1]), c[0], c[2])

    cmp_ = bin_

    def or_(self, c):
        return Bin("||", c[0], c[1])

    def and_(self, c):
        return Bin("&&", c[0], c[1])

    def not_(self, c):
        return Un("!", c[0])

    def loc_var(self, c):
        return Var(str(c[0]))

    def loc_deref(self, c):
        return Deref(c[0])

    # statements ------------------------------------------------------------
    @v_args(meta=True)
    def assign(self, meta, c):
        name, mode, e = c
        return _Line(("assign", str(name), _mode(mode), e), meta.line)

    @v_args(meta=True)
    def write_deref(self, meta, c):
        a, mode, e = c
        return _Line(Write(Deref(a), e, _mode(mode)), meta.line)

    @v_args(meta=True)
    def read(self, meta, c):
        r, mode, loc = c
        return _Line(Read(str(r), loc, _mode(mode)), meta.line)

    @v_args(meta=True)
    def cas(self, meta, c):
        r, mode, loc, u, v, g = c
        m = _mode(mode) if mode is not None else Mode.RA
        if m == Mode.A:
            raise ParseError("CAS has no acquire-only form", meta.line, meta.column)
        return _Line(Cas(str(r), loc, u, v, m, tuple(g or ())), meta.line)

    def ghost(self, c):
        return [GhostUpd(str(c[i]), str(c[i + 1]), c[i + 2]) for i in range(0, len(c), 3)]

    @v_args(meta=True)
    def fai(self, meta, c):
        r, mode, loc = c
        m = _mode(mode) if mode is not None else Mode.RA
        if m == Mode.A:
            raise ParseError("FAI has no acquire-only form", meta.line, meta.column)
        return _Line(Fai(str(r), loc, m), meta.line)

    @v_args(meta=True)
    def alloc(self, meta, c):
        return _Line(Alloc(str(c[0])), meta.line)

    @v_args(meta=True)
    def call_assign(self, meta, c):
        r, obj, meth, mode, arg = c
        return _Line(Call(str(obj), str(meth), arg, _mode(mode), target=str(r)), meta.line)

    @v_args(meta=True)
    def call_stmt(self, meta, c):
        obj, meth, mode, arg = c
        return _Line(Call(str(obj), str(meth), arg, _mode(mode)), meta.line)

    @v_args(meta=True)
    def skip(self, meta, c):
        return _Line(SKIP, meta.line)

    @v_args(meta=True)
    def ret(self, meta, c):
        return _Line(Return(c[0]), meta.line)

    def single(self, c):
        return ("single", c[0])

    def block(self, c):
        return c[0]

    def body(self, c):
        return list(c)

    def annot(self, c):
        return c[0]

    def label(self, c):
        return c[0]

    @v_args(meta=True)
    def if_stmt(self, meta, c):
        cond, then, els = c[0], c[1], c[2] if len(c) > 2 else None
        return _Line(("if", cond, then, els or []), meta.line)

    @v_args(meta=True)
    def while_stmt(self, meta, c):
        return _Line(("while", c[0], c[1]), meta.line)

    @v_args(meta=True)
    def do_stmt(self, meta, c):
        return _Line(("do", c[0], c[1]), meta.line)

    def params(self, c):
        return tuple(str(p) for p in c if p is not None)


def _annot_text(tok: Token) -> str:
    return str(tok)[2:-2].strip()


class _Resolver:
    """Turns raw bodies into commands: labels, annotations, global/local split."""

    def __init__(self, globals_: set[str], objects: dict[str, str]):
        self.globals = globals_
        self.objects = objects

    def body(self, items, thread: Optional[int], annots: list, exit_info: dict):
        cmds = []
        pending: list[Token] = []
        label: Optional[int] = None
        label_tok: Optional[Token] = None
        for it in items:
            if isinstance(it, Token) and it.type == "ANNOT":
                pending.append(it)
            elif isinstance(it, Token) and it.type == "LABEL":
                if label is not None:
                    raise ParseError("two labels for one statement", it.line, it.column)
                label = int(str(it).rstrip(": \t"))
                label_tok = it
            else:
                cmd = self.stmt(it, thread, annots, exit_info)
                lab = label if label is not None else it.line
                for a in pending:
                    if thread is None:
                        raise ParseError("annotations are only allowed in threads", a.line, a.column)
                    annots.append(Annotation(thread, lab, _annot_text(a), a.line))
                pending = []
                label = None
                cmds.append(At(lab, cmd))
        if label is not None or pending:
            if exit_info.get("nested"):
                tok = pending[0] if pending else label_tok
                raise ParseError("annotation on nonexistent point", tok.line, tok.column)
            if label is not None:
                exit_info["label"] = label
            for a in pending:
                annots.append(Annotation(thread, "exit", _annot_text(a), a.line))
        return seq_all(cmds)

    def nested(self, items, thread, annots):
        return self.body(items, thread, annots, {"nested": True})

    def stmt(self, ln: _Line, thread, annots, exit_info):
        c = ln.cmd
        if isinstance(c, tuple):
            tag = c[0]
            if tag == "assign":
                _, name, mode, e = c
                if name in self.globals:
                    return Write(Var(name), e, mode)
                if mode != Mode.RLX:
                    raise ParseError(f"sync annotation on local assignment to {name}", ln.line)
                if name in self.objects:
                    raise ParseError(f"cannot assign to object {name}", ln.line)
                return Assign(name, e)
            if tag == "if":
                return If(c[1], self.nested(c[2], thread, annots), self.nested(c[3], thread, annots))
            if tag == "while":
                return While(c[1], self.nested(c[2], thread, annots))
            if tag == "do":
                body = c[1]
                if isinstance(body, tuple):
                    # a single-statement body shares the loop's control point
                    body = self.stmt(body[1], thread, annots, exit_info)
                else:
                    body = self.nested(body, thread, annots)
                return DoUntil(body, c[2])
        if isinstance(c, Call):
            if c.obj not in self.objects:
                raise ParseError(f"call on undeclared object {c.obj!r}", ln.line)
            if c.method in ("acquire", "acquire_rlx") and c.arg is not None:
                if not isinstance(c.arg, Reg):
                    raise ParseError("acquire takes an optional version register", ln.line)
                c = Call(c.obj, c.method, None, c.mode, c.target, c.arg.name)
            return c
        for attr in ("loc",):
            loc = getattr(c, attr, None)
            if isinstance(loc, Var) and loc.name not in self.globals:
                raise ParseError(f"unknown global {loc.name!r}", ln.line)
        return c


def _init_assign(node) -> InitAssign:
    name, mode, e = node.children
    v = _const(e)
    return InitAssign(str(name), v, _mode(mode))


def _const(e):
    if isinstance(e, Const):
        return e.value
    raise ParseError("initial values must be constants")


def parse_program(text: str, name: str = "") -> ProgramSpec:
    """Parse litmus text into a :class:`ProgramSpec`."""
    try:
        tree = _parser.parse(text)
    except UnexpectedInput as exc:
        raise ParseError(f"syntax error near {exc.get_context(text).strip()!r}",
                         exc.line, exc.column) from None
    except LarkError as exc:
        raise ParseError(str(exc)) from None
    try:
        tree = _Build().transform(tree)
    except LarkError as exc:
        inner = getattr(exc, "orig_exc", exc)
        if isinstance(inner, ParseError):
            raise inner from None
        raise ParseError(str(inner)) from None

    init: list[InitAssign] = []
    init_annot = None
    objects: list[tuple[str, str]] = []
    raw_threads = []
    post = None
    invariants = []
    lets = []
    impls = []
    raw_impls = []
    for it in tree.children:
        kind = it.data
        if kind == "init_block":
            if init or init_annot:
                raise ParseError("duplicate init block", it.meta.line, it.meta.column)
            for ch in it.children:
                if isinstance(ch, Token):
                    init_annot = _annot_text(ch)
                else:
                    init.append(_init_assign(ch))
        elif kind == "object_decl":
            oname, okind = str(it.children[0]), str(it.children[1])
            objects.append((oname, okind))
        elif kind == "thread_decl":
            raw_threads.append((int(it.children[0]), it.children[1], it.meta.line))
        elif kind == "post_decl":
            post = _annot_text(it.children[0])
        elif kind == "inv_decl":
            invariants.append(_annot_text(it.children[0]))
        elif kind == "let_decl":
            lets.append((str(it.children[0]), _annot_text(it.children[1])))
        elif kind == "impl_decl":
            raw_impls.append(it)

    seen = set()
    for i in init:
        if i.name in seen:
            raise ParseError(f"duplicate initialisation of {i.name!r}")
        seen.add(i.name)
    onames = [o for o, _ in objects]
    if len(set(onames)) != len(onames):
        raise ParseError("duplicate object declaration")
    impl_names = {str(r.children[0]) for r in raw_impls}
    for o, k in objects:
        if k not in OBJECT_KINDS + IMPL_KINDS and k not in impl_names and k not in _extra_kinds():
            raise ParseError(f"unknown object kind {k!r} for {o!r}")
        if o in seen:
            raise ParseError(f"object {o!r} clashes with a global")

    for r in raw_impls:
        iname, implements = str(r.children[0]), str(r.children[1])
        rest = r.children[2:]
        iinit: list[InitAssign] = []
        methods = []
        for ch in rest:
            if ch is None:
                continue
            if ch.data == "impl_init":
                iinit = [_init_assign(x) for x in ch.children]
            else:
                mname, params, body = ch.children
                res = _Resolver({i.name for i in iinit}, {})
                methods.append(MethodDef(str(mname), params or (), res.nested(body, None, [])))
        impls.append(ImplDef(iname, implements, tuple(iinit), tuple(methods)))

    res = _Resolver(seen, dict(objects))
    annots: list[Annotation] = []
    threads = []
    exits = []
    tids = set()
    for tid, body, line in raw_threads:
        if tid in tids:
            raise ParseError(f"duplicate thread {tid}", line)
        tids.add(tid)
        info: dict[str, Any] = {}
        cmd = res.body(body, tid, annots, info)
        if "label" in info:
            exits.append((tid, info["label"]))
        threads.append((tid, cmd))
    threads.sort(key=lambda p: p[0])
    spec = ProgramSpec(tuple(init), tuple(objects), tuple(threads), tuple(annots), init_annot,
                       tuple(invariants), post, tuple(lets), tuple(impls), tuple(sorted(exits)), name)
    _check_labels(spec)
    return spec


def _extra_kinds() -> tuple[str, ...]:
    from ..objects import known_kinds
    return known_kinds()


def _check_labels(spec: ProgramSpec) -> None:
    from .semantics import labels_of
    exits = dict(spec.exits)
    for a in spec.annotations:
        if a.label == "exit":
            continue
        labs = labels_of(spec.thread(a.thread))
        if a.label not in labs:
            raise ParseError(f"annotation on nonexistent point {a.thread}:{a.label}", a.line)
    for t, cmd in spec.threads:
        labs = labels_of(cmd)
        if len(labs) != len(set(labs)):
            raise ParseError(f"duplicate control-point label in thread {t}")
        if t in exits and exits[t] in labs:
            raise ParseError(f"exit label {exits[t]} of thread {t} is already used")
