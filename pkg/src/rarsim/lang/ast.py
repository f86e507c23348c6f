"""Program syntax: expressions, commands and whole-program specs.

Commands are immutable; the semantics rewrites them into residual commands.
Loops carry ``fuel`` (remaining iterations); ``None`` means not yet bounded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional, Union

from ..core import Mode, Value

# --------------------------------------------------------------------------
# expressions


@dataclass(frozen=True)
class Const:
    value: Value


@dataclass(frozen=True)
class Reg:
    name: str


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Un:
    op: str
    arg: "Expr"


@dataclass(frozen=True)
class Fn:
    name: str
    args: tuple["Expr", ...]


Expr = Union[Const, Reg, Bin, Un, Fn]


@dataclass(frozen=True)
class Var:
    """A named global location."""

    name: str


@dataclass(frozen=True)
class Deref:
    """An address computed at run time: ``[e]``."""

    addr: Expr


LocExpr = Union[Var, Deref]

# --------------------------------------------------------------------------
# commands


@dataclass(frozen=True)
class Skip:
    pass


SKIP = Skip()


@dataclass(frozen=True)
class Assign:
    reg: str
    expr: Expr


@dataclass(frozen=True)
class Write:
    loc: LocExpr
    expr: Expr
    mode: Mode = Mode.RLX


@dataclass(frozen=True)
class Read:
    reg: str
    loc: LocExpr
    mode: Mode = Mode.RLX


@dataclass(frozen=True)
class GhostUpd:
    name: str
    op: str  # "+=" or "-="
    expr: Expr


@dataclass(frozen=True)
class Cas:
    reg: str
    loc: LocExpr
    expect: Expr
    new: Expr
    mode: Mode = Mode.RA
    ghost: tuple[GhostUpd, ...] = ()


@dataclass(frozen=True)
class Fai:
    reg: str
    loc: LocExpr
    mode: Mode = Mode.RA


@dataclass(frozen=True)
class Alloc:
    """Ghost allocation of a fresh node (two consecutive addresses)."""

    reg: str


@dataclass(frozen=True)
class Seq:
    first: "Command"
    second: "Command"


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Command"
    els: "Command" = SKIP


@dataclass(frozen=True)
class While:
    cond: Expr
    body: "Command"
    fuel: Optional[int] = None


@dataclass(frozen=True)
class DoUntil:
    body: "Command"
    cond: Expr
    fuel: Optional[int] = None


@dataclass(frozen=True)
class UntilCheck:
    """Residual of a do-until loop after one iteration of its body."""

    body: "Command"
    cond: Expr
    fuel: Optional[int]


@dataclass(frozen=True)
class Call:
    """A method call on a declared object (the filled hole).

    ``target`` receives the return value; ``vreg`` receives a lock acquire's
    index (a ghost version register).  For implemented objects ``impl`` is the
    method body template and ``running`` the residual body once entered.
    """

    obj: str
    method: str
    arg: Optional[Expr] = None
    mode: Mode = Mode.RLX
    target: Optional[str] = None
    vreg: Optional[str] = None
    impl: Optional["Command"] = None
    params: tuple[str, ...] = ()
    running: Optional["Command"] = None


@dataclass(frozen=True)
class Return:
    expr: Expr


@dataclass(frozen=True)
class At:
    """A statement carrying control-point ``label``; ``started`` once it has stepped."""

    label: int
    cmd: "Command"
    started: bool = False


Command = Union[Skip, Assign, Write, Read, Cas, Fai, Alloc, Seq, If, While, DoUntil,
                UntilCheck, Call, Return, At]


def seq(a: "Command", b: "Command") -> "Command":
    if isinstance(a, Skip):
        return b
    if isinstance(b, Skip):
        return a
    return Seq(a, b)


def seq_all(cmds) -> "Command":
    out: Command = SKIP
    for c in reversed(list(cmds)):
        out = seq(c, out)
    return out


def flatten(cmd: "Command") -> list["Command"]:
    if isinstance(cmd, Seq):
        return flatten(cmd.first) + flatten(cmd.second)
    if isinstance(cmd, Skip):
        return []
    return [cmd]


# --------------------------------------------------------------------------
# program specs

OBJECT_KINDS = ("lock", "queue", "stack")
IMPL_KINDS = ("seqlock", "ticketlock", "treiber")


@dataclass(frozen=True)
class InitAssign:
    name: str
    value: Value
    mode: Mode = Mode.RLX


@dataclass(frozen=True)
class MethodDef:
    name: str
    params: tuple[str, ...]
    body: "Command"


@dataclass(frozen=True)
class ImplDef:
    """An object implementation: library globals plus method bodies."""

    name: str
    implements: str
    init: tuple[InitAssign, ...]
    methods: tuple[MethodDef, ...]

    def method(self, name: str) -> MethodDef:
        for m in self.methods:
            if m.name == name:
                return m
        raise KeyError(name)


@dataclass(frozen=True)
class Annotation:
    """An assertion at a control point; ``text`` is the source form."""

    thread: int
    label: Any  # int, or "exit"
    text: str
    line: int = 0


@dataclass(frozen=True)
class ProgramSpec:
    init: tuple[InitAssign, ...] = ()
    objects: tuple[tuple[str, str], ...] = ()  # (name, kind)
    threads: tuple[tuple[int, "Command"], ...] = ()
    annotations: tuple[Annotation, ...] = ()
    init_annotation: Optional[str] = None
    invariants: tuple[str, ...] = ()
    post: Optional[str] = None
    lets: tuple[tuple[str, str], ...] = ()
    impls: tuple[ImplDef, ...] = ()
    exits: tuple[tuple[int, int], ...] = ()  # thread -> exit label
    name: str = ""

    @property
    def globals(self) -> tuple[str, ...]:
        return tuple(i.name for i in self.init)

    def object_kind(self, name: str) -> str:
        return dict(self.objects)[name]

    def thread(self, t: int) -> "Command":
        return dict(self.threads)[t]

    def with_objects(self, kinds: dict[str, str]) -> "ProgramSpec":
        """Swap object kinds, e.g. ``{"l": "seqlock"}``."""
        objs = tuple((n, kinds.get(n, k)) for n, k in self.objects)
        return ProgramSpec(self.init, objs, self.threads, self.annotations, self.init_annotation,
                           self.invariants, self.post, self.lets, self.impls, self.exits, self.name)

    def replace(self, **kw) -> "ProgramSpec":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(kw)
        return ProgramSpec(**d)
