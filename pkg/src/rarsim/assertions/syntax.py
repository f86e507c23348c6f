"""Assertion syntax tree and parser for ``{| ... |}`` annotations.

Surface forms::

    pos(C, 1, d = 0)                  possible observation
    def(L, t, l.release(u))           definite observation
    cond(L->C, 2, s.pop(1) => d = 5)  conditional observation
    covered(L, l.glb)  covered(L, l.acquire(1))  cw(L, x, 3)  hidden(L, l.release(2))
    pc(1) in {2, 3, 4}   pc(2) = 5   rl in {1, 3}   r = bot   r@2 > 0
    ! a   a && b   a || b   a => b   exists v. a   true   false   Inv

The component tag may be omitted (``pos(t, x = u)``); it is then taken from
where the location lives, and is ``L`` for method targets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

from lark import Lark, Transformer
from lark.exceptions import LarkError, UnexpectedInput

from ..core import EMPTY, NULL, UsageError

# --------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Lit:
    value: object


@dataclass(frozen=True)
class Name:
    """A local register (optionally ``r@t``) or a bound variable."""

    name: str
    thread: Optional["Term"] = None


@dataclass(frozen=True)
class Arith:
    op: str
    left: "Term"
    right: "Term"


Term = Union[Lit, Name, Arith]

# --------------------------------------------------------------------------
# targets


@dataclass(frozen=True)
class Loc:
    """A location: a global name, ``obj.field``, or an address ``[n]``."""

    name: str


@dataclass(frozen=True)
class Method:
    """``obj.method(arg)``; ``arg`` is ``None`` when omitted (any value)."""

    obj: str
    method: str
    arg: Optional[Term] = None


Target = Union[Loc, Method]

# --------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Pos:
    comp: Optional[str]
    thread: Term
    target: Target
    value: Optional[Term]  # None for method targets, whose value is the argument


@dataclass(frozen=True)
class Def:
    comp: Optional[str]
    thread: Term
    target: Target
    value: Optional[Term]


@dataclass(frozen=True)
class Cond:
    src_comp: Optional[str]
    dst_comp: Optional[str]
    thread: Term
    src: Target
    src_value: Optional[Term]
    dst: Loc
    dst_value: Term


@dataclass(frozen=True)
class Covered:
    comp: Optional[str]
    target: Target


@dataclass(frozen=True)
class CoveredWrite:
    comp: Optional[str]
    loc: Loc
    value: Term


@dataclass(frozen=True)
class Hidden:
    comp: Optional[str]
    target: Method


@dataclass(frozen=True)
class PcIn:
    thread: Term
    labels: tuple


@dataclass(frozen=True)
class Compare:
    op: str
    left: Term
    right: Term


@dataclass(frozen=True)
class Member:
    term: Term
    options: tuple


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Ref:
    """A bare name: a ``let`` definition or a boolean local."""

    name: str


Formula = Union[Bool, Pos, Def, Cond, Covered, CoveredWrite, Hidden, PcIn, Compare, Member,
                Not, And, Or, Implies, Exists, Ref]

GRAMMAR = r"""
?start: formula

?formula: imp
?imp: disj | disj "=>" imp              -> implies
?disj: conj | disj "||" conj            -> or_
?conj: neg | conj "&&" neg              -> and_
?neg: atom | "!" neg                    -> not_

?atom: "true"                           -> true
     | "false"                          -> false
     | "(" formula ")"
     | "exists" NAME "." formula        -> exists
     | "pos" "(" [COMP ","] term "," obs ")"                  -> pos
     | "def" "(" [COMP ","] term "," obs ")"                  -> def_
     | "cond" "(" [COMP "->" COMP ","] term "," obs "=>" loc "=" term ")" -> cond
     | "covered" "(" [COMP ","] target ")"                    -> covered
     | "cw" "(" [COMP ","] loc "," term ")"                   -> cw
     | "hidden" "(" [COMP ","] method ")"                     -> hidden
     | "pc" "(" term ")" "in" "{" INT ("," INT)* "}"          -> pc_in
     | "pc" "(" term ")" "=" INT                              -> pc_eq
     | term CMP term                                          -> compare
     | term "in" "{" term ("," term)* "}"                     -> member
     | NAME                                                   -> ref

obs: method -> meth_obs
   | loc "=" term -> loc_obs
?target: method | loc
method: NAME "." NAME "(" [term] ")"
loc: NAME ("." NAME)?    -> loc_name
   | "[" INT "]"         -> loc_addr

?term: sum
?sum: prim | sum ADDOP prim -> arith
?prim: INT -> int_
     | "-" INT -> negint
     | "null" -> null
     | "empty" -> empty
     | "bot" -> bot
     | "true" -> tt
     | "false" -> ff
     | NAME "@" term -> at
     | NAME -> name
     | "(" term ")"

COMP: "C" | "L"
CMP: "!=" | "<=" | ">=" | "=" | "<" | ">"
ADDOP: "+" | "-"
NAME: /(?!(true|false|exists|pos|def|cond|covered|cw|hidden|pc|in|null|empty|bot|C|L)\b)[A-Za-z_][A-Za-z0-9_']*/
%import common.INT
%import common.WS
%ignore WS
"""

_parser = Lark(GRAMMAR, parser="earley", maybe_placeholders=True)


class AssertionParseError(UsageError):
    """Malformed assertion text."""


class _Build(Transformer):
    def true(self, c):
        return Bool(True)

    def false(self, c):
        return Bool(False)

    def implies(self, c):
        return Implies(c[0], c[1])

    def or_(self, c):
        return Or(c[0], c[1])

    def and_(self, c):
        return And(c[0], c[1])

    def not_(self, c):
        return Not(c[0])

    def exists(self, c):
        return Exists(str(c[0]), c[1])

    def _comp(self, c):
        return str(c) if c is not None else None

    def pos(self, c):
        comp, t, (target, value) = c
        return Pos(self._comp(comp), t, target, value)

    def def_(self, c):
        comp, t, (target, value) = c
        return Def(self._comp(comp), t, target, value)

    def cond(self, c):
        sc, dc, t, (src, sv), dst, dv = c
        return Cond(self._comp(sc), self._comp(dc), t, src, sv, dst, dv)

    def covered(self, c):
        return Covered(self._comp(c[0]), c[1])

    def cw(self, c):
        return CoveredWrite(self._comp(c[0]), c[1], c[2])

    def hidden(self, c):
        return Hidden(self._comp(c[0]), c[1])

    def pc_in(self, c):
        return PcIn(c[0], tuple(int(x) for x in c[1:]))

    def pc_eq(self, c):
        return PcIn(c[0], (int(c[1]),))

    def compare(self, c):
        return Compare(str(c[1]), c[0], c[2])

    def member(self, c):
        return Member(c[0], tuple(c[1:]))

    def ref(self, c):
        return Ref(str(c[0]))

    def meth_obs(self, c):
        return (c[0], None)

    def loc_obs(self, c):
        return (c[0], c[1])

    def method(self, c):
        return Method(str(c[0]), str(c[1]), c[2])

    def loc_name(self, c):
        return Loc(".".join(str(x) for x in c if x is not None))

    def loc_addr(self, c):
        return Loc(f"[{int(c[0])}]")

    def arith(self, c):
        return Arith(str(c[1]), c[0], c[2])

    def int_(self, c):
        return Lit(int(c[0]))

    def negint(self, c):
        return Lit(-int(c[0]))

    def null(self, c):
        return Lit(NULL)

    def empty(self, c):
        return Lit(EMPTY)

    def bot(self, c):
        return Lit(None)

    def tt(self, c):
        return Lit(True)

    def ff(self, c):
        return Lit(False)

    def at(self, c):
        return Name(str(c[0]), c[1])

    def name(self, c):
        return Name(str(c[0]))


@lru_cache(maxsize=None)
def parse_assertion(text: str) -> Formula:
    try:
        tree = _parser.parse(text)
    except UnexpectedInput as exc:
        where = f"column {exc.column}" if exc.column > 0 else "end of input"
        raise AssertionParseError(f"bad assertion {text!r} at {where}") from None
    except LarkError as exc:
        raise AssertionParseError(f"bad assertion {text!r}: {exc}") from None
    try:
        return _Build().transform(tree)
    except LarkError as exc:
        raise AssertionParseError(f"bad assertion {text!r}: {getattr(exc, 'orig_exc', exc)}") from None
