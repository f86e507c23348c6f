"""Hoare-rule schemas checked against explored corpora.

A rule ``{pre} stmt {post}`` is checked on every explored transition that
executes a statement matching ``stmt``.  The pattern binds some schema
variables (the executing thread, location, values); the remaining ones range
over finite domains drawn from the corpus.  An instance is *exercised* when
``pre`` holds in the source configuration; the rule fails if ``post`` is
false in the target configuration of some exercised instance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from ..core import EMPTY, INIT_KINDS, Configuration, value_key
from ..explorer import Bounds, EdgeLabel, ExplorationResult, explore
from ..lang.ast import Call, Cas, Fai, Read, Write
from ..lang.semantics import eval_expr
from .evaluate import Context, holds, value_domain
from .syntax import (
    And, Arith, Compare, Cond, Covered, CoveredWrite, Def, Exists, Hidden, Implies, Loc, Member,
    Method, Name, Not, Or, PcIn, Pos, Ref, parse_assertion,
)


@dataclass(frozen=True)
class Stmt:
    """Statement pattern.

    ``kind`` is one of write, read, cas, fai, acquire, release, lockop, push,
    pop.  The other fields name the schema variables the match binds;
    ``mode`` is ``"R"``/``"A"`` to require a releasing/acquiring statement,
    ``"rlx"`` to require a relaxed one, or ``None`` for any.
    """

    kind: str
    thread: str = "t"
    loc: Optional[str] = None
    value: Optional[str] = None
    expect: Optional[str] = None
    new: Optional[str] = None
    result: Optional[str] = None
    mode: Optional[str] = None


@dataclass(frozen=True)
class Rule:
    name: str
    pre: str
    stmt: Stmt
    post: str
    where: str = "true"
    counted: bool = True  # false for alternative readings reported alongside
    note: str = ""


@dataclass
class RuleResult:
    rule: Rule
    transitions: int = 0  # matching transitions inspected
    exercised: int = 0  # instances whose precondition held
    witness: Optional[dict] = None

    @property
    def status(self) -> str:
        if self.witness is not None:
            return "fail"
        return "pass" if self.exercised else "vacuous"


# --------------------------------------------------------------------------
# rule corpora


def _s(kind, **kw) -> Stmt:
    return Stmt(kind, **kw)


LOCK_RULES = [
    Rule("lock-1", "hidden(l.release(u))", _s("acquire", loc="l", value="v"), "v != u",
         note="version-inequality reading"),
    Rule("lock-1-alt", "hidden(l.release(u))", _s("acquire", loc="l", value="v"), "v > u + 1",
         counted=False, note="stricter postcondition, reported for comparison"),
    Rule("lock-2", "hidden(l.release(u))", _s("lockop", loc="l"), "hidden(l.release(u))"),
    Rule("lock-3", "def(t, l.release(u))", _s("acquire", loc="l", value="v"),
         "def(t, l.acquire(u + 1))"),
    Rule("lock-4", "def(t, x = u)", _s("lockop", thread="t2", loc="l"), "def(t, x = u)",
         where="t != t2"),
    Rule("lock-5", "cond(t, l.release(u) => x = n)", _s("acquire", loc="l", value="v"),
         "v = u + 1 => def(t, x = n)"),
    Rule("lock-6", "!pos(t2, l.release(u)) && def(t, x = v)", _s("release", loc="l", value="u"),
         "cond(t2, l.release(u) => x = v)", where="t != t2"),
]

MEMORY_RULES = [
    Rule("mem-1", "def(t, x = u)", _s("write", loc="x", value="v"), "def(t, x = v)",
         note="postcondition names the written value"),
    Rule("mem-1-alt", "def(t, x = u)", _s("write", loc="x", value="v"), "def(t, x = u)",
         counted=False, note="postcondition keeps the overwritten value, reported for comparison"),
    Rule("mem-2", "exists u. cw(x, u)", _s("cas", loc="x", mode="R"), "exists v. cw(x, v)"),
    Rule("mem-3", "cw(x, v)", _s("cas", loc="x", expect="u", new="u2", result="r", mode="R"),
         "r => def(t, x = u2)"),
    Rule("mem-4", "cond(t, x = a => y = b)", _s("read", loc="x", value="a", mode="A"),
         "def(t, y = b)"),
    Rule("mem-5", "def(t, x = m)", _s("cas", loc="x", result="r", mode="R"), "!r => def(t, x = m)"),
    Rule("mem-6", "!pos(t2, x = u) && def(t, y = v)",
         _s("cas", loc="x", new="u", result="r", mode="R"), "r => cond(t2, x = u => y = v)",
         where="t != t2 && x != y"),
    Rule("mem-7", "cond(t2, x = u => y = v)", _s("cas", loc="x", new="k", result="r", mode="R"),
         "r => cond(t2, x = u => y = v)", where="k != u && t != t2 && x != y"),
    Rule("mem-8", "def(t, y = v) && cw(x, m)",
         _s("cas", loc="x", expect="m", new="u", result="r", mode="R"),
         "r => cond(t, x = u => y = v)", where="x != y"),
    Rule("mem-9", "true", _s("read", loc="x", value="v"), "pos(t, x = v)"),
    Rule("mem-10", "cw(x, v)", _s("cas", loc="x", expect="v", new="v2", result="r", mode="R"),
         "r => cw(x, v2)"),
    Rule("mem-11", "cw(x, v)", _s("fai", loc="x"), "cw(x, v + 1)"),
    Rule("mem-12", "true", _s("cas", loc="x", new="v2", result="r", mode="R"), "r => pos(t, x = v2)"),
    Rule("mem-13", "!pos(t, x = u)", _s("cas", thread="t2", loc="y", mode="R"), "!pos(t, x = u)",
         where="x != y"),
    Rule("mem-14", "!pos(t, x = u)", _s("read", thread="t2", loc="y"), "!pos(t, x = u)"),
    Rule("mem-15", "cond(t, x = v => x = v)", _s("fai", thread="t2", loc="y"),
         "cond(t, x = v => x = v)", where="x != y"),
    Rule("mem-16", "cond(t, x = v => x = v)", _s("read", loc="x", value="v", mode="A"),
         "def(t, x = v)"),
    Rule("mem-17", "!pos(t, x = u) && def(t2, x = v)", _s("write", thread="t2", loc="x", value="u", mode="R"),
         "cond(t, x = u => x = u)", where="t != t2"),
    Rule("mem-18", "cond(t, x = u => x = u)", _s("write", thread="t2", loc="y", value="v"),
         "cond(t, x = u => x = u)", where="x != y"),
]

STACK_RULES = [
    Rule("stack-1", "def(t, s.pop(u))", _s("push", loc="s", value="v", mode="rlx"), "def(t, s.pop(v))"),
    Rule("stack-2", "def(t, s.pop(u))", _s("push", loc="s", value="v", mode="R"), "def(t, s.pop(v))"),
    Rule("stack-3", "def(t, s.pop(u))", _s("pop", loc="s", value="v"), "v = u"),
    Rule("stack-4", "!pos(t2, s.pop(u)) && def(t, y = v)", _s("push", loc="s", value="u", mode="R"),
         "cond(t2, s.pop(u) => y = v)", where="u != empty"),
    Rule("stack-5", "cond(t, s.pop(u) => y = v)", _s("pop", loc="s", value="u", mode="A"),
         "def(t, y = v)"),
    Rule("stack-6", "def(t, x = v)", _s("push", thread="t2", loc="s"), "def(t, x = v)"),
    Rule("stack-7", "def(t2, x = v)", _s("pop", loc="s"), "def(t2, x = v)"),
    Rule("stack-8", "!pos(t2, s.pop(u))", _s("write", loc="x"), "!pos(t2, s.pop(u))"),
    Rule("stack-9", "!pos(t2, s.pop(u))", _s("read", loc="x"), "!pos(t2, s.pop(u))"),
    Rule("stack-10", "!pos(t2, s.pop(u))", _s("pop", loc="s", value="v"), "!pos(t2, s.pop(u))",
         where="u != empty"),
    Rule("stack-11", "cond(t, s.pop(u) => y = v)", _s("pop", loc="s", value="z"),
         "cond(t, s.pop(u) => y = v)", where="u != z && u != empty && z != empty"),
    Rule("stack-12", "cond(t, s.pop(u) => y = v)", _s("pop", loc="s", value="z"),
         "cond(t, s.pop(u) => y = v)", where="u != z && u != empty"),
    Rule("stack-13", "!pos(t, s.pop(u))", _s("write", thread="t2", loc="x", value="z"),
         "cond(t, s.pop(u) => x = v)"),
]

RULESETS = {
    "lock": (LOCK_RULES, ("lock-client", "lock-rounds")),
    "memory": (MEMORY_RULES, ("cas-litmus", "fai-litmus", "seqlock-client", "ticketlock-client",
                              "treiber-client")),
    "stack": (STACK_RULES, ("mp-unsync", "mp-sync")),
}

# --------------------------------------------------------------------------
# schema variables


def _collect(f, out: dict, bound=frozenset()):
    """Classify free schema variables of a formula as thread/loc/obj/value."""

    def term(x, kind="value"):
        if isinstance(x, Name) and x.thread is None and x.name not in bound:
            out.setdefault(x.name, set()).add(kind)
        elif isinstance(x, Arith):
            term(x.left)
            term(x.right)

    def target(tg):
        if isinstance(tg, Loc):
            if not tg.name.startswith("["):
                out.setdefault(tg.name, set()).add("loc")
        elif isinstance(tg, Method):
            out.setdefault(tg.obj, set()).add("obj")
            if tg.arg is not None:
                term(tg.arg)

    if isinstance(f, (Not,)):
        _collect(f.arg, out, bound)
    elif isinstance(f, (And, Or, Implies)):
        _collect(f.left, out, bound)
        _collect(f.right, out, bound)
    elif isinstance(f, Exists):
        _collect(f.body, out, bound | {f.var})
    elif isinstance(f, (Pos, Def)):
        term(f.thread, "thread")
        target(f.target)
        if f.value is not None:
            term(f.value)
    elif isinstance(f, Cond):
        term(f.thread, "thread")
        target(f.src)
        if f.src_value is not None:
            term(f.src_value)
        target(f.dst)
        term(f.dst_value)
    elif isinstance(f, Covered):
        target(f.target)
    elif isinstance(f, CoveredWrite):
        target(f.loc)
        term(f.value)
    elif isinstance(f, Hidden):
        target(f.target)
    elif isinstance(f, PcIn):
        term(f.thread, "thread")
    elif isinstance(f, Compare):
        term(f.left)
        term(f.right)
    elif isinstance(f, Member):
        term(f.term)
        for o in f.options:
            term(o)
    elif isinstance(f, Ref):
        out.setdefault(f.name, set()).add("value")


def schema_vars(rule: Rule) -> dict[str, str]:
    kinds: dict[str, set] = {}
    for text in (rule.pre, rule.post, rule.where):
        _collect(parse_assertion(text), kinds)
    out = {}
    for name, ks in kinds.items():
        for k in ("thread", "obj", "loc", "value"):
            if k in ks:
                out[name] = k
                break
    out.setdefault(rule.stmt.thread, "thread")
    return out


# --------------------------------------------------------------------------
# statement matching


def _mode_ok(want: Optional[str], mode) -> bool:
    if want is None:
        return True
    if want == "R":
        return mode.releasing
    if want == "A":
        return mode.acquiring
    return not mode.releasing and not mode.acquiring


def match(pat: Stmt, lab: EdgeLabel, src: Configuration) -> Optional[dict]:
    """Schema bindings if transition ``lab`` from ``src`` executes a statement matching ``pat``."""
    a, st = lab.action, lab.stmt
    if a is None:
        return None
    env = {pat.thread: lab.thread}

    def bind(name, v):
        if name is not None:
            env[name] = v

    k = pat.kind
    if k == "write":
        if not (isinstance(st, Write) and a.kind == "wr" and _mode_ok(pat.mode, st.mode)):
            return None
        bind(pat.loc, a.loc)
        bind(pat.value, a.wv)
    elif k == "read":
        if not (isinstance(st, Read) and a.kind == "rd" and _mode_ok(pat.mode, st.mode)):
            return None
        bind(pat.loc, a.loc)
        bind(pat.value, a.rv)
    elif k == "cas":
        if not (isinstance(st, Cas) and _mode_ok(pat.mode, st.mode)):
            return None
        ls = src.locals_of(lab.thread)
        bind(pat.loc, a.loc)
        bind(pat.expect, eval_expr(st.expect, ls))
        bind(pat.new, eval_expr(st.new, ls))
        bind(pat.result, a.kind == "upd")
    elif k == "fai":
        if not (isinstance(st, Fai) and _mode_ok(pat.mode, st.mode)):
            return None
        bind(pat.loc, a.loc)
        bind(pat.value, a.rv)
    elif k in ("acquire", "release", "lockop"):
        want = {"acquire": ("acq",), "release": ("rel",), "lockop": ("acq", "rel")}[k]
        if a.kind not in want:
            return None
        bind(pat.loc, a.loc)
        bind(pat.value, a.index)
    elif k in ("push", "pop"):
        if a.kind != k or not isinstance(st, Call) or not _mode_ok(pat.mode, a.mode):
            return None
        bind(pat.loc, a.loc)
        bind(pat.value, a.wv if k == "push" else a.rv)
    else:
        raise ValueError(f"unknown statement kind {k!r}")
    return env


# --------------------------------------------------------------------------
# checking


@dataclass
class Corpus:
    """An explored program plus the finite domains schema variables range over."""

    name: str
    result: ExplorationResult
    values: list
    locs: list[str]
    threads: tuple[int, ...]
    objects: list[str] = field(default_factory=list)


def build_corpus(name: str, spec, bounds: Bounds) -> Corpus:
    res = explore(spec, bounds)
    vals = set()
    for cfg in res.states:
        vals.update(value_domain(cfg))
    s0 = res.states[0]
    objs = [x for x, line in s0.library.ops if line and line[0].action.kind in INIT_KINDS]
    if any(s0.library.timeline(o)[0].action.kind in ("sinit", "qinit") for o in objs):
        vals.add(EMPTY)
    locs = [x for x, _ in s0.client.ops] + [x for x, _ in s0.library.ops if x not in objs]
    return Corpus(name, res, sorted(vals, key=value_key), locs, s0.threads, objs)


def _domain(kind: str, corpus: Corpus):
    return {"thread": corpus.threads, "loc": corpus.locs, "obj": corpus.objects,
            "value": corpus.values}[kind]


def check_rule(rule: Rule, corpora: list[Corpus], result: Optional[RuleResult] = None) -> RuleResult:
    res = result or RuleResult(rule)
    pre, post, where = (parse_assertion(x) for x in (rule.pre, rule.post, rule.where))
    svars = schema_vars(rule)
    for corpus in corpora:
        g = corpus.result
        for s, lab, d in g.edges:
            src = g.states[s]
            env0 = match(rule.stmt, lab, src)
            if env0 is None:
                continue
            res.transitions += 1
            free = [v for v in svars if v not in env0]
            for combo in itertools.product(*(_domain(svars[v], corpus) for v in free)):
                env = dict(env0)
                env.update(zip(free, combo))
                ctx = Context(env=env)
                if not holds(where, src, ctx) or not holds(pre, src, ctx):
                    continue
                res.exercised += 1
                if not holds(post, g.states[d], ctx):
                    res.witness = {"corpus": corpus.name, "source": s, "target": d,
                                   "step": str(lab),
                                   "bindings": {k: str(v) for k, v in sorted(env.items())}}
                    return res
    return res


def check_ruleset(name: str, bounds: Bounds = Bounds(loop_bound=2),
                  extra: tuple[str, ...] = ()) -> list[RuleResult]:
    from .. import corpus as corpus_mod
    try:
        rules, programs = RULESETS[name]
    except KeyError:
        from ..core import UsageError
        raise UsageError(f"unknown rule set {name!r}; choose from {sorted(RULESETS)}") from None
    corpora = [build_corpus(p, corpus_mod.load(p), bounds) for p in programs + tuple(extra)]
    return [check_rule(r, corpora) for r in rules]
