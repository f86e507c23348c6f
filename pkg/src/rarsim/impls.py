"""Built-in object implementations, written in the litmus language.

Each implementation's globals live in the library component under
``<object>.<name>``; method registers are thread-local and likewise prefixed.
"""

from __future__ import annotations

from functools import lru_cache

from .core import UsageError
from .lang.ast import ImplDef

SEQLOCK = """
impl seqlock : lock {
  init { glb := 0; }
  method acquire() {
    do {
      1: do r <-^A glb; until (even(r));
      2: loc := CAS^RA(glb, r, r + 1);
    } until (loc);
    return true;
  }
  method release() {
    3: glb :=^R r + 2;
    return bot;
  }
}
"""

# The release write is relaxed, so the lock no longer publishes client writes.
SEQLOCK_MUTANT = """
impl seqlock_rlx : lock {
  init { glb := 0; }
  method acquire() {
    do {
      1: do r <-^A glb; until (even(r));
      2: loc := CAS^RA(glb, r, r + 1);
    } until (loc);
    return true;
  }
  method release() {
    3: glb := r + 2;
    return bot;
  }
}
"""

TICKETLOCK = """
impl ticketlock : lock {
  init { nt := 0; sn := 0; }
  method acquire() {
    1: m_t := FAI^RA(nt);
    2: do s_n <-^A sn; until (m_t = s_n);
    return true;
  }
  method release() {
    3: sn :=^R s_n + 1;
    return bot;
  }
}
"""

TREIBER = """
impl treiber : stack {
  init { Top :=^R null; }
  method push(v) {
    1: nv := alloc();
    2: [nv] := v;
    do {
      3: top <-^A Top;
      4: [nv + 1] := top;
      5: ok := CAS^R(Top, top, nv) ghost { pushedAddr += nv; };
    } until (ok);
    return bot;
  }
  method pop() {
    do {
      6: do top <-^A Top; until (top != null);
      7: ntop <- [top + 1];
      8: ok := CAS^R(Top, top, ntop) ghost { pushedAddr -= top; };
    } until (ok);
    9: rv <- [top];
    return rv;
  }
}
"""

BUILTIN_IMPLS = {
    "seqlock": SEQLOCK,
    "seqlock_rlx": SEQLOCK_MUTANT,
    "ticketlock": TICKETLOCK,
    "treiber": TREIBER,
}


@lru_cache(maxsize=None)
def builtin_impl(kind: str) -> ImplDef:
    from .lang.parser import parse_program
    try:
        text = BUILTIN_IMPLS[kind]
    except KeyError:
        raise UsageError(f"unknown object kind {kind!r}") from None
    (impl,) = parse_program(text, kind).impls
    return impl
