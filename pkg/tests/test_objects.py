from conftest import finals

from rarsim import corpus
from rarsim.core import EMPTY, Action, TOp, build_state
from rarsim.explorer import explore
from rarsim.objects import fifo_violations, lifo_violations, oracle_violations, possible_returns
from rarsim.memory import init_configuration


def test_lock_mutual_exclusion_and_handover():
    text = """
init { d := 0; }
object l : lock;
thread 1 { 1: l.acquire(); 2: d := 5; 3: l.release(); }
thread 2 { 4: l.acquire(v); 5: r <- d; 6: l.release(); }
"""
    assert finals(text, "v", "r") == {(1, 0), (3, 5)}


def test_relaxed_acquire_does_not_synchronise():
    text = """
init { d := 0; }
object l : lock;
thread 1 { 1: l.acquire(); 2: d := 5; 3: l.release(); }
thread 2 { 4: l.acquire_rlx(v); 5: r <- d; 6: l.release(); }
"""
    assert (3, 0) in finals(text, "v", "r")


def test_queue_is_fifo_within_a_thread():
    text = """
object q : queue;
thread 1 { 1: q.enq(1); 2: q.enq(2); 3: a := q.deq(); 4: b := q.deq(); 5: c := q.deq(); }
"""
    assert finals(text, "a", "b", "c") == {(1, 2, "empty")}


def test_stack_is_lifo_within_a_thread():
    text = """
object s : stack;
thread 1 { 1: s.push(1); 2: s.push(2); 3: a := s.pop(); 4: b := s.pop(); 5: c := s.pop(); }
"""
    assert finals(text, "a", "b", "c") == {(2, 1, "empty")}


def test_unsynchronised_pop_may_miss_push():
    assert finals(corpus.text("mp-unsync"), "r1", "r2") == {(1, 0), (1, 5)}


def test_possible_returns_of_empty_stack():
    cfg = init_configuration(corpus.load("mp-sync"))
    assert set(possible_returns(cfg.library, cfg.client, 2, "s")) == {EMPTY}


def _line(kind, *ops):
    init = TOp(Action(kind, "o"), 0)
    return [init] + [TOp(Action(k, "o", rv=v if k in ("deq", "pop") else None,
                                wv=v if k in ("enq", "push") else None), ts) for k, v, ts in ops]


def _state(line, matched):
    return build_state(line, {1: {"o": 0}}, matched=[("o", a, b) for a, b in matched])


def test_fifo_oracle():
    line = _line("qinit", ("enq", 1, 1), ("enq", 2, 2), ("deq", 1, 3), ("deq", 2, 4))
    assert fifo_violations(_state(line, [(1, 3), (2, 4)]), "o") == []
    swapped = _line("qinit", ("enq", 1, 1), ("enq", 2, 2), ("deq", 2, 3), ("deq", 1, 4))
    assert [v.name for v in fifo_violations(_state(swapped, [(1, 4), (2, 3)]), "o")] == ["FIFO"]


def test_lifo_oracle():
    line = _line("sinit", ("push", 1, 1), ("push", 2, 2), ("pop", 2, 3), ("pop", 1, 4))
    assert lifo_violations(_state(line, [(2, 3), (1, 4)]), "o") == []
    bad = _state(line, [(1, 3), (2, 4)])
    assert [v.name for v in lifo_violations(bad, "o")] == ["LIFO"]
    assert oracle_violations(bad) == lifo_violations(bad, "o")


def test_oracles_hold_on_corpus_objects():
    for name in ("queue-mp", "mp-sync", "mp-unsync", "stack-two-push"):
        res = explore(corpus.load(name))
        assert all(oracle_violations(c.library) == [] for c in res.states), name
