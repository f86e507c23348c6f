import pytest

from rarsim import corpus
from rarsim.core import UsageError
from rarsim.explorer import (
    Bounds, explore, final_valuations, fused_successors, is_terminal, local_value, successors,
)
from rarsim.lang import parse_program
from rarsim.memory import init_configuration

SPIN = """
init { x := 0; }
thread 1 { 1: do r <- x; until (r = 1); }
"""


def test_bounds_must_be_positive():
    with pytest.raises(UsageError):
        Bounds(loop_bound=0)
    with pytest.raises(UsageError):
        Bounds(max_states=0)


def test_mp_unsync_final_valuations():
    res = explore(corpus.load("mp-unsync"), Bounds(loop_bound=2))
    assert final_valuations(res, ["r1", "r2"]) == {(1, 0), (1, 5)}
    assert not res.budget_exhausted


def test_loop_bound_truncates_instead_of_looping():
    res = explore(parse_program(SPIN), Bounds(loop_bound=2))
    assert res.terminals == []
    assert res.truncated
    assert len(explore(parse_program(SPIN), Bounds(loop_bound=4)).states) > len(res.states)


def test_budget_exhaustion_is_reported():
    res = explore(corpus.load("lock-client"), Bounds(max_states=5))
    assert res.budget_exhausted
    assert len(res.states) == 5


def test_exploration_is_deterministic():
    a = explore(corpus.load("cas-litmus"))
    b = explore(corpus.load("cas-litmus"))
    assert a.states == b.states
    assert [[(str(l), d) for l, d in s] for s in a.succ] == [[(str(l), d) for l, d in s] for s in b.succ]


def test_paths_replay_to_their_node():
    res = explore(corpus.load("fai-litmus"))
    for n in res.terminals:
        cfg = res.states[0]
        for lab, m in res.path_to(n):
            cfg = next(d for l, d in successors(cfg)[0] if l == lab and d == res.states[m])
        assert cfg == res.states[n] and is_terminal(cfg)


def test_fused_steps_finish_method_epilogues():
    spec = corpus.load("seqlock-client")
    plain_res = explore(spec)
    fused_res = explore(spec, fused=True)
    assert len(fused_res.states) < len(plain_res.states)
    for cfg in fused_res.states:
        for lab, d in fused_successors(cfg)[0]:
            if lab.lib:
                mine = [l for l, _ in successors(d)[0] if l.thread == lab.thread]
                assert not (len(mine) == 1 and mine[0].lib and mine[0].action is None)
    assert final_valuations(fused_res, ["r1", "r2"]) == final_valuations(plain_res, ["r1", "r2"])


def test_local_value_disambiguation():
    cfg = init_configuration(corpus.load("lock-client"))
    assert local_value(cfg, "rval@1") is None
    with pytest.raises(UsageError, match="ambiguous"):
        local_value(cfg, "rval")
    with pytest.raises(UsageError, match="unbound"):
        local_value(cfg, "nope")
