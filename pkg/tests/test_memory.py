from conftest import finals

from rarsim.core import Action, Mode, wellformed
from rarsim.explorer import Bounds, explore
from rarsim.lang import parse_program
from rarsim.memory import init_configuration, mem_step


def mp(wmode, rmode):
    return f"""
init {{ d := 0; f := 0; }}
thread 1 {{ 1: d := 5; 2: f :={wmode} 1; }}
thread 2 {{ 3: a <-{rmode} f; 4: b <- d; }}
"""


def test_relaxed_message_passing_can_read_stale():
    assert finals(mp("", ""), "a", "b") == {(0, 0), (0, 5), (1, 0), (1, 5)}


def test_release_acquire_message_passing_forbids_stale():
    assert finals(mp("^R", "^A"), "a", "b") == {(0, 0), (0, 5), (1, 5)}


def test_release_without_acquire_does_not_synchronise():
    assert (1, 0) in finals(mp("^R", ""), "a", "b")


def test_coherence_read_read():
    text = """
init { x := 0; }
thread 1 { 1: x := 1; }
thread 2 { 2: a <- x; 3: b <- x; }
"""
    assert (1, 0) not in finals(text, "a", "b")


def test_store_buffering_allows_both_zero():
    text = """
init { x := 0; y := 0; }
thread 1 { 1: x :=^R 1; 2: a <-^A y; }
thread 2 { 3: y :=^R 1; 4: b <-^A x; }
"""
    assert (0, 0) in finals(text, "a", "b")


def test_updates_are_atomic():
    text = """
init { x := 0; }
thread 1 { 1: a := FAI(x); }
thread 2 { 2: b := FAI(x); }
"""
    assert finals(text, "a", "b") == {(0, 1), (1, 0)}


def test_only_one_cas_from_the_same_write_succeeds():
    text = """
init { x := 0; }
thread 1 { 1: a := CAS(x, 0, 1); }
thread 2 { 2: b := CAS(x, 0, 2); }
"""
    assert finals(text, "a", "b") == {(True, False), (False, True)}


def test_write_cannot_be_placed_after_covered_update():
    spec = parse_program("""
init { x := 0; }
thread 1 { 1: a := FAI(x); }
thread 2 { 2: x := 7; }
""")
    res = explore(spec)
    for n in res.terminals:
        line = res.states[n].client.timeline("x")
        # the FAI read from its immediate predecessor
        upd = next(o for o in line if o.action.kind == "upd")
        prev = line[line.index(upd) - 1]
        assert prev.action.wv == upd.action.rv


def test_mem_step_read_offers_every_observable_write():
    cfg = init_configuration(parse_program("init { x := 0; } thread 1 { 1: x := 1; } thread 2 { 2: r <- x; }"))
    (s1, c1, _), = mem_step(cfg.client, cfg.library, 1, Action("wr", "x", wv=1))
    from rarsim.lang.semantics import ANY
    outs = mem_step(s1, c1, 2, Action("rd", "x", rv=ANY, mode=Mode.A))
    assert sorted(a.rv for _, _, a in outs) == [0, 1]
    assert all(wellformed(e, other_locs=c.locations) == [] for e, c, _ in outs)


def test_reachable_states_are_wellformed():
    res = explore(parse_program(mp("^R", "^A")), Bounds(loop_bound=2))
    for cfg in res.states:
        assert wellformed(cfg.client, other_locs=cfg.library.locations) == []
        assert wellformed(cfg.library, other_locs=cfg.client.locations) == []
