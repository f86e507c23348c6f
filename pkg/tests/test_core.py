from fractions import Fraction

import pytest

from rarsim.core import (
    EMPTY, NULL, Action, ComponentState, Mode, TOp, Tok, UsageError, build_state, canonical_pair,
    dview, fresh_after, in_sync, is_releasing, last_op, make_view, merge_views, observable,
    restrict_view, same_value, show_value, union_views, value_key, view_get, view_set, wellformed,
    wrval,
)


def wr(x, v, ts, mode=Mode.RLX, t=None):
    return TOp(Action("wr", x, wv=v, mode=mode, thread=t), ts)


def two_writes():
    return build_state([wr("x", 0, 0), wr("x", 5, 1, Mode.R, 1)],
                       {1: {"x": 1}, 2: {"x": 0}}, {("x", 0): {"x": 0}, ("x", 1): {"x": 1}})


class TestValues:
    def test_show_value(self):
        assert [show_value(v) for v in (None, True, False, 3, NULL, EMPTY)] == \
            ["bot", "true", "false", "3", "null", "empty"]

    def test_bool_and_int_are_distinct(self):
        assert not same_value(True, 1)
        assert not same_value(0, False)
        assert same_value(Tok.NULL, NULL)

    def test_value_key_is_total(self):
        vals = [3, None, EMPTY, True, -1, NULL, False]
        ordered = sorted(vals, key=value_key)
        assert ordered[0] is None and ordered[-1] == 3


class TestActions:
    def test_modes(self):
        assert Mode.RA.releasing and Mode.RA.acquiring
        assert not Mode.A.releasing and not Mode.R.acquiring

    def test_wrval_of_lock_op_is_its_index(self):
        assert wrval(Action("rel", "l", index=2)) == 2
        assert wrval(Action("wr", "x", wv=7)) == 7

    def test_releasing_set(self):
        assert is_releasing(Action("wr", "x", wv=1, mode=Mode.R))
        assert is_releasing(Action("upd", "x", rv=0, wv=1, mode=Mode.RA))
        assert not is_releasing(Action("upd", "x", rv=0, wv=1, mode=Mode.A))
        assert not is_releasing(Action("rd", "x", rv=0, mode=Mode.A))

    def test_sync_set(self):
        assert in_sync(Action("rel", "l", index=2))
        assert in_sync(Action("push", "s", wv=1, mode=Mode.R))
        assert not in_sync(Action("push", "s", wv=1))
        assert not in_sync(Action("acq", "l", index=1))

    def test_str(self):
        assert str(Action("upd", "x", rv=0, wv=1, mode=Mode.RA, thread=2)) == "upd^RA(x,0,1)@2"
        assert str(Action("pop", "s", rv=EMPTY, mode=Mode.A, thread=1)) == "s.pop^A(empty)@1"
        assert str(Action("acq", "l", index=3, thread=2)) == "l.acquire_3@2"


class TestViews:
    def test_get_set(self):
        v = make_view({"y": 2, "x": 1})
        assert v == (("x", 1), ("y", 2))
        assert view_get(view_set(v, "x", 4), "x") == 4
        assert view_get(v, "z") is None

    def test_merge_keeps_domain_and_takes_later(self):
        assert merge_views((("x", 1), ("y", 3)), (("x", 2), ("y", 1), ("z", 9))) == \
            (("x", 2), ("y", 3))

    def test_union_rejects_overlap(self):
        assert union_views((("x", 1),), (("y", 2),)) == (("x", 1), ("y", 2))
        with pytest.raises(UsageError):
            union_views((("x", 1),), (("x", 2),))

    def test_restrict(self):
        assert restrict_view((("x", 1), ("y", 2)), {"y"}) == (("y", 2),)

    def test_fresh_after(self):
        line = (wr("x", 0, 0), wr("x", 1, 1))
        assert fresh_after(line, 0) == Fraction(1, 2)
        assert fresh_after(line, 1) == 2


class TestState:
    def test_observable_and_viewfront(self):
        s = two_writes()
        assert [o.ts for o in observable(s, 2, "x")] == [0, 1]
        assert [o.ts for o in observable(s, 1, "x")] == [1]
        assert s.viewfront(1, "x").action.wv == 5

    def test_unknown_names(self):
        s = two_writes()
        with pytest.raises(UsageError):
            observable(s, 3, "x")
        with pytest.raises(UsageError):
            observable(s, 1, "nope")

    def test_last_op_and_dview(self):
        s = two_writes()
        assert last_op(s, "x").ts == 1
        assert last_op(s.all_ops(), "x").ts == 1
        assert dview(s.view_of(1), s, "x") == 5
        assert dview(s.view_of(2), s, "x") is None
        with pytest.raises(LookupError):
            last_op(s, "y")

    def test_wellformed_ok(self):
        assert wellformed(two_writes()) == []

    @pytest.mark.parametrize("mutate, name", [
        (lambda s: s.replace(cvd=frozenset({("x", 7)})), "cvd subset"),
        (lambda s: s.replace(tview=((1, (("x", 3),)),)), "tview points into ops"),
        (lambda s: s.replace(tview=((1, ()),)), "tview total"),
        (lambda s: s.replace(mview=((("x", 0), (("q", 0),)),)), "mview location"),
        (lambda s: s.replace(matched=frozenset({("x", 0, 1), ("x", 0, 0)})), "matched injective"),
        (lambda s: s.replace(ops=(("x", (wr("x", 0, 0), wr("x", 1, 0))),)), "timestamp unique"),
    ])
    def test_wellformed_violations(self, mutate, name):
        assert name in {v.name for v in wellformed(mutate(two_writes()))}

    def test_other_locs_allowed_in_mview(self):
        s = two_writes().replace(mview=((("x", 0), (("q", 0), ("x", 0))),))
        assert wellformed(s, other_locs={"q"}) == []

    def test_hash_and_equality(self):
        assert two_writes() == two_writes()
        assert hash(two_writes()) == hash(two_writes())
        assert isinstance(two_writes(), ComponentState)


def test_canonical_pair_maps_timestamps_to_ranks():
    half = Fraction(1, 2)
    s = build_state([wr("x", 0, 0), wr("x", 5, half, Mode.R, 1)], {1: {"x": half}, 2: {"x": 0}},
                    {("x", 0): {"x": 0}, ("x", half): {"x": half}}, cvd=[("x", 0)])
    c, _ = canonical_pair(s, ComponentState())
    assert c == build_state([wr("x", 0, 0), wr("x", 5, 1, Mode.R, 1)], {1: {"x": 1}, 2: {"x": 0}},
                            {("x", 0): {"x": 0}, ("x", 1): {"x": 1}}, cvd=[("x", 0)])
    assert canonical_pair(c, ComponentState())[0] is c
