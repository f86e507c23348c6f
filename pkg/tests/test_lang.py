import pytest

from rarsim import corpus
from rarsim.core import EMPTY, Mode, UsageError
from rarsim.lang import ParseError, parse_program, pretty
from rarsim.lang.ast import Bin, Cas, Const, DoUntil, Read, Reg, Un, Write
from rarsim.lang.semantics import (
    EvalError, eval_expr, is_done, labels_of, registers_of, thread_steps, walk,
)

SMALL = """\
init { x := 0; }
thread 1 {
  x := 1;
  r <- x;
}
"""


class TestParser:
    def test_labels_default_to_source_lines(self):
        spec = parse_program(SMALL)
        assert labels_of(spec.threads[0][1]) == [3, 4]

    def test_modes_and_commands(self):
        spec = parse_program("""
init { x := 0; }
thread 1 {
  1: x :=^R 1;
  2: a <-^A x;
  3: b := CAS^RA(x, 0, 2);
  4: do c := FAI(x); until (c > 3);
}
""")
        cmds = list(walk(spec.threads[0][1]))
        w = next(c for c in cmds if isinstance(c, Write))
        r = next(c for c in cmds if isinstance(c, Read))
        cas = next(c for c in cmds if isinstance(c, Cas))
        assert (w.mode, r.mode, cas.mode) == (Mode.R, Mode.A, Mode.RA)
        assert any(isinstance(c, DoUntil) for c in cmds)
        assert registers_of(spec.threads[0][1]) >= {"a", "b", "c"}

    def test_exit_label_and_annotations(self):
        spec = corpus.load("mp-sync")
        assert spec.post is not None
        exits = [a for a in spec.annotations if a.label == "exit"]
        assert {a.thread for a in exits} == {1, 2}

    @pytest.mark.parametrize("text, fragment", [
        ("thread 1 { x := ; }", "syntax error"),
        ("object s : heap;", "unknown object kind"),
        ("thread 1 { 1: r <- y; }", "unknown global"),
        ("thread 1 { 1: s.push(1); }", "undeclared object"),
        ("init { x := 0; } thread 1 { 1: x := 1; } thread 1 { 2: x := 2; }", "duplicate thread"),
    ])
    def test_errors(self, text, fragment):
        with pytest.raises(ParseError, match=fragment):
            parse_program(text)

    def test_error_position(self):
        with pytest.raises(ParseError) as exc:
            parse_program("init { x := 0; }\nthread 1 {\n  x := ;\n}\n")
        assert exc.value.line == 3

    def test_parse_error_is_usage_error(self):
        assert issubclass(ParseError, UsageError)


class TestPretty:
    @pytest.mark.parametrize("name", corpus.names())
    def test_round_trip(self, name):
        spec = corpus.load(name)
        text = pretty(spec)
        again = parse_program(text, spec.name)
        assert pretty(again) == text
        assert again.threads == spec.threads
        assert again.objects == spec.objects
        assert again.init == spec.init


class TestExpressions:
    def test_arithmetic(self):
        e = Bin("+", Reg("a"), Bin("*", Const(2), Const(3)))
        assert eval_expr(e, {"a": 1}) == 7
        assert eval_expr(Un("-", Const(4)), {}) == -4

    def test_equality_keeps_bool_apart(self):
        assert eval_expr(Bin("=", Const(True), Const(1)), {}) is False
        assert eval_expr(Bin("=", Const(EMPTY), Const(EMPTY)), {}) is True

    @pytest.mark.parametrize("e", [
        Bin("/", Const(1), Const(0)),
        Bin("+", Const(True), Const(1)),
        Reg("missing"),
        Un("!", Const(3)),
    ])
    def test_errors(self, e):
        with pytest.raises(EvalError):
            eval_expr(e, {})


class TestThreadSteps:
    def test_cas_has_success_and_failure_branches(self):
        spec = parse_program("init { x := 0; } thread 1 { 1: b := CAS(x, 0, 1); }")
        steps = thread_steps(spec.threads[0][1], {})
        assert [s.template.kind for s in steps] == ["upd", "rd"]

    def test_loop_bound_blocks(self):
        spec = parse_program("init { x := 0; } thread 1 { 1: do r <- x; until (r = 1); }")
        from rarsim.lang.semantics import with_fuel
        cmd = with_fuel(spec.threads[0][1], 1)
        (s,) = thread_steps(cmd, {})
        o = s.cont(s.template._replace(rv=0))
        ls = dict(o.updates)
        (check,) = thread_steps(o.cmd, ls)
        again = check.cont(None).cmd
        assert all(st.blocked_by_fuel for st in thread_steps(again, ls))

    def test_done(self):
        spec = parse_program("init { x := 0; } thread 1 { 1: x := 1; 2: }")
        (s,) = thread_steps(spec.threads[0][1], {})
        assert is_done(s.cont(None).cmd)
