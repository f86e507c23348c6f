import pytest

from rarsim import corpus
from rarsim.assertions.evaluate import Context, holds
from rarsim.assertions.outline import check_outline
from rarsim.assertions.rules import RULESETS, check_ruleset
from rarsim.assertions.syntax import (
    AssertionParseError, Def, Exists, Implies, Method, PcIn, parse_assertion,
)
from rarsim.core import UsageError
from rarsim.explorer import Bounds, explore
from rarsim.memory import init_configuration


class TestSyntax:
    def test_structure(self):
        f = parse_assertion("pc(1) in {2, 3} => def(L, 2, s.pop(empty))")
        assert isinstance(f, Implies)
        assert isinstance(f.left, PcIn) and f.left.labels == (2, 3)
        assert isinstance(f.right, Def) and isinstance(f.right.target, Method)

    def test_exists(self):
        assert isinstance(parse_assertion("exists v. def(C, 1, x = v)"), Exists)

    @pytest.mark.parametrize("text", ["pos(C, 1, x = )", "r1 = 0 &&", "def(C 1, x = 0)"])
    def test_errors(self, text):
        with pytest.raises(AssertionParseError):
            parse_assertion(text)

    def test_end_of_input_message(self):
        with pytest.raises(AssertionParseError, match="end of input"):
            parse_assertion("r1 = 0 &&")


MP = corpus.load("mp-sync")


class TestEvaluation:
    def test_initial_mp_state(self):
        cfg = init_configuration(MP)
        assert holds("def(C, 1, d = 0) && def(L, 2, s.pop(empty))", cfg)
        assert holds("!pos(L, 2, s.pop(1))", cfg)
        assert holds("cond(L->C, 2, s.pop(1) => d = 5)", cfg)
        assert holds("pc(1) = 1 && pc(2) in {3}", cfg)
        assert not holds("pos(C, 1, d = 5)", cfg)

    def test_after_publication(self):
        res = explore(MP, Bounds(loop_bound=2))
        published = [c for c in res.states if c.pc[1] == 3 and not c.library.matched]
        assert published
        for cfg in published:
            assert holds("pos(L, 2, s.pop(1)) && cond(L->C, 2, s.pop(1) => d = 5)", cfg)

    def test_exists_ranges_over_values(self):
        cfg = init_configuration(MP)
        assert holds("exists v. def(C, 1, d = v) && v = 0", cfg)
        assert not holds("exists v. def(C, 1, d = v) && v = 5", cfg)

    def test_context_bindings_and_lets(self):
        cfg = init_configuration(MP)
        assert holds("def(C, t, d = u)", cfg, Context(env={"t": 2, "u": 0}))
        assert holds("Z", cfg, Context(lets={"Z": "def(C, 1, d = 0)"}))

    def test_lock_terms(self):
        cfg = init_configuration(corpus.load("lock-client"))
        assert holds("def(L, 1, l.init(0)) && covered(L, l.init(0)) && !hidden(L, l.init(0))", cfg)

    @pytest.mark.parametrize("text", ["def(C, 9, d = 0)", "def(C, 1, nope = 0)", "zz = 1",
                                      "def(L, 1, d.pop(1))"])
    def test_usage_errors(self, text):
        with pytest.raises(UsageError):
            holds(text, init_configuration(MP))


class TestOutlines:
    @pytest.mark.parametrize("name", ["mp-sync", "lock-client"])
    def test_valid(self, name):
        rep = check_outline(corpus.load(name), Bounds(loop_bound=corpus.default_bound(name)))
        assert rep.valid and rep.verdicts

    def test_invalid_outline_has_witness(self):
        rep = check_outline(corpus.load("lock-client-rlx"))
        bad = [v for v in rep.verdicts if not v.holds]
        assert {v.where for v in bad} >= {"2:2", "post"}
        post = next(v for v in bad if v.kind == "post")
        assert rep.result.states[post.witness].locals_of(2)["r1"] != \
            rep.result.states[post.witness].locals_of(2)["r2"]

    def test_invariant_checked_everywhere(self):
        rep = check_outline(corpus.load("lock-client"))
        inv = next(v for v in rep.verdicts if v.kind == "invariant")
        assert inv.checked == len(rep.result.states)

    def test_mp_unsync_post_fails(self):
        spec = corpus.load("mp-unsync").replace(post="r2 = 5")
        rep = check_outline(spec, Bounds(loop_bound=2))
        assert not rep.valid


class TestRules:
    @pytest.mark.parametrize("name", sorted(RULESETS))
    def test_every_counted_rule_passes(self, name):
        results = check_ruleset(name)
        assert all(r.status != "fail" for r in results if r.rule.counted)

    def test_rule_counts(self):
        counted = {n: [r for r in RULESETS[n][0] if r.counted] for n in RULESETS}
        assert sorted(len(v) for v in counted.values()) == [6, 13, 18]

    def test_alternative_reading_has_a_witness(self):
        res = {r.rule.name: r for r in check_ruleset("memory")}
        alt = res["mem-1-alt"]
        assert alt.status == "fail" and alt.witness["corpus"] == "cas-litmus"

    def test_unknown_ruleset(self):
        with pytest.raises(UsageError):
            check_ruleset("nope")
