import json

import pytest

from rarsim.cli import EXHAUSTED, OK, USAGE, VIOLATION, main

REPORT_KEYS = ["program", "bounds", "truncated", "reachable_count", "final_registers",
               "final_valuations", "assertion_verdicts", "refinement", "invariant_violations",
               "budget_exhausted"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_explore_json(capsys):
    code, rep = run_json(capsys, "explore", "mp-unsync", "--bound", "2")
    assert code == OK
    assert list(rep) == REPORT_KEYS
    assert rep["final_valuations"] == [[1, 0], [1, 5]]
    assert rep["bounds"] == {"loop_bound": 2, "max_states": 1000000}


@pytest.mark.parametrize("program, expected", [("mp-sync", OK), ("lock-client", OK),
                                               ("lock-client-rlx", VIOLATION),
                                               ("treiber", OK)])
def test_check_exit_codes(capsys, program, expected):
    code, rep = run_json(capsys, "check", program)
    assert code == expected
    assert rep["invariant_violations"] == []


def test_check_text_shows_witness(capsys):
    code, out, _ = run(capsys, "check", "lock-client-rlx")
    assert code == VIOLATION
    assert "FAIL post" in out and "witness at pc" in out


@pytest.mark.parametrize("concrete, expected", [("seqlock", OK), ("ticketlock", OK),
                                                ("seqlock_rlx", VIOLATION)])
def test_refine(capsys, concrete, expected):
    code, rep = run_json(capsys, "refine", "lock-client", "--abstract", "lock",
                         "--concrete", concrete)
    assert code == expected
    assert rep["refinement"]["verdict"] == ("pass" if expected == OK else "fail")


def test_simulate(capsys):
    code, rep = run_json(capsys, "simulate", "lock-client", "--abstract", "lock",
                         "--concrete", "ticketlock", "--relation", "ticketlock")
    assert code == OK and rep["refinement"]["relation"] == "ticketlock"


def test_budget_exhaustion_exit_code(capsys):
    code, rep = run_json(capsys, "explore", "lock-client", "--max-states", "3")
    assert code == EXHAUSTED and rep["budget_exhausted"]
    code, _ = run_json(capsys, "refine", "lock-client", "--abstract", "lock", "--concrete",
                       "seqlock", "--max-states", "20")
    assert code == EXHAUSTED


def test_rules(capsys):
    code, rep = run_json(capsys, "rules", "lock")
    assert code == OK
    assert {r["status"] for r in rep["lock"]["rules"]} <= {"pass", "vacuous"}


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == OK and "mp-sync" in out and "ticketlock" in out


@pytest.mark.parametrize("argv", [
    ["explore", "nope"],
    ["explore"],
    ["refine", "lock-client", "--abstract", "stack", "--concrete", "treiber"],
    ["simulate", "cas-litmus", "--abstract", "lock", "--concrete", "lock", "--relation", "true"],
    ["explore", "mp-sync", "--bound", "0"],
    ["frobnicate"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == USAGE and err


def test_suggestion_for_misspelt_program(capsys):
    _, _, err = run(capsys, "explore", "mp-synk")
    assert "did you mean" in err and "mp-sync" in err


def test_program_from_file(capsys, tmp_path):
    p = tmp_path / "tiny.lit"
    p.write_text("init { x := 0; }\nthread 1 { 1: x := 1; 2: r <- x; }\npost {| r = 1 |}\n")
    code, rep = run_json(capsys, "check", str(p))
    assert code == OK and rep["program"] == "tiny" and rep["final_valuations"] == [[1]]


def test_runtime_error_in_program_is_usage_error(capsys, tmp_path):
    p = tmp_path / "div.lit"
    p.write_text("thread 1 { 1: r := 1 / 0; }\n")
    code, _, err = run(capsys, "explore", str(p))
    assert code == USAGE and "division by zero" in err


def test_missing_terminal_gives_exhausted(capsys, tmp_path):
    p = tmp_path / "spin.lit"
    p.write_text("init { x := 0; }\nthread 1 { 1: do r <- x; until (r = 1); }\npost {| r = 1 |}\n")
    code, _ = run_json(capsys, "check", str(p))
    assert code == EXHAUSTED
