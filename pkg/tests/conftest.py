import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile(
    "ci", deadline=None, max_examples=300, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def finals(text, *regs, bound=3):
    """Final register valuations of a litmus program."""
    from rarsim.explorer import Bounds, explore
    from rarsim.lang import parse_program
    from rarsim.report import final_valuations
    res = explore(parse_program(text), Bounds(loop_bound=bound))
    return {tuple(row) for row in final_valuations(res, list(regs))}


ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
