import os
import sys

from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from mlfkit.formula import BOT, TOP, And, Atom, Box, Diamond, Iff, Implies, Not, Or  # noqa: E402

settings.register_profile("default", max_examples=150, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ATOM_NAMES = ["p", "q", "r", "b:0", "s:1", "r:0.2", "x_1"]


def formulas(names=ATOM_NAMES, max_leaves=12):
    leaves = st.one_of(st.sampled_from(names).map(Atom), st.sampled_from([TOP, BOT]))
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.builds(Not, sub), st.builds(Box, sub), st.builds(Diamond, sub),
            st.builds(And, sub, sub), st.builds(Or, sub, sub),
            st.builds(Implies, sub, sub), st.builds(Iff, sub, sub),
        ),
        max_leaves=max_leaves,
    )


def substitutions(names=("p", "q", "r")):
    return st.dictionaries(st.sampled_from(names), formulas(max_leaves=4), max_size=3)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
