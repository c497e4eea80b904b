import os

import numpy as np
import pytest
from hypothesis import settings

from pulsesync.builtins import NAMES, get_builtin

# First calls may trigger numba compilation, so no per-example deadline.
settings.register_profile("pulsesync", deadline=None, max_examples=60)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "pulsesync"))

PHI_GRID = np.linspace(0.0, 1.0, 1001)


@pytest.fixture(params=NAMES, scope="session")
def builtin(request):
    return get_builtin(request.param)


@pytest.fixture(scope="session")
def theta():
    return get_builtin("theta")


@pytest.fixture(scope="session")
def theta_tilde():
    return get_builtin("theta-tilde")


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, in criterion order."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", ()))
            if rep.when == "call" and "criterion" in props:
                lines.append((props["criterion"], outcome, props.get("title", ""),
                              props.get("seconds")))
    if not lines:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, outcome, title, seconds in sorted(lines):
        took = "" if seconds is None else f"  [{seconds:.2f}s]"
        terminalreporter.write_line(
            f"{'PASS' if outcome == 'passed' else 'FAIL'}  {number:>2}. {title}{took}")
