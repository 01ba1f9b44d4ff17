import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

SYNTH = os.path.join(os.path.dirname(__file__), os.pardir, "src", "noisyner", "data", "synthetic")


@pytest.fixture
def synth_dir():
    return os.path.abspath(SYNTH)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE = {}


@pytest.fixture
def record():
    """record(n, ok, detail): one acceptance line per criterion, echoed at session end."""
    def _record(n, ok, detail):
        line = "criterion {}: {} - {}".format(n, "PASS" if ok else "FAIL", detail)
        ACCEPTANCE[n] = line
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
