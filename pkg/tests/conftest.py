import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("repo", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("repo")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# Acceptance criteria register one line each here; the lines are printed in
# the terminal summary so they are visible without -s.
CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    def record(number, ok, detail):
        CRITERIA.append(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA, key=lambda x: int(x.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
