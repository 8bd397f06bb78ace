from fractions import Fraction

import pytest

from selectop.space import load_model


@pytest.fixture(scope="session")
def models():
    """The built-in models, loaded once."""
    return {name: load_model(name) for name in ("M1", "M2", "M3", "M4", "M5", "M6")}


def F(text):
    return Fraction(text)


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance lines after the run."""
    import sys
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
