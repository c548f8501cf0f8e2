import numpy as np
import pytest

from naqsim.verify import REFERENCE_KAPPAS, reference_runs


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def reference_sweep():
    """Full-horizon runs at the reference parameters, {kappa: (summary, min_eig)}."""
    return reference_runs(kappas=REFERENCE_KAPPAS)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
