import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from crowdgate.model import SystemParams

settings.register_profile(
    "default",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def params():
    return SystemParams()


def decoupled_two_level(**kw):
    """Qubit 1 as a bare two-level system, qubit 2 undriven, no drift."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return SystemParams(delta=0.0, anharm=0.0, lam=[[1.0, 0.0], [0.0, 0.0]], **kw)


def random_unitary(rng, n):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[key])
