import numpy as np
import pytest

from invstat import _backend
from invstat.connections import TensorField
from invstat.symcone import vech_dim


def rel(a, b):
    """Relative difference of two scalars or arrays in the max norm."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    diff = np.max(np.abs(a - b), initial=0.0)
    if diff == 0.0:
        return 0.0
    return float(diff / max(np.max(np.abs(a)), np.max(np.abs(b))))


def make_broken_field(n):
    """A symmetric cubic field that is not invariant: ``Sigma_11**2`` on the diagonal pattern."""
    d = vech_dim(n)
    delta = np.zeros((d, d, d))
    for a in range(d):
        delta[a, a, a] = 1.0
    return TensorField(3, n, lambda s: s.matrix[0, 0].astype(float) ** 2 * delta, "broken")


@pytest.fixture
def broken_field():
    return make_broken_field


@pytest.fixture(params=_backend.available())
def backend(request):
    """Run the test once per importable kernel backend."""
    previous = _backend.name()
    _backend.use(request.param)
    yield request.param
    _backend.use(previous)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
