import random

import pytest

from dbe.groups import Backend, generate_params

# Acceptance results collected by tests/test_acceptance.py, printed at the end of the run.
ACCEPTANCE_RESULTS = {}


@pytest.fixture(scope="session")
def toy_symbolic():
    return generate_params(Backend.SYMBOLIC, primes=(5, 7, 11))


@pytest.fixture(scope="session")
def toy_curve():
    return generate_params(Backend.CURVE, primes=(5, 7, 11))


@pytest.fixture(scope="session")
def sym20():
    return generate_params(Backend.SYMBOLIC, 20, b"tests")


@pytest.fixture(scope="session")
def curve20():
    return generate_params(Backend.CURVE, 20, b"tests")


@pytest.fixture(scope="session", params=["symbolic", "curve"])
def params(request, sym20, curve20):
    """20-bit-prime parameters on each backend."""
    return sym20 if request.param == "symbolic" else curve20


@pytest.fixture
def rng(request):
    return random.Random(request.node.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
