import numpy as np
import pytest

from lamptune import _accel
from lamptune.dataset import bundled_path, load_csv

BACKENDS = ["numba", "numpy"] if _accel.HAS_NUMBA else ["numpy"]


@pytest.fixture(params=BACKENDS)
def backend(request):
    with _accel.use_backend(request.param):
        yield request.param


@pytest.fixture(scope="session")
def iris():
    return load_csv(bundled_path("iris"), name="iris")


@pytest.fixture(scope="session")
def wine():
    return load_csv(bundled_path("wine"), name="wine")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[2:])):
        ok, text = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key}: {text}")
