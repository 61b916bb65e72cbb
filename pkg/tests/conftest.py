import numpy as np
import pytest

from weakdiscord.qcore import PAULIS, DensityMatrix
from weakdiscord.states import RandomStateSpec, random_mixed, random_pure

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log():
    def log(number, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return ok

    return log


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def bell_state():
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    return DensityMatrix.from_ket(psi, 2, 2)


@pytest.fixture
def classical_state():
    """(|00><00| + |11><11|) / 2"""
    return DensityMatrix(np.diag([0.5, 0, 0, 0.5]), 2, 2)


@pytest.fixture
def maximally_mixed():
    return DensityMatrix(np.eye(4) / 4, 2, 2)


@pytest.fixture
def product_state():
    ra = 0.5 * (np.eye(2) + 0.3 * PAULIS[0] - 0.4 * PAULIS[2])
    rb = 0.5 * (np.eye(2) + 0.2 * PAULIS[1] + 0.5 * PAULIS[2])
    return DensityMatrix(np.kron(ra, rb), 2, 2), ra, rb


@pytest.fixture(scope="session")
def mixed_states():
    return [random_mixed(RandomStateSpec(1 + i % 4, 5000 + i)) for i in range(24)]


@pytest.fixture(scope="session")
def pure_states():
    return [random_pure(2, 2, 7000 + i) for i in range(12)]
