from pathlib import Path

import numpy as np
import pytest

DATA_DIR = Path(__file__).parent / "data"
MNIST16 = DATA_DIR / "mnist16-images-idx3-ubyte"

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)


def dense(n, ops):
    """Full 2^n matrix of a tensor product; ``ops`` maps qubit -> 2x2 (qubit 0 = LSB)."""
    out = np.eye(1, dtype=complex)
    for q in reversed(range(n)):
        out = np.kron(out, ops.get(q, I2))
    return out


def dense_cnot(n, c, t):
    return dense(n, {c: P0}) + dense(n, {c: P1, t: X})


def dense_cswap(n, c, a, b):
    # SWAP = (I + XX + YY + ZZ) / 2 on qubits a, b
    swap = 0.5 * (dense(n, {}) + dense(n, {a: X, b: X}) + dense(n, {a: Y, b: Y}) + dense(n, {a: Z, b: Z}))
    return dense(n, {c: P0}) + dense(n, {c: P1}) @ swap


def haar_state(n, rng):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def mnist_path():
    return MNIST16


_acceptance_lines: list[str] = []


@pytest.fixture
def report():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""

    def _report(criterion: str, ok: bool, detail: str) -> None:
        _acceptance_lines.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        print(_acceptance_lines[-1])

    return _report


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
