"""Dense-operator oracles shared by the test modules.

Qubit ``q`` is bit ``q`` of the basis-state index, so a Pauli string
``axes`` maps to ``kron(P[axes[n-1]], ..., P[axes[0]])``.
"""

import numpy as np
import pytest
from hypothesis import settings
from scipy.linalg import expm

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(axes: str) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for a in reversed(axes):
        out = np.kron(out, PAULI[a])
    return out


def single(n: int, q: int, op: np.ndarray) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for k in reversed(range(n)):
        out = np.kron(out, op if k == q else np.eye(2))
    return out


def dense_observable(obs) -> np.ndarray:
    return sum(t.coefficient * pauli_matrix(t.axes) for t in obs.terms)


def dense_maxcut(g) -> np.ndarray:
    dim = 1 << g.n
    h = np.zeros((dim, dim), dtype=complex)
    for i, j, w in g.edges:
        axes = ["I"] * g.n
        axes[i] = axes[j] = "Z"
        h += w * pauli_matrix("".join(axes))
    return h


def dense_qaoa_state(g, gammas, betas) -> np.ndarray:
    n = g.n
    hp = dense_maxcut(g)
    hd = sum(single(n, q, PAULI["X"]) for q in range(n))
    psi = np.full(1 << n, 2.0 ** (-n / 2), dtype=complex)
    for gamma, beta in zip(gammas, betas):
        psi = expm(-1j * gamma * hp) @ psi
        psi = expm(-1j * beta * hd) @ psi
    return psi


def dense_hea_state(n, layers, params) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1.0
    cz = np.eye(1 << n, dtype=complex)
    for q in range(n - 1):
        proj1 = (np.eye(2) - PAULI["Z"]) / 2
        cz = (np.eye(1 << n) - 2 * single(n, q, proj1) @ single(n, q + 1, proj1)) @ cz
    for layer in range(layers):
        for q in range(n):
            psi = expm(-0.5j * params[layer * n + q] * single(n, q, PAULI["Y"])) @ psi
        psi = cz @ psi
    return psi


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# One line per acceptance criterion, filled in by test_acceptance.py.
ACCEPTANCE_LINES: list = []


def report_acceptance(number: int, passed: bool, detail: str) -> bool:
    line = f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append((number, line))
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
