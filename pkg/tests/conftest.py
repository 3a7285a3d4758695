"""Shared helpers: a Kronecker-product gate oracle and acceptance-line reporting."""

from __future__ import annotations

from functools import reduce

import numpy as np
import pytest

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
HAD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)


def embed(n: int, ops: dict[int, np.ndarray]) -> np.ndarray:
    """Kronecker product with ``ops[q]`` on qubit q (qubit 0 leftmost) and I elsewhere."""
    return reduce(np.kron, [ops.get(q, I2) for q in range(n)])


def ket_ops(a: int, b: int) -> np.ndarray:
    m = np.zeros((2, 2), dtype=complex)
    m[a, b] = 1
    return m


def dense_gate(n: int, gate) -> np.ndarray:
    """Full 2**n matrix of a gate, assembled from projectors and Kronecker products."""
    q = gate.qubits
    if gate.kind == "H":
        return embed(n, {q[0]: HAD})
    if gate.kind == "U1Q":
        return embed(n, {q[0]: np.asarray(gate.matrix)})
    if gate.kind == "CNOT":
        return embed(n, {q[0]: P0}) + embed(n, {q[0]: P1, q[1]: X})
    if gate.kind == "CZ":
        return np.eye(1 << n) - 2 * embed(n, {q[0]: P1, q[1]: P1})
    if gate.kind == "TOFFOLI":
        both = {q[0]: P1, q[1]: P1}
        return np.eye(1 << n) - embed(n, both) + embed(n, {**both, q[2]: X})
    if gate.kind == "U2Q":
        u = np.asarray(gate.matrix)
        total = np.zeros((1 << n, 1 << n), dtype=complex)
        for row in range(4):
            for col in range(4):
                if u[row, col] != 0:
                    total += u[row, col] * embed(n, {
                        q[0]: ket_ops(row >> 1, col >> 1),
                        q[1]: ket_ops(row & 1, col & 1),
                    })
        return total
    raise ValueError(gate.kind)


def dense_apply(n: int, gates, vec: np.ndarray) -> np.ndarray:
    out = np.asarray(vec, dtype=complex)
    for g in gates:
        out = dense_gate(n, g) @ out
    return out


def ket(bits: str) -> np.ndarray:
    v = np.zeros(1 << len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# Logical words for k=5 as printed: basis i -> (w, s), each of the three
# blocks holding |w> + s|~w>.
LOGICAL_WORDS_K5 = {
    0: ("00000", +1),
    1: ("00000", -1),
    2: ("00010", +1),
    3: ("00010", -1),
    28: ("11100", +1),
    29: ("11100", -1),
    30: ("11110", +1),
    31: ("11110", -1),
}


def complement(word: str) -> str:
    return word.translate(str.maketrans("01", "10"))


def ghz_pair(word: str, sign: int) -> np.ndarray:
    return (ket(word) + sign * ket(complement(word))) / np.sqrt(2)


def kron_all(vectors) -> np.ndarray:
    return reduce(np.kron, vectors)
