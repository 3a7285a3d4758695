"""GHZ-block erasure code: operator synthesis, encoding and restoration.

Positions inside a block are 1-based (``m`` in ``1..k``) and blocks are
0-based (``d`` in ``0..t+1``); block ``t+1`` is the restoring ancilla. The
global qubit of position ``m`` in block ``d`` is ``d*k + (m-1)``.

Builders return :class:`GateSequence` objects in application order. Inside a
family of mutually commuting CNOTs the gates are emitted in ascending
(block, position) order; between non-commuting factors the operator product
is read right to left, so the rightmost factor is applied first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import BudgetError, CapacityError, DimensionMismatchError, InvalidFlagsError
from .statevector import (
    CNOT,
    CZ,
    H,
    MAX_QUBITS,
    TOFFOLI,
    DensityMatrix,
    Gate,
    GateSequence,
    State,
    apply_sequence,
    insert_zero_qubits,
    new_zero_state,
    reduced_density_matrix,
    tensor,
)


@dataclass(frozen=True)
class CodeLayout:
    """Block structure for a ``k``-qubit message protected against ``t = k // 2`` erasures."""

    k: int
    restore_block_present: bool = False

    def __post_init__(self):
        if self.k < 3:
            raise ValueError(f"the scheme needs k >= 3, got {self.k}")
        # code + restore block + one environment qubit per correctable erasure
        needed = self.k * (self.t + 2) + self.t
        if needed > MAX_QUBITS:
            raise CapacityError(
                f"k={self.k} needs up to {needed} qubits, above the "
                f"{MAX_QUBITS}-qubit simulation limit")

    @property
    def t(self) -> int:
        return self.k // 2

    @property
    def n_code_blocks(self) -> int:
        return self.t + 1

    @property
    def restore_block(self) -> int:
        return self.t + 1

    @property
    def n_code_qubits(self) -> int:
        return self.k * (self.t + 1)

    @property
    def n_qubits(self) -> int:
        return self.k * (self.t + 2) if self.restore_block_present else self.n_code_qubits

    def with_restore_block(self) -> "CodeLayout":
        return CodeLayout(self.k, restore_block_present=True)

    def qubit(self, position: int, block: int) -> int:
        """Global index of ``position(block)``."""
        if not 1 <= position <= self.k:
            raise InvalidFlagsError(f"position {position} outside 1..{self.k}")
        if not 0 <= block <= self.t + 1:
            raise InvalidFlagsError(f"block {block} outside 0..{self.t + 1}")
        return block * self.k + position - 1

    def block_qubits(self, block: int) -> list[int]:
        return [self.qubit(m, block) for m in range(1, self.k + 1)]


@dataclass(frozen=True)
class ErasureFlags:
    """Flagged erasures as ``(block, position)`` pairs, at most one per block."""

    entries: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        entries = tuple(sorted((int(b), int(a)) for b, a in self.entries))
        blocks = [b for b, _ in entries]
        if len(set(blocks)) != len(blocks):
            raise InvalidFlagsError(f"two erasures in one block: {entries}")
        object.__setattr__(self, "entries", entries)

    @property
    def blocks(self) -> list[int]:
        return [b for b, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __str__(self) -> str:
        return ",".join(f"{b}:{a}" for b, a in self.entries) or "none"

    def check(self, layout: CodeLayout) -> None:
        if len(self.entries) > layout.t:
            raise BudgetError(
                f"{len(self.entries)} erasures exceed the budget t={layout.t}")
        for b, a in self.entries:
            if not 0 <= b <= layout.t:
                raise InvalidFlagsError(
                    f"erasure in block {b}; only code blocks 0..{layout.t} can be flagged")
            if not 1 <= a <= layout.k:
                raise InvalidFlagsError(f"position {a} outside 1..{layout.k}")


# --- encoder ----------------------------------------------------------------

def build_u_red(layout: CodeLayout) -> GateSequence:
    """CNOT fan-out copying the message block's basis content into blocks 1..t."""
    q = layout.qubit
    return GateSequence(tuple(
        CNOT(q(i, 0), q(i, d))
        for d in range(1, layout.t + 1)
        for i in range(1, layout.k + 1)
    ))


def build_hadamard_layer(layout: CodeLayout) -> GateSequence:
    return GateSequence(tuple(H(layout.qubit(layout.k, d)) for d in range(layout.t + 1)))


def _un_ghz(layout: CodeLayout, d: int) -> list[Gate]:
    q, k = layout.qubit, layout.k
    return [CNOT(q(k, d), q(i, d)) for i in range(1, k)]


def build_u_ghz(layout: CodeLayout) -> GateSequence:
    """Per block, CNOTs from position k onto positions 1..k-1."""
    gates: list[Gate] = []
    for d in range(layout.t + 1):
        gates += _un_ghz(layout, d)
    return GateSequence(tuple(gates))


def build_u_enc(layout: CodeLayout) -> GateSequence:
    return build_u_red(layout) + build_hadamard_layer(layout) + build_u_ghz(layout)


def encode(psi: State, layout: CodeLayout) -> State:
    """Encode a ``k``-qubit message into ``t + 1`` GHZ blocks."""
    if psi.n_qubits != layout.k:
        raise DimensionMismatchError(
            f"message has {psi.n_qubits} qubits, layout expects k={layout.k}")
    padded = tensor(psi, new_zero_state(layout.k * layout.t))
    return apply_sequence(padded, build_u_enc(layout))


# --- restoring operation ----------------------------------------------------

def build_u_dec(layout: CodeLayout, flags: ErasureFlags) -> GateSequence:
    """Partial decoder on the undamaged blocks.

    Every undamaged block is taken from the GHZ basis to the computational
    basis (CNOTs from position k, then H on position k). The first undamaged
    block is copied into block t+1, and finally every undamaged block is
    cleared to |0...0> with CNOTs controlled by block t+1.

    Only one block is copied: all undamaged blocks carry the same basis
    content, so copying each of them would XOR the content away whenever
    their number is even.
    """
    flags.check(layout)
    q, k, anc = layout.qubit, layout.k, layout.restore_block
    undamaged = [d for d in range(layout.t + 1) if d not in flags.blocks]
    gates: list[Gate] = []
    for n, d in enumerate(undamaged):
        gates += _un_ghz(layout, d)
        gates.append(H(q(k, d)))
        if n == 0:
            gates += [CNOT(q(i, d), q(i, anc)) for i in range(1, k + 1)]
    for d in undamaged:
        gates += [CNOT(q(i, anc), q(i, d)) for i in range(1, k + 1)]
    return GateSequence(tuple(gates))


def recovery_rank(k: int, a: int) -> int:
    """Largest position other than ``a`` and ``k``."""
    return max(m for m in range(1, k + 1) if m not in (a, k))


def build_u_rec(layout: CodeLayout, a: int, b: int) -> GateSequence:
    """Recovery operator for an erasure at position ``a`` of block ``b``.

    Brings block ``b`` to a canonical GHZ form that no longer depends on the
    message held in block t+1. No gate touches the erased qubit ``a(b)``.
    """
    k, anc = layout.k, layout.restore_block
    if not 1 <= a <= k:
        raise InvalidFlagsError(f"position {a} outside 1..{k}")
    if not 0 <= b <= layout.t:
        raise InvalidFlagsError(f"block {b} is not a code block (0..{layout.t})")
    q = layout.qubit
    copy = [CNOT(q(i, anc), q(i, b)) for i in range(1, k) if i != a]
    if a == k:
        return GateSequence(tuple(copy) + (CZ(q(k, anc), q(k - 1, b)),))
    r = recovery_rank(k, a)
    # Fan-out is controlled by the ancilla copy of the erased position.
    fan = [CNOT(q(a, anc), q(i, b)) for i in range(1, k + 1) if i != a]
    toffoli = TOFFOLI(q(a, anc), q(k, anc), q(r, b))
    return GateSequence(tuple(fan + copy) + (toffoli, CZ(q(k, anc), q(r, b)), toffoli))


def restore(corrupted: State, layout: CodeLayout, flags: ErasureFlags,
            order: Sequence[int] | None = None) -> State:
    """Append block t+1, apply the decoder, then one recovery operator per flag.

    ``corrupted`` holds the ``k(t+1)`` code qubits followed by any environment
    qubits; block t+1 is inserted between them. Recovery operators run in
    ascending block order unless ``order`` lists the flagged blocks
    explicitly.
    """
    flags.check(layout)
    n_code = layout.n_code_qubits
    if corrupted.n_qubits < n_code:
        raise DimensionMismatchError(
            f"state has {corrupted.n_qubits} qubits, the code alone needs {n_code}")
    full = layout.with_restore_block()
    state = insert_zero_qubits(corrupted, n_code, layout.k)
    erased = dict(flags.entries)
    if order is None:
        order = sorted(erased)
    elif sorted(order) != sorted(erased):
        raise InvalidFlagsError(f"order {list(order)} is not a permutation of {sorted(erased)}")
    seq = build_u_dec(full, flags)
    for b in order:
        seq = seq + build_u_rec(full, erased[b], b)
    return apply_sequence(state, seq)


def extract_message(restored: State, layout: CodeLayout) -> DensityMatrix:
    """Reduced state of block t+1 after :func:`restore`."""
    if restored.n_qubits < layout.k * (layout.t + 2):
        raise DimensionMismatchError(
            f"state has {restored.n_qubits} qubits; no restore block for k={layout.k}")
    return reduced_density_matrix(restored, layout.block_qubits(layout.restore_block))


# --- circuit text -------------------------------------------------------------

_TEXT_NAMES = {"H": "H", "CNOT": "CX", "TOFFOLI": "CCX", "CZ": "CZ"}
_TEXT_KINDS = {v: k for k, v in _TEXT_NAMES.items()}


def circuit_to_text(seq: GateSequence, n_qubits: int | None = None) -> str:
    """One gate per line under a ``QUBITS n`` header."""
    n = seq.num_qubits() if n_qubits is None else n_qubits
    if n < seq.num_qubits():
        raise DimensionMismatchError(f"sequence needs {seq.num_qubits()} qubits, got {n}")
    lines = [f"QUBITS {n}"]
    for g in seq:
        if g.kind not in _TEXT_NAMES:
            raise ValueError(f"{g.kind} has no text form")
        lines.append(" ".join([_TEXT_NAMES[g.kind], *map(str, g.qubits)]))
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> tuple[int, GateSequence]:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0][0] != "QUBITS" or len(lines[0]) != 2:
        raise ValueError("circuit text must start with 'QUBITS n'")
    n = int(lines[0][1])
    gates = []
    for parts in lines[1:]:
        if parts[0] not in _TEXT_KINDS:
            raise ValueError(f"unknown gate {parts[0]!r}")
        gates.append(Gate(_TEXT_KINDS[parts[0]], tuple(int(p) for p in parts[1:])))
    return n, GateSequence(tuple(gates))
