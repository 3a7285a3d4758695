"""Flagged erasure channel.

An erasure at a known position is modelled as a two-qubit unitary coupling
the erased qubit to a fresh environment qubit prepared in |0>. The recovery
circuit never touches the erased qubit, so any single-qubit corruption can be
represented this way without leaving the pure-state picture.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .codec import CodeLayout, ErasureFlags
from .errors import BudgetError, DimensionMismatchError, InvalidFlagsError, InvalidPatternError
from .statevector import ATOL, Gate, State, apply_sequence, insert_zero_qubits

KINDS = ("IDENTITY", "BIT_FLIP", "PHASE_FLIP", "BIT_PHASE_FLIP", "ENTANGLING_LEAK")

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULI = {
    "IDENTITY": _I2,
    "BIT_FLIP": _X,
    "PHASE_FLIP": _Z,
    "BIT_PHASE_FLIP": _X @ _Z,
}

# CLI spellings
ALIASES = {
    "identity": "IDENTITY", "id": "IDENTITY", "none": "IDENTITY",
    "bit_flip": "BIT_FLIP", "bit": "BIT_FLIP", "x": "BIT_FLIP",
    "phase_flip": "PHASE_FLIP", "phase": "PHASE_FLIP", "z": "PHASE_FLIP",
    "bit_phase_flip": "BIT_PHASE_FLIP", "bitphase": "BIT_PHASE_FLIP", "y": "BIT_PHASE_FLIP",
    "entangling_leak": "ENTANGLING_LEAK", "leak": "ENTANGLING_LEAK",
}


@dataclass(frozen=True, eq=False)
class CorruptionModel:
    """What happens to an erased qubit.

    ``unitary()`` acts on (erased qubit, environment qubit), with the erased
    qubit as the more significant bit.
    """

    kind: str
    leak_unitary: np.ndarray | None = field(default=None, repr=False)
    seed: int | None = None

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in KINDS:
            raise ValueError(f"unknown corruption model {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "ENTANGLING_LEAK":
            if self.leak_unitary is None:
                raise ValueError("ENTANGLING_LEAK needs a 4x4 unitary")
            u = np.array(self.leak_unitary, dtype=complex)
            if u.shape != (4, 4) or np.max(np.abs(u.conj().T @ u - np.eye(4))) > ATOL:
                raise ValueError("leak unitary must be a 4x4 unitary")
            u.flags.writeable = False
            object.__setattr__(self, "leak_unitary", u)
        elif self.leak_unitary is not None:
            raise ValueError(f"{kind} does not take a unitary")

    @property
    def name(self) -> str:
        if self.kind == "ENTANGLING_LEAK":
            return f"ENTANGLING_LEAK@{self.seed}" if self.seed is not None else "ENTANGLING_LEAK"
        return self.kind

    def unitary(self) -> np.ndarray:
        if self.kind == "ENTANGLING_LEAK":
            return self.leak_unitary
        return np.kron(_PAULI[self.kind], _I2)


def random_leak_unitary(seed: int) -> CorruptionModel:
    """Haar-random 4x4 unitary from a seeded complex Gaussian matrix (QR with phase fix)."""
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return CorruptionModel("ENTANGLING_LEAK", q, seed=seed)


def parse_model(text: str, default_seed: int = 0) -> CorruptionModel:
    """``phase``, ``BIT_FLIP``, ``leak`` (uses ``default_seed``) or ``leak@7``."""
    name, _, seed = text.strip().partition("@")
    kind = ALIASES.get(name.lower(), name.upper())
    if kind == "ENTANGLING_LEAK":
        return random_leak_unitary(int(seed) if seed else default_seed)
    if seed:
        raise ValueError(f"only ENTANGLING_LEAK takes a seed, got {text!r}")
    return CorruptionModel(kind)


@dataclass(frozen=True)
class ErasureEvent:
    """One flagged erasure. ``env_qubit`` may be left unset; when given it must
    match the index :func:`apply_erasure` assigns."""

    block: int
    position: int
    model: CorruptionModel
    env_qubit: int | None = None


def erasure_flags(events: Sequence[ErasureEvent]) -> ErasureFlags:
    """Flags to hand to the restoring operation."""
    return ErasureFlags(tuple((e.block, e.position) for e in events))


def apply_erasure(s: State, layout: CodeLayout, events: Sequence[ErasureEvent]) -> State:
    """Corrupt the encoded state ``s`` at the flagged positions.

    One |0> environment qubit per event is appended after the code qubits,
    in event order, so event ``j`` couples to qubit ``k(t+1) + j``. Use
    :func:`erasure_flags` on the same events to drive the restoring operation.
    """
    if s.n_qubits != layout.n_code_qubits:
        raise DimensionMismatchError(
            f"expected the {layout.n_code_qubits}-qubit encoded state, got {s.n_qubits} qubits")
    blocks = [e.block for e in events]
    if len(set(blocks)) != len(blocks):
        raise InvalidPatternError(f"two erasures in one block: {blocks}")
    if len(events) > layout.t:
        raise BudgetError(f"{len(events)} erasures exceed the budget t={layout.t}")
    gates = []
    for j, e in enumerate(events):
        if not 0 <= e.block <= layout.t:
            raise InvalidFlagsError(f"block {e.block} is not a code block (0..{layout.t})")
        env = s.n_qubits + j
        if e.env_qubit is not None and e.env_qubit != env:
            raise InvalidPatternError(f"event {j} names env qubit {e.env_qubit}, expected {env}")
        gates.append(Gate("U2Q", (layout.qubit(e.position, e.block), env), e.model.unitary()))
    if not events:
        return s
    return apply_sequence(insert_zero_qubits(s, s.n_qubits, len(events)), gates)
