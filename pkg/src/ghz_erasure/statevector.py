"""Dense pure-state simulator.

Qubit ``g`` of an ``n``-qubit register is the ``(n - 1 - g)``-th binary digit
of the basis index, so ket labels read left to right as qubit 0, 1, ...
(qubit 0 is the most significant bit).

Gates are applied in place over the amplitude array by iterating the groups
of basis indices a gate mixes (numba-compiled loops); no ``2**n x 2**n``
matrix is ever built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
from numba import njit

from .errors import (
    CapacityError,
    DimensionMismatchError,
    InvalidGateError,
    InvalidSubsetError,
)

MAX_QUBITS = 24
MAX_REDUCED_QUBITS = 12
ATOL = 1e-12

# kind -> number of qubits it acts on
GATE_ARITY = {"H": 1, "CNOT": 2, "TOFFOLI": 3, "CZ": 2, "U1Q": 1, "U2Q": 2}


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _check_capacity(n: int) -> None:
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the dense limit of {MAX_QUBITS}")


@dataclass(frozen=True, eq=False)
class State:
    """Normalized pure state of ``n_qubits`` qubits.

    Instances are immutable; the amplitude array is marked read-only so a
    State can be shared between threads.
    """

    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = self.amplitudes
        if amps.ndim != 1 or amps.shape[0] != 1 << self.n_qubits:
            raise DimensionMismatchError(
                f"{self.n_qubits} qubits need {1 << self.n_qubits} amplitudes, "
                f"got shape {amps.shape}"
            )
        if amps.dtype != np.complex128 or amps.flags.writeable:
            amps = _readonly(np.array(amps, dtype=np.complex128))
            object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex] | np.ndarray,
                        normalize: bool = False) -> "State":
        """Build a state from a vector of ``2**n`` amplitudes.

        Raises DimensionMismatchError when the length is not a power of two
        and ValueError when the vector is not normalized (unless
        ``normalize`` is set).
        """
        amps = np.array(amplitudes, dtype=np.complex128).ravel()
        size = amps.shape[0]
        if size == 0 or size & (size - 1):
            raise DimensionMismatchError(f"length {size} is not a power of two")
        n = size.bit_length() - 1
        _check_capacity(n)
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0:
                raise ValueError("cannot normalize the zero vector")
            amps /= norm
        elif abs(norm - 1.0) > ATOL:
            raise ValueError(f"state is not normalized (norm={norm!r})")
        return cls(n, _readonly(amps))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __len__(self) -> int:
        return self.amplitudes.shape[0]

    def allclose(self, other: "State", atol: float = ATOL) -> bool:
        """Per-amplitude comparison (no global-phase freedom)."""
        return (self.n_qubits == other.n_qubits
                and bool(np.max(np.abs(self.amplitudes - other.amplitudes)) <= atol))

    def label(self, atol: float = 1e-9) -> str:
        """Human-readable ket expansion, mostly for debugging."""
        terms = []
        for idx in np.flatnonzero(np.abs(self.amplitudes) > atol):
            amp = self.amplitudes[idx]
            terms.append(f"({amp.real:+.4f}{amp.imag:+.4f}j)|{idx:0{self.n_qubits}b}>")
        return " ".join(terms) if terms else "0"


@dataclass(frozen=True, eq=False)
class Gate:
    """Elementary gate. ``qubits`` lists controls first and the target last.

    ``matrix`` is only used by U1Q / U2Q. For U2Q the first listed qubit is
    the more significant bit of the 4x4 matrix's row/column index.
    """

    kind: str
    qubits: tuple[int, ...]
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if kind not in GATE_ARITY:
            raise InvalidGateError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != GATE_ARITY[kind]:
            raise InvalidGateError(
                f"{kind} acts on {GATE_ARITY[kind]} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise InvalidGateError(f"{kind} qubits collide: {self.qubits}")
        if min(self.qubits) < 0:
            raise InvalidGateError(f"negative qubit index in {self.qubits}")
        if kind in ("U1Q", "U2Q"):
            if self.matrix is None:
                raise InvalidGateError(f"{kind} needs a matrix")
            dim = 2 ** GATE_ARITY[kind]
            m = _readonly(np.array(self.matrix, dtype=np.complex128))
            if m.shape != (dim, dim):
                raise InvalidGateError(f"{kind} matrix must be {dim}x{dim}, got {m.shape}")
            if np.max(np.abs(m.conj().T @ m - np.eye(dim))) > ATOL:
                raise InvalidGateError(f"{kind} matrix is not unitary")
            object.__setattr__(self, "matrix", m)
        elif self.matrix is not None:
            raise InvalidGateError(f"{kind} does not take a matrix")

    def __repr__(self) -> str:
        return f"{self.kind}{self.qubits}"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gate):
            return NotImplemented
        if self.kind != other.kind or self.qubits != other.qubits:
            return False
        if self.matrix is None:
            return other.matrix is None
        return other.matrix is not None and np.array_equal(self.matrix, other.matrix)

    def __hash__(self) -> int:
        return hash((self.kind, self.qubits))


def H(q: int) -> Gate:
    return Gate("H", (q,))


def CNOT(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


def TOFFOLI(c1: int, c2: int, target: int) -> Gate:
    return Gate("TOFFOLI", (c1, c2, target))


def CZ(control: int, target: int) -> Gate:
    return Gate("CZ", (control, target))


@dataclass(frozen=True)
class GateSequence:
    """Gates in application order: ``gates[0]`` acts first."""

    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __getitem__(self, i):
        return self.gates[i]

    def __add__(self, other: "GateSequence") -> "GateSequence":
        return GateSequence(self.gates + tuple(other))

    def inverse(self) -> "GateSequence":
        inv = []
        for g in reversed(self.gates):
            if g.matrix is not None:
                g = Gate(g.kind, g.qubits, g.matrix.conj().T)
            inv.append(g)
        return GateSequence(tuple(inv))

    def qubits(self) -> set[int]:
        return {q for g in self.gates for q in g.qubits}

    def num_qubits(self) -> int:
        """Smallest register the sequence fits in."""
        return max(self.qubits(), default=-1) + 1


# --- kernels ---------------------------------------------------------------
# Each kernel walks the 2**(n - m) index groups of an m-qubit gate: a group
# base index is ``j`` with zeros spliced in at the gate's bit positions.
# Groups whose result equals their input skip the write-back; encoded states
# are mostly zeros, and unwritten cache lines halve the memory traffic.

@njit(cache=True, nogil=True)
def _spread(j, positions):
    for p in positions:  # ascending bit positions
        j = ((j >> p) << (p + 1)) | (j & ((1 << p) - 1))
    return j


@njit(cache=True, nogil=True)
def _k_mcx(amps, positions, ctrl_mask, tgt_mask):
    for j in range(amps.shape[0] >> positions.shape[0]):
        i0 = _spread(j, positions) | ctrl_mask
        i1 = i0 | tgt_mask
        a0 = amps[i0]
        a1 = amps[i1]
        if a0 != a1:
            amps[i0] = a1
            amps[i1] = a0


@njit(cache=True, nogil=True)
def _k_mcz(amps, positions, mask):
    for j in range(amps.shape[0] >> positions.shape[0]):
        i = _spread(j, positions) | mask
        a = amps[i]
        if a != 0:
            amps[i] = -a


@njit(cache=True, nogil=True)
def _k_u1(amps, positions, tgt_mask, m):
    m00, m01, m10, m11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    for j in range(amps.shape[0] >> 1):
        i0 = _spread(j, positions)
        i1 = i0 | tgt_mask
        a0 = amps[i0]
        a1 = amps[i1]
        amps[i0] = m00 * a0 + m01 * a1
        amps[i1] = m10 * a0 + m11 * a1


@njit(cache=True, nogil=True)
def _k_h(amps, positions, tgt_mask):
    r = 0.7071067811865476
    for j in range(amps.shape[0] >> 1):
        i0 = _spread(j, positions)
        i1 = i0 | tgt_mask
        a0 = amps[i0]
        a1 = amps[i1]
        if a0 != 0 or a1 != 0:
            amps[i0] = (a0 + a1) * r
            amps[i1] = (a0 - a1) * r


@njit(cache=True, nogil=True)
def _k_u2(amps, positions, hi_mask, lo_mask, m):
    idx = np.empty(4, dtype=np.int64)
    vals = np.empty(4, dtype=np.complex128)
    for j in range(amps.shape[0] >> 2):
        base = _spread(j, positions)
        idx[0] = base
        idx[1] = base | lo_mask
        idx[2] = base | hi_mask
        idx[3] = base | hi_mask | lo_mask
        for a in range(4):
            vals[a] = amps[idx[a]]
        for a in range(4):
            acc = 0j
            for b in range(4):
                acc += m[a, b] * vals[b]
            amps[idx[a]] = acc


@njit(cache=True, nogil=True)
def _k_classical_run(src, dst, ctrl_masks, tgt_masks):
    # Gates with tgt_mask == 0 are CZ-type: ctrl_mask holds both qubits and
    # the amplitude picks up a sign; otherwise the target bit is flipped.
    n_gates = ctrl_masks.shape[0]
    for i in range(src.shape[0]):
        a = src[i]
        if a == 0:
            continue
        cur = i
        neg = False
        for g in range(n_gates):
            c = ctrl_masks[g]
            if cur & c == c:
                t = tgt_masks[g]
                if t == 0:
                    neg = not neg
                else:
                    cur ^= t
        dst[cur] = -a if neg else a


@njit(cache=True, nogil=True)
def _k_support(amps):
    out = np.empty(amps.shape[0], dtype=np.int64)
    j = 0
    for i in range(amps.shape[0]):
        if amps[i] != 0:
            out[j] = i
            j += 1
    return out[:j].copy()


_CLASSICAL = ("CNOT", "TOFFOLI", "CZ")


def _run_masks(gates: list[Gate], n: int) -> tuple[np.ndarray, np.ndarray]:
    ctrl = np.zeros(len(gates), dtype=np.int64)
    tgt = np.zeros(len(gates), dtype=np.int64)
    for j, g in enumerate(gates):
        bits = [1 << (n - 1 - q) for q in g.qubits]
        if g.kind == "CZ":
            ctrl[j] = bits[0] | bits[1]
        else:
            ctrl[j] = sum(bits[:-1])
            tgt[j] = bits[-1]
    return ctrl, tgt


def _apply_inplace(amps: np.ndarray, n: int, gate: Gate) -> None:
    bits = [n - 1 - q for q in gate.qubits]
    positions = np.array(sorted(bits), dtype=np.int64)
    kind = gate.kind
    if kind in ("CNOT", "TOFFOLI"):
        ctrl = 0
        for b in bits[:-1]:
            ctrl |= 1 << b
        _k_mcx(amps, positions, ctrl, 1 << bits[-1])
    elif kind == "CZ":
        _k_mcz(amps, positions, (1 << bits[0]) | (1 << bits[1]))
    elif kind == "H":
        _k_h(amps, positions, 1 << bits[0])
    elif kind == "U1Q":
        _k_u1(amps, positions, 1 << bits[0], gate.matrix)
    elif kind == "U2Q":
        _k_u2(amps, positions, 1 << bits[0], 1 << bits[1], gate.matrix)
    else:  # pragma: no cover - Gate validates kinds
        raise InvalidGateError(f"unsupported gate {kind}")


def _check_gate(gate: Gate, n: int, index: int | None = None) -> None:
    if not isinstance(gate, Gate):
        raise InvalidGateError(f"not a Gate: {gate!r}", index)
    if max(gate.qubits) >= n:
        raise InvalidGateError(f"{gate!r} addresses a qubit outside 0..{n - 1}", index)


# --- public operations ------------------------------------------------------

def new_zero_state(n: int) -> State:
    """|0...0> on ``n`` qubits, 1 <= n <= 24."""
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the dense limit of {MAX_QUBITS}")
    if n < 1:
        raise CapacityError(f"need at least one qubit, got {n}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return State(n, _readonly(amps))


def empty_state() -> State:
    """The 0-qubit state (scalar 1); the identity for :func:`tensor`."""
    return State(0, _readonly(np.ones(1, dtype=np.complex128)))


def basis_state(n: int, index: int) -> State:
    """Computational basis state |index> on ``n`` qubits."""
    _check_capacity(n)
    if not 0 <= index < 1 << n:
        raise ValueError(f"basis index {index} out of range for {n} qubits")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index] = 1.0
    return State(n, _readonly(amps))


def random_state(n: int, rng: np.random.Generator) -> State:
    """Normalized complex Gaussian vector; Haar-distributed pure state."""
    _check_capacity(n)
    size = 1 << n
    amps = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    amps /= np.linalg.norm(amps)
    return State(n, _readonly(amps))


def apply_gate(s: State, g: Gate) -> State:
    _check_gate(g, s.n_qubits)
    amps = s.amplitudes.copy()
    _apply_inplace(amps, s.n_qubits, g)
    return State(s.n_qubits, _readonly(amps))


def apply_sequence(s: State, seq: GateSequence | Iterable[Gate]) -> State:
    """Apply gates in list order. All gates are validated before any runs.

    Consecutive CNOT / Toffoli / CZ gates form a signed permutation of the
    basis; such runs are applied in a single pass over the amplitudes.
    """
    gates = list(seq)
    for i, g in enumerate(gates):
        _check_gate(g, s.n_qubits, i)
    n = s.n_qubits
    amps = s.amplitudes
    owned = False
    run: list[Gate] = []

    def flush(amps, owned):
        if len(run) > 1:
            # np.zeros rather than zeros_like: calloc pages stay lazily zeroed
            out = np.zeros(amps.shape[0], dtype=np.complex128)
            _k_classical_run(amps, out, *_run_masks(run, n))
            amps, owned = out, True
        elif run:
            if not owned:
                amps, owned = amps.copy(), True
            _apply_inplace(amps, n, run[0])
        run.clear()
        return amps, owned

    for g in gates:
        if g.kind in _CLASSICAL:
            run.append(g)
            continue
        amps, owned = flush(amps, owned)
        if not owned:
            amps, owned = amps.copy(), True
        _apply_inplace(amps, n, g)
    amps, owned = flush(amps, owned)
    if not owned:
        amps = amps.copy()
    return State(n, _readonly(amps))


def tensor(a: State, b: State) -> State:
    """``a (x) b``; the qubits of ``a`` come first (most significant)."""
    n = a.n_qubits + b.n_qubits
    _check_capacity(n)
    return State(n, _readonly(np.kron(a.amplitudes, b.amplitudes)))


def insert_zero_qubits(s: State, at: int, count: int) -> State:
    """Insert ``count`` fresh |0> qubits so they become qubits ``at..at+count-1``."""
    if not 0 <= at <= s.n_qubits:
        raise InvalidSubsetError(f"insertion point {at} outside 0..{s.n_qubits}")
    n = s.n_qubits + count
    _check_capacity(n)
    before = s.amplitudes.reshape(1 << at, 1 << (s.n_qubits - at))
    out = np.zeros((1 << at, 1 << count, 1 << (s.n_qubits - at)), dtype=np.complex128)
    out[:, 0, :] = before
    return State(n, _readonly(out.reshape(-1)))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Reduced state of a qubit subset; qubits keep their ascending order."""

    n_qubits: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _readonly(np.array(self.entries, dtype=np.complex128))
        dim = 1 << self.n_qubits
        if m.shape != (dim, dim):
            raise DimensionMismatchError(f"expected {dim}x{dim}, got {m.shape}")
        object.__setattr__(self, "entries", m)

    @classmethod
    def from_state(cls, psi: State) -> "DensityMatrix":
        v = psi.amplitudes
        return cls(psi.n_qubits, np.outer(v, v.conj()))

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


def _subset(n: int, keep: Iterable[int]) -> list[int]:
    keep = sorted(set(int(q) for q in keep))
    if not keep:
        raise InvalidSubsetError("keep set is empty")
    if keep[0] < 0 or keep[-1] >= n:
        raise InvalidSubsetError(f"keep set {keep} not within 0..{n - 1}")
    if len(keep) > MAX_REDUCED_QUBITS:
        raise InvalidSubsetError(
            f"cannot keep {len(keep)} qubits (limit {MAX_REDUCED_QUBITS})")
    return keep


def reduced_density_matrix(s: State, keep: Iterable[int]) -> DensityMatrix:
    """Partial trace over every qubit not in ``keep``.

    Only nonzero amplitudes enter the contraction, which keeps the cost
    proportional to the state's support rather than to ``2**n``.
    """
    n = s.n_qubits
    keep = _subset(n, keep)
    m = len(keep)
    amps = s.amplitudes
    nz = _k_support(amps)
    vals = amps[nz]
    kept_idx = np.zeros(nz.shape, dtype=np.int64)
    for q in keep:
        kept_idx = (kept_idx << 1) | ((nz >> (n - 1 - q)) & 1)
    rest_mask = (1 << n) - 1
    for q in keep:
        rest_mask &= ~(1 << (n - 1 - q))
    rest_idx = nz & rest_mask
    cols, col_of = np.unique(rest_idx, return_inverse=True)
    mat = np.zeros((1 << m, cols.shape[0]), dtype=np.complex128)
    mat[kept_idx, col_of] = vals
    return DensityMatrix(m, mat @ mat.conj().T)


def fidelity(rho: DensityMatrix, psi: State) -> float:
    """<psi|rho|psi>, clipped into [0, 1]."""
    if rho.n_qubits != psi.n_qubits:
        raise DimensionMismatchError(
            f"density matrix on {rho.n_qubits} qubits vs state on {psi.n_qubits}")
    v = psi.amplitudes
    f = float(np.real(np.vdot(v, rho.entries @ v)))
    return min(1.0, max(0.0, f))


def inner_product(a: State, b: State) -> complex:
    """<a|b>."""
    if a.n_qubits != b.n_qubits:
        raise DimensionMismatchError(f"{a.n_qubits} vs {b.n_qubits} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))
