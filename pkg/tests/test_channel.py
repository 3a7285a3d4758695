import numpy as np
import pytest

from conftest import embed
from ghz_erasure.channel import (
    CorruptionModel,
    ErasureEvent,
    apply_erasure,
    erasure_flags,
    parse_model,
    random_leak_unitary,
)
from ghz_erasure.codec import CodeLayout, encode, extract_message, restore
from ghz_erasure.errors import BudgetError, DimensionMismatchError, InvalidPatternError
from ghz_erasure.statevector import (
    CNOT,
    Gate,
    H,
    apply_gate,
    apply_sequence,
    basis_state,
    fidelity,
    insert_zero_qubits,
    random_state,
    reduced_density_matrix,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
PAULI_KINDS = ("IDENTITY", "BIT_FLIP", "PHASE_FLIP", "BIT_PHASE_FLIP")


def test_pauli_unitaries():
    i2 = np.eye(2)
    assert np.array_equal(CorruptionModel("PHASE_FLIP").unitary(), np.kron(Z, i2))
    assert np.array_equal(CorruptionModel("BIT_FLIP").unitary(), np.kron(X, i2))
    assert np.array_equal(CorruptionModel("BIT_PHASE_FLIP").unitary(), np.kron(X @ Z, i2))
    assert np.array_equal(CorruptionModel("IDENTITY").unitary(), np.eye(4))


def test_model_validation():
    with pytest.raises(ValueError):
        CorruptionModel("DEPOLARIZE")
    with pytest.raises(ValueError):
        CorruptionModel("ENTANGLING_LEAK")
    with pytest.raises(ValueError):
        CorruptionModel("ENTANGLING_LEAK", np.ones((4, 4)))
    with pytest.raises(ValueError):
        CorruptionModel("PHASE_FLIP", np.eye(4))


def test_leak_is_deterministic():
    assert np.array_equal(random_leak_unitary(3).unitary(), random_leak_unitary(3).unitary())


@pytest.mark.parametrize("seed", range(10))
def test_leak_is_unitary(seed):
    u = random_leak_unitary(seed).unitary()
    assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-12


def test_leak_seeds_give_distinct_matrices():
    mats = [random_leak_unitary(s).unitary() for s in range(10)]
    for i in range(10):
        for j in range(i + 1, 10):
            assert np.max(np.abs(mats[i] - mats[j])) > 1e-6


def test_leak_entangles():
    # a generic dilation leaves qubit and environment correlated
    plus = insert_zero_qubits(apply_gate(basis_state(1, 0), H(0)), 1, 1)
    s = apply_gate(plus, Gate("U2Q", (0, 1), random_leak_unitary(0).unitary()))
    rho = reduced_density_matrix(s, [1]).entries
    assert np.linalg.eigvalsh(rho).min() > 1e-3


@pytest.mark.parametrize("text,kind,seed", [
    ("phase", "PHASE_FLIP", None), ("BIT_FLIP", "BIT_FLIP", None), ("y", "BIT_PHASE_FLIP", None),
    ("none", "IDENTITY", None), ("leak@7", "ENTANGLING_LEAK", 7), ("leak", "ENTANGLING_LEAK", 0),
])
def test_parse_model(text, kind, seed):
    m = parse_model(text)
    assert m.kind == kind and m.seed == seed


def test_parse_model_rejects():
    with pytest.raises(ValueError):
        parse_model("phase@2")
    with pytest.raises(ValueError):
        parse_model("gamma")


def test_model_names():
    assert CorruptionModel("BIT_FLIP").name == "BIT_FLIP"
    assert random_leak_unitary(2).name == "ENTANGLING_LEAK@2"


# --- apply_erasure ---------------------------------------------------------------------

def test_identity_only_appends_environment(rng):
    layout = CodeLayout(3)
    enc = encode(random_state(3, rng), layout)
    ev = [ErasureEvent(1, 2, CorruptionModel("IDENTITY"))]
    out = apply_erasure(enc, layout, ev)
    assert out.allclose(insert_zero_qubits(enc, 6, 1))


def test_phase_flip_matches_dense_operator(rng):
    layout = CodeLayout(3)
    enc = encode(random_state(3, rng), layout)
    ev = [ErasureEvent(0, 1, CorruptionModel("PHASE_FLIP"))]
    out = apply_erasure(enc, layout, ev)
    expected = np.kron(embed(6, {0: Z}) @ enc.amplitudes, [1, 0])
    assert np.max(np.abs(out.amplitudes - expected)) < 1e-12


def test_environment_qubits_follow_event_order(rng):
    layout = CodeLayout(5)
    enc = encode(random_state(5, rng), layout)
    ev = [ErasureEvent(1, 5, CorruptionModel("BIT_FLIP")),
          ErasureEvent(0, 1, CorruptionModel("IDENTITY"), env_qubit=16)]
    out = apply_erasure(enc, layout, ev)
    assert out.n_qubits == 17
    with pytest.raises(InvalidPatternError):
        apply_erasure(enc, layout, [ErasureEvent(0, 1, CorruptionModel("IDENTITY"), 20)])


def test_duplicate_blocks_rejected(rng):
    layout = CodeLayout(5)
    enc = encode(random_state(5, rng), layout)
    ph = CorruptionModel("PHASE_FLIP")
    with pytest.raises(InvalidPatternError):
        apply_erasure(enc, layout, [ErasureEvent(0, 1, ph), ErasureEvent(0, 2, ph)])


def test_budget_enforced(rng):
    layout = CodeLayout(3)
    enc = encode(random_state(3, rng), layout)
    ph = CorruptionModel("PHASE_FLIP")
    with pytest.raises(BudgetError):
        apply_erasure(enc, layout, [ErasureEvent(0, 1, ph), ErasureEvent(1, 1, ph)])


def test_requires_encoded_width(rng):
    with pytest.raises(DimensionMismatchError):
        apply_erasure(random_state(5, rng), CodeLayout(3), [])


@pytest.mark.parametrize("model", [CorruptionModel(k) for k in PAULI_KINDS]
                         + [random_leak_unitary(s) for s in range(3)], ids=lambda m: m.name)
def test_norm_preserved(model, rng):
    layout = CodeLayout(5)
    enc = encode(random_state(5, rng), layout)
    out = apply_erasure(enc, layout, [ErasureEvent(0, 3, model), ErasureEvent(2, 5, model)])
    assert abs(out.norm() - 1) < 1e-12


def test_commutes_with_disjoint_gates(rng):
    layout = CodeLayout(3)
    enc = encode(random_state(3, rng), layout)
    ev = [ErasureEvent(0, 2, random_leak_unitary(1))]
    gates = [H(0), CNOT(3, 5), CNOT(0, 4)]  # qubit 1 (position 2 of block 0) untouched
    first = apply_sequence(apply_erasure(enc, layout, ev), gates)
    second = apply_erasure(apply_sequence(enc, gates), layout, ev)
    assert first.allclose(second, atol=1e-12)


@pytest.mark.parametrize("kind", PAULI_KINDS)
def test_erased_qubit_stays_maximally_mixed(kind, rng):
    layout = CodeLayout(3)
    enc = encode(random_state(3, rng), layout)
    for b in range(2):
        for a in range(1, 4):
            out = apply_erasure(enc, layout, [ErasureEvent(b, a, CorruptionModel(kind))])
            rho = reduced_density_matrix(out, [layout.qubit(a, b)]).entries
            assert np.max(np.abs(rho - np.eye(2) / 2)) < 1e-12


def test_erasure_flags_from_events():
    ph = CorruptionModel("PHASE_FLIP")
    flags = erasure_flags([ErasureEvent(1, 5, ph), ErasureEvent(0, 1, ph)])
    assert flags.entries == ((0, 1), (1, 5))


def test_leak_recovered_every_single_position_k3():
    layout = CodeLayout(3)
    for seed in range(5):
        model = random_leak_unitary(100 + seed)
        psi = random_state(3, np.random.default_rng(seed))
        for b in range(2):
            for a in range(1, 4):
                ev = [ErasureEvent(b, a, model)]
                out = restore(apply_erasure(encode(psi, layout), layout, ev), layout,
                              erasure_flags(ev))
                assert fidelity(extract_message(out, layout), psi) >= 1 - 1e-10
