"""Ground truth built without the codec's gate builders.

The encoded state is written down amplitude by amplitude, and the sweep
enumerates erasure patterns on its own, so agreement with :mod:`codec` is
real evidence rather than a tautology.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import codec
from .channel import CorruptionModel, ErasureEvent, apply_erasure, random_leak_unitary
from .codec import CodeLayout, ErasureFlags
from .errors import DimensionMismatchError
from .statevector import State, basis_state, fidelity, random_state

FIDELITY_THRESHOLD = 1 - 1e-10
AMPLITUDE_TOLERANCE = 1e-12
SUPPORTED_K = (3, 4, 5)


def analytic_encoded_state(psi: State, layout: CodeLayout) -> State:
    """Encoded state by direct amplitude placement.

    Basis word ``i`` maps to the same GHZ pair in every one of the ``t + 1``
    blocks: ``(|x> + s|~x>)/sqrt(2)`` where ``x`` is ``i`` with its last bit
    cleared, ``~x`` its complement and ``s = (-1)**(i & 1)``.
    """
    k, blocks = layout.k, layout.n_code_blocks
    if psi.n_qubits != k:
        raise DimensionMismatchError(f"message has {psi.n_qubits} qubits, expected {k}")
    full = (1 << k) - 1
    out = np.zeros(1 << (k * blocks), dtype=np.complex128)
    scale = 2.0 ** (-blocks / 2)
    for i, lam in enumerate(psi.amplitudes):
        if lam == 0:
            continue
        x = i & ~1
        sign = -1.0 if i & 1 else 1.0
        for picks in itertools.product((0, 1), repeat=blocks):
            index = 0
            for p in picks:
                index = (index << k) | (x ^ full if p else x)
            out[index] += lam * scale * sign ** sum(picks)
    return State(k * blocks, out)


def pattern_count(k: int) -> int:
    """Closed-form number of legal patterns: sum over j of C(t+1, j) * k**j."""
    t = k // 2
    return sum(math.comb(t + 1, j) * k ** j for j in range(t + 1))


def enumerate_patterns(k: int) -> list[ErasureFlags]:
    """Every legal flag set: distinct code blocks, at most t of them, any positions."""
    t = k // 2
    patterns = []
    for size in range(t + 1):
        for blocks in itertools.combinations(range(t + 1), size):
            for positions in itertools.product(range(1, k + 1), repeat=size):
                patterns.append(ErasureFlags(tuple(zip(blocks, positions))))
    return patterns


def default_models() -> list[CorruptionModel]:
    """The four Pauli-type models plus three seeded entangling leaks."""
    paulis = [CorruptionModel(kind) for kind in
              ("IDENTITY", "BIT_FLIP", "PHASE_FLIP", "BIT_PHASE_FLIP")]
    return paulis + [random_leak_unitary(seed) for seed in (0, 1, 2)]


def thread_count(requested: int | None = None) -> int:
    cap = os.environ.get("GHZ_ERASURE_THREADS")
    n = requested or os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


@dataclass(frozen=True)
class CaseRecord:
    pattern: str
    model: str
    trial_seed: int | None
    fidelity: float
    elapsed: float  # milliseconds
    deviation: float | None = None


@dataclass
class Report:
    config: dict
    cases: list[CaseRecord] = field(default_factory=list)

    @property
    def min_fidelity(self) -> float:
        return min((c.fidelity for c in self.cases), default=float("nan"))

    @property
    def mean_fidelity(self) -> float:
        if not self.cases:
            return float("nan")
        return float(np.mean([c.fidelity for c in self.cases]))

    @property
    def max_deviation(self) -> float | None:
        devs = [c.deviation for c in self.cases if c.deviation is not None]
        return max(devs) if devs else None

    def failures(self) -> list[CaseRecord]:
        return [c for c in self.cases if not c.fidelity >= FIDELITY_THRESHOLD]

    @property
    def passed(self) -> bool:
        if not self.cases or self.failures():
            return False
        dev = self.max_deviation
        return dev is None or dev < AMPLITUDE_TOLERANCE

    def groups(self) -> list[dict]:
        """Min and mean fidelity per (pattern, model), in case order."""
        seen: dict[tuple[str, str], list[float]] = {}
        for c in self.cases:
            seen.setdefault((c.pattern, c.model), []).append(c.fidelity)
        return [
            {"pattern": p, "model": m, "min_fidelity": min(f), "mean_fidelity": float(np.mean(f))}
            for (p, m), f in seen.items()
        ]

    def summary(self) -> dict:
        out = {
            "n_cases": len(self.cases),
            "min_fidelity": self.min_fidelity,
            "mean_fidelity": self.mean_fidelity,
            "threshold": FIDELITY_THRESHOLD,
            "n_failures": len(self.failures()),
            "pass": self.passed,
        }
        if self.max_deviation is not None:
            out["max_deviation"] = self.max_deviation
        return out

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "cases": [asdict(c) for c in self.cases],
            "summary": self.summary(),
        }

    def to_json(self, drop_timing: bool = False) -> str:
        data = self.to_dict()
        if drop_timing:
            for c in data["cases"]:
                c.pop("elapsed")
        return json.dumps(data, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        names = [f.name for f in CaseRecord.__dataclass_fields__.values()]
        writer = csv.DictWriter(buf, fieldnames=names, lineterminator="\n")
        writer.writeheader()
        for c in self.cases:
            writer.writerow(asdict(c))
        return buf.getvalue()


def _check_k(k: int) -> None:
    if k not in SUPPORTED_K:
        raise ValueError(f"sweeps support k in {SUPPORTED_K}, got {k}")


def verify_encoding_table(k: int) -> Report:
    """Compare the gate-built encoder with the analytic form on all 2**k basis words."""
    _check_k(k)
    layout = CodeLayout(k)
    report = Report({"k": k, "scenario": "encode-table"})
    for i in range(1 << k):
        start = time.perf_counter()
        psi = basis_state(k, i)
        built = codec.encode(psi, layout).amplitudes
        expected = analytic_encoded_state(psi, layout).amplitudes
        report.cases.append(CaseRecord(
            pattern=f"basis:{i:0{k}b}",
            model="NONE",
            trial_seed=None,
            fidelity=float(abs(np.vdot(expected, built)) ** 2),
            elapsed=(time.perf_counter() - start) * 1e3,
            deviation=float(np.max(np.abs(built - expected))),
        ))
    return report


def run_case(encoded: State, psi: State, layout: CodeLayout, flags: ErasureFlags,
             model: CorruptionModel) -> float:
    """encode is done by the caller; corrupt, restore, extract, compare."""
    events = [ErasureEvent(b, a, model) for b, a in flags.entries]
    corrupted = apply_erasure(encoded, layout, events)
    restored = codec.restore(corrupted, layout, flags)
    return fidelity(codec.extract_message(restored, layout), psi)


def sweep_all_patterns(k: int, models: Sequence[CorruptionModel] | None = None,
                       trials: int = 5, seed: int = 0, threads: int | None = None,
                       patterns: Sequence[ErasureFlags] | None = None) -> Report:
    """encode, corrupt, restore and extract for every pattern x model x trial.

    Trial ``j`` uses the message drawn from ``seed + j``. Records come back
    sorted by pattern, model and trial whatever order the workers finish in.
    """
    _check_k(k)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    models = list(models) if models is not None else default_models()
    patterns = list(patterns) if patterns is not None else enumerate_patterns(k)
    layout = CodeLayout(k)
    messages = [random_state(k, np.random.default_rng(seed + j)) for j in range(trials)]
    encoded = [codec.encode(psi, layout) for psi in messages]

    def one(task):
        p, m, j = task
        start = time.perf_counter()
        f = run_case(encoded[j], messages[j], layout, patterns[p], models[m])
        return task, CaseRecord(str(patterns[p]), models[m].name, seed + j, f,
                                (time.perf_counter() - start) * 1e3)

    tasks = list(itertools.product(range(len(patterns)), range(len(models)), range(trials)))
    n = thread_count(threads)
    if n == 1:
        results = [one(t) for t in tasks]
    else:
        with ThreadPoolExecutor(n) as pool:
            results = list(pool.map(one, tasks))
    results.sort(key=lambda r: r[0])
    config = {
        "k": k,
        "scenario": "sweep",
        "models": [m.name for m in models],
        "trials": trials,
        "seed": seed,
        "n_patterns": len(patterns),
    }
    return Report(config, [r for _, r in results])
