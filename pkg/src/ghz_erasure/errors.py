"""Exception types raised across the package."""

from __future__ import annotations


class GHZErasureError(Exception):
    """Base class for all errors raised by ghz_erasure."""


class CapacityError(GHZErasureError):
    """Requested state exceeds the dense-simulation qubit limit."""


class InvalidGateError(GHZErasureError, ValueError):
    """A gate names bad qubits or carries a non-unitary matrix.

    When raised from a sequence, ``gate_index`` is the position of the
    offending gate in that sequence.
    """

    def __init__(self, message: str, gate_index: int | None = None):
        if gate_index is not None:
            message = f"gate #{gate_index}: {message}"
        super().__init__(message)
        self.gate_index = gate_index


class InvalidSubsetError(GHZErasureError, ValueError):
    """Qubit subset for a partial trace is empty, too large or out of range."""


class DimensionMismatchError(GHZErasureError, ValueError):
    """Two objects that must share a Hilbert space do not."""


class InvalidFlagsError(GHZErasureError, ValueError):
    """Erasure flags that the scheme cannot handle."""


class InvalidPatternError(InvalidFlagsError):
    """Erasure events hit the same block twice."""


class BudgetError(InvalidFlagsError):
    """More erasures than the code corrects (|B| > t)."""
