"""Exact dense statevector simulation for small qubit registers.

Convention: qubit 0 is the most significant bit of the amplitude index,
so for n qubits the basis state |q0 q1 ... q_{n-1}> sits at index
q0*2^(n-1) + q1*2^(n-2) + ... + q_{n-1}. All gate and expectation code
below shares this convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import cos, sin

import numpy as np

ROTATION_KINDS = ("RX", "RY", "RZ")
ENTANGLER_KINDS = ("CNOT", "CZ")
GATE_KINDS = ROTATION_KINDS + ENTANGLER_KINDS

MAX_QUBITS = 12


@dataclass(frozen=True)
class Gate:
    """A single circuit operation: Pauli rotation or two-qubit entangler."""

    kind: str
    target: int
    control: int | None = None
    angle: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind in ROTATION_KINDS:
            if self.angle is None:
                raise ValueError(f"{self.kind} gate requires an angle")
            if self.control is not None:
                raise ValueError(f"{self.kind} gate takes no control qubit")
        else:
            if self.control is None:
                raise ValueError(f"{self.kind} gate requires a control qubit")
            if self.angle is not None:
                raise ValueError(f"{self.kind} gate takes no angle")
            if self.control == self.target:
                raise ValueError("control and target qubits must differ")


@dataclass
class Statevector:
    """Amplitudes of an n-qubit register; len(amplitudes) == 2**n_qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amplitudes.copy())


def init_zero(n_qubits: int) -> Statevector:
    """|0...0>: amplitude 1 at index 0."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(n_qubits, amps)


@lru_cache(maxsize=None)
def pair_indices(n_qubits: int, qubit: int) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs (bit of `qubit` clear, bit set) over the full register."""
    bit = 1 << (n_qubits - 1 - qubit)
    idx = np.arange(2**n_qubits)
    lo = idx[(idx & bit) == 0]
    hi = lo | bit
    lo.setflags(write=False)
    hi.setflags(write=False)
    return lo, hi


@lru_cache(maxsize=None)
def controlled_pair_indices(
    n_qubits: int, control: int, target: int
) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs with the control bit set, split by the target bit."""
    cbit = 1 << (n_qubits - 1 - control)
    tbit = 1 << (n_qubits - 1 - target)
    idx = np.arange(2**n_qubits)
    lo = idx[((idx & cbit) != 0) & ((idx & tbit) == 0)]
    hi = lo | tbit
    lo.setflags(write=False)
    hi.setflags(write=False)
    return lo, hi


def _check_qubit(qubit: int, n_qubits: int) -> None:
    if not 0 <= qubit < n_qubits:
        raise ValueError(f"qubit index {qubit} out of range for {n_qubits} qubits")


def rotate_pairs(
    amps: np.ndarray,
    kind: str,
    lo: np.ndarray,
    hi: np.ndarray,
    half_angle,
) -> None:
    """Apply a Pauli rotation in place to the (lo, hi) amplitude pairs.

    `half_angle` may be a scalar or an array broadcastable against
    amps[..., lo]; this is what lets circuit evaluation vectorize over
    samples and over shifted parameter vectors at once.
    """
    a0 = amps[..., lo]
    a1 = amps[..., hi]
    if kind == "RZ":
        phase = np.exp(-1j * np.asarray(half_angle))
        amps[..., lo] = phase * a0
        amps[..., hi] = np.conj(phase) * a1
        return
    c = np.cos(half_angle)
    s = np.sin(half_angle)
    if kind == "RY":
        amps[..., lo] = c * a0 - s * a1
        amps[..., hi] = s * a0 + c * a1
    elif kind == "RX":
        amps[..., lo] = c * a0 - 1j * s * a1
        amps[..., hi] = -1j * s * a0 + c * a1
    else:
        raise ValueError(f"not a rotation kind: {kind!r}")


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    """Return the state transformed by one gate (norm-preserving)."""
    n = state.n_qubits
    _check_qubit(gate.target, n)
    amps = state.amplitudes.copy()
    if gate.kind in ROTATION_KINDS:
        lo, hi = pair_indices(n, gate.target)
        rotate_pairs(amps, gate.kind, lo, hi, gate.angle / 2.0)
    else:
        _check_qubit(gate.control, n)
        lo, hi = controlled_pair_indices(n, gate.control, gate.target)
        if gate.kind == "CNOT":
            amps[lo], amps[hi] = amps[hi], amps[lo]
        else:  # CZ: phase flip where both bits are set
            amps[hi] = -amps[hi]
    return Statevector(n, amps)


def expect_z(state: Statevector, qubit: int) -> float:
    """Pauli-Z expectation on one qubit: +1 weight where its bit is 0."""
    _check_qubit(qubit, state.n_qubits)
    lo, hi = pair_indices(state.n_qubits, qubit)
    probs = np.abs(state.amplitudes) ** 2
    return float(probs[lo].sum() - probs[hi].sum())


def rotation_matrix(kind: str, angle: float) -> np.ndarray:
    """2x2 matrix of a Pauli rotation (reference for matrix-based oracles)."""
    c, s = cos(angle / 2.0), sin(angle / 2.0)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == "RZ":
        return np.array(
            [[np.exp(-1j * angle / 2.0), 0.0], [0.0, np.exp(1j * angle / 2.0)]],
            dtype=np.complex128,
        )
    raise ValueError(f"not a rotation kind: {kind!r}")
