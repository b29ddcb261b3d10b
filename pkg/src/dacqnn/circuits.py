"""Angle-encoding feature map and the two fixed 4-qubit ansatz architectures.

qnn1: per layer RY,RZ on each qubit (16 params over 2 layers), CNOT ring
      0->1->2->3->0.
qnn2: per layer RX,RY,RZ on each qubit (48 params over 4 layers), CZ on
      all 6 qubit pairs.

Parameter order is layer-major, then qubit index, then rotation kind in
application order; this is frozen so seeded runs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevector import (
    Gate,
    apply_gate,
    controlled_pair_indices,
    expect_z,
    init_zero,
    pair_indices,
    rotate_pairs,
)

ARCHITECTURES = ("qnn1", "qnn2")

_ROTATION_SETS = {"qnn1": ("RY", "RZ"), "qnn2": ("RX", "RY", "RZ")}
_RING = ((0, 1), (1, 2), (2, 3), (3, 0))  # CNOT control -> target
_ALL_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))  # CZ


@dataclass(frozen=True)
class CircuitSpec:
    architecture: str
    n_qubits: int
    n_layers: int
    n_params: int
    readout_qubit: int = 0

    @property
    def rotation_kinds(self) -> tuple[str, ...]:
        return _ROTATION_SETS[self.architecture]


def circuit_spec(architecture: str) -> CircuitSpec:
    if architecture == "qnn1":
        return CircuitSpec("qnn1", n_qubits=4, n_layers=2, n_params=16)
    if architecture == "qnn2":
        return CircuitSpec("qnn2", n_qubits=4, n_layers=4, n_params=48)
    raise ValueError(f"unknown architecture {architecture!r}, expected one of {ARCHITECTURES}")


def _check_shapes(spec: CircuitSpec, features, params) -> tuple[np.ndarray, np.ndarray]:
    features = np.asarray(features, dtype=np.float64)
    params = np.asarray(params, dtype=np.float64)
    if features.shape != (spec.n_qubits,):
        raise ValueError(
            f"expected {spec.n_qubits} features, got shape {features.shape}"
        )
    if params.shape != (spec.n_params,):
        raise ValueError(
            f"{spec.architecture} expects {spec.n_params} parameters, got shape {params.shape}"
        )
    return features, params


def build_circuit(spec: CircuitSpec, features, params) -> list[Gate]:
    """Gate list: RY encoding on each qubit, then the layered ansatz."""
    features, params = _check_shapes(spec, features, params)
    gates = [Gate("RY", target=q, angle=float(features[q])) for q in range(spec.n_qubits)]
    k = 0
    for _ in range(spec.n_layers):
        for q in range(spec.n_qubits):
            for kind in spec.rotation_kinds:
                gates.append(Gate(kind, target=q, angle=float(params[k])))
                k += 1
        if spec.architecture == "qnn1":
            gates.extend(Gate("CNOT", target=t, control=c) for c, t in _RING)
        else:
            gates.extend(Gate("CZ", target=b, control=a) for a, b in _ALL_PAIRS)
    assert k == spec.n_params
    return gates


def forward(spec: CircuitSpec, features, params) -> float:
    """Readout-qubit <Z> of the circuit on |0...0> (exact, no shots).

    Reference path built on the per-gate statevector ops; the trainer uses
    the vectorized paths below, which are tested to agree with this one.
    """
    state = init_zero(spec.n_qubits)
    for gate in build_circuit(spec, features, params):
        state = apply_gate(state, gate)
    return expect_z(state, spec.readout_qubit)


def predict(expectation: float) -> int:
    """Binary decision rule: class 1 iff <Z> is strictly positive."""
    return 1 if expectation > 0 else 0


# --- Vectorized evaluation -------------------------------------------------
#
# States are arrays of shape (..., 2**n) so one pass can evaluate a whole
# sample batch and, for gradients, every shifted parameter vector at once.


def encode_features(spec: CircuitSpec, features: np.ndarray) -> np.ndarray:
    """RY-encode a (batch, n_qubits) feature matrix into (batch, 2**n) states."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[1] != spec.n_qubits:
        raise ValueError(f"expected (batch, {spec.n_qubits}) features, got {features.shape}")
    batch = features.shape[0]
    amps = np.zeros((batch, 2**spec.n_qubits), dtype=np.complex128)
    amps[:, 0] = 1.0
    for q in range(spec.n_qubits):
        lo, hi = pair_indices(spec.n_qubits, q)
        rotate_pairs(amps, "RY", lo, hi, features[:, q, None] / 2.0)
    return amps


def apply_ansatz(spec: CircuitSpec, states: np.ndarray, param_rows: np.ndarray) -> np.ndarray:
    """Apply the trainable layers to encoded states, in place.

    states: (S, B, 2**n) or (B, 2**n); param_rows: (S, n_params) or (n_params,).
    Row s of param_rows drives slice s of states, so the parameter-shift rule
    evaluates all shifted circuits in one pass over the gate sequence.
    """
    param_rows = np.asarray(param_rows, dtype=np.float64)
    if param_rows.ndim == 1:
        angle = lambda k: param_rows[k] / 2.0  # noqa: E731
    else:
        # one singleton per remaining state axis (incl. the sliced pair axis)
        shape = (param_rows.shape[0],) + (1,) * (states.ndim - 1)
        angle = lambda k: param_rows[:, k].reshape(shape) / 2.0  # noqa: E731
    n = spec.n_qubits
    k = 0
    for _ in range(spec.n_layers):
        for q in range(n):
            lo, hi = pair_indices(n, q)
            for kind in spec.rotation_kinds:
                rotate_pairs(states, kind, lo, hi, angle(k))
                k += 1
        if spec.architecture == "qnn1":
            for c, t in _RING:
                lo, hi = controlled_pair_indices(n, c, t)
                swap = states[..., lo]
                states[..., lo] = states[..., hi]
                states[..., hi] = swap
        else:
            for a, b in _ALL_PAIRS:
                _, hi = controlled_pair_indices(n, a, b)
                states[..., hi] = -states[..., hi]
    return states


def expect_z_batch(spec: CircuitSpec, states: np.ndarray) -> np.ndarray:
    """Readout-qubit <Z> over the trailing state axis."""
    lo, hi = pair_indices(spec.n_qubits, spec.readout_qubit)
    probs = np.abs(states) ** 2
    return probs[..., lo].sum(axis=-1) - probs[..., hi].sum(axis=-1)


def forward_batch(spec: CircuitSpec, features: np.ndarray, params) -> np.ndarray:
    """<Z> for every row of a (batch, n_qubits) feature matrix."""
    states = encode_features(spec, features)
    apply_ansatz(spec, states, np.asarray(params, dtype=np.float64))
    return expect_z_batch(spec, states)


def forward_shifted(spec: CircuitSpec, features: np.ndarray, param_rows: np.ndarray) -> np.ndarray:
    """<Z> grid of shape (n_param_rows, batch) for multiple parameter vectors.

    The feature encoding is shared across rows, so only the ansatz is
    re-applied per parameter vector.
    """
    param_rows = np.asarray(param_rows, dtype=np.float64)
    encoded = encode_features(spec, features)
    states = np.broadcast_to(encoded, (param_rows.shape[0],) + encoded.shape).copy()
    apply_ansatz(spec, states, param_rows)
    return expect_z_batch(spec, states)
