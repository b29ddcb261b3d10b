"""Built-in invariant checks (`dacqnn selftest`), independent of pytest.

Each check re-derives its expectation on the spot — small matrix oracles,
finite differences, closed-form probabilities — and returns pass/fail.
"""

from __future__ import annotations

import math
import tempfile
from pathlib import Path

import numpy as np

from .circuits import build_circuit, circuit_spec, forward
from .datasets import Dataset, fit_pca
from .losses import batch_loss, batch_loss_gradient
from .quantizer import DacGrid, quantize, quantize_params, stochastic_update_many, wrap_angle
from .sampledata import synthetic_tabular
from .statevector import apply_gate, expect_z, init_zero, rotation_matrix
from .sweep import SummaryRow, emit_summary, rows_from_csv
from .trainer import TrainConfig, run_trial

_I2 = np.eye(2, dtype=np.complex128)
_CNOT_01 = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128)
_CNOT_10 = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=np.complex128)
_CZ = np.diag([1, 1, 1, -1]).astype(np.complex128)


def _gate_matrix_2q(gate) -> np.ndarray:
    # qubit 0 is the most significant bit -> left Kronecker factor
    if gate.kind == "CNOT":
        return _CNOT_01 if gate.control == 0 else _CNOT_10
    if gate.kind == "CZ":
        return _CZ
    r = rotation_matrix(gate.kind, gate.angle)
    return np.kron(r, _I2) if gate.target == 0 else np.kron(_I2, r)


def check_simulator_oracle() -> str | None:
    from .statevector import Gate

    rng = np.random.default_rng(2024)
    kinds = ("RX", "RY", "RZ")
    for _ in range(20):
        state = init_zero(2)
        matrix = np.eye(4, dtype=np.complex128)
        for _ in range(12):
            if rng.random() < 0.7:
                g = Gate(str(rng.choice(kinds)), int(rng.integers(2)), angle=float(rng.uniform(-np.pi, np.pi)))
            else:
                c = int(rng.integers(2))
                g = Gate("CNOT" if rng.random() < 0.5 else "CZ", 1 - c, control=c)
            state = apply_gate(state, g)
            matrix = _gate_matrix_2q(g) @ matrix
        expected = matrix @ np.array([1, 0, 0, 0], dtype=np.complex128)
        if np.max(np.abs(state.amplitudes - expected)) > 1e-12:
            return "2-qubit circuit disagrees with Kronecker matrices"
    return None


def check_norm_preservation() -> str | None:
    from .statevector import Gate

    rng = np.random.default_rng(11)
    state = init_zero(4)
    for _ in range(100):
        kind = str(rng.choice(("RX", "RY", "RZ", "CNOT", "CZ")))
        if kind in ("CNOT", "CZ"):
            c, t = rng.choice(4, size=2, replace=False)
            g = Gate(kind, int(t), control=int(c))
        else:
            g = Gate(kind, int(rng.integers(4)), angle=float(rng.uniform(-np.pi, np.pi)))
        state = apply_gate(state, g)
        if abs(state.norm_sq() - 1.0) > 1e-12:
            return f"norm drifted to {state.norm_sq()!r}"
    return None


def check_circuit_structure() -> str | None:
    for arch, count in (("qnn1", 28), ("qnn2", 76)):
        spec = circuit_spec(arch)
        gates = build_circuit(spec, np.zeros(4), np.zeros(spec.n_params))
        if len(gates) != count:
            return f"{arch}: {len(gates)} gates, expected {count}"
        z = forward(spec, np.zeros(4), np.zeros(spec.n_params))
        if abs(z - 1.0) > 1e-12:
            return f"{arch}: zero circuit gave {z}"
        z = forward(spec, np.array([math.pi, 0, 0, 0]), np.zeros(spec.n_params))
        if abs(z + 1.0) > 1e-12:
            return f"{arch}: flipped qubit gave {z}"
    return None


def check_gradient_fd() -> str | None:
    rng = np.random.default_rng(5)
    h = 1e-5
    for arch in ("qnn1", "qnn2"):
        spec = circuit_spec(arch)
        for _ in range(3):
            X = rng.uniform(-np.pi, np.pi, size=(4, 4))
            y = rng.integers(0, 2, size=4)
            params = rng.uniform(-np.pi, np.pi, size=spec.n_params)
            _, grad = batch_loss_gradient(spec, X, y, params)
            for k in rng.choice(spec.n_params, size=4, replace=False):
                delta = np.zeros(spec.n_params)
                delta[k] = h
                fd = (batch_loss(spec, X, y, params + delta) - batch_loss(spec, X, y, params - delta)) / (2 * h)
                if abs(fd - grad[k]) > 1e-6:
                    return f"{arch} param {k}: shift {grad[k]!r} vs fd {fd!r}"
    return None


def check_quantizer_laws() -> str | None:
    if abs(wrap_angle(3 * math.pi / 2) + math.pi / 2) > 1e-12:
        return "wrap(3pi/2) != -pi/2"
    g2 = DacGrid(2)
    if abs(quantize(g2, 1.0) - math.pi / 3) > 1e-12 or abs(quantize(g2, 0.0) - math.pi / 3) > 1e-12:
        return "N=2 nearest/tie rule broken"
    g3 = DacGrid(3)
    if abs(quantize(g3, 0.0) - (-math.pi + 4 * g3.step)) > 1e-12:
        return "N=3 tie at zero should round up"
    rng = np.random.default_rng(3)
    thetas = rng.uniform(-10, 10, size=10_000)
    for bits in (2, 5, 9):
        grid = DacGrid(bits)
        q = quantize_params(grid, thetas)
        if not np.array_equal(quantize_params(grid, q), q):
            return f"idempotence failed at {bits} bits"
        wrapped = np.array([wrap_angle(t) for t in thetas])
        if np.max(np.abs(q - wrapped)) > grid.step / 2 + 1e-12:
            return f"error bound exceeded at {bits} bits"
    # Eq. 1 frequency at d=0.3, T=1.0
    grid = DacGrid(4)
    d = 0.3
    theta_c = -math.pi + 3.5 * grid.step + d * grid.step / 2
    theta = quantize(grid, theta_c)
    lr, grad = 1.0, theta - theta_c
    draws = stochastic_update_many(
        grid,
        np.full(20_000, theta),
        np.full(20_000, grad),
        lr,
        1.0,
        np.random.default_rng(12),
    )
    freq = float(np.mean(draws > theta_c))
    expect = 1.0 / (1.0 + math.exp(-d))
    if abs(freq - expect) > 0.015:
        return f"frequency {freq:.4f} vs sigmoid {expect:.4f}"
    return None


def _toy_dataset() -> Dataset:
    X, y = synthetic_tabular(n=56, seed=4)
    return Dataset("selftest", X[:42], y[:42], X[42:], y[42:], np.zeros(4), np.zeros(4))


def check_trainer_determinism() -> str | None:
    data = _toy_dataset()
    config = TrainConfig("qnn1", "iris", "det_quant", seed=3, bits=4, epochs=2)
    a = run_trial(config, data)
    b = run_trial(config, data)
    if not np.array_equal(a.final_params, b.final_params):
        return "same config+seed produced different parameters"
    grid = DacGrid(4)
    if not np.array_equal(quantize_params(grid, a.final_params), a.final_params):
        return "det_quant parameters left the grid"
    fp = run_trial(TrainConfig("qnn1", "iris", "fp32", seed=3, epochs=4), data)
    if not fp.traces[-1].mean_loss < fp.traces[0].mean_loss:
        return "fp32 loss failed to decrease on separable blobs"
    return None


def check_pca() -> str | None:
    rng = np.random.default_rng(21)
    X = rng.normal(size=(60, 10)) @ rng.normal(size=(10, 10))
    model = fit_pca(X, k=4)
    gram = model.components @ model.components.T
    if np.max(np.abs(gram - np.eye(4))) > 1e-8:
        return "components not orthonormal"
    if np.any(np.diff(model.explained_variance) > 1e-9):
        return "explained variance not descending"
    return None


def check_summary_roundtrip() -> str | None:
    rows = [
        SummaryRow("quant_training", "qnn1", "iris", None, "fp32", None, 0.95, 0.001, 0.97, 0.0005, 5),
        SummaryRow("quant_training", "qnn1", "iris", 4, "det_quant", None, 0.55, 0.01, 0.56, 0.01, 5),
        SummaryRow("quant_training", "qnn1", "iris", 4, "stoch_quant", 1.0, 0.93, 0.002, 0.94, 0.002, 5),
    ]
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "s.csv"
        emit_summary(rows, path)
        first = path.read_bytes()
        emit_summary(rows, path)
        if path.read_bytes() != first:
            return "summary emission not byte-stable"
        if sorted(rows_from_csv(path), key=str) != sorted(rows, key=str):
            return "CSV round-trip altered rows"
    return None


CHECKS = (
    ("simulator 2-qubit matrix oracle", check_simulator_oracle),
    ("simulator norm preservation", check_norm_preservation),
    ("circuit structure and base cases", check_circuit_structure),
    ("parameter-shift vs finite differences", check_gradient_fd),
    ("quantizer laws and Eq-style frequency", check_quantizer_laws),
    ("trainer determinism and grid closure", check_trainer_determinism),
    ("PCA orthonormality", check_pca),
    ("summary round-trip", check_summary_roundtrip),
)


def run_selftest(verbose: bool = False) -> bool:
    ok = True
    for name, fn in CHECKS:
        try:
            detail = fn()
        except Exception as exc:  # noqa: BLE001 -- a crash is a failed check
            detail = f"{type(exc).__name__}: {exc}"
        if verbose:
            print(f"{'PASS' if detail is None else 'FAIL'}  {name}" + (f": {detail}" if detail else ""))
        ok = ok and detail is None
    return ok
