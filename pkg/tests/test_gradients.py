"""Loss map and parameter-shift gradients against finite-difference oracles."""

from __future__ import annotations

import math

import numpy as np
import pytest

from dacqnn.circuits import circuit_spec
from dacqnn.losses import (
    PROB_EPS,
    batch_loss,
    batch_loss_gradient,
    bce_loss,
    expectation_gradient,
    prob_from_expectation,
)

# --- probability map and scalar loss ----------------------------------------


def test_prob_from_expectation_examples():
    assert prob_from_expectation(0.0) == 0.5
    assert prob_from_expectation(1.0) == 1.0 - PROB_EPS
    assert prob_from_expectation(-1.0) == PROB_EPS
    assert prob_from_expectation(0.6) == pytest.approx(0.8, abs=1e-15)


def test_prob_consistent_with_decision_rule():
    for z in (-0.9, -0.1, 0.1, 0.9):
        assert (prob_from_expectation(z) > 0.5) == (z > 0)


def test_bce_examples():
    assert bce_loss(0.0, 1).value == pytest.approx(math.log(2), abs=1e-12)
    assert bce_loss(0.0, 0).value == pytest.approx(math.log(2), abs=1e-12)
    assert bce_loss(0.6, 1).value == pytest.approx(-math.log(0.8), abs=1e-9)
    assert bce_loss(0.6, 1).value == pytest.approx(0.223144, abs=1e-6)


def test_bce_clamps_at_extreme_expectations():
    # perfect wrong prediction is finite thanks to the probability clamp
    assert bce_loss(1.0, 0).value == pytest.approx(-math.log(PROB_EPS), rel=1e-6)
    assert bce_loss(-1.0, 1).value == pytest.approx(-math.log(PROB_EPS), rel=1e-6)
    assert bce_loss(1.0, 1).value == pytest.approx(0.0, abs=1e-6)


def test_bce_nonnegative_and_symmetric():
    rng = np.random.default_rng(41)
    for z in rng.uniform(-1, 1, size=200):
        a = bce_loss(float(z), 1).value
        b = bce_loss(float(-z), 0).value
        assert a >= 0.0
        assert a == pytest.approx(b, abs=1e-12)


# --- expectation gradients ----------------------------------------------------


def test_single_rotation_gradient_is_minus_sine():
    # zero everything except the first RY of qubit 0: the circuit reduces to
    # RY(theta)|0> on the readout qubit, so d<Z>/dtheta = -sin(theta)
    spec = circuit_spec("qnn1")
    for theta in (0.0, np.pi / 2, -1.2):
        params = np.zeros(16)
        params[0] = theta
        grad = expectation_gradient(spec, np.zeros(4), params)
        assert grad[0] == pytest.approx(-np.sin(theta), abs=1e-12)
    # stationary point: every parameter gradient vanishes at the zero circuit
    grad = expectation_gradient(spec, np.zeros(4), np.zeros(16))
    assert np.max(np.abs(grad)) < 1e-12


@pytest.mark.parametrize("arch", ["qnn1", "qnn2"])
def test_expectation_gradient_matches_finite_difference(arch):
    from dacqnn.circuits import forward

    spec = circuit_spec(arch)
    rng = np.random.default_rng(43)
    h = 1e-5
    for _ in range(3):
        features = rng.uniform(-np.pi, np.pi, 4)
        params = rng.uniform(-np.pi, np.pi, spec.n_params)
        grad = expectation_gradient(spec, features, params)
        for k in rng.choice(spec.n_params, size=5, replace=False):
            delta = np.zeros(spec.n_params)
            delta[k] = h
            fd = (forward(spec, features, params + delta) - forward(spec, features, params - delta)) / (2 * h)
            assert grad[k] == pytest.approx(fd, abs=1e-6)


# --- batch loss gradient -------------------------------------------------------


@pytest.mark.parametrize("arch", ["qnn1", "qnn2"])
def test_batch_gradient_matches_finite_difference(arch):
    spec = circuit_spec(arch)
    rng = np.random.default_rng(47)
    h = 1e-5
    for _ in range(20):
        features = rng.uniform(-np.pi, np.pi, size=(3, 4))
        labels = rng.integers(0, 2, size=3)
        params = rng.uniform(-np.pi, np.pi, spec.n_params)
        loss, grad = batch_loss_gradient(spec, features, labels, params)
        assert loss == pytest.approx(batch_loss(spec, features, labels, params), abs=1e-12)
        fd = np.empty(spec.n_params)
        for k in range(spec.n_params):
            delta = np.zeros(spec.n_params)
            delta[k] = h
            fd[k] = (
                batch_loss(spec, features, labels, params + delta)
                - batch_loss(spec, features, labels, params - delta)
            ) / (2 * h)
        assert np.max(np.abs(grad - fd)) < 1e-6


def test_single_sample_at_half_probability():
    # features [pi/2,0,0,0] with zero parameters give <Z> = 0, so p = 1/2:
    # loss is ln 2 and dL/dz = (p - y)/(2 p (1-p)) = -1, hence the batch
    # gradient equals minus the expectation gradient
    spec = circuit_spec("qnn1")
    features = np.array([[np.pi / 2, 0.0, 0.0, 0.0]])
    params = np.zeros(16)
    loss, grad = batch_loss_gradient(spec, features, np.array([1]), params)
    assert loss == pytest.approx(math.log(2), abs=1e-12)
    dz = expectation_gradient(spec, features[0], params)
    assert np.max(np.abs(grad - (-dz))) < 1e-12


def test_duplicate_sample_invariance():
    spec = circuit_spec("qnn1")
    rng = np.random.default_rng(53)
    x = rng.uniform(-np.pi, np.pi, size=(1, 4))
    y = np.array([1])
    params = rng.uniform(-np.pi, np.pi, 16)
    loss1, grad1 = batch_loss_gradient(spec, x, y, params)
    loss2, grad2 = batch_loss_gradient(spec, np.vstack([x, x]), np.array([1, 1]), params)
    assert loss1 == pytest.approx(loss2, abs=1e-12)
    assert np.max(np.abs(grad1 - grad2)) < 1e-12


def test_batch_mean_linearity():
    spec = circuit_spec("qnn1")
    rng = np.random.default_rng(59)
    xa = rng.uniform(-np.pi, np.pi, size=(2, 4))
    xb = rng.uniform(-np.pi, np.pi, size=(3, 4))
    ya = rng.integers(0, 2, size=2)
    yb = rng.integers(0, 2, size=3)
    params = rng.uniform(-np.pi, np.pi, 16)
    la, ga = batch_loss_gradient(spec, xa, ya, params)
    lb, gb = batch_loss_gradient(spec, xb, yb, params)
    lc, gc = batch_loss_gradient(spec, np.vstack([xa, xb]), np.concatenate([ya, yb]), params)
    assert lc == pytest.approx((2 * la + 3 * lb) / 5, abs=1e-12)
    assert np.max(np.abs(gc - (2 * ga + 3 * gb) / 5)) < 1e-12


def test_empty_and_misaligned_batches_rejected():
    spec = circuit_spec("qnn1")
    params = np.zeros(16)
    with pytest.raises(ValueError):
        batch_loss_gradient(spec, np.empty((0, 4)), np.empty(0), params)
    with pytest.raises(ValueError):
        batch_loss(spec, np.empty((0, 4)), np.empty(0), params)
    with pytest.raises(ValueError):
        batch_loss_gradient(spec, np.zeros((2, 4)), np.zeros(3), params)
