"""Binary cross-entropy on the readout expectation, with parameter-shift gradients.

The class-1 probability is the affine map p = (1 + <Z>)/2, the unique one
consistent with the <Z> > 0 decision rule; p is clamped away from {0, 1}
before taking logs. Gradients of <Z> use the exact parameter-shift rule
with continuous +-pi/2 shifts (shifts are never snapped to a DAC grid).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import CircuitSpec, forward_batch, forward_shifted

PROB_EPS = 1e-7
SHIFT = np.pi / 2.0


@dataclass(frozen=True)
class LossValue:
    value: float
    probability: float


def prob_from_expectation(z: float) -> float:
    """Class-1 probability (1 + z)/2, clamped to [PROB_EPS, 1 - PROB_EPS]."""
    p = (1.0 + z) / 2.0
    return float(min(max(p, PROB_EPS), 1.0 - PROB_EPS))


def bce_loss(z: float, label: int) -> LossValue:
    """Binary cross-entropy of one sample in nats."""
    p = prob_from_expectation(z)
    if label == 1:
        return LossValue(-float(np.log(p)), p)
    return LossValue(-float(np.log1p(-p)), p)


def _clamped_probs(z: np.ndarray) -> np.ndarray:
    return np.clip((1.0 + z) / 2.0, PROB_EPS, 1.0 - PROB_EPS)


def _bce_mean(z: np.ndarray, labels: np.ndarray) -> float:
    p = _clamped_probs(z)
    return float(-np.mean(labels * np.log(p) + (1.0 - labels) * np.log1p(-p)))


def _shift_rows(params: np.ndarray) -> np.ndarray:
    """Rows: [params, params + shift e_k ..., params - shift e_k ...]."""
    n = params.shape[0]
    rows = np.tile(params, (2 * n + 1, 1))
    rows[1 : n + 1] += SHIFT * np.eye(n)
    rows[n + 1 :] -= SHIFT * np.eye(n)
    return rows


def expectation_gradient(spec: CircuitSpec, features, params) -> np.ndarray:
    """d<Z>/d(theta_k) for one sample via the parameter-shift rule."""
    params = np.asarray(params, dtype=np.float64)
    features = np.asarray(features, dtype=np.float64).reshape(1, -1)
    zs = forward_shifted(spec, features, _shift_rows(params))[:, 0]
    n = params.shape[0]
    return (zs[1 : n + 1] - zs[n + 1 :]) / 2.0


def batch_loss_gradient(
    spec: CircuitSpec, features: np.ndarray, labels: np.ndarray, params
) -> tuple[float, np.ndarray]:
    """Mean BCE loss over a batch and its gradient w.r.t. the parameters.

    dL/dz = (p - y) / (2 p (1-p)), evaluated at the clamped probability, then
    combined with the parameter-shift gradient of <Z> per sample and averaged.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] == 0:
        raise ValueError("batch must be a nonempty (batch, n_features) matrix")
    if labels.shape != (features.shape[0],):
        raise ValueError("labels must align with the feature rows")
    params = np.asarray(params, dtype=np.float64)
    n = params.shape[0]
    zs = forward_shifted(spec, features, _shift_rows(params))  # (2n+1, batch)
    z = zs[0]
    p = _clamped_probs(z)
    loss = float(-np.mean(labels * np.log(p) + (1.0 - labels) * np.log1p(-p)))
    dloss_dz = (p - labels) / (2.0 * p * (1.0 - p))
    dz = (zs[1 : n + 1] - zs[n + 1 :]) / 2.0  # (n, batch)
    grad = (dz * dloss_dz).mean(axis=1)
    return loss, grad


def batch_loss(spec: CircuitSpec, features: np.ndarray, labels: np.ndarray, params) -> float:
    """Mean BCE loss over a batch (no gradient)."""
    features = np.asarray(features, dtype=np.float64)
    if features.shape[0] == 0:
        raise ValueError("batch must be nonempty")
    z = forward_batch(spec, features, params)
    return _bce_mean(z, np.asarray(labels, dtype=np.float64))
