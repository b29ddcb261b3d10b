"""N-bit DAC grid over [-pi, pi]: deterministic and stochastic rounding.

An N-bit converter exposes 2**N equally spaced levels theta_k = -pi + k*step
with step = 2*pi/(2**N - 1), so both endpoints are representable. Deterministic
rounding snaps to the nearest level (ties break upward). The stochastic update
picks between the two levels enclosing the continuous gradient step with
probability sigmoid(d/T), where d in [-1, 1] is the signed, step-normalized
distance from the interval midpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DacGrid:
    bits: int

    def __post_init__(self) -> None:
        if not 1 <= self.bits <= 31:
            raise ValueError(f"bits must be in [1, 31], got {self.bits}")

    @property
    def n_levels(self) -> int:
        return 2**self.bits

    @property
    def step(self) -> float:
        return TWO_PI / (self.n_levels - 1)

    def levels(self) -> np.ndarray:
        return -math.pi + np.arange(self.n_levels) * self.step

    def level_value(self, k: int) -> float:
        return -math.pi + k * self.step


def wrap_angle(theta: float) -> float:
    """Reduce mod 2*pi into [-pi, pi]; both endpoints map to themselves."""
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta}")
    return math.remainder(theta, TWO_PI)


def _wrap_array(values: np.ndarray) -> np.ndarray:
    # np.round is half-even, matching math.remainder's reduction exactly.
    return values - TWO_PI * np.round(values / TWO_PI)


def quantize(grid: DacGrid, theta: float) -> float:
    """Nearest grid level to wrap_angle(theta); exact midpoints round up."""
    w = wrap_angle(theta)
    k = math.floor((w + math.pi) / grid.step + 0.5)
    k = min(max(k, 0), grid.n_levels - 1)
    return grid.level_value(k)


def quantize_params(grid: DacGrid, values) -> np.ndarray:
    """Element-wise wrap + nearest-level snap; matches `quantize` exactly."""
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise ValueError("parameters must be finite")
    w = _wrap_array(values)
    k = np.floor((w + math.pi) / grid.step + 0.5)
    k = np.clip(k, 0, grid.n_levels - 1)
    return -math.pi + k * grid.step


def deadlocked(grid: DacGrid, lr: float, grad) -> bool | np.ndarray:
    """Per-parameter deadlock predicate: |lr * grad| below half a step."""
    if lr <= 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    return np.abs(lr * np.asarray(grad)) < grid.step / 2.0


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # Overflow-safe on both tails.
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _enclosing_levels(grid: DacGrid, theta_c: np.ndarray):
    """(lo, hi, d) for the grid interval enclosing each clamped target angle."""
    theta_c = np.clip(theta_c, -math.pi, math.pi)
    k = np.floor((theta_c + math.pi) / grid.step)
    k = np.clip(k, 0, grid.n_levels - 2)
    # both endpoints from the canonical level formula, so results are
    # bit-identical to quantize() output (grid closure is exact)
    lo = -math.pi + k * grid.step
    hi = -math.pi + (k + 1.0) * grid.step
    mid = (lo + hi) / 2.0
    d = (2.0 / grid.step) * (theta_c - mid)
    return lo, hi, d


def stochastic_update_many(
    grid: DacGrid,
    thetas,
    grads,
    lr: float,
    temperature: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Temperature-controlled stochastic step for a whole parameter vector.

    Consumes exactly one uniform draw per parameter, in parameter order, so a
    vectorized update and an element-wise loop share the same RNG stream.
    """
    if temperature <= 0:
        raise ValueError("temperature must be positive; use deterministic rounding for T=0")
    thetas = np.asarray(thetas, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    lo, hi, d = _enclosing_levels(grid, thetas - lr * grads)
    p_hi = _sigmoid(d / temperature)
    take_hi = rng.random(thetas.shape) < p_hi
    return np.where(take_hi, hi, lo)


def stochastic_update(
    grid: DacGrid,
    theta_current: float,
    grad: float,
    lr: float,
    temperature: float,
    rng: np.random.Generator,
) -> float:
    """Single-parameter stochastic step; see stochastic_update_many."""
    out = stochastic_update_many(
        grid, np.array([theta_current]), np.array([grad]), lr, temperature, rng
    )
    return float(out[0])
