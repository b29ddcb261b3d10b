"""Mini-batch gradient descent in three precision modes.

fp32 is the unconstrained baseline ("infinite precision"). det_quant rounds
every updated parameter to the nearest DAC level; stoch_quant picks between
the two enclosing levels with the temperature-controlled sigmoid rule. Each
epoch is traced with end-of-epoch loss/accuracy and the fraction of update
steps that left a parameter unchanged (deadlock_fraction).
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .circuits import CircuitSpec, circuit_spec, forward_batch
from .datasets import Dataset
from .losses import batch_loss, batch_loss_gradient
from .quantizer import DacGrid, quantize_params, stochastic_update_many

MODES = ("fp32", "det_quant", "stoch_quant")

DEFAULT_LR = 0.02
DEFAULT_BATCH_SIZE = 14
_DEFAULT_EPOCHS = {"qnn1": 40, "qnn2": 20}

SCHEMA_VERSION = 1


def default_epochs(architecture: str) -> int:
    return _DEFAULT_EPOCHS[architecture]


@dataclass(frozen=True)
class TrainConfig:
    architecture: str
    dataset: str
    mode: str
    seed: int
    bits: int | None = None
    temperature: float | None = None
    epochs: int | None = None  # None -> default_epochs(architecture)
    lr: float = DEFAULT_LR
    batch_size: int = DEFAULT_BATCH_SIZE
    quantize_features: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "fp32":
            if self.bits is not None:
                raise ValueError("bits is only valid in quantized modes")
            if self.temperature is not None:
                raise ValueError("temperature is only valid in stoch_quant mode")
            # no grid -> the flag is inert; pin it so fp32 config hashes are canonical
            object.__setattr__(self, "quantize_features", True)
        else:
            if self.bits is None:
                raise ValueError(f"{self.mode} requires bits")
            if self.mode == "stoch_quant":
                if self.temperature is None or self.temperature <= 0:
                    raise ValueError("stoch_quant requires temperature > 0")
            elif self.temperature is not None:
                raise ValueError("temperature is only valid in stoch_quant mode")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs is not None and self.epochs < 0:
            raise ValueError("epochs must be >= 0")

    def resolved_epochs(self) -> int:
        return default_epochs(self.architecture) if self.epochs is None else self.epochs

    def grid(self) -> DacGrid | None:
        return None if self.mode == "fp32" else DacGrid(self.bits)

    def to_dict(self) -> dict:
        return {
            "architecture": self.architecture,
            "dataset": self.dataset,
            "mode": self.mode,
            "seed": self.seed,
            "bits": self.bits,
            "temperature": self.temperature,
            "epochs": self.resolved_epochs(),
            "lr": self.lr,
            "batch_size": self.batch_size,
            "quantize_features": self.quantize_features,
        }


def config_from_dict(d: dict) -> TrainConfig:
    return TrainConfig(
        architecture=d["architecture"],
        dataset=d["dataset"],
        mode=d["mode"],
        seed=d["seed"],
        bits=d["bits"],
        temperature=d["temperature"],
        epochs=d["epochs"],
        lr=d["lr"],
        batch_size=d["batch_size"],
        quantize_features=d.get("quantize_features", True),
    )


def config_hash(config: TrainConfig) -> str:
    payload = json.dumps(config.to_dict(), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class EpochTrace:
    epoch: int  # 1-based
    mean_loss: float
    train_accuracy: float
    deadlock_fraction: float


@dataclass
class RunRecord:
    config: TrainConfig
    traces: list[EpochTrace]
    final_params: np.ndarray
    final_test_accuracy: float
    final_train_accuracy: float
    data_hash: str
    wall_time_s: float
    status: str = "ok"
    error: str | None = None
    schema_version: int = SCHEMA_VERSION


# --- RNG streams ----------------------------------------------------------
# A trial owns three independent streams: parameter init, epoch shuffles,
# and stochastic level selection. They are keyed by (seed, architecture,
# dataset) only, so fp32/det/stoch trials at the same seed share the same
# initialization and batch order — the T->0 comparison and the PTQ baseline
# both rely on that — and adding sweep configurations never perturbs
# existing trials.


def _name_key(name: str) -> int:
    return int.from_bytes(hashlib.sha256(name.encode()).digest()[:4], "big")


def trial_rngs(config: TrainConfig) -> tuple[np.random.Generator, np.random.Generator, np.random.Generator]:
    seq = np.random.SeedSequence(
        [config.seed, _name_key(config.architecture), _name_key(config.dataset)]
    )
    init, shuffle, stoch = (np.random.Generator(np.random.PCG64(s)) for s in seq.spawn(3))
    return init, shuffle, stoch


def init_params(spec: CircuitSpec, rng: np.random.Generator, grid: DacGrid | None = None) -> np.ndarray:
    params = rng.uniform(-math.pi, math.pi, size=spec.n_params)
    return quantize_params(grid, params) if grid is not None else params


@dataclass
class TrainerState:
    circuit: CircuitSpec
    params: np.ndarray
    shuffle_rng: np.random.Generator
    stoch_rng: np.random.Generator
    epoch: int = 0


def _assert_on_grid(grid: DacGrid, params: np.ndarray) -> None:
    k = np.rint((params + math.pi) / grid.step)
    if not np.array_equal(grid.level_value(k.astype(np.int64)), params):
        raise AssertionError("quantized-mode parameters left the DAC grid")


def train_epoch(
    state: TrainerState, train_x: np.ndarray, train_y: np.ndarray, config: TrainConfig, grid: DacGrid | None
) -> EpochTrace:
    """One pass over the training set; returns the end-of-epoch trace."""
    n = train_y.shape[0]
    order = state.shuffle_rng.permutation(n)
    unchanged = 0
    total = 0
    for start in range(0, n, config.batch_size):
        batch = order[start : start + config.batch_size]
        _, grad = batch_loss_gradient(state.circuit, train_x[batch], train_y[batch], state.params)
        if config.mode == "fp32":
            new = state.params - config.lr * grad
        elif config.mode == "det_quant":
            new = quantize_params(grid, state.params - config.lr * grad)
        else:
            new = stochastic_update_many(
                grid, state.params, grad, config.lr, config.temperature, state.stoch_rng
            )
        unchanged += int(np.sum(new == state.params))
        total += state.circuit.n_params
        state.params = new
    if grid is not None:
        _assert_on_grid(grid, state.params)
    state.epoch += 1
    mean_loss = batch_loss(state.circuit, train_x, train_y, state.params)
    accuracy = evaluate(state.circuit, state.params, train_x, train_y)
    return EpochTrace(state.epoch, mean_loss, accuracy, unchanged / total if total else 0.0)


def evaluate(spec: CircuitSpec, params: np.ndarray, X: np.ndarray, y: np.ndarray) -> float:
    """Fraction of samples with predict(forward(x)) == label."""
    if y.shape[0] == 0:
        raise ValueError("evaluate requires at least one sample")
    z = forward_batch(spec, X, params)
    return float(np.mean((z > 0.0).astype(np.int64) == y))


def run_trial(config: TrainConfig, data: Dataset) -> RunRecord:
    """Train one seeded trial end to end. Bit-reproducible given (config, data)."""
    t0 = time.perf_counter()
    spec = circuit_spec(config.architecture)
    grid = config.grid()
    init_rng, shuffle_rng, stoch_rng = trial_rngs(config)

    train_x, test_x = data.train_x, data.test_x
    if grid is not None and config.quantize_features:
        # A DAC drives the encoding gates too, in both paradigms.
        train_x = quantize_params(grid, train_x)
        test_x = quantize_params(grid, test_x)

    state = TrainerState(spec, init_params(spec, init_rng, grid), shuffle_rng, stoch_rng)
    traces = [
        train_epoch(state, train_x, data.train_y, config, grid)
        for _ in range(config.resolved_epochs())
    ]
    return RunRecord(
        config=replace(config, epochs=config.resolved_epochs()),
        traces=traces,
        final_params=state.params,
        final_test_accuracy=evaluate(spec, state.params, test_x, data.test_y),
        final_train_accuracy=evaluate(spec, state.params, train_x, data.train_y),
        data_hash=data.fingerprint(),
        wall_time_s=time.perf_counter() - t0,
    )


# --- Serialization --------------------------------------------------------


def error_record(config: TrainConfig, data_hash: str, message: str) -> RunRecord:
    return RunRecord(
        config=config,
        traces=[],
        final_params=np.empty(0),
        final_test_accuracy=math.nan,
        final_train_accuracy=math.nan,
        data_hash=data_hash,
        wall_time_s=0.0,
        status="error",
        error=message,
    )


def _json_real(x: float) -> float | None:
    return float(x) if math.isfinite(x) else None


def record_to_dict(record: RunRecord) -> dict:
    return {
        "schema_version": record.schema_version,
        "status": record.status,
        "error": record.error,
        "config": record.config.to_dict(),
        "traces": [
            {
                "epoch": t.epoch,
                "mean_loss": t.mean_loss,
                "train_accuracy": t.train_accuracy,
                "deadlock_fraction": t.deadlock_fraction,
            }
            for t in record.traces
        ],
        "final_params": [float(v) for v in record.final_params],
        "final_test_accuracy": _json_real(record.final_test_accuracy),
        "final_train_accuracy": _json_real(record.final_train_accuracy),
        "data_hash": record.data_hash,
        "wall_time_s": record.wall_time_s,
    }


def record_from_dict(d: dict) -> RunRecord:
    return RunRecord(
        config=config_from_dict(d["config"]),
        traces=[
            EpochTrace(t["epoch"], t["mean_loss"], t["train_accuracy"], t["deadlock_fraction"])
            for t in d["traces"]
        ],
        final_params=np.array(d["final_params"], dtype=np.float64),
        final_test_accuracy=math.nan if d["final_test_accuracy"] is None else d["final_test_accuracy"],
        final_train_accuracy=math.nan if d["final_train_accuracy"] is None else d["final_train_accuracy"],
        data_hash=d["data_hash"],
        wall_time_s=d["wall_time_s"],
        status=d.get("status", "ok"),
        error=d.get("error"),
        schema_version=d.get("schema_version", SCHEMA_VERSION),
    )


def save_record(record: RunRecord, path) -> None:
    from .datasets import atomic_write_text

    atomic_write_text(path, json.dumps(record_to_dict(record), indent=1) + "\n")


def load_record(path) -> RunRecord:
    with open(path, encoding="utf-8") as fh:
        return record_from_dict(json.load(fh))
