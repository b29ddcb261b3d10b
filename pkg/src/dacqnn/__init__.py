"""Quantization-aware quantum neural network lab.

Exact 4-qubit statevector simulation, two fixed variational classifiers,
an N-bit DAC grid quantizer with deterministic and stochastic update rules,
a reproducible data pipeline, and an experiment harness covering both
post-training quantization and training under quantization.
"""

from .circuits import (
    ARCHITECTURES,
    CircuitSpec,
    build_circuit,
    circuit_spec,
    forward,
    forward_batch,
    predict,
)
from .datasets import (
    DATASET_NAMES,
    DataError,
    Dataset,
    FormatError,
    PcaModel,
    RawDataset,
    fit_pca,
    load_csv,
    load_dataset,
    load_idx,
    prepare_dataset,
    save_dataset,
    stratified_split,
    subsample_balanced,
    transform_normalize,
)
from .losses import (
    batch_loss,
    batch_loss_gradient,
    bce_loss,
    expectation_gradient,
    prob_from_expectation,
)
from .quantizer import (
    DacGrid,
    deadlocked,
    quantize,
    quantize_params,
    stochastic_update,
    stochastic_update_many,
    wrap_angle,
)
from .statevector import Gate, Statevector, apply_gate, expect_z, init_zero
from .sweep import (
    BITS_DEFAULT,
    PTQ_BITS_DEFAULT,
    SEEDS_DEFAULT,
    TEMPS_DEFAULT,
    OrchestrationError,
    SummaryRow,
    SweepSpec,
    aggregate_training,
    emit_summary,
    plan_training_configs,
    ptq_eval,
    rows_from_csv,
    run_ptq_inference,
    run_training_sweep,
)
from .trainer import (
    MODES,
    EpochTrace,
    RunRecord,
    TrainConfig,
    default_epochs,
    evaluate,
    init_params,
    load_record,
    run_trial,
    save_record,
    train_epoch,
    trial_rngs,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
