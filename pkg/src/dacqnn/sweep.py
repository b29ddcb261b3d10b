"""Experiment harness: sweeps over both paradigms, aggregation, CSV summaries.

Paradigm 1 (ptq_inference) quantizes already-trained FP32 parameters and test
features at each bit width and re-evaluates. Paradigm 2 (quant_training)
trains under the grid constraint: det_quant per bit width and stoch_quant per
(bit width, temperature) pair, 5 seeds each, plus the FP32 reference —
5 x (1 + 6 + 6x4) = 155 trials per architecture x dataset cell.

Every trial is persisted as one JSON RunRecord named by its config hash, so
interrupted sweeps resume by skipping completed records. Variances are
population variances (divide by n).
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .circuits import ARCHITECTURES, circuit_spec
from .datasets import DATASET_NAMES, Dataset, atomic_write_text, load_dataset
from .quantizer import DacGrid, quantize_params
from .trainer import (
    RunRecord,
    TrainConfig,
    config_from_dict,
    config_hash,
    error_record,
    evaluate,
    load_record,
    run_trial,
    save_record,
)

PARADIGMS = ("ptq_inference", "quant_training")
BITS_DEFAULT = (2, 4, 6, 8, 10, 12)
PTQ_BITS_DEFAULT = tuple(range(1, 13))  # dense grid for elbow plots
TEMPS_DEFAULT = (0.5, 1.0, 5.0, 10.0)
SEEDS_DEFAULT = (1, 2, 3, 4, 5)

CSV_COLUMNS = (
    "paradigm",
    "architecture",
    "dataset",
    "bits",
    "mode",
    "temperature",
    "mean_test_acc",
    "var_test_acc",
    "mean_train_acc",
    "var_train_acc",
    "n_trials",
)


class OrchestrationError(Exception):
    """Sweep cannot proceed as requested (missing prerequisite, bad spec)."""


@dataclass(frozen=True)
class SweepSpec:
    paradigm: str
    architectures: tuple[str, ...] = ARCHITECTURES
    datasets: tuple[str, ...] = DATASET_NAMES
    bits: tuple[int, ...] = BITS_DEFAULT
    temperatures: tuple[float, ...] = TEMPS_DEFAULT
    seeds: tuple[int, ...] = SEEDS_DEFAULT
    epochs_override: int | None = None
    quantize_features: bool = True

    def __post_init__(self):
        if self.paradigm not in PARADIGMS:
            raise ValueError(f"paradigm must be one of {PARADIGMS}, got {self.paradigm!r}")
        for name, values in (
            ("architectures", self.architectures),
            ("datasets", self.datasets),
            ("bits", self.bits),
            ("temperatures", self.temperatures),
            ("seeds", self.seeds),
        ):
            if len(values) == 0:
                raise ValueError(f"{name} must be nonempty")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be distinct")
        for a in self.architectures:
            if a not in ARCHITECTURES:
                raise ValueError(f"unknown architecture {a!r}")
        for d in self.datasets:
            if d not in DATASET_NAMES:
                raise ValueError(f"unknown dataset {d!r}")

    def to_dict(self) -> dict:
        return {
            "paradigm": self.paradigm,
            "architectures": list(self.architectures),
            "datasets": list(self.datasets),
            "bits": list(self.bits),
            "temperatures": list(self.temperatures),
            "seeds": list(self.seeds),
            "epochs_override": self.epochs_override,
            "quantize_features": self.quantize_features,
        }


@dataclass(frozen=True)
class SummaryRow:
    paradigm: str
    architecture: str
    dataset: str
    bits: int | None  # None renders as "fp32"
    mode: str
    temperature: float | None
    mean_test_acc: float
    var_test_acc: float
    mean_train_acc: float
    var_train_acc: float
    n_trials: int


# --- Planning -------------------------------------------------------------


def plan_training_configs(sweep: SweepSpec) -> list[TrainConfig]:
    """Full trial list: per cell, fp32 + det per bits + stoch per bits x temps."""
    configs = []
    for arch in sweep.architectures:
        for ds in sweep.datasets:
            common = dict(
                architecture=arch,
                dataset=ds,
                epochs=sweep.epochs_override,
                quantize_features=sweep.quantize_features,
            )
            for seed in sweep.seeds:
                configs.append(TrainConfig(mode="fp32", seed=seed, **common))
            for bits in sweep.bits:
                for seed in sweep.seeds:
                    configs.append(TrainConfig(mode="det_quant", seed=seed, bits=bits, **common))
            for bits in sweep.bits:
                for temp in sweep.temperatures:
                    for seed in sweep.seeds:
                        configs.append(
                            TrainConfig(
                                mode="stoch_quant", seed=seed, bits=bits, temperature=temp, **common
                            )
                        )
    return configs


def record_path(out_dir, config: TrainConfig) -> Path:
    parts = [config.architecture, config.dataset, config.mode]
    if config.bits is not None:
        parts.append(f"b{config.bits}")
    if config.temperature is not None:
        parts.append(f"t{config.temperature:g}".replace(".", "p"))
    parts.append(f"s{config.seed}")
    parts.append(config_hash(config))
    return Path(out_dir) / "records" / ("_".join(parts) + ".json")


# --- Execution --------------------------------------------------------------


def _dataset_file(processed_dir, name: str) -> Path:
    return Path(processed_dir) / f"{name}.npz"


def _reusable(path: Path, config: TrainConfig, data_hash: str) -> RunRecord | None:
    if not path.exists():
        return None
    try:
        rec = load_record(path)
    except (OSError, ValueError, KeyError, json.JSONDecodeError):
        return None  # unreadable -> recompute
    if rec.status == "ok" and rec.config.to_dict() == config.to_dict() and rec.data_hash == data_hash:
        return rec
    return None


def _run_and_save(config: TrainConfig, data: Dataset, path: Path) -> RunRecord:
    try:
        rec = run_trial(config, data)
    except Exception as exc:  # noqa: BLE001 -- partial-failure policy
        rec = error_record(config, data.fingerprint(), f"{type(exc).__name__}: {exc}")
    path.parent.mkdir(parents=True, exist_ok=True)
    save_record(rec, path)
    return rec


def _worker(config_dict: dict, npz_path: str, rec_path: str) -> str:
    config = config_from_dict(config_dict)
    data = load_dataset(config.dataset, npz_path)
    _run_and_save(config, data, Path(rec_path))
    return rec_path


def execute_configs(
    configs: list[TrainConfig], processed_dir, out_dir, jobs: int = 1, log=None
) -> list[RunRecord]:
    """Run (or reuse) every config's trial; records land in out_dir/records."""
    datasets = {
        name: load_dataset(name, _dataset_file(processed_dir, name))
        for name in sorted({c.dataset for c in configs})
    }
    hashes = {name: d.fingerprint() for name, d in datasets.items()}
    records, pending = [], []
    for config in configs:
        path = record_path(out_dir, config)
        rec = _reusable(path, config, hashes[config.dataset])
        if rec is not None:
            records.append(rec)
        else:
            pending.append((config, path))
    if log:
        log(f"{len(records)} cached, {len(pending)} to run")
    if jobs > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {
                pool.submit(
                    _worker, c.to_dict(), str(_dataset_file(processed_dir, c.dataset)), str(p)
                ): p
                for c, p in pending
            }
            done = 0
            for fut in as_completed(futures):
                records.append(load_record(fut.result()))
                done += 1
                if log:
                    log(f"[{done}/{len(pending)}] {Path(futures[fut]).stem}")
    else:
        for i, (config, path) in enumerate(pending, start=1):
            records.append(_run_and_save(config, datasets[config.dataset], path))
            if log:
                log(f"[{i}/{len(pending)}] {path.stem}")
    return records


def run_training_sweep(
    sweep: SweepSpec, processed_dir, out_dir, jobs: int = 1, log=None
) -> tuple[list[SummaryRow], list[RunRecord], int]:
    """Returns (summary rows, all records, number of failed trials)."""
    configs = plan_training_configs(sweep)
    records = execute_configs(configs, processed_dir, out_dir, jobs=jobs, log=log)
    failed = sum(1 for r in records if r.status != "ok")
    return aggregate_training(records), records, failed


# --- PTQ inference ----------------------------------------------------------


def baseline_configs(sweep: SweepSpec, architecture: str, dataset: str) -> list[TrainConfig]:
    return [
        TrainConfig(
            architecture=architecture,
            dataset=dataset,
            mode="fp32",
            seed=seed,
            epochs=sweep.epochs_override,
            quantize_features=sweep.quantize_features,
        )
        for seed in sweep.seeds
    ]


def _require_baseline(path: Path, config: TrainConfig, data_hash: str) -> RunRecord:
    rec = _reusable(path, config, data_hash)
    if rec is None:
        raise OrchestrationError(
            f"missing FP32 baseline for {config.architecture}/{config.dataset} seed "
            f"{config.seed}: run `dacqnn train-baseline --arch {config.architecture} "
            f"--dataset {config.dataset}` first"
        )
    return rec


def ptq_eval(
    architecture: str, params: np.ndarray, data: Dataset, bits: int, quantize_features: bool = True
) -> tuple[float, float]:
    """(test_accuracy, train_accuracy) of params deployed on a bits-wide grid."""
    spec = circuit_spec(architecture)
    grid = DacGrid(bits)
    qparams = quantize_params(grid, params)
    test_x = quantize_params(grid, data.test_x) if quantize_features else data.test_x
    train_x = quantize_params(grid, data.train_x) if quantize_features else data.train_x
    return (
        evaluate(spec, qparams, test_x, data.test_y),
        evaluate(spec, qparams, train_x, data.train_y),
    )


def run_ptq_inference(sweep: SweepSpec, processed_dir, out_dir, log=None) -> list[SummaryRow]:
    """Quantize stored FP32 baselines at each bit width and re-evaluate."""
    rows = []
    for arch in sweep.architectures:
        for ds in sweep.datasets:
            data = load_dataset(ds, _dataset_file(processed_dir, ds))
            data_hash = data.fingerprint()
            baselines = [
                _require_baseline(record_path(out_dir, c), c, data_hash)
                for c in baseline_configs(sweep, arch, ds)
            ]
            test_accs = [r.final_test_accuracy for r in baselines]
            train_accs = [r.final_train_accuracy for r in baselines]
            rows.append(_row("ptq_inference", arch, ds, None, "fp32", None, test_accs, train_accs))
            for bits in sweep.bits:
                pairs = [
                    ptq_eval(arch, r.final_params, data, bits, sweep.quantize_features)
                    for r in baselines
                ]
                rows.append(
                    _row(
                        "ptq_inference", arch, ds, bits, "ptq", None,
                        [p[0] for p in pairs], [p[1] for p in pairs],
                    )
                )
                if log:
                    log(f"ptq {arch}/{ds} bits={bits}")
    return rows


# --- Aggregation ------------------------------------------------------------


def _row(paradigm, arch, ds, bits, mode, temp, test_accs, train_accs) -> SummaryRow:
    test = np.asarray(test_accs, dtype=np.float64)
    train = np.asarray(train_accs, dtype=np.float64)
    return SummaryRow(
        paradigm, arch, ds, bits, mode, temp,
        float(test.mean()), float(test.var()),
        float(train.mean()), float(train.var()),
        len(test_accs),
    )


def aggregate_training(records: list[RunRecord]) -> list[SummaryRow]:
    """One SummaryRow per configuration group, failed trials excluded."""
    groups: dict[tuple, list[RunRecord]] = {}
    for rec in records:
        if rec.status != "ok":
            continue
        c = rec.config
        key = (c.architecture, c.dataset, c.mode, c.bits, c.temperature)
        groups.setdefault(key, []).append(rec)
    rows = []
    for (arch, ds, mode, bits, temp), recs in groups.items():
        rows.append(
            _row(
                "quant_training", arch, ds, bits, mode, temp,
                [r.final_test_accuracy for r in recs],
                [r.final_train_accuracy for r in recs],
            )
        )
    return rows


# --- Summary emission ---------------------------------------------------------


def _sort_key(row: SummaryRow):
    return (
        row.paradigm,
        row.architecture,
        row.dataset,
        -1 if row.bits is None else row.bits,
        row.mode,
        -1.0 if row.temperature is None else row.temperature,
    )


def _render(row: SummaryRow) -> list[str]:
    return [
        row.paradigm,
        row.architecture,
        row.dataset,
        "fp32" if row.bits is None else str(row.bits),
        row.mode,
        "" if row.temperature is None else str(row.temperature),
        str(row.mean_test_acc),
        str(row.var_test_acc),
        str(row.mean_train_acc),
        str(row.var_train_acc),
        str(row.n_trials),
    ]


def emit_summary(rows: list[SummaryRow], path, meta: dict | None = None) -> None:
    """Deterministic CSV (+ companion .json with config and data manifest)."""
    if not rows:
        raise ValueError("no rows to emit")
    ordered = sorted(rows, key=_sort_key)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in ordered:
        writer.writerow(_render(row))
    atomic_write_text(path, buf.getvalue())
    companion = {"variance_convention": "population (divide by n)", **(meta or {})}
    atomic_write_text(Path(path).with_suffix(".json"), json.dumps(companion, indent=2, sort_keys=True) + "\n")


def rows_from_csv(path) -> list[SummaryRow]:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        for r in reader:
            rows.append(
                SummaryRow(
                    r["paradigm"],
                    r["architecture"],
                    r["dataset"],
                    None if r["bits"] == "fp32" else int(r["bits"]),
                    r["mode"],
                    None if r["temperature"] == "" else float(r["temperature"]),
                    float(r["mean_test_acc"]),
                    float(r["var_test_acc"]),
                    float(r["mean_train_acc"]),
                    float(r["var_train_acc"]),
                    int(r["n_trials"]),
                )
            )
    return rows


def load_records(out_dir) -> list[RunRecord]:
    """Read every RunRecord JSON under out_dir/records (independent pass)."""
    rec_dir = Path(out_dir) / "records"
    if not rec_dir.is_dir():
        return []
    return [load_record(p) for p in sorted(rec_dir.glob("*.json"))]
