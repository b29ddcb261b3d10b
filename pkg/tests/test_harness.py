"""Sweep harness: planning, record reuse, aggregation, CSV contract, CLI."""

from __future__ import annotations

import json
import math
import shutil

import numpy as np
import pytest

from dacqnn import cli
from dacqnn.sweep import (
    CSV_COLUMNS,
    OrchestrationError,
    SummaryRow,
    SweepSpec,
    aggregate_training,
    baseline_configs,
    emit_summary,
    execute_configs,
    load_records,
    plan_training_configs,
    ptq_eval,
    record_path,
    rows_from_csv,
    run_ptq_inference,
    run_training_sweep,
)
from dacqnn.trainer import RunRecord, TrainConfig, config_hash, error_record

# --- planning ---------------------------------------------------------------


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec("training")
    with pytest.raises(ValueError):
        SweepSpec("quant_training", bits=())
    with pytest.raises(ValueError):
        SweepSpec("quant_training", seeds=(1, 1, 2))
    with pytest.raises(ValueError):
        SweepSpec("quant_training", architectures=("qnn3",))
    with pytest.raises(ValueError):
        SweepSpec("quant_training", datasets=("cifar",))


def test_plan_cell_and_grid_counts():
    cell = plan_training_configs(
        SweepSpec("quant_training", architectures=("qnn1",), datasets=("iris",))
    )
    # 5 seeds x (1 fp32 + 6 det bit widths + 6 x 4 stoch cells) = 155
    assert len(cell) == 155
    by_mode = {m: sum(1 for c in cell if c.mode == m) for m in ("fp32", "det_quant", "stoch_quant")}
    assert by_mode == {"fp32": 5, "det_quant": 30, "stoch_quant": 120}
    assert len({config_hash(c) for c in cell}) == 155
    full = plan_training_configs(SweepSpec("quant_training"))
    assert len(full) == 1240  # 2 architectures x 4 datasets x 155
    assert len({config_hash(c) for c in full}) == 1240


def test_record_path_naming(tmp_path):
    det = TrainConfig("qnn1", "mnist", "det_quant", seed=3, bits=6)
    path = record_path(tmp_path, det)
    assert path.parent == tmp_path / "records"
    assert path.name == f"qnn1_mnist_det_quant_b6_s3_{config_hash(det)}.json"
    half = TrainConfig("qnn2", "iris", "stoch_quant", seed=1, bits=4, temperature=0.5)
    assert "t0p5" in record_path(tmp_path, half).name
    one = TrainConfig("qnn2", "iris", "stoch_quant", seed=1, bits=4, temperature=1.0)
    assert "_t1_" in record_path(tmp_path, one).name
    fp32 = TrainConfig("qnn1", "iris", "fp32", seed=2)
    assert record_path(tmp_path, fp32).name == f"qnn1_iris_fp32_s2_{config_hash(fp32)}.json"


# --- execution and record reuse -----------------------------------------------


def _fast_config(seed=1):
    return TrainConfig("qnn1", "iris", "det_quant", seed=seed, bits=4, epochs=1)


def test_execute_configs_reuses_completed_records(processed_dir, tmp_path):
    logs: list[str] = []
    first = execute_configs([_fast_config()], processed_dir, tmp_path, log=logs.append)
    assert logs[0] == "0 cached, 1 to run"
    logs.clear()
    second = execute_configs([_fast_config()], processed_dir, tmp_path, log=logs.append)
    assert logs[0] == "1 cached, 0 to run"
    assert np.array_equal(first[0].final_params, second[0].final_params)
    assert second[0].final_test_accuracy == first[0].final_test_accuracy


def test_execute_configs_recomputes_on_data_hash_mismatch(processed_dir, tmp_path):
    config = _fast_config()
    execute_configs([config], processed_dir, tmp_path)
    path = record_path(tmp_path, config)
    payload = json.loads(path.read_text())
    payload["data_hash"] = "0" * 16
    path.write_text(json.dumps(payload))
    logs: list[str] = []
    execute_configs([config], processed_dir, tmp_path, log=logs.append)
    assert logs[0] == "0 cached, 1 to run"


def test_execute_configs_recovers_from_corrupt_record(processed_dir, tmp_path):
    config = _fast_config()
    execute_configs([config], processed_dir, tmp_path)
    record_path(tmp_path, config).write_text("{not json")
    logs: list[str] = []
    records = execute_configs([config], processed_dir, tmp_path, log=logs.append)
    assert logs[0] == "0 cached, 1 to run"
    assert records[0].status == "ok"


def test_execute_configs_reruns_failed_records(processed_dir, tmp_path):
    config = _fast_config()
    path = record_path(tmp_path, config)
    path.parent.mkdir(parents=True)
    from dacqnn.trainer import save_record

    save_record(error_record(config, "deadbeef", "RuntimeError: boom"), path)
    records = execute_configs([config], processed_dir, tmp_path)
    assert records[0].status == "ok"


def test_micro_training_sweep(processed_dir, tmp_path):
    sweep = SweepSpec(
        "quant_training",
        architectures=("qnn1",),
        datasets=("iris",),
        bits=(2,),
        temperatures=(1.0,),
        seeds=(1,),
        epochs_override=1,
    )
    rows, records, failed = run_training_sweep(sweep, processed_dir, tmp_path)
    assert failed == 0
    assert len(records) == 3  # fp32 + det + stoch
    assert len(rows) == 3
    assert all(row.n_trials == 1 and row.var_test_acc == 0.0 for row in rows)
    assert len(load_records(tmp_path)) == 3
    assert load_records(tmp_path / "nothing_here") == []


# --- aggregation ----------------------------------------------------------------


def _fake_record(config, test_acc, train_acc):
    return RunRecord(
        config=config,
        traces=[],
        final_params=np.empty(0),
        final_test_accuracy=test_acc,
        final_train_accuracy=train_acc,
        data_hash="d",
        wall_time_s=0.0,
    )


def test_aggregate_training_matches_numpy_moments():
    det = [
        _fake_record(TrainConfig("qnn1", "iris", "det_quant", seed=s, bits=4), acc, acc / 2)
        for s, acc in zip((1, 2, 3), (0.5, 0.625, 0.75))
    ]
    fp32 = [
        _fake_record(TrainConfig("qnn1", "iris", "fp32", seed=s), 0.9, 0.9) for s in (1, 2)
    ]
    failed = error_record(TrainConfig("qnn1", "iris", "det_quant", seed=4, bits=4), "d", "boom")
    rows = aggregate_training(det + fp32 + [failed])
    assert len(rows) == 2
    det_row = next(r for r in rows if r.mode == "det_quant")
    assert det_row.n_trials == 3  # the failed trial is excluded
    assert math.isclose(det_row.mean_test_acc, np.mean([0.5, 0.625, 0.75]), abs_tol=1e-15)
    assert math.isclose(det_row.var_test_acc, np.var([0.5, 0.625, 0.75]), abs_tol=1e-15)
    fp32_row = next(r for r in rows if r.mode == "fp32")
    assert fp32_row.bits is None
    assert fp32_row.var_test_acc == 0.0  # identical accuracies -> exactly zero


# --- summary CSV -----------------------------------------------------------------


def _sample_rows():
    return [
        SummaryRow("quant_training", "qnn1", "iris", 4, "det_quant", None, 0.625, 0.01, 0.6, 0.0, 5),
        SummaryRow("quant_training", "qnn1", "iris", None, "fp32", None, 0.9, 0.0, 0.95, 0.0, 5),
        SummaryRow("quant_training", "qnn1", "iris", 4, "stoch_quant", 0.5, 0.7, 0.02, 0.7, 0.01, 5),
    ]


def test_emit_summary_deterministic_and_sorted(tmp_path):
    rows = _sample_rows()
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_summary(rows, a)
    emit_summary(list(reversed(rows)), b)  # input order must not matter
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1].startswith("quant_training,qnn1,iris,fp32,fp32,")
    companion = json.loads((tmp_path / "a.json").read_text())
    assert companion["variance_convention"] == "population (divide by n)"


def test_emit_summary_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        emit_summary([], tmp_path / "x.csv")


def test_rows_csv_roundtrip(tmp_path):
    rows = _sample_rows()
    path = tmp_path / "s.csv"
    emit_summary(rows, path)
    loaded = rows_from_csv(path)
    assert sorted(loaded, key=lambda r: (r.mode,)) == sorted(rows, key=lambda r: (r.mode,))


def test_rows_from_csv_rejects_wrong_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError, match="unexpected columns"):
        rows_from_csv(path)


# --- PTQ inference ----------------------------------------------------------------


def test_ptq_requires_baseline(processed_dir, tmp_path):
    sweep = SweepSpec("ptq_inference", architectures=("qnn1",), datasets=("iris",))
    with pytest.raises(OrchestrationError, match="train-baseline --arch qnn1 --dataset iris"):
        run_ptq_inference(sweep, processed_dir, tmp_path)


def test_ptq_rows_match_manual_evaluation(processed_dir, datasets, tmp_path):
    sweep = SweepSpec(
        "ptq_inference",
        architectures=("qnn1",),
        datasets=("iris",),
        bits=(4, 8),
        seeds=(1, 2),
        epochs_override=1,
    )
    baselines = execute_configs(
        baseline_configs(sweep, "qnn1", "iris"), processed_dir, tmp_path
    )
    rows = run_ptq_inference(sweep, processed_dir, tmp_path)
    assert [r.bits for r in rows] == [None, 4, 8]
    fp32_row = rows[0]
    assert fp32_row.mode == "fp32"
    assert fp32_row.n_trials == 2
    assert fp32_row.mean_test_acc == np.mean([r.final_test_accuracy for r in baselines])
    for row in rows[1:]:
        assert row.mode == "ptq"
        manual = [
            ptq_eval("qnn1", r.final_params, datasets["iris"], row.bits) for r in baselines
        ]
        assert row.mean_test_acc == np.mean([m[0] for m in manual])
        assert row.mean_train_acc == np.mean([m[1] for m in manual])


# --- CLI -----------------------------------------------------------------------


def test_cli_prepare_data_roundtrip(data_dir, tmp_path):
    root = tmp_path / "data"
    root.mkdir()
    shutil.copy(data_dir / "iris.csv", root / "iris.csv")
    assert cli.main(["prepare-data", "--data-dir", str(root), "--dataset", "iris"]) == 0
    assert (root / "processed" / "iris.npz").exists()
    manifest = json.loads((root / "processed" / "manifest.json").read_text())
    assert "iris" in manifest["datasets"]
    assert manifest["datasets"]["iris"]["train_size"] == 70


def test_cli_missing_data_exits_3(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert cli.main(["prepare-data", "--data-dir", str(empty), "--dataset", "iris"]) == 3


def test_cli_config_error_exits_2(tmp_path):
    # duplicate seeds fail SweepSpec validation before anything runs
    code = cli.main(
        ["train-sweep", "--out-dir", str(tmp_path), "--seeds", "1", "1", "--dataset", "iris"]
    )
    assert code == 2


def test_cli_summarize_without_records_exits_2(tmp_path):
    assert cli.main(["summarize", "--out-dir", str(tmp_path)]) == 2


def test_cli_train_baseline_and_summarize(data_dir, processed_dir, tmp_path):
    out = tmp_path / "results"
    args = [
        "--data-dir", str(data_dir), "--out-dir", str(out),
        "--arch", "qnn1", "--dataset", "iris", "--seeds", "1",
    ]
    assert cli.main(["train-baseline", *args, "--epochs-override", "1"]) == 0
    config = TrainConfig("qnn1", "iris", "fp32", seed=1, epochs=1)
    assert record_path(out, config).exists()
    assert cli.main(["summarize", "--data-dir", str(data_dir), "--out-dir", str(out)]) == 0
    rows = rows_from_csv(out / "training_summary.csv")
    assert len(rows) == 1 and rows[0].mode == "fp32"


def test_cli_partial_failure_exits_4(data_dir, processed_dir, tmp_path, monkeypatch):
    def boom(config, data):
        raise RuntimeError("injected failure")

    monkeypatch.setattr("dacqnn.sweep.run_trial", boom)
    code = cli.main(
        [
            "train-baseline", "--data-dir", str(data_dir), "--out-dir", str(tmp_path),
            "--arch", "qnn1", "--dataset", "iris", "--seeds", "99", "--epochs-override", "1",
        ]
    )
    assert code == 4
    records = load_records(tmp_path)
    assert len(records) == 1 and records[0].status == "error"
    assert "injected failure" in records[0].error


def test_cli_selftest_passes():
    assert cli.main(["selftest"]) == 0
