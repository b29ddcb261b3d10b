"""Shared fixtures: an offline sample-data directory, preprocessed datasets,
and a persistent results cache so the training-based acceptance tests reuse
completed trials across pytest runs (trial records are keyed by config hash
and data fingerprint, and the sample-data pipeline is bit-deterministic).
"""

from __future__ import annotations

import csv
from pathlib import Path

import pytest

from dacqnn.datasets import DATASET_NAMES, load_dataset, prepare_dataset, save_dataset
from dacqnn.sampledata import write_sample_data_dir

# --- acceptance criterion reporting ----------------------------------------

_CRITERION_LINES: list[str] = []


@pytest.fixture(scope="session")
def criterion_report():
    """Record one PASS/FAIL line per acceptance criterion for the summary."""

    def record(number: int, passed: bool, detail: str = "") -> str:
        line = f"[criterion {number}] {'PASS' if passed else 'FAIL'}"
        if detail:
            line += f" - {detail}"
        _CRITERION_LINES.append(line)
        print(line)
        return line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERION_LINES:
            terminalreporter.write_line(line)


# --- sample data ------------------------------------------------------------


def _write_iris_csv(path: Path) -> None:
    from sklearn.datasets import load_iris

    bunch = load_iris()
    names = [f"Iris-{n}" for n in bunch.target_names]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for row, target in zip(bunch.data, bunch.target):
            writer.writerow([*(f"{v:.1f}" for v in row), names[target]])


def _write_wdbc_csv(path: Path) -> None:
    from sklearn.datasets import load_breast_cancer

    bunch = load_breast_cancer()  # target 0 = malignant, 1 = benign
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for i, (row, target) in enumerate(zip(bunch.data, bunch.target)):
            writer.writerow(
                [842302 + i, "M" if target == 0 else "B", *(repr(float(v)) for v in row)]
            )


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory) -> Path:
    """Raw-data directory in the exact layout `dacqnn prepare-data` expects."""
    root = tmp_path_factory.mktemp("data")
    write_sample_data_dir(root)
    _write_iris_csv(root / "iris.csv")
    _write_wdbc_csv(root / "wdbc.csv")
    return root


@pytest.fixture(scope="session")
def processed_dir(data_dir: Path) -> Path:
    processed = data_dir / "processed"
    processed.mkdir()
    for name in DATASET_NAMES:
        dataset, _ = prepare_dataset(name, data_dir)
        save_dataset(dataset, processed / f"{name}.npz")
    return processed


@pytest.fixture(scope="session")
def datasets(processed_dir: Path) -> dict:
    return {name: load_dataset(name, processed_dir / f"{name}.npz") for name in DATASET_NAMES}


@pytest.fixture(scope="session")
def results_cache() -> Path:
    """Persistent record store; completed trials survive across pytest runs."""
    path = Path(__file__).resolve().parent.parent / ".cache" / "acceptance"
    path.mkdir(parents=True, exist_ok=True)
    return path
