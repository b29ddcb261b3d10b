#!/usr/bin/env python3
"""Populate a data directory with offline stand-in data.

Images are synthetic IDX files (see dacqnn.sampledata); the two tabular sets
are the real UCI tables exported from scikit-learn. Use scripts/fetch_data.sh
for the genuine MNIST/Fashion-MNIST archives.

Usage: python scripts/make_sample_data.py [DATA_DIR]
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

from dacqnn.sampledata import write_sample_data_dir


def write_iris_csv(path: Path) -> None:
    from sklearn.datasets import load_iris

    bunch = load_iris()
    names = [f"Iris-{n}" for n in bunch.target_names]  # setosa/versicolor/virginica
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for row, target in zip(bunch.data, bunch.target):
            writer.writerow([*(f"{v:.1f}" for v in row), names[target]])


def write_wdbc_csv(path: Path) -> None:
    from sklearn.datasets import load_breast_cancer

    bunch = load_breast_cancer()  # target 0 = malignant, 1 = benign
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for i, (row, target) in enumerate(zip(bunch.data, bunch.target)):
            writer.writerow([842302 + i, "M" if target == 0 else "B", *(repr(float(v)) for v in row)])


def main() -> int:
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data")
    root.mkdir(parents=True, exist_ok=True)
    paths = write_sample_data_dir(root)
    write_iris_csv(root / "iris.csv")
    write_wdbc_csv(root / "wdbc.csv")
    for label, p in {**paths, "iris": root / "iris.csv", "wdbc": root / "wdbc.csv"}.items():
        print(f"{label}: {p}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
