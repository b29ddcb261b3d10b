"""Dataset ingestion and preprocessing.

Four binary tasks: MNIST digits 0/1 and Fashion-MNIST top/trouser from IDX
files, Iris setosa/versicolor and Wisconsin breast cancer from CSV. Images
and the 30-dim cancer features are reduced to 4 principal components (fit on
the training split only); Iris keeps its native 4 features. Every feature is
then min-max mapped to [-pi, pi] using training statistics, with test values
clamped into range.
"""

from __future__ import annotations

import csv
import gzip
import hashlib
import io
import json
import math
import os
import struct
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801
GZIP_MAGIC = b"\x1f\x8b"

DATASET_NAMES = ("mnist", "fashion_mnist", "iris", "breast_cancer")

SCHEMA_VERSION = 1


class DataError(Exception):
    """Dataset content cannot satisfy a request (e.g. class too small)."""


class FormatError(DataError):
    """Input file violates its declared format."""


@dataclass
class RawDataset:
    name: str
    features: np.ndarray  # (n, source_dims) float64
    labels: np.ndarray  # (n,) int64 in {0, 1}

    @property
    def source_dims(self) -> int:
        return self.features.shape[1]

    def __len__(self) -> int:
        return self.features.shape[0]


@dataclass
class PcaModel:
    mean: np.ndarray  # (d,)
    components: np.ndarray  # (k, d), orthonormal rows, descending variance
    explained_variance: np.ndarray  # (k,)

    def project(self, features: np.ndarray) -> np.ndarray:
        return (features - self.mean) @ self.components.T


@dataclass
class Dataset:
    name: str
    train_x: np.ndarray  # (n_train, 4) in [-pi, pi]
    train_y: np.ndarray  # (n_train,) int64
    test_x: np.ndarray
    test_y: np.ndarray
    feature_low: np.ndarray  # per-feature train minima before scaling
    feature_high: np.ndarray

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(self.name.encode())
        for arr in (self.train_x, self.train_y, self.test_x, self.test_y):
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()


# --- IDX ---------------------------------------------------------------


def _read_file(path) -> bytes:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"missing {path}; run the data fetch script first")
    raw = path.read_bytes()
    if raw[:2] == GZIP_MAGIC:
        return gzip.decompress(raw)
    return raw


def _read_header(buf: bytes, count: int, path, offset: int = 0) -> tuple[int, ...]:
    end = offset + 4 * count
    if len(buf) < end:
        raise FormatError(f"{path}: truncated header, need {end} bytes, have {len(buf)}")
    return struct.unpack(f">{count}I", buf[offset:end])


def load_idx(images_path, labels_path) -> tuple[np.ndarray, np.ndarray]:
    """Parse an IDX image/label file pair into ((n, rows*cols) in [0,1], (n,))."""
    buf = _read_file(images_path)
    magic, count, rows, cols = _read_header(buf, 4, images_path)
    if magic != IDX_IMAGE_MAGIC:
        raise FormatError(
            f"{images_path}: bad image magic 0x{magic:08x} at byte 0, expected 0x{IDX_IMAGE_MAGIC:08x}"
        )
    need = 16 + count * rows * cols
    if len(buf) < need:
        raise FormatError(f"{images_path}: truncated pixel data at byte {len(buf)}, need {need}")
    pixels = np.frombuffer(buf, dtype=np.uint8, count=count * rows * cols, offset=16)
    images = pixels.reshape(count, rows * cols).astype(np.float64) / 255.0

    lbuf = _read_file(labels_path)
    lmagic, lcount = _read_header(lbuf, 2, labels_path)
    if lmagic != IDX_LABEL_MAGIC:
        raise FormatError(
            f"{labels_path}: bad label magic 0x{lmagic:08x} at byte 0, expected 0x{IDX_LABEL_MAGIC:08x}"
        )
    if lcount != count:
        raise FormatError(
            f"{labels_path}: {lcount} labels but {images_path} holds {count} images"
        )
    if len(lbuf) < 8 + lcount:
        raise FormatError(f"{labels_path}: truncated label data at byte {len(lbuf)}")
    labels = np.frombuffer(lbuf, dtype=np.uint8, count=lcount, offset=8).astype(np.int64)
    return images, labels


def binary_subset(
    features: np.ndarray, labels: np.ndarray, classes: tuple[int, int], name: str
) -> RawDataset:
    """Keep two source classes and relabel them 0/1."""
    a, b = classes
    keep = (labels == a) | (labels == b)
    return RawDataset(name, features[keep], (labels[keep] == b).astype(np.int64))


# --- CSV ---------------------------------------------------------------

_IRIS_LABELS = {"iris-setosa": 0, "iris-versicolor": 1}
_IRIS_DROP = "iris-virginica"


def _parse_floats(cells, path, line_no) -> list[float]:
    out = []
    for cell in cells:
        try:
            out.append(float(cell))
        except ValueError:
            raise FormatError(f"{path}:{line_no}: non-numeric cell {cell!r}") from None
    return out


def _iris_row(cells, path, line_no):
    if len(cells) != 5:
        raise FormatError(f"{path}:{line_no}: expected 5 columns, got {len(cells)}")
    species = cells[4].strip().lower()
    if species == _IRIS_DROP:
        return None
    if species not in _IRIS_LABELS:
        raise FormatError(f"{path}:{line_no}: unknown iris class {cells[4]!r}")
    return _parse_floats(cells[:4], path, line_no), _IRIS_LABELS[species]


def _wdbc_row(cells, path, line_no):
    # Canonical wdbc.data is (id, diagnosis, 30 features); a headerless
    # (diagnosis, 30 features) variant is accepted too.
    if len(cells) == 32:
        diag, values = cells[1], cells[2:]
    elif len(cells) == 31:
        diag, values = cells[0], cells[1:]
    else:
        raise FormatError(f"{path}:{line_no}: expected 31 or 32 columns, got {len(cells)}")
    diag = diag.strip().upper()
    if diag not in ("M", "B"):
        raise FormatError(f"{path}:{line_no}: diagnosis must be M or B, got {diag!r}")
    return _parse_floats(values, path, line_no), 1 if diag == "M" else 0


_CSV_SCHEMAS = {"iris": _iris_row, "breast_cancer": _wdbc_row}


def load_csv(path, schema: str, has_header: bool | None = None) -> RawDataset:
    """Parse a CSV of the named schema; has_header=None sniffs the first row."""
    if schema not in _CSV_SCHEMAS:
        raise ValueError(f"unknown CSV schema {schema!r}")
    if not Path(path).is_file():
        raise DataError(f"missing {path}; run the data fetch script first")
    parse_row = _CSV_SCHEMAS[schema]
    features: list[list[float]] = []
    labels: list[int] = []
    with open(path, newline="", encoding="utf-8") as fh:
        for line_no, cells in enumerate(csv.reader(fh), start=1):
            if not cells or all(not c.strip() for c in cells):
                continue
            if line_no == 1 and has_header is not False:
                try:
                    parsed = parse_row(cells, path, line_no)
                except FormatError:
                    if has_header is None:
                        continue  # sniffed a header row
                    raise
                else:
                    if has_header is True:
                        continue
            else:
                parsed = parse_row(cells, path, line_no)
            if parsed is None:
                continue
            features.append(parsed[0])
            labels.append(parsed[1])
    if not features:
        raise FormatError(f"{path}: no data rows")
    return RawDataset(schema, np.array(features, dtype=np.float64), np.array(labels, dtype=np.int64))


# --- Sampling, PCA, normalization ---------------------------------------


def subsample_balanced(raw: RawDataset, total: int, seed: int) -> RawDataset:
    """Draw total/2 samples per class without replacement, then shuffle."""
    if total % 2 != 0:
        raise ValueError(f"total must be even, got {total}")
    if total == 0:
        return RawDataset(raw.name, raw.features[:0], raw.labels[:0])
    rng = np.random.default_rng(seed)
    per_class = total // 2
    picks = []
    for cls in (0, 1):
        idx = np.flatnonzero(raw.labels == cls)
        if idx.size < per_class:
            raise DataError(
                f"{raw.name}: class {cls} has {idx.size} samples, need {per_class}"
            )
        picks.append(rng.choice(idx, size=per_class, replace=False))
    order = rng.permutation(np.concatenate(picks))
    return RawDataset(raw.name, raw.features[order], raw.labels[order])


def fit_pca(features: np.ndarray, k: int = 4) -> PcaModel:
    """Top-k principal components via SVD of the mean-centered data.

    Component signs are pinned so each row's largest-magnitude entry is
    positive (eigenvector sign is otherwise arbitrary).
    """
    n, d = features.shape
    if n < k or d < k:
        raise ValueError(f"need at least {k} samples and {k} dims, got {features.shape}")
    mean = features.mean(axis=0)
    centered = features - mean
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:k].copy()
    variance = svals[:k] ** 2 / max(n - 1, 1)
    if svals[k - 1] <= svals[0] * 1e-12:
        warnings.warn(f"data rank below {k}; trailing components carry no variance")
    for row in components:
        j = int(np.argmax(np.abs(row)))
        if row[j] < 0:
            row *= -1.0
    return PcaModel(mean, components, variance)


def stratified_split(
    features: np.ndarray,
    labels: np.ndarray,
    train_fraction: float = 0.7,
    seed: int = 0,
    train_count: int | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Deterministic shuffled split with per-class counts balanced to +-1."""
    rng = np.random.default_rng(seed)
    classes = np.unique(labels)
    if train_count is None:
        total_train = int(round(train_fraction * labels.shape[0]))
    else:
        total_train = train_count
    base, extra = divmod(total_train, classes.size)
    train_idx, test_idx = [], []
    for i, cls in enumerate(classes):
        idx = rng.permutation(np.flatnonzero(labels == cls))
        n_train = base + (1 if i < extra else 0)
        train_idx.append(idx[:n_train])
        test_idx.append(idx[n_train:])
    train_idx = rng.permutation(np.concatenate(train_idx))
    test_idx = rng.permutation(np.concatenate(test_idx))
    return features[train_idx], labels[train_idx], features[test_idx], labels[test_idx]


def transform_normalize(
    model: PcaModel | None,
    train_x: np.ndarray,
    train_y: np.ndarray,
    test_x: np.ndarray,
    test_y: np.ndarray,
    name: str,
) -> Dataset:
    """Project (if a PCA model is given) and min-max map to [-pi, pi].

    Scaling statistics come from the training split only; test features are
    clamped into [-pi, pi] after the affine map.
    """
    if model is not None:
        train_p = model.project(train_x)
        test_p = model.project(test_x)
    else:
        train_p, test_p = train_x.astype(np.float64), test_x.astype(np.float64)
    low = train_p.min(axis=0)
    high = train_p.max(axis=0)
    span = high - low
    flat = span == 0
    if np.any(flat):
        warnings.warn(f"{name}: {int(flat.sum())} constant feature(s) mapped to 0")
        span = np.where(flat, 1.0, span)

    def scale(block: np.ndarray) -> np.ndarray:
        out = (block - low) / span * (2.0 * math.pi) - math.pi
        out[:, flat] = 0.0
        return np.clip(out, -math.pi, math.pi)

    return Dataset(name, scale(train_p), train_y.copy(), scale(test_p), test_y.copy(), low, high)


# --- Per-dataset assembly ------------------------------------------------

_IDX_FILES = ("train-images-idx3-ubyte", "train-labels-idx1-ubyte")


def _find_idx(data_dir: Path, subdir: str) -> tuple[Path, Path]:
    paths = []
    for stem in _IDX_FILES:
        plain = data_dir / subdir / stem
        gz = data_dir / subdir / (stem + ".gz")
        if plain.exists():
            paths.append(plain)
        elif gz.exists():
            paths.append(gz)
        else:
            raise DataError(f"missing {plain} (or .gz); run the data fetch script first")
    return paths[0], paths[1]


def prepare_dataset(name: str, data_dir, seed: int = 0) -> tuple[Dataset, dict[str, str]]:
    """Ingest one dataset from data_dir; returns (dataset, input file hashes)."""
    data_dir = Path(data_dir)
    if name in ("mnist", "fashion_mnist"):
        images_path, labels_path = _find_idx(data_dir, name)
        inputs = [images_path, labels_path]
        X, y = load_idx(images_path, labels_path)
        raw = binary_subset(X, y, (0, 1), name)
        raw = subsample_balanced(raw, total=400, seed=seed)
        tr_x, tr_y, te_x, te_y = stratified_split(raw.features, raw.labels, 0.7, seed)
        model = fit_pca(tr_x, k=4)
    elif name == "iris":
        path = data_dir / "iris.csv"
        inputs = [path]
        raw = load_csv(path, "iris")
        tr_x, tr_y, te_x, te_y = stratified_split(raw.features, raw.labels, 0.7, seed)
        model = None  # native 4 features
    elif name == "breast_cancer":
        path = data_dir / "wdbc.csv"
        inputs = [path]
        raw = load_csv(path, "breast_cancer")
        minority = int(min(np.sum(raw.labels == 0), np.sum(raw.labels == 1)))
        raw = subsample_balanced(raw, total=2 * minority, seed=seed)
        tr_x, tr_y, te_x, te_y = stratified_split(
            raw.features, raw.labels, seed=seed, train_count=296 if len(raw) == 424 else None
        )
        model = fit_pca(tr_x, k=4)
    else:
        raise ValueError(f"unknown dataset {name!r}, expected one of {DATASET_NAMES}")
    dataset = transform_normalize(model, tr_x, tr_y, te_x, te_y, name)
    hashes = {p.name: sha256_file(p) for p in inputs}
    return dataset, hashes


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


# --- Processed-data persistence ------------------------------------------


def save_dataset(dataset: Dataset, path) -> None:
    buf = io.BytesIO()
    np.savez(
        buf,
        train_x=dataset.train_x,
        train_y=dataset.train_y,
        test_x=dataset.test_x,
        test_y=dataset.test_y,
        feature_low=dataset.feature_low,
        feature_high=dataset.feature_high,
    )
    _atomic_write_bytes(path, buf.getvalue())


def load_dataset(name: str, path) -> Dataset:
    if not Path(path).exists():
        raise DataError(f"missing processed dataset {path}; run `dacqnn prepare-data` first")
    with np.load(path) as z:
        return Dataset(
            name,
            z["train_x"],
            z["train_y"],
            z["test_x"],
            z["test_y"],
            z["feature_low"],
            z["feature_high"],
        )


def _atomic_write_bytes(path, payload: bytes) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, path)


def atomic_write_text(path, text: str) -> None:
    _atomic_write_bytes(path, text.encode("utf-8"))


def write_manifest(path, entries: dict) -> None:
    atomic_write_text(path, json.dumps(entries, indent=2, sort_keys=True) + "\n")


def read_manifest(path) -> dict:
    p = Path(path)
    if not p.exists():
        raise DataError(f"missing manifest {path}; run `dacqnn prepare-data` first")
    return json.loads(p.read_text())
