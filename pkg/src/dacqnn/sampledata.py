"""Synthetic stand-in data in the exact on-disk formats the loaders expect.

Generates IDX image/label pairs shaped like the MNIST family (28x28 uint8,
big-endian headers, optional gzip) plus small separable tabular sets. Useful
for offline smoke tests and demos; the real datasets are fetched with
scripts/fetch_data.sh.

The two binary image classes are built as `mean + z1*contrast + noise
patterns`: each sample is a fixed class template plus scaled orthonormal
deformation patterns. The class-separating coefficient z1 is tightly
clustered with a small fraction of exaggerated variants, so after PCA and
min-max scaling the typical sample sits mid-range rather than at the
extremes - mirroring how natural image classes spread under PCA, and
keeping the binary task well-conditioned on coarse DAC grids.
"""

from __future__ import annotations

import gzip
import struct
from pathlib import Path

import numpy as np

_GRID_Y, _GRID_X = np.mgrid[0:28, 0:28].astype(np.float64)

# Latent-model constants shared by both image datasets.
_INK = 80.0  # contrast pattern intensity scale
_OFFSET = 60.0  # background brightness floor (clip headroom on both sides)
_SIGMA = 0.15  # within-class spread of the contrast coefficient
_NUISANCE = (0.45, 0.36, 0.28)  # class-independent deformation amplitudes
_TAIL_P = 0.04  # fraction of exaggerated variants per class
_TAIL = (2.0, 2.4)  # contrast multiplier range of exaggerated variants


def _rect(y0, y1, x0, x1) -> np.ndarray:
    return (
        (_GRID_Y >= y0) & (_GRID_Y < y1) & (_GRID_X >= x0) & (_GRID_X < x1)
    ).astype(np.float64)


# --- Class templates (deterministic) ---------------------------------------


def _ring_pattern() -> np.ndarray:
    r = np.sqrt(((_GRID_X - 14.0) / 7.0) ** 2 + ((_GRID_Y - 14.0) / 7.0) ** 2)
    return np.exp(-(((r - 1.0) / 0.13) ** 2))


def _stroke_pattern() -> np.ndarray:
    img = np.exp(-((np.abs(_GRID_X - 14.0) / 1.6) ** 2))
    img[(_GRID_Y < 4) | (_GRID_Y > 24)] = 0.0
    return img


def _top_pattern() -> np.ndarray:
    torso = _rect(8, 24, 8, 20)
    sleeves = _rect(8, 13, 3, 25)
    return np.clip(torso + sleeves, 0.0, 1.0)


def _trouser_pattern() -> np.ndarray:
    waist = _rect(5, 9, 9, 19)
    left = _rect(9, 26, 9, 12.5)
    right = _rect(9, 26, 15.5, 19)
    return np.clip(waist + left + right, 0.0, 1.0)


# --- Deformation patterns (class-independent) -------------------------------


def _nuisance_patterns() -> list[np.ndarray]:
    bar = np.exp(-(((_GRID_Y - 14.0) / 2.0) ** 2)) * (np.abs(_GRID_X - 14.0) < 9)
    gradx = (_GRID_X - 14.0) / 14.0
    grady = (_GRID_Y - 14.0) / 14.0
    return [bar, gradx, grady]


def _orthonormal_rows(vectors: list[np.ndarray]) -> list[np.ndarray]:
    """Gram-Schmidt over flattened images; input order is kept."""
    out: list[np.ndarray] = []
    for v in vectors:
        v = v.astype(np.float64).ravel().copy()
        for u in out:
            v -= (v @ u) * u
        out.append(v / np.linalg.norm(v))
    return out


def _latent_pair(
    template_a: np.ndarray, template_b: np.ndarray, n_per_class: int, rng: np.random.Generator
) -> np.ndarray:
    """Two class blocks of images: a-like block (label 0) then b-like (label 1)."""
    mean = _OFFSET + 0.5 * (template_a + template_b) * _INK
    contrast = (template_b - template_a).ravel() * _INK
    scale = np.linalg.norm(contrast) / 2.0
    u1 = contrast / (2.0 * scale)
    nuis_dirs = _orthonormal_rows([u1, *[p.ravel() for p in _nuisance_patterns()]])[1:]
    images = np.empty((2 * n_per_class, 28, 28), dtype=np.uint8)
    i = 0
    for sign in (-1.0, 1.0):
        for _ in range(n_per_class):
            amp = rng.uniform(*_TAIL) if rng.uniform() < _TAIL_P else rng.normal(1.0, _SIGMA)
            flat = mean.ravel() + sign * scale * amp * u1
            for direction, level in zip(nuis_dirs, _NUISANCE):
                flat = flat + scale * level * rng.uniform(-1.0, 1.0) * direction
            img = flat.reshape(28, 28) + rng.uniform(0, 6, size=(28, 28))
            images[i] = np.clip(img, 0, 255).astype(np.uint8)
            i += 1
    return images


def _blobs(rng: np.random.Generator) -> np.ndarray:
    img = np.zeros((28, 28))
    for _ in range(rng.integers(2, 5)):
        cx, cy = rng.uniform(5, 23, size=2)
        s = rng.uniform(1.5, 4.0)
        img += np.exp(-(((_GRID_X - cx) ** 2 + (_GRID_Y - cy) ** 2) / (2 * s * s)))
    return np.clip(img, 0.0, 1.0)


def _stripes(rng: np.random.Generator) -> np.ndarray:
    period = rng.uniform(3.0, 6.0)
    return 0.5 * (1.0 + np.sin(2 * np.pi * _GRID_Y / period)) * _rect(6, 24, 6, 22)


def _image_set(
    template_a: np.ndarray,
    template_b: np.ndarray,
    junk_renderer,
    n_per_class: int,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Label blocks 0, 1 (latent pair) and 2 (unused filler class), in order."""
    rng = np.random.default_rng(seed)
    images = np.empty((3 * n_per_class, 28, 28), dtype=np.uint8)
    labels = np.repeat(np.arange(3, dtype=np.uint8), n_per_class)
    images[: 2 * n_per_class] = _latent_pair(template_a, template_b, n_per_class, rng)
    for j in range(n_per_class):
        img = junk_renderer(rng) * rng.uniform(170, 255) + rng.uniform(0, 10, size=(28, 28))
        images[2 * n_per_class + j] = np.clip(img, 0, 255).astype(np.uint8)
    return images, labels


def synthetic_digits(n_per_class: int = 250, seed: int = 137):
    """Ring-vs-stroke imagery with a junk third class (labels 0/1/2)."""
    return _image_set(_ring_pattern(), _stroke_pattern(), _blobs, n_per_class, seed)


def synthetic_fashion(n_per_class: int = 250, seed: int = 138):
    """Top-vs-trouser imagery with a striped third class (labels 0/1/2)."""
    return _image_set(_top_pattern(), _trouser_pattern(), _stripes, n_per_class, seed)


def synthetic_tabular(n: int = 120, seed: int = 9, spread: float = 0.6):
    """Two separable 4-d Gaussian blobs already scaled to [-pi, pi]-ish range."""
    rng = np.random.default_rng(seed)
    half = n // 2
    centers = np.array([[-1.6, 1.2, -0.8, 0.9], [1.4, -1.1, 1.0, -0.7]])
    X = np.concatenate(
        [rng.normal(centers[c], spread, size=(half, 4)) for c in (0, 1)]
    )
    y = np.repeat(np.array([0, 1], dtype=np.int64), half)
    order = rng.permutation(2 * half)
    return np.clip(X[order], -np.pi, np.pi), y[order]


# --- IDX writers ------------------------------------------------------------


def write_idx_images(path, images: np.ndarray, compress: bool = True) -> None:
    n, rows, cols = images.shape
    payload = struct.pack(">IIII", 0x00000803, n, rows, cols) + images.astype(np.uint8).tobytes()
    _write(path, payload, compress)


def write_idx_labels(path, labels: np.ndarray, compress: bool = True) -> None:
    payload = struct.pack(">II", 0x00000801, labels.shape[0]) + labels.astype(np.uint8).tobytes()
    _write(path, payload, compress)


def _write(path, payload: bytes, compress: bool) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if compress:
        # mtime pinned so regenerated files are byte-identical
        payload = gzip.compress(payload, mtime=0)
    path.write_bytes(payload)


def write_sample_data_dir(root, n_per_class: int = 250, seed: int = 137) -> dict[str, Path]:
    """Populate root/ with IDX pairs for both image datasets; returns paths."""
    root = Path(root)
    out: dict[str, Path] = {}
    for name, maker, s in (
        ("mnist", synthetic_digits, seed),
        ("fashion_mnist", synthetic_fashion, seed + 1),
    ):
        images, labels = maker(n_per_class, s)
        img_path = root / name / "train-images-idx3-ubyte.gz"
        lbl_path = root / name / "train-labels-idx1-ubyte.gz"
        write_idx_images(img_path, images)
        write_idx_labels(lbl_path, labels)
        out[f"{name}_images"] = img_path
        out[f"{name}_labels"] = lbl_path
    return out
