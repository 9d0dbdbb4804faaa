"""Datasets for the training harness: synthetic 2-D sets and IDX files."""

import struct
from dataclasses import dataclass

import numpy as np

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray  # (n, d) float64
    labels: np.ndarray  # (n,) int
    classes: int
    train_idx: np.ndarray
    val_idx: np.ndarray

    def __post_init__(self):
        if len(self.labels) != len(self.features):
            raise ValueError("labels and features disagree on sample count")
        if len(self.labels) and (
            self.labels.min() < 0 or self.labels.max() >= self.classes
        ):
            raise ValueError("labels out of range")

    @property
    def n(self) -> int:
        return len(self.labels)

    def train(self):
        return self.features[self.train_idx], self.labels[self.train_idx]

    def val(self):
        return self.features[self.val_idx], self.labels[self.val_idx]


def _split(n: int, rng, val_fraction: float = 0.2):
    """Shuffled disjoint train/val index split covering all n samples."""
    perm = rng.permutation(n)
    n_val = int(round(n * val_fraction))
    return perm[n_val:], perm[:n_val]


def gen_two_moons(n: int, noise: float = 0.1, seed: int = 0) -> Dataset:
    """Two interleaved unit half-circles with Gaussian jitter, n/2 per class."""
    if n < 4:
        raise ValueError(f"need n >= 4, got {n}")
    if n % 2:
        raise ValueError(f"n must be even, got {n}")
    if noise < 0:
        raise ValueError(f"noise must be >= 0, got {noise}")
    rng = np.random.default_rng(seed)
    half = n // 2
    t = np.linspace(0.0, np.pi, half)
    outer = np.column_stack([np.cos(t), np.sin(t)])
    inner = np.column_stack([1.0 - np.cos(t), 0.5 - np.sin(t)])
    x = np.vstack([outer, inner]) + noise * rng.standard_normal((n, 2))
    y = np.concatenate([np.zeros(half, dtype=np.intp), np.ones(half, dtype=np.intp)])
    train_idx, val_idx = _split(n, rng)
    return Dataset(x, y, 2, train_idx, val_idx)


def gen_spirals(n: int, turns: float = 1.75, noise: float = 0.05, seed: int = 0) -> Dataset:
    """Two interleaved Archimedean spirals (radius grows linearly with angle)."""
    if n < 4:
        raise ValueError(f"need n >= 4, got {n}")
    if n % 2:
        raise ValueError(f"n must be even, got {n}")
    if noise < 0:
        raise ValueError(f"noise must be >= 0, got {noise}")
    rng = np.random.default_rng(seed)
    half = n // 2
    theta = np.linspace(0.0, turns * 2.0 * np.pi, half)
    r = theta / (turns * 2.0 * np.pi)  # unit outer radius
    arm = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    x = np.vstack([arm, -arm]) + noise * rng.standard_normal((n, 2))
    y = np.concatenate([np.zeros(half, dtype=np.intp), np.ones(half, dtype=np.intp)])
    train_idx, val_idx = _split(n, rng)
    return Dataset(x, y, 2, train_idx, val_idx)


def _read_idx_header(raw: bytes, path, expect_magic: int, ndim: int):
    if len(raw) < 4 * (1 + ndim):
        raise ValueError(f"truncated IDX file {path}: header incomplete")
    magic = struct.unpack(">i", raw[:4])[0]
    if magic != expect_magic:
        raise ValueError(
            f"IDX magic mismatch in {path}: expected {expect_magic:#010x}, "
            f"got {magic:#010x}"
        )
    dims = struct.unpack(f">{ndim}i", raw[4 : 4 + 4 * ndim])
    return dims, raw[4 + 4 * ndim :]


def load_idx(images_path, labels_path, val_fraction: float = 0.0, seed: int = 0) -> Dataset:
    """Parse big-endian IDX image/label files into a flat float64 dataset.

    Pixels are scaled to [0, 1] by dividing by 255; images are flattened row
    major.  Everything lands in the train split unless val_fraction > 0.
    """
    with open(images_path, "rb") as f:
        raw = f.read()
    (count, rows, cols), body = _read_idx_header(raw, images_path, IDX_IMAGE_MAGIC, 3)
    expected = count * rows * cols
    if len(body) < expected:
        raise ValueError(
            f"truncated IDX file {images_path}: expected {expected} pixel bytes, "
            f"got {len(body)}"
        )
    pixels = np.frombuffer(body[:expected], dtype=np.uint8)
    features = pixels.astype(np.float64).reshape(count, rows * cols) / 255.0

    with open(labels_path, "rb") as f:
        raw = f.read()
    (label_count,), body = _read_idx_header(raw, labels_path, IDX_LABEL_MAGIC, 1)
    if label_count != count:
        raise ValueError(
            f"IDX count mismatch: {count} images in {images_path} but "
            f"{label_count} labels in {labels_path}"
        )
    if len(body) < label_count:
        raise ValueError(
            f"truncated IDX file {labels_path}: expected {label_count} label "
            f"bytes, got {len(body)}"
        )
    labels = np.frombuffer(body[:label_count], dtype=np.uint8).astype(np.intp)
    classes = int(labels.max()) + 1 if label_count else 1

    rng = np.random.default_rng(seed)
    if val_fraction > 0:
        train_idx, val_idx = _split(count, rng, val_fraction)
    else:
        train_idx, val_idx = np.arange(count), np.arange(0)
    return Dataset(features, labels, classes, train_idx, val_idx)


def save_idx(features: np.ndarray, labels: np.ndarray, images_path, labels_path,
             rows: int, cols: int):
    """Write an IDX image/label pair (inverse of load_idx, for fixtures)."""
    count = len(labels)
    pixels = np.clip(np.round(features * 255.0), 0, 255).astype(np.uint8)
    with open(images_path, "wb") as f:
        f.write(struct.pack(">iiii", IDX_IMAGE_MAGIC, count, rows, cols))
        f.write(pixels.tobytes())
    with open(labels_path, "wb") as f:
        f.write(struct.pack(">ii", IDX_LABEL_MAGIC, count))
        f.write(labels.astype(np.uint8).tobytes())


def save_csv(ds: Dataset, path):
    """Write the interchange CSV: header y,x0,x1,... and one row per sample.

    Floats are written with repr so a reload reproduces identical values.
    The train/val split is not part of the format.
    """
    d = ds.features.shape[1]
    with open(path, "w") as f:
        f.write("y," + ",".join(f"x{j}" for j in range(d)) + "\n")
        for yi, row in zip(ds.labels, ds.features):
            f.write(str(int(yi)) + "," + ",".join(repr(float(v)) for v in row) + "\n")


def load_csv(path, val_fraction: float = 0.0, seed: int = 0) -> Dataset:
    """Read the interchange CSV back into a Dataset."""
    with open(path) as f:
        header = f.readline().strip().split(",")
        if not header or header[0] != "y":
            raise ValueError(f"bad CSV header in {path}: {header}")
        rows, labels = [], []
        for line in f:
            parts = line.strip().split(",")
            if len(parts) != len(header):
                raise ValueError(f"CSV row width mismatch in {path}")
            labels.append(int(parts[0]))
            rows.append([float(v) for v in parts[1:]])
    features = np.asarray(rows, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.intp)
    classes = int(labels.max()) + 1 if len(labels) else 1
    rng = np.random.default_rng(seed)
    if val_fraction > 0:
        train_idx, val_idx = _split(len(labels), rng, val_fraction)
    else:
        train_idx, val_idx = np.arange(len(labels)), np.arange(0)
    return Dataset(features, labels, classes, train_idx, val_idx)
