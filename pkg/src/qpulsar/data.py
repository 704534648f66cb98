"""HTRU-2 ingestion and the sampling pipeline.

Rows are 8 comma-separated features plus a {0,1} label, no header. Features
are min-max scaled to [0, pi] radians with statistics taken over the full
dataset before splitting; the stored (min, max) pairs transform unseen data,
clamping to the angle range.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

N_FEATURES = 8


class DataFormatError(ValueError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


@dataclass(frozen=True)
class Dataset:
    """Feature matrix (N, 8), labels (N,), and optional angle normalization."""

    features: np.ndarray
    labels: np.ndarray
    normalization: np.ndarray | None = None  # (8, 2) per-feature (min, max)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_positive(self) -> int:
        return int(np.sum(self.labels == 1))

    @property
    def n_negative(self) -> int:
        return int(np.sum(self.labels == 0))

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices)
        return Dataset(self.features[indices], self.labels[indices], self.normalization)


@dataclass(frozen=True)
class SplitPools:
    train_pool: Dataset
    test_pool: Dataset
    seed: int


def load_htru2(path) -> Dataset:
    """Parse the 9-column CSV; row order is preserved."""
    features = []
    labels = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != N_FEATURES + 1:
                raise DataFormatError(f"expected {N_FEATURES + 1} fields, got {len(parts)}", lineno)
            try:
                values = [float(p) for p in parts]
            except ValueError:
                raise DataFormatError(f"non-numeric field in {line!r}", lineno) from None
            label = values[-1]
            if label not in (0.0, 1.0):
                raise DataFormatError(f"label must be 0 or 1, got {parts[-1]}", lineno)
            features.append(values[:-1])
            labels.append(int(label))
    if not features:
        raise DataFormatError("empty dataset")
    return Dataset(np.array(features), np.array(labels))


def normalize_to_angle(dataset: Dataset) -> Dataset:
    """Min-max scale every feature to [0, pi]; constant features map to 0."""
    lo = dataset.features.min(axis=0)
    hi = dataset.features.max(axis=0)
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    angles = math.pi * (dataset.features - lo) / safe
    angles[:, span == 0] = 0.0
    return Dataset(angles, dataset.labels, np.stack([lo, hi], axis=1))


def apply_normalization(features, normalization: np.ndarray) -> np.ndarray:
    """Transform unseen raw features with stored stats, clamped to [0, pi]."""
    features = np.asarray(features, dtype=float)
    lo = normalization[:, 0]
    hi = normalization[:, 1]
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    angles = math.pi * (features - lo) / span
    angles[..., hi - lo == 0] = 0.0
    return np.clip(angles, 0.0, math.pi)


def denormalize(angles, normalization: np.ndarray) -> np.ndarray:
    """Inverse of the angle scaling, for round-trip checks."""
    angles = np.asarray(angles, dtype=float)
    lo = normalization[:, 0]
    hi = normalization[:, 1]
    return lo + (hi - lo) * angles / math.pi


def split_70_30(dataset: Dataset, seed: int) -> SplitPools:
    """Seeded shuffle; the first 70% of rows become the training pool."""
    n = len(dataset)
    if n < 2:
        raise ValueError("need at least 2 samples to split")
    order = np.random.default_rng(seed).permutation(n)
    cut = int(0.7 * n)
    return SplitPools(dataset.subset(order[:cut]), dataset.subset(order[cut:]), seed)


def sample_balanced(pool: Dataset, n: int, seed: int) -> Dataset:
    """n/2 per class, uniform without replacement within each class."""
    if n % 2:
        raise ValueError(f"balanced sample size must be even, got {n}")
    half = n // 2
    rng = np.random.default_rng(seed)
    pos = np.flatnonzero(pool.labels == 1)
    neg = np.flatnonzero(pool.labels == 0)
    if len(pos) < half or len(neg) < half:
        raise ValueError(f"pool has {len(pos)} positive / {len(neg)} negative samples; need {half} of each")
    chosen = np.concatenate([rng.choice(pos, size=half, replace=False), rng.choice(neg, size=half, replace=False)])
    return pool.subset(rng.permutation(chosen))


def sample_test(pool: Dataset, n: int, seed: int, stratified: bool = False) -> Dataset:
    """Uniform draw without replacement; class ratio follows the pool unless
    stratified, which splits the draw evenly between the classes."""
    if n > len(pool):
        raise ValueError(f"requested {n} samples from a pool of {len(pool)}")
    if stratified:
        return sample_balanced(pool, n, seed)
    rng = np.random.default_rng(seed)
    return pool.subset(rng.choice(len(pool), size=n, replace=False))


def make_batch_indices(labels, batch_size: int, n_epochs: int, seed: int) -> list[np.ndarray]:
    """One balanced index batch per epoch; draws are without replacement
    inside a batch and with replacement across batches (overlap allowed)."""
    if batch_size % 2:
        raise ValueError(f"batch_size must be even, got {batch_size}")
    labels = np.asarray(labels)
    pos = np.flatnonzero(labels == 1)
    neg = np.flatnonzero(labels == 0)
    half = batch_size // 2
    if len(pos) == 0 or len(neg) == 0:
        raise ValueError("balanced batching requires both classes in the training set")
    rng = np.random.default_rng(seed)
    batches = []
    for _ in range(n_epochs):
        p = rng.choice(pos, size=half, replace=len(pos) < half)
        q = rng.choice(neg, size=half, replace=len(neg) < half)
        batches.append(rng.permutation(np.concatenate([p, q])))
    return batches


def make_batches(train_set: Dataset, batch_size: int, n_epochs: int, seed: int) -> list[Dataset]:
    indices = make_batch_indices(train_set.labels, batch_size, n_epochs, seed)
    return [train_set.subset(idx) for idx in indices]


def save_dataset_csv(path, dataset: Dataset, sidecar: dict | None = None) -> None:
    """Write the 9-column CSV shape back out, plus a JSON sidecar holding the
    seed and normalization constants when provided."""
    with open(path, "w", encoding="utf-8") as fh:
        for row, label in zip(dataset.features, dataset.labels):
            fh.write(",".join(repr(float(v)) for v in row) + f",{int(label)}\n")
    if sidecar is not None:
        doc = dict(sidecar)
        if dataset.normalization is not None:
            doc["normalization"] = [[float(a), float(b)] for a, b in dataset.normalization]
        with open(f"{path}.json", "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
