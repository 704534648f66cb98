"""Quantum kernel evaluation and Gram / cross-kernel matrices.

The kernel of two feature vectors is the probability of measuring |00...0>
after the embed/un-embed circuit, evaluated either exactly on the
statevector or as a bit-flip Monte-Carlo estimate. kernel_analytic is the
closed-form product of cosines used as a test oracle only; the pipeline
always runs circuits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import qsvm_circuit
from .sim import NoiseConfig, _batch_apply_ry, _batch_zero, prob_all_zero, run, run_noisy

_CHUNK_ROWS = 4096


def kernel_value(x, x_prime, noise: NoiseConfig | None = None) -> float:
    """Squared overlap of the two encoded states, in [0, 1]."""
    circuit = qsvm_circuit(x, x_prime)
    if noise is None:
        return prob_all_zero(run(circuit))
    return run_noisy(circuit, noise, readout="all_zero")


def _overlap_rows(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Exact kernel of row pairs (left_r, right_r), one batched circuit pass
    per chunk; identical arithmetic to running each kernel circuit alone."""
    n_features = left.shape[1]
    out = np.empty(len(left))
    for start in range(0, len(left), _CHUNK_ROWS):
        lo, hi = start, min(start + _CHUNK_ROWS, len(left))
        amps = _batch_zero(hi - lo, n_features)
        for q in range(n_features):
            amps = _batch_apply_ry(amps, q, left[lo:hi, q])
        for q in range(n_features):
            amps = _batch_apply_ry(amps, q, -right[lo:hi, q])
        out[lo:hi] = amps[:, 0] ** 2
    return out


def kernel_analytic(x, x_prime) -> float:
    """Independent closed form: prod_i cos^2((x_i - x'_i)/2). Test oracle only."""
    x = np.asarray(x, dtype=float)
    x_prime = np.asarray(x_prime, dtype=float)
    if x.shape != x_prime.shape:
        raise ValueError("feature vectors must have equal shapes")
    return float(np.prod(np.cos((x - x_prime) / 2.0) ** 2))


def rbf_kernel(x, x_prime, gamma: float) -> float:
    """Classical baseline kernel exp(-gamma * ||x - x'||^2)."""
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    x = np.asarray(x, dtype=float)
    x_prime = np.asarray(x_prime, dtype=float)
    return float(np.exp(-gamma * np.sum((x - x_prime) ** 2)))


@dataclass(frozen=True)
class KernelMatrix:
    """Kernel values plus the circuit-execution count of the runtime model."""

    values: np.ndarray
    n_executions: int


def _entry_seeds(noise: NoiseConfig, count: int) -> np.ndarray:
    rng = np.random.default_rng(noise.seed)
    return rng.integers(0, 2**63, size=count)


def gram_matrix(features, noise: NoiseConfig | None = None) -> KernelMatrix:
    """Pairwise kernel matrix over one sample set.

    Exact mode computes the upper triangle and mirrors it (unit diagonal is
    implicit); noisy mode estimates all n^2 entries independently and
    symmetrizes as (K + K^T)/2. Either way the reported execution count is
    n^2, which is what a device run would pay.
    """
    features = np.asarray(features, dtype=float)
    n = len(features)
    if n == 0:
        raise ValueError("empty sample set")
    values = np.empty((n, n))
    if noise is None:
        rows, cols = np.triu_indices(n, k=1)
        upper = _overlap_rows(features[rows], features[cols])
        np.fill_diagonal(values, 1.0)
        values[rows, cols] = upper
        values[cols, rows] = upper
    else:
        seeds = _entry_seeds(noise, n * n)
        for i in range(n):
            for j in range(n):
                entry_noise = NoiseConfig(noise.p_flip, noise.trajectories, int(seeds[i * n + j]))
                values[i, j] = kernel_value(features[i], features[j], entry_noise)
        values = (values + values.T) / 2.0
    return KernelMatrix(values, n * n)


def cross_kernel(train_features, test_features, noise: NoiseConfig | None = None) -> KernelMatrix:
    """Rectangular kernel block: entry (i, j) = k(test_i, train_j)."""
    train = np.asarray(train_features, dtype=float)
    test = np.asarray(test_features, dtype=float)
    if len(train) == 0 or len(test) == 0:
        raise ValueError("empty sample set")
    if noise is None:
        rows = np.repeat(np.arange(len(test)), len(train))
        cols = np.tile(np.arange(len(train)), len(test))
        values = _overlap_rows(test[rows], train[cols]).reshape(len(test), len(train))
    else:
        values = np.empty((len(test), len(train)))
        seeds = _entry_seeds(noise, values.size)
        for i in range(len(test)):
            for j in range(len(train)):
                entry_noise = NoiseConfig(noise.p_flip, noise.trajectories, int(seeds[i * len(train) + j]))
                values[i, j] = kernel_value(test[i], train[j], entry_noise)
    return KernelMatrix(values, len(train) * len(test))


def rbf_gram(features, gamma: float) -> np.ndarray:
    """Dense RBF kernel matrix for the classical SVM baseline."""
    features = np.asarray(features, dtype=float)
    sq = np.sum(features**2, axis=1)
    dist2 = sq[:, None] + sq[None, :] - 2.0 * features @ features.T
    return np.exp(-gamma * np.maximum(dist2, 0.0))


def rbf_cross(train_features, test_features, gamma: float) -> np.ndarray:
    train = np.asarray(train_features, dtype=float)
    test = np.asarray(test_features, dtype=float)
    dist2 = (
        np.sum(test**2, axis=1)[:, None]
        + np.sum(train**2, axis=1)[None, :]
        - 2.0 * test @ train.T
    )
    return np.exp(-gamma * np.maximum(dist2, 0.0))


def save_kernel_csv(path, values: np.ndarray) -> None:
    """Row-major CSV at full precision, for caching across runs."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in np.atleast_2d(values):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def load_kernel_csv(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        rows = [[float(v) for v in line.split(",")] for line in fh if line.strip()]
    return np.array(rows)
