"""Quantum kernel tests: analytic oracle agreement, Gram structure, caching."""

import math
import time

import numpy as np
import pytest

from qpulsar.kernel import (
    cross_kernel,
    gram_matrix,
    kernel_analytic,
    kernel_value,
    load_kernel_csv,
    rbf_cross,
    rbf_gram,
    rbf_kernel,
    save_kernel_csv,
)
from qpulsar.sim import NoiseConfig


def test_kernel_self_similarity_is_one():
    rng = np.random.default_rng(1)
    x = rng.uniform(0, math.pi, 8)
    assert kernel_value(x, x) == pytest.approx(1.0, abs=1e-12)
    assert kernel_analytic(x, x) == 1.0


def test_kernel_matches_analytic_oracle():
    rng = np.random.default_rng(2)
    for _ in range(500):
        x, xp = rng.uniform(0, math.pi, (2, 8))
        assert abs(kernel_value(x, xp) - kernel_analytic(x, xp)) < 1e-10


def test_pi_offset_in_one_feature_kills_kernel():
    rng = np.random.default_rng(3)
    x = rng.uniform(0, math.pi / 4, 8)
    xp = x.copy()
    xp[0] += math.pi
    assert kernel_value(x, xp) == pytest.approx(0.0, abs=1e-12)


def test_analytic_single_feature_difference():
    delta = 0.77
    x = np.full(8, 0.3)
    xp = x.copy()
    xp[4] += delta
    assert kernel_analytic(x, xp) == pytest.approx(math.cos(delta / 2) ** 2, abs=1e-12)
    assert kernel_analytic(x, x + math.pi) == pytest.approx(0.0, abs=1e-12)


# --- gram / cross -----------------------------------------------------------

def test_gram_entries_match_kernel_value():
    rng = np.random.default_rng(4)
    X = rng.uniform(0, math.pi, (7, 8))
    gram = gram_matrix(X)
    for i in range(7):
        for j in range(7):
            assert gram.values[i, j] == pytest.approx(kernel_value(X[i], X[j]), abs=1e-12)


def test_gram_structure_symmetric_unit_diagonal_psd():
    rng = np.random.default_rng(5)
    X = rng.uniform(0, math.pi, (32, 8))
    gram = gram_matrix(X)
    assert np.allclose(gram.values, gram.values.T, atol=1e-9)
    assert np.allclose(np.diag(gram.values), 1.0, atol=1e-9)
    assert np.linalg.eigvalsh(gram.values).min() >= -1e-8


def test_execution_counts_are_quadratic():
    rng = np.random.default_rng(6)
    for n in (1, 3, 10):
        X = rng.uniform(0, math.pi, (n, 8))
        assert gram_matrix(X).n_executions == n * n
    cross = cross_kernel(rng.uniform(0, math.pi, (4, 8)), rng.uniform(0, math.pi, (9, 8)))
    assert cross.n_executions == 36
    assert cross.values.shape == (9, 4)


def test_single_sample_gram():
    gram = gram_matrix(np.zeros((1, 8)))
    assert gram.values.shape == (1, 1)
    assert gram.values[0, 0] == 1.0
    with pytest.raises(ValueError):
        gram_matrix(np.zeros((0, 8)))


def test_cross_entries_match_kernel_value():
    rng = np.random.default_rng(7)
    train = rng.uniform(0, math.pi, (3, 8))
    test = rng.uniform(0, math.pi, (5, 8))
    cross = cross_kernel(train, test)
    for i in range(5):
        for j in range(3):
            assert cross.values[i, j] == pytest.approx(kernel_value(test[i], train[j]), abs=1e-12)


def test_noisy_gram_symmetrized_and_deterministic():
    rng = np.random.default_rng(8)
    X = rng.uniform(0, math.pi, (5, 8))
    noise = NoiseConfig(0.05, 32, seed=10)
    first = gram_matrix(X, noise)
    second = gram_matrix(X, noise)
    assert np.array_equal(first.values, second.values)
    assert np.allclose(first.values, first.values.T)
    assert first.n_executions == 25


def test_noisy_kernel_with_zero_p_equals_exact():
    rng = np.random.default_rng(9)
    x, xp = rng.uniform(0, math.pi, (2, 8))
    assert kernel_value(x, xp, NoiseConfig(0.0, 16, seed=0)) == kernel_value(x, xp)


# --- classical baseline kernel ------------------------------------------------

def test_rbf_kernel_basics():
    x = np.arange(8.0)
    assert rbf_kernel(x, x, gamma=0.5) == 1.0
    xp = x.copy()
    xp[0] += math.sqrt(8.0)  # squared distance 8 = 1/gamma at gamma=1/8
    assert rbf_kernel(x, xp, gamma=1 / 8) == pytest.approx(math.exp(-1), abs=1e-12)
    with pytest.raises(ValueError):
        rbf_kernel(x, x, gamma=0.0)


def test_rbf_gram_and_cross_match_pairwise():
    rng = np.random.default_rng(10)
    X = rng.normal(size=(6, 8))
    Z = rng.normal(size=(4, 8))
    G = rbf_gram(X, gamma=0.3)
    C = rbf_cross(X, Z, gamma=0.3)
    for i in range(6):
        for j in range(6):
            assert G[i, j] == pytest.approx(rbf_kernel(X[i], X[j], 0.3), abs=1e-12)
    for i in range(4):
        for j in range(6):
            assert C[i, j] == pytest.approx(rbf_kernel(Z[i], X[j], 0.3), abs=1e-12)


# --- CSV cache ----------------------------------------------------------------

def test_kernel_csv_round_trip(tmp_path):
    rng = np.random.default_rng(11)
    X = rng.uniform(0, math.pi, (6, 8))
    gram = gram_matrix(X)
    path = tmp_path / "gram.csv"
    save_kernel_csv(path, gram.values)
    loaded = load_kernel_csv(path)
    assert np.array_equal(loaded, gram.values)  # full precision via repr
