"""Soft-margin SVM fit on a precomputed kernel matrix.

The dual problem is solved by sequential minimal optimization: repeatedly
pick a KKT-violating sample and a partner, solve the two-variable subproblem
analytically, and update the cached decision values. Pair selection is
deterministic (largest |E_i - E_j| first), so a fit is reproducible from its
inputs alone.

Labels are {0, 1} at the API surface and +/-1 inside the model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DegenerateProblemError(ValueError):
    """Training labels contain a single class; no margin exists."""


@dataclass(frozen=True)
class SvmModel:
    dual_coefficients: np.ndarray  # alpha_i >= 0 per training sample
    bias: float
    labels: np.ndarray  # +/-1 per training sample
    C: float
    support_indices: np.ndarray


def _to_pm1(labels) -> np.ndarray:
    labels = np.asarray(labels)
    values = set(np.unique(labels).tolist())
    if values <= {0, 1}:
        y = np.where(labels == 1, 1.0, -1.0)
    elif values <= {-1, 1}:
        y = labels.astype(float)
    else:
        raise ValueError(f"labels must be in {{0,1}} or {{-1,+1}}, got values {sorted(values)}")
    if len(values) < 2:
        raise DegenerateProblemError("training set contains a single class")
    return y


def _post_hoc_bias(g: np.ndarray, y: np.ndarray, alpha: np.ndarray, C: float) -> float:
    """Bias from the converged alphas: mean over free vectors, else the
    midpoint of the interval the bound constraints leave feasible."""
    eps = 1e-8
    v = y - g
    free = (alpha > eps) & (alpha < C - eps)
    if free.any():
        return float(v[free].mean())
    lower = ((alpha <= eps) & (y > 0)) | ((alpha >= C - eps) & (y < 0))
    upper = ((alpha <= eps) & (y < 0)) | ((alpha >= C - eps) & (y > 0))
    b_low = v[lower].max() if lower.any() else -np.inf
    b_up = v[upper].min() if upper.any() else np.inf
    if np.isinf(b_low) and np.isinf(b_up):
        return 0.0
    if np.isinf(b_low):
        return float(b_up)
    if np.isinf(b_up):
        return float(b_low)
    return float((b_low + b_up) / 2.0)


def svm_fit(gram, labels, C: float = 1.0, tol: float = 1e-3, max_passes: int | None = None) -> SvmModel:
    """Solve the dual on a precomputed kernel matrix.

    Each step picks the worst KKT violator and a second-order partner, then
    solves the two-variable subproblem exactly; the loop stops when the KKT
    gap drops to tol or after max_passes sweeps (default 10*n, with one sweep
    worth n pair updates).
    """
    K = np.asarray(getattr(gram, "values", gram), dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"gram matrix must be square, got shape {K.shape}")
    y = _to_pm1(labels)
    n = len(y)
    if len(K) != n:
        raise ValueError(f"gram size {len(K)} does not match {n} labels")
    if C <= 0:
        raise ValueError(f"C must be > 0, got {C}")
    if max_passes is None:
        max_passes = 10 * n

    alpha = np.zeros(n)
    g = np.zeros(n)  # K @ (alpha * y), maintained incrementally
    diag = np.diag(K).copy()
    eps = 1e-12
    for _ in range(max_passes * n):
        v = y - g  # per-sample candidate bias; KKT gap = spread over up/down sets
        up = ((y > 0) & (alpha < C - eps)) | ((y < 0) & (alpha > eps))
        down = ((y > 0) & (alpha > eps)) | ((y < 0) & (alpha < C - eps))
        if not up.any() or not down.any():
            break
        i = int(np.flatnonzero(up)[np.argmax(v[up])])
        j_min = int(np.flatnonzero(down)[np.argmin(v[down])])
        if v[i] - v[j_min] <= tol:
            break
        # second-order partner: maximize the guaranteed objective gain
        candidates = down & (v < v[i])
        eta_all = np.maximum(diag[i] + diag - 2.0 * K[i], eps)
        gains = np.where(candidates, (v[i] - v) ** 2 / eta_all, -np.inf)
        j = int(np.argmax(gains))
        yi, yj = y[i], y[j]
        ai, aj = alpha[i], alpha[j]
        if yi != yj:
            low, high = max(0.0, aj - ai), min(C, C + aj - ai)
        else:
            low, high = max(0.0, ai + aj - C), min(C, ai + aj)
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if eta > eps:
            aj_new = min(high, max(low, aj + yj * (v[j] - v[i]) / eta))
        else:
            # kernel-degenerate pair: objective is linear along the constraint
            slope = yj * (v[j] - v[i])
            if abs(slope) <= eps:
                break
            aj_new = high if slope > 0 else low
        if abs(aj_new - aj) < eps:
            break  # maximal pair admits no step; numerically converged
        ai_new = ai + yi * yj * (aj - aj_new)
        g += yi * (ai_new - ai) * K[:, i] + yj * (aj_new - aj) * K[:, j]
        alpha[i], alpha[j] = ai_new, aj_new

    bias = _post_hoc_bias(g, y, alpha, C)
    support = np.flatnonzero(alpha > 1e-8)
    return SvmModel(alpha.copy(), bias, y, C, support)


def decision_values(model: SvmModel, kernel_rows) -> np.ndarray:
    """sum_i alpha_i y_i k(x_i, .) + b for each row of kernel values."""
    rows = np.atleast_2d(np.asarray(kernel_rows, dtype=float))
    if rows.shape[1] != len(model.labels):
        raise ValueError(f"kernel row length {rows.shape[1]} does not match training size {len(model.labels)}")
    return rows @ (model.dual_coefficients * model.labels) + model.bias


def svm_predict(model: SvmModel, kernel_row) -> int:
    """Class label in {0, 1}; a decision value of exactly 0 goes to class 1."""
    return int(decision_values(model, kernel_row)[0] >= 0.0)


def svm_predict_many(model: SvmModel, kernel_rows) -> np.ndarray:
    return (decision_values(model, kernel_rows) >= 0.0).astype(int)
