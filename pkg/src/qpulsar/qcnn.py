"""QCNN forward pass, loss, parameter-shift gradients, and training.

The forward pass is the probability of reading |1> on the final pooled
qubit. Gradients use the parameter-shift rule; because conv parameters are
shared across the pairs of a layer, the rule is applied per occurrence and
the contributions summed. Exact-mode shifts are evaluated as one batched
statevector pass; noisy mode falls back to per-circuit trajectory estimates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .circuits import QcnnArchitecture, build_qcnn, build_qcnn_tracked
from .sim import Circuit, NoiseConfig, Ry, _batch_apply, _batch_apply_ry, _batch_prob_qubit_one, _batch_zero, prob_qubit_one, run, run_noisy

SHIFT = math.pi / 2


@dataclass(frozen=True)
class QcnnModel:
    arch: QcnnArchitecture
    theta: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        if theta.shape != (self.arch.n_params,):
            raise ValueError(f"theta must have length {self.arch.n_params}, got shape {theta.shape}")
        object.__setattr__(self, "theta", theta)


def init_model(arch: QcnnArchitecture, seed: int) -> QcnnModel:
    """Fresh model with theta uniform on [-pi, pi)."""
    rng = np.random.default_rng(seed)
    return QcnnModel(arch, rng.uniform(-math.pi, math.pi, size=arch.n_params))


def batch_forward(model: QcnnModel, features) -> np.ndarray:
    """Exact forward probabilities for many feature vectors in one pass."""
    features = np.atleast_2d(np.asarray(features, dtype=float))
    circuit, _ = build_qcnn_tracked(model.arch, model.theta, features[0])
    amps = _batch_zero(len(features), model.arch.n_qubits)
    for pos, gate in enumerate(circuit.gates):
        if isinstance(gate, Ry) and pos < model.arch.n_qubits:
            amps = _batch_apply_ry(amps, gate.target, features[:, pos])
        else:
            amps = _batch_apply(amps, gate, model.arch.n_qubits)
    return _batch_prob_qubit_one(amps, model.arch.final_qubit)


def init_model_searched(arch: QcnnArchitecture, seed: int, features, labels,
                        candidates: int = 32, eps: float = 1e-7) -> QcnnModel:
    """Multi-start init: sample uniform candidates, keep the lowest-loss one.

    A single uniform draw lands in a poor basin often enough to destabilize
    short training runs; scoring candidates costs one forward pass over the
    training set each and makes 150-epoch runs reproducibly convergent.
    """
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=int)
    rng = np.random.default_rng(seed)
    best_theta, best_loss = None, np.inf
    for _ in range(max(1, candidates)):
        theta = rng.uniform(-math.pi, math.pi, size=arch.n_params)
        probs = np.clip(batch_forward(QcnnModel(arch, theta), features), eps, 1.0 - eps)
        loss = float(np.mean(-(labels * np.log(probs) + (1 - labels) * np.log(1.0 - probs))))
        if loss < best_loss:
            best_theta, best_loss = theta, loss
    return QcnnModel(arch, best_theta)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 150
    batch_size: int | None = None  # None trains on the full set every epoch
    seed: int = 0
    loss_clamp: float = 1e-7
    optimizer: str = "adam"  # plain "sgd" stalls at this learning rate

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size is not None and (self.batch_size < 2 or self.batch_size % 2):
            raise ValueError(f"balanced batch_size must be even and >= 2, got {self.batch_size}")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"optimizer must be 'adam' or 'sgd', got {self.optimizer!r}")


def forward(model: QcnnModel, x, noise: NoiseConfig | None = None) -> float:
    """P(final qubit reads 1) for one feature vector."""
    circuit = build_qcnn(model.arch, model.theta, x)
    if noise is None:
        return prob_qubit_one(run(circuit), model.arch.final_qubit)
    return run_noisy(circuit, noise, readout=model.arch.final_qubit)


def predict(model: QcnnModel, x, threshold: float = 0.5, noise: NoiseConfig | None = None) -> int:
    """1 if the forward probability reaches the threshold (ties go positive)."""
    return int(forward(model, x, noise) >= threshold)


def bce_loss(y_pred: float, y: int, eps: float = 1e-7) -> float:
    """Binary cross-entropy with the prediction clamped to [eps, 1 - eps]."""
    p = min(max(y_pred, eps), 1.0 - eps)
    return -(y * math.log(p) + (1 - y) * math.log(1.0 - p))


def bce_loss_grad(y_pred: float, y: int, eps: float = 1e-7) -> float:
    """d loss / d y_pred; zero where the clamp is active."""
    if y_pred <= eps or y_pred >= 1.0 - eps:
        return 0.0
    return (y_pred - y) / (y_pred * (1.0 - y_pred))


def _shift_plan(positions: list[list[int]]) -> list[tuple[int, int, float]]:
    """(param index, gate position, +/-SHIFT) per parameter-shift evaluation."""
    plan = []
    for k, occ in enumerate(positions):
        for pos in occ:
            plan.append((k, pos, +SHIFT))
            plan.append((k, pos, -SHIFT))
    return plan


def _shift_readouts_exact(circuit: Circuit, plan, final_qubit: int) -> np.ndarray:
    """Row 0 is the unshifted forward; row 1+i applies plan[i]'s single shift."""
    rows = 1 + len(plan)
    deltas_by_pos: dict[int, list[tuple[int, float]]] = {}
    for row, (_, pos, delta) in enumerate(plan, start=1):
        deltas_by_pos.setdefault(pos, []).append((row, delta))
    amps = _batch_zero(rows, circuit.n_qubits)
    for pos, gate in enumerate(circuit.gates):
        if isinstance(gate, Ry) and pos in deltas_by_pos:
            angles = np.full(rows, gate.angle)
            for row, delta in deltas_by_pos[pos]:
                angles[row] += delta
            amps = _batch_apply_ry(amps, gate.target, angles)
        else:
            amps = _batch_apply(amps, gate, circuit.n_qubits)
    return _batch_prob_qubit_one(amps, final_qubit)


def _shift_readouts_noisy(circuit: Circuit, plan, final_qubit: int, p_flip: float,
                          trajectories: int, rng: np.random.Generator) -> np.ndarray:
    readouts = np.empty(1 + len(plan))
    seeds = rng.integers(0, 2**63, size=len(readouts))
    readouts[0] = run_noisy(circuit, NoiseConfig(p_flip, trajectories, int(seeds[0])), final_qubit)
    gates = list(circuit.gates)
    for i, (_, pos, delta) in enumerate(plan):
        base = gates[pos]
        shifted = gates.copy()
        shifted[pos] = Ry(base.target, base.angle + delta)
        readouts[1 + i] = run_noisy(
            Circuit(circuit.n_qubits, shifted), NoiseConfig(p_flip, trajectories, int(seeds[1 + i])), final_qubit
        )
    return readouts


def _loss_and_gradient(model: QcnnModel, x, y: int, eps: float,
                       noise: NoiseConfig | None, noise_rng: np.random.Generator | None):
    """Per-sample loss, d loss / d theta, and the shift-evaluation count."""
    circuit, positions = build_qcnn_tracked(model.arch, model.theta, x)
    plan = _shift_plan(positions)
    if noise is None:
        readouts = _shift_readouts_exact(circuit, plan, model.arch.final_qubit)
    else:
        readouts = _shift_readouts_noisy(
            circuit, plan, model.arch.final_qubit, noise.p_flip, noise.trajectories, noise_rng
        )
    y_pred = float(readouts[0])
    df = np.zeros(model.arch.n_params)
    for i in range(0, len(plan), 2):
        k = plan[i][0]
        df[k] += (readouts[1 + i] - readouts[2 + i]) / 2.0
    loss = bce_loss(y_pred, y, eps)
    grad = bce_loss_grad(y_pred, y, eps) * df
    return loss, grad, len(plan)


def gradient(model: QcnnModel, x, y: int, eps: float = 1e-7,
             noise: NoiseConfig | None = None) -> np.ndarray:
    """d bce_loss(forward(x), y) / d theta via summed per-occurrence shifts."""
    noise_rng = np.random.default_rng(noise.seed) if noise is not None else None
    _, grad, _ = _loss_and_gradient(model, x, y, eps, noise, noise_rng)
    return grad


def _epoch_losses_grads_exact(model: QcnnModel, features: np.ndarray, labels: np.ndarray, eps: float):
    """Exact-mode losses and loss gradients for a whole sample set.

    The gate sequence is sample-independent, so every sample's unshifted and
    shifted evaluations stack into one batched pass: row s*(1+P) is sample s's
    forward and the following P rows apply its parameter shifts.
    """
    arch = model.arch
    circuit, positions = build_qcnn_tracked(arch, model.theta, features[0])
    plan = _shift_plan(positions)
    per_sample = 1 + len(plan)
    n_samples = len(features)
    rows = n_samples * per_sample
    delta_rows: dict[int, list[tuple[int, float]]] = {}
    for i, (_, pos, delta) in enumerate(plan):
        delta_rows.setdefault(pos, []).append((1 + i, delta))
    amps = _batch_zero(rows, arch.n_qubits)
    for pos, gate in enumerate(circuit.gates):
        if not isinstance(gate, Ry):
            amps = _batch_apply(amps, gate, arch.n_qubits)
        elif pos < arch.n_qubits:  # embedding RY: angle varies per sample
            amps = _batch_apply_ry(amps, gate.target, np.repeat(features[:, pos], per_sample))
        elif pos in delta_rows:
            angles = np.full(rows, gate.angle)
            for offset, delta in delta_rows[pos]:
                angles[offset::per_sample] += delta
            amps = _batch_apply_ry(amps, gate.target, angles)
        else:
            amps = _batch_apply(amps, gate, arch.n_qubits)
    probs = _batch_prob_qubit_one(amps, arch.final_qubit).reshape(n_samples, per_sample)

    y_pred = probs[:, 0]
    df = np.zeros((n_samples, arch.n_params))
    for i in range(0, len(plan), 2):
        df[:, plan[i][0]] += (probs[:, 1 + i] - probs[:, 2 + i]) / 2.0
    clamped = np.clip(y_pred, eps, 1.0 - eps)
    losses = -(labels * np.log(clamped) + (1 - labels) * np.log(1.0 - clamped))
    dl = np.where(
        (y_pred <= eps) | (y_pred >= 1.0 - eps),
        0.0,
        (y_pred - labels) / np.where((y_pred > 0) & (y_pred < 1), y_pred * (1.0 - y_pred), 1.0),
    )
    return losses, dl[:, None] * df, n_samples * len(plan)


@dataclass(frozen=True)
class TrainResult:
    model: QcnnModel
    loss_history: list[float]
    n_executions: int  # one forward per sample per epoch
    n_shift_executions: int  # parameter-shift evaluations, reported separately


def train(model: QcnnModel, features, labels, config: TrainConfig,
          noise: NoiseConfig | None = None) -> TrainResult:
    """Mean-gradient descent over epochs; balanced batches when configured.

    config.seed drives batch sampling; noise.seed (when given) seeds the
    trajectory randomness of every noisy circuit evaluation.
    """
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if len(features) == 0:
        raise ValueError("empty training set")
    if len(features) != len(labels):
        raise ValueError("features and labels differ in length")

    if config.batch_size is not None:
        from .data import make_batch_indices

        epoch_indices = make_batch_indices(labels, config.batch_size, config.epochs, config.seed)
    else:
        epoch_indices = [np.arange(len(features))] * config.epochs

    noise_rng = np.random.default_rng(noise.seed) if noise is not None else None
    theta = model.theta.copy()
    history: list[float] = []
    n_exec = 0
    n_shift = 0
    moment1 = np.zeros_like(theta)
    moment2 = np.zeros_like(theta)
    for epoch in range(config.epochs):
        idx = epoch_indices[epoch]
        current = QcnnModel(model.arch, theta)
        if noise is None:
            losses, grads, shifts = _epoch_losses_grads_exact(
                current, features[idx], labels[idx], config.loss_clamp
            )
            mean_grad = grads.mean(axis=0)
            n_exec += len(idx)
            n_shift += shifts
        else:
            losses = np.empty(len(idx))
            grad_sum = np.zeros(model.arch.n_params)
            for row, i in enumerate(idx):
                loss, grad, shifts = _loss_and_gradient(
                    current, features[i], int(labels[i]), config.loss_clamp, noise, noise_rng
                )
                losses[row] = loss
                grad_sum += grad
                n_exec += 1
                n_shift += shifts
            mean_grad = grad_sum / len(idx)
        if config.optimizer == "sgd":
            theta = theta - config.learning_rate * mean_grad
        else:
            moment1 = 0.9 * moment1 + 0.1 * mean_grad
            moment2 = 0.999 * moment2 + 0.001 * mean_grad**2
            corr1 = moment1 / (1.0 - 0.9 ** (epoch + 1))
            corr2 = moment2 / (1.0 - 0.999 ** (epoch + 1))
            theta = theta - config.learning_rate * corr1 / (np.sqrt(corr2) + 1e-8)
        history.append(float(losses.mean()))
    return TrainResult(QcnnModel(model.arch, theta), history, n_exec, n_shift)


def save_model_json(path, result: TrainResult, config: TrainConfig) -> None:
    """Trained theta, per-epoch losses, and a config echo."""
    doc = {
        "theta": [float(v) for v in result.model.theta],
        "loss_history": result.loss_history,
        "n_executions": result.n_executions,
        "n_shift_executions": result.n_shift_executions,
        "config": {
            "learning_rate": config.learning_rate,
            "epochs": config.epochs,
            "batch_size": config.batch_size,
            "seed": config.seed,
            "loss_clamp": config.loss_clamp,
        },
        "arch": {
            "n_qubits": result.model.arch.n_qubits,
            "strides": list(result.model.arch.strides),
            "pool_keep": result.model.arch.pool_keep,
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model_json(path) -> tuple[QcnnModel, list[float]]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    arch = QcnnArchitecture(
        n_qubits=doc["arch"]["n_qubits"],
        strides=tuple(doc["arch"]["strides"]),
        pool_keep=doc["arch"]["pool_keep"],
    )
    return QcnnModel(arch, np.array(doc["theta"])), list(doc["loss_history"])
