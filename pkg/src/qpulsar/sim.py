"""Exact dense statevector simulation of few-qubit circuits.

Gates are restricted to what the two pipelines need: Y-rotations, CNOT, and
Pauli-X. Basis-index bit order is little-endian: qubit i is bit i of the
basis index, so |q7 ... q1 q0> maps to index sum(q_i << i).

Noise is an optional per-gate bit-flip channel estimated by Monte-Carlo
trajectories: after every gate, each qubit that gate touched is independently
hit with a Pauli-X with probability p_flip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_QUBITS = 12
NORM_TOL = 1e-9


class InvalidGateError(ValueError):
    """A gate references qubits outside the circuit, or control == target."""


@dataclass(frozen=True)
class Ry:
    """Y-rotation: [[cos(a/2), -sin(a/2)], [sin(a/2), cos(a/2)]] on `target`."""

    target: int
    angle: float


@dataclass(frozen=True)
class Cnot:
    """Flips `target` when `control` is |1>."""

    control: int
    target: int


@dataclass(frozen=True)
class PauliX:
    target: int


Gate = Ry | Cnot | PauliX


def _gate_qubits(gate: Gate) -> tuple[int, ...]:
    if isinstance(gate, Cnot):
        return (gate.control, gate.target)
    return (gate.target,)


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over a fixed qubit register."""

    n_qubits: int
    gates: tuple[Gate, ...]

    def __init__(self, n_qubits: int, gates=()):
        if not 1 <= n_qubits <= MAX_QUBITS:
            raise InvalidGateError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")
        gates = tuple(gates)
        for gate in gates:
            _validate_gate(gate, n_qubits)
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "gates", gates)


def _validate_gate(gate: Gate, n_qubits: int) -> None:
    for q in _gate_qubits(gate):
        if not 0 <= q < n_qubits:
            raise InvalidGateError(f"qubit {q} out of range for {n_qubits}-qubit circuit: {gate!r}")
    if isinstance(gate, Cnot) and gate.control == gate.target:
        raise InvalidGateError(f"CNOT control equals target: {gate!r}")


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes over the 2^n computational basis, little-endian."""

    n_qubits: int
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class NoiseConfig:
    """Bit-flip probability, trajectory count, and the RNG seed for one estimate."""

    p_flip: float
    trajectories: int = 1024
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_flip <= 1.0:
            raise ValueError(f"p_flip must be in [0, 1], got {self.p_flip}")
        if self.trajectories < 1:
            raise ValueError(f"trajectories must be >= 1, got {self.trajectories}")


def zero_state(n_qubits: int) -> StateVector:
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


# --- batched amplitude kernels -------------------------------------------
#
# All simulation runs through these (rows, 2^n) kernels; a single state is a
# one-row batch. Noisy trajectory estimates, the QCNN parameter-shift
# evaluator, and Gram-matrix assembly batch many rows through the same code
# path. RY, CNOT, and X are all real, so internal batches run in float64 and
# only the public StateVector carries complex amplitudes.


def _batch_zero(rows: int, n_qubits: int, dtype=np.float64) -> np.ndarray:
    amps = np.zeros((rows, 1 << n_qubits), dtype=dtype)
    amps[:, 0] = 1.0
    return amps


def _batch_apply_ry(amps: np.ndarray, target: int, angle) -> np.ndarray:
    """Apply RY on `target`; `angle` is a scalar or a per-row array."""
    rows = amps.shape[0]
    half = np.multiply(angle, 0.5)
    if np.ndim(half) == 0:
        c, s = math.cos(half), math.sin(half)
    else:
        c = np.cos(half).reshape(rows, 1, 1)
        s = np.sin(half).reshape(rows, 1, 1)
    shaped = amps.reshape(rows, -1, 2 << target)
    a0 = shaped[:, :, : 1 << target]
    a1 = shaped[:, :, 1 << target :]
    out = np.empty_like(shaped)
    np.multiply(a0, c, out=out[:, :, : 1 << target])
    out[:, :, : 1 << target] -= s * a1
    np.multiply(a1, c, out=out[:, :, 1 << target :])
    out[:, :, 1 << target :] += s * a0
    return out.reshape(rows, -1)


@lru_cache(maxsize=None)
def _cnot_perm(n_qubits: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(1 << n_qubits)
    control_on = (idx >> control) & 1 == 1
    out = np.where(control_on, idx ^ (1 << target), idx)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _x_perm(n_qubits: int, target: int) -> np.ndarray:
    out = np.arange(1 << n_qubits) ^ (1 << target)
    out.setflags(write=False)
    return out


def _batch_apply(amps: np.ndarray, gate: Gate, n_qubits: int) -> np.ndarray:
    if isinstance(gate, Ry):
        return _batch_apply_ry(amps, gate.target, gate.angle)
    if isinstance(gate, Cnot):
        return amps[:, _cnot_perm(n_qubits, gate.control, gate.target)]
    return amps[:, _x_perm(n_qubits, gate.target)]


def _batch_prob_qubit_one(amps: np.ndarray, target: int) -> np.ndarray:
    rows = amps.shape[0]
    shaped = amps.reshape(rows, -1, 2, 1 << target)
    return np.sum(np.abs(shaped[:, :, 1, :]) ** 2, axis=(1, 2))


# --- public operations -----------------------------------------------------


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Return the state after one unitary; the input state is not mutated."""
    _validate_gate(gate, state.n_qubits)
    amps = _batch_apply(state.amplitudes[np.newaxis, :], gate, state.n_qubits)[0]
    return StateVector(state.n_qubits, amps)


def run(circuit: Circuit) -> StateVector:
    """Apply all gates in order to |00...0>."""
    amps = _batch_zero(1, circuit.n_qubits)
    for gate in circuit.gates:
        amps = _batch_apply(amps, gate, circuit.n_qubits)
    return StateVector(circuit.n_qubits, amps[0].astype(complex))


def prob_all_zero(state: StateVector) -> float:
    return float(np.abs(state.amplitudes[0]) ** 2)


def prob_qubit_one(state: StateVector, qubit: int) -> float:
    if not 0 <= qubit < state.n_qubits:
        raise InvalidGateError(f"qubit {qubit} out of range for {state.n_qubits}-qubit state")
    return float(_batch_prob_qubit_one(state.amplitudes[np.newaxis, :], qubit)[0])


def run_noisy(circuit: Circuit, noise: NoiseConfig, readout="all_zero") -> float:
    """Mean readout probability over bit-flip Monte-Carlo trajectories.

    `readout` is either the string "all_zero" or a qubit index. With
    p_flip = 0 every trajectory is the noiseless run, so one trajectory is
    simulated and the result equals run() + readout exactly.
    """
    if readout != "all_zero" and not 0 <= int(readout) < circuit.n_qubits:
        raise InvalidGateError(f"readout qubit {readout} out of range")
    rng = np.random.default_rng(noise.seed)
    rows = 1 if noise.p_flip == 0.0 else noise.trajectories
    amps = _batch_zero(rows, circuit.n_qubits)
    for gate in circuit.gates:
        amps = _batch_apply(amps, gate, circuit.n_qubits)
        for q in _gate_qubits(gate):
            flips = rng.random(rows) < noise.p_flip
            if flips.any():
                amps[flips] = amps[flips][:, _x_perm(circuit.n_qubits, q)]
    if readout == "all_zero":
        values = np.abs(amps[:, 0]) ** 2
    else:
        values = _batch_prob_qubit_one(amps, int(readout))
    return float(values.mean())


def gate_count(circuit: Circuit) -> int:
    return len(circuit.gates)


def circuit_depth(circuit: Circuit) -> int:
    """Greedy-layer depth: gates sharing a qubit cannot share a layer."""
    busy_until = [0] * circuit.n_qubits
    depth = 0
    for gate in circuit.gates:
        qubits = _gate_qubits(gate)
        layer = 1 + max(busy_until[q] for q in qubits)
        for q in qubits:
            busy_until[q] = layer
        depth = max(depth, layer)
    return depth
