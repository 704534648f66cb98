"""Circuit constructors for the two pipelines.

The kernel circuit angle-embeds one feature vector and un-embeds a second
one, so running it on |00...0> leaves the squared overlap of the two encoded
states in the all-zero amplitude. The QCNN circuit alternates convolution
layers (shared-parameter RY pairs joined by CNOT) with pooling layers that
halve the active qubit set until one readout qubit remains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sim import Circuit, Cnot, Gate, Ry


class ArchitectureError(ValueError):
    """The convolution/pooling layout cannot be built as requested."""


def qsvm_circuit(x, x_prime) -> Circuit:
    """Embed x with RY(x_i), then apply the adjoint embedding of x_prime."""
    x = np.asarray(x, dtype=float)
    x_prime = np.asarray(x_prime, dtype=float)
    if x.shape != x_prime.shape or x.ndim != 1:
        raise ValueError(f"feature vectors must have equal 1-d shapes, got {x.shape} and {x_prime.shape}")
    n = len(x)
    gates: list[Gate] = [Ry(i, float(x[i])) for i in range(n)]
    gates += [Ry(i, -float(x_prime[i])) for i in range(n)]
    return Circuit(n, gates)


def conv_pairs(active_qubits, stride: int) -> list[tuple[int, int]]:
    """Ring pairing of the active qubits: (a_j, a_(j+stride mod m)) for all j.

    The stride is taken mod the active count; a stride that is 0 mod m would
    pair every qubit with itself and is rejected.
    """
    active = list(active_qubits)
    m = len(active)
    if m < 2:
        raise ArchitectureError(f"need at least 2 active qubits, got {m}")
    if stride < 1:
        raise ArchitectureError(f"stride must be >= 1, got {stride}")
    offset = stride % m
    if offset == 0:
        raise ArchitectureError(f"stride {stride} is degenerate for {m} active qubits (self-pairs)")
    return [(active[j], active[(j + offset) % m]) for j in range(m)]


@dataclass(frozen=True)
class QcnnArchitecture:
    """Layer layout: n_layers alternating Conv(stride) + Pool blocks.

    Pooling pairs adjacent active qubits (a0,a1),(a2,a3),...; with
    pool_keep="first" the even-position qubit is retained and the odd-position
    qubit becomes the CNOT control and is discarded ("second" swaps the
    roles). n_qubits must equal 2^n_layers so the active set reduces to a
    single readout qubit.
    """

    n_qubits: int = 8
    strides: tuple[int, ...] = (5, 1, 1)
    pool_keep: str = "first"

    def __post_init__(self):
        if self.pool_keep not in ("first", "second"):
            raise ArchitectureError(f"pool_keep must be 'first' or 'second', got {self.pool_keep!r}")
        if self.n_qubits != 2 ** self.n_layers:
            raise ArchitectureError(
                f"active set not reducible to 1: {self.n_qubits} qubits with {self.n_layers} pool layers"
            )

    @property
    def n_layers(self) -> int:
        return len(self.strides)

    @property
    def n_params(self) -> int:
        return 2 * self.n_layers

    @property
    def final_qubit(self) -> int:
        return self.active_sets()[-1][0]

    def active_sets(self) -> list[list[int]]:
        """Active qubits before layer 0, after pool 0, after pool 1, ..."""
        sets = [list(range(self.n_qubits))]
        for _ in range(self.n_layers):
            sets.append(self._pool_split(sets[-1])[0])
        return sets

    def _pool_split(self, active: list[int]) -> tuple[list[int], list[tuple[int, int]]]:
        """Returns (retained qubits, list of (discarded, retained) pairs)."""
        keep_slot = 0 if self.pool_keep == "first" else 1
        retained = [active[i + keep_slot] for i in range(0, len(active), 2)]
        discarded = [active[i + 1 - keep_slot] for i in range(0, len(active), 2)]
        return retained, list(zip(discarded, retained))


def build_qcnn(arch: QcnnArchitecture, theta, x) -> Circuit:
    """Embedding, then per layer: shared-weight conv pairs and pooling CNOTs."""
    circuit, _ = build_qcnn_tracked(arch, theta, x)
    return circuit


def build_qcnn_tracked(arch: QcnnArchitecture, theta, x) -> tuple[Circuit, list[list[int]]]:
    """build_qcnn plus, per parameter index, the gate positions that use it.

    The position lists are what the parameter-shift rule iterates over: a
    shared parameter appears once per conv pair in its layer.
    """
    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float)
    if theta.shape != (arch.n_params,):
        raise ArchitectureError(f"theta must have length {arch.n_params}, got shape {theta.shape}")
    if x.shape != (arch.n_qubits,):
        raise ArchitectureError(f"feature vector must have length {arch.n_qubits}, got shape {x.shape}")

    gates: list[Gate] = [Ry(i, float(x[i])) for i in range(arch.n_qubits)]
    positions: list[list[int]] = [[] for _ in range(arch.n_params)]
    active = list(range(arch.n_qubits))
    for layer, stride in enumerate(arch.strides):
        for a, b in conv_pairs(active, stride):
            positions[2 * layer].append(len(gates))
            gates.append(Ry(a, float(theta[2 * layer])))
            positions[2 * layer + 1].append(len(gates))
            gates.append(Ry(b, float(theta[2 * layer + 1])))
            gates.append(Cnot(a, b))
        active, pool_edges = arch._pool_split(active)
        gates += [Cnot(discarded, retained) for discarded, retained in pool_edges]
    return Circuit(arch.n_qubits, gates), positions


@dataclass(frozen=True)
class Digraph:
    """Directed-graph view of a QCNN: nodes are qubits, edges are unitaries."""

    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int, str, int], ...]  # (from, to, tag, layer)

    def to_edge_list(self) -> str:
        """One 'from to tag layer' line per edge, for external plotting."""
        return "\n".join(f"{a} {b} {tag} {layer}" for a, b, tag, layer in self.edges) + "\n"


def to_digraph(arch: QcnnArchitecture) -> Digraph:
    """Conv edges follow the ring pairing; pool arrows point at the retained qubit."""
    edges = []
    active = list(range(arch.n_qubits))
    for layer, stride in enumerate(arch.strides):
        for a, b in conv_pairs(active, stride):
            edges.append((a, b, "conv", layer))
        active, pool_edges = arch._pool_split(active)
        for discarded, retained in pool_edges:
            edges.append((discarded, retained, "pool", layer))
    return Digraph(tuple(range(arch.n_qubits)), tuple(edges))
