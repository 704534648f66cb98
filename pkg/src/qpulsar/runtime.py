"""Circuit-execution counting and device-time extrapolation.

Each pipeline stage maps to an execution count: the kernel Gram matrix costs
n_train^2 runs, the prediction block n_train * n_test, QCNN training one run
per sample per epoch, and QCNN prediction one run per candidate. Multiplying
by a measured per-execution device time extrapolates a full-device run.
"""

from __future__ import annotations

from dataclasses import dataclass

# Measured per-circuit-execution device times (seconds) for the two pipelines.
T_CE_QSVM = 3.33
T_CE_QCNN = 142.00

SECONDS_PER_DAY = 86400.0


@dataclass(frozen=True)
class QsvmTrain:
    n_train: int

    def executions(self) -> int:
        return self.n_train**2


@dataclass(frozen=True)
class QsvmPredict:
    n_train: int
    n_test: int

    def executions(self) -> int:
        return self.n_train * self.n_test


@dataclass(frozen=True)
class QcnnTrain:
    epochs: int
    n_per_epoch: int

    def executions(self) -> int:
        return self.epochs * self.n_per_epoch


@dataclass(frozen=True)
class QcnnPredict:
    n_test: int

    def executions(self) -> int:
        return self.n_test


ExecutionKind = QsvmTrain | QsvmPredict | QcnnTrain | QcnnPredict


def n_ce(kind: ExecutionKind) -> int:
    for field in ("n_train", "n_test", "epochs", "n_per_epoch"):
        value = getattr(kind, field, None)
        if value is not None and value < 0:
            raise ValueError(f"{field} must be >= 0, got {value}")
    return kind.executions()


@dataclass(frozen=True)
class RuntimeEstimate:
    n_executions: int
    t_ce: float  # seconds per circuit execution
    total_seconds: float

    @property
    def total_days(self) -> float:
        return self.total_seconds / SECONDS_PER_DAY


def extrapolate_device_time(kind: ExecutionKind, t_ce: float) -> RuntimeEstimate:
    if t_ce <= 0:
        raise ValueError(f"t_ce must be > 0, got {t_ce}")
    count = n_ce(kind)
    return RuntimeEstimate(count, t_ce, count * t_ce)
