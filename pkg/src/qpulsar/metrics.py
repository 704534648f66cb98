"""Confusion matrices, the eight evaluation metrics, and run aggregation.

A metric whose denominator is zero is reported as None and excluded
per-metric from aggregates (with the surviving count noted) rather than
being zero-filled, so degenerate prediction patterns stay visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

METRIC_NAMES = (
    "accuracy",
    "recall",
    "specificity",
    "precision",
    "npv",
    "balanced_accuracy",
    "g_mean",
    "informedness",
)


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion(predictions, labels) -> ConfusionMatrix:
    """Counts with class 1 as the positive class."""
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    if predictions.shape != labels.shape or predictions.ndim != 1 or len(predictions) == 0:
        raise ValueError(f"predictions and labels must be equal-length non-empty vectors, got shapes {predictions.shape} and {labels.shape}")
    tp = int(np.sum((predictions == 1) & (labels == 1)))
    tn = int(np.sum((predictions == 0) & (labels == 0)))
    fp = int(np.sum((predictions == 1) & (labels == 0)))
    fn = int(np.sum((predictions == 0) & (labels == 1)))
    return ConfusionMatrix(tp, tn, fp, fn)


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float | None
    recall: float | None
    specificity: float | None
    precision: float | None
    npv: float | None
    balanced_accuracy: float | None
    g_mean: float | None
    informedness: float | None

    def as_dict(self) -> dict[str, float | None]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _ratio(num: int, den: int) -> float | None:
    return num / den if den > 0 else None


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """The eight metrics; composites needing an undefined input are undefined."""
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    recall = _ratio(cm.tp, cm.tp + cm.fn)
    specificity = _ratio(cm.tn, cm.tn + cm.fp)
    both = recall is not None and specificity is not None
    return MetricsReport(
        accuracy=(cm.tp + cm.tn) / cm.total,
        recall=recall,
        specificity=specificity,
        precision=_ratio(cm.tp, cm.tp + cm.fp),
        npv=_ratio(cm.tn, cm.tn + cm.fn),
        balanced_accuracy=(recall + specificity) / 2 if both else None,
        g_mean=math.sqrt(recall * specificity) if both else None,
        informedness=recall + specificity - 1 if both else None,
    )


@dataclass(frozen=True)
class MetricStats:
    mean: float | None
    spread: float  # standard error or standard deviation, per `spread` mode
    n: int  # reports where the metric was defined


def aggregate_runs(reports, spread: str = "se") -> dict[str, MetricStats]:
    """Per-metric mean and spread over runs.

    spread="se" gives the standard error (sample stddev / sqrt(r)) used for
    experiment tables; spread="std" gives the plain standard deviation used
    for the noise sweep. A single defined value aggregates with spread 0.
    """
    if spread not in ("se", "std"):
        raise ValueError(f"spread must be 'se' or 'std', got {spread!r}")
    reports = list(reports)
    if not reports:
        raise ValueError("no reports to aggregate")
    out = {}
    for name in METRIC_NAMES:
        values = [getattr(r, name) for r in reports if getattr(r, name) is not None]
        if not values:
            out[name] = MetricStats(None, 0.0, 0)
            continue
        arr = np.array(values)
        if len(arr) < 2:
            out[name] = MetricStats(float(arr[0]), 0.0, 1)
            continue
        sd = float(arr.std(ddof=1))
        out[name] = MetricStats(float(arr.mean()), sd if spread == "std" else sd / math.sqrt(len(arr)), len(arr))
    return out
