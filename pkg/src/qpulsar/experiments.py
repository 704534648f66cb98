"""Seeded end-to-end experiment drivers shared by the CLI and the tests.

One experiment run is fully determined by (pools, sizes, seed, settings):
the seed is split into independent child seeds for train sampling, test
sampling, model initialization, and trajectory noise, so reruns are
bit-identical and pipelines see the same data draws.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

import numpy as np

from .circuits import QcnnArchitecture
from .data import Dataset, SplitPools, sample_balanced, sample_test
from .kernel import cross_kernel, gram_matrix, load_kernel_csv, rbf_cross, rbf_gram, save_kernel_csv
from .metrics import ConfusionMatrix, MetricsReport, confusion, metrics
from .qcnn import QcnnModel, TrainConfig, forward, init_model_searched, train
from .runtime import QcnnPredict, QcnnTrain, QsvmPredict, QsvmTrain, n_ce
from .sim import NoiseConfig
from .svm import svm_fit, svm_predict_many

PIPELINES = ("qsvm", "qcnn", "qcnn-batched", "csvm")
DEFAULT_RBF_GAMMA = 1.0 / 8.0  # 1 / n_features


@dataclass(frozen=True)
class ExperimentSettings:
    n_train: int = 200
    n_test: int = 400
    epochs: int = 150
    learning_rate: float = 0.01
    batch_size: int | None = None  # applies to the qcnn-batched pipeline
    C: float = 1.0
    svm_tol: float = 1e-3
    rbf_gamma: float = DEFAULT_RBF_GAMMA
    noise_p: float = 0.0
    trajectories: int = 64
    init_candidates: int = 512
    arch: QcnnArchitecture = field(default_factory=QcnnArchitecture)
    kernel_cache: str | None = None


@dataclass(frozen=True)
class ExperimentResult:
    pipeline: str
    seed: int
    confusion: ConfusionMatrix
    report: MetricsReport
    n_ce_train: int
    n_ce_predict: int
    train_seconds: float
    predict_seconds: float
    loss_history: list[float] | None = None
    n_shift_executions: int = 0


def _child_seeds(seed: int, count: int = 4) -> list[int]:
    return [int(s) for s in np.random.default_rng(seed).integers(0, 2**63, size=count)]


def _noise_or_none(settings: ExperimentSettings, seed: int) -> NoiseConfig | None:
    if settings.noise_p == 0.0:
        return None
    return NoiseConfig(settings.noise_p, settings.trajectories, seed)


def _cached_kernel(path: str | None, compute):
    if path is None:
        return compute().values
    if os.path.exists(path):
        return load_kernel_csv(path)
    result = compute()
    save_kernel_csv(path, result.values)
    return result.values


def run_experiment(pipeline: str, pools: SplitPools, seed: int,
                   settings: ExperimentSettings = ExperimentSettings()) -> ExperimentResult:
    """Sample train/test sets for `seed`, fit the pipeline, evaluate metrics."""
    if pipeline not in PIPELINES:
        raise ValueError(f"unknown pipeline {pipeline!r}; expected one of {PIPELINES}")
    train_seed, test_seed, model_seed, noise_seed = _child_seeds(seed)
    train_set = sample_balanced(pools.train_pool, settings.n_train, train_seed)
    test_set = sample_test(pools.test_pool, settings.n_test, test_seed)

    if pipeline in ("qsvm", "csvm"):
        return _run_svm_family(pipeline, train_set, test_set, seed, noise_seed, settings)
    return _run_qcnn_family(pipeline, train_set, test_set, seed, model_seed, noise_seed, settings)


def _run_svm_family(pipeline: str, train_set: Dataset, test_set: Dataset, seed: int,
                    noise_seed: int, settings: ExperimentSettings) -> ExperimentResult:
    quantum = pipeline == "qsvm"
    noise = _noise_or_none(settings, noise_seed) if quantum else None
    cache_dir = settings.kernel_cache if (quantum and settings.noise_p == 0.0) else None
    if cache_dir is not None:
        os.makedirs(cache_dir, exist_ok=True)
        tag = f"s{seed}_n{len(train_set)}x{len(test_set)}"
        gram_path = os.path.join(cache_dir, f"gram_{tag}.csv")
        cross_path = os.path.join(cache_dir, f"cross_{tag}.csv")
    else:
        gram_path = cross_path = None

    t0 = time.perf_counter()
    if quantum:
        gram = _cached_kernel(gram_path, lambda: gram_matrix(train_set.features, noise))
    else:
        gram = rbf_gram(train_set.features, settings.rbf_gamma)
    model = svm_fit(gram, train_set.labels, C=settings.C, tol=settings.svm_tol)
    train_seconds = time.perf_counter() - t0

    t0 = time.perf_counter()
    if quantum:
        rows = _cached_kernel(cross_path, lambda: cross_kernel(train_set.features, test_set.features, noise))
    else:
        rows = rbf_cross(train_set.features, test_set.features, settings.rbf_gamma)
    predictions = svm_predict_many(model, rows)
    predict_seconds = time.perf_counter() - t0

    cm = confusion(predictions, test_set.labels)
    return ExperimentResult(
        pipeline=pipeline,
        seed=seed,
        confusion=cm,
        report=metrics(cm),
        n_ce_train=n_ce(QsvmTrain(len(train_set))) if quantum else 0,
        n_ce_predict=n_ce(QsvmPredict(len(train_set), len(test_set))) if quantum else 0,
        train_seconds=train_seconds,
        predict_seconds=predict_seconds,
    )


def _run_qcnn_family(pipeline: str, train_set: Dataset, test_set: Dataset, seed: int,
                     model_seed: int, noise_seed: int, settings: ExperimentSettings) -> ExperimentResult:
    batch_size = settings.batch_size if settings.batch_size is not None else 10
    config = TrainConfig(
        learning_rate=settings.learning_rate,
        epochs=settings.epochs,
        batch_size=batch_size if pipeline == "qcnn-batched" else None,
        seed=model_seed,
    )
    noise = _noise_or_none(settings, noise_seed)
    model = init_model_searched(
        settings.arch, model_seed, train_set.features, train_set.labels,
        candidates=settings.init_candidates,
    )

    t0 = time.perf_counter()
    result = train(model, train_set.features, train_set.labels, config, noise=noise)
    train_seconds = time.perf_counter() - t0

    # one circuit execution per candidate, matching the runtime model
    t0 = time.perf_counter()
    predict_rng = np.random.default_rng(noise_seed + 1)
    predictions = np.empty(len(test_set), dtype=int)
    for i, x in enumerate(test_set.features):
        eval_noise = None
        if noise is not None:
            eval_noise = NoiseConfig(noise.p_flip, noise.trajectories, int(predict_rng.integers(0, 2**63)))
        predictions[i] = int(forward(result.model, x, eval_noise) >= 0.5)
    predict_seconds = time.perf_counter() - t0

    cm = confusion(predictions, test_set.labels)
    per_epoch = batch_size if pipeline == "qcnn-batched" else len(train_set)
    return ExperimentResult(
        pipeline=pipeline,
        seed=seed,
        confusion=cm,
        report=metrics(cm),
        n_ce_train=n_ce(QcnnTrain(settings.epochs, per_epoch)),
        n_ce_predict=n_ce(QcnnPredict(len(test_set))),
        train_seconds=train_seconds,
        predict_seconds=predict_seconds,
        loss_history=result.loss_history,
        n_shift_executions=result.n_shift_executions,
    )


def noise_sweep(pools: SplitPools, p_list, n_train: int = 50, n_test: int = 100, runs: int = 6,
                pipelines=("qsvm", "qcnn"), base_seed: int = 0, trajectories: int = 64,
                qcnn_epochs: int = 30, qcnn_batch: int = 10) -> list[dict]:
    """Balanced-accuracy mean +/- standard deviation per (pipeline, p).

    The QCNN trains in balanced-batch mode with a reduced epoch budget so the
    trajectory Monte-Carlo stays tractable; p = 0 runs collapse to the exact
    simulator and anchor the noiseless endpoint.
    """
    rows = []
    for pipeline in pipelines:
        driver = "qcnn-batched" if pipeline in ("qcnn", "qcnn-batched") else pipeline
        for p in p_list:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"noise probability must be in [0, 1], got {p}")
            settings = ExperimentSettings(
                n_train=n_train,
                n_test=n_test,
                noise_p=p,
                trajectories=trajectories,
                epochs=qcnn_epochs,
                batch_size=qcnn_batch,
            )
            values = []
            for r in range(runs):
                result = run_experiment(driver, pools, base_seed + r, settings)
                values.append(result.report.balanced_accuracy)
            defined = np.array([v for v in values if v is not None])
            rows.append(
                {
                    "pipeline": pipeline,
                    "p": p,
                    "balanced_accuracy_mean": float(defined.mean()),
                    "balanced_accuracy_std": float(defined.std(ddof=1)) if len(defined) > 1 else 0.0,
                    "runs": runs,
                }
            )
    return rows


def wall_benchmark(pools: SplitPools, sample_sizes, pipeline: str, n_test: int = 400,
                   repetitions: int = 3, base_seed: int = 0,
                   settings: ExperimentSettings = ExperimentSettings()) -> list[dict]:
    """Median measured train/predict wall seconds per training-set size."""
    sizes = list(sample_sizes)
    if not sizes:
        raise ValueError("empty size list")
    if sorted(sizes) != sizes:
        raise ValueError("sample sizes must be ascending")
    rows = []
    for size in sizes:
        train_times = []
        predict_times = []
        result = None
        for rep in range(repetitions):
            run_settings = ExperimentSettings(
                n_train=size,
                n_test=n_test,
                epochs=settings.epochs,
                learning_rate=settings.learning_rate,
                batch_size=settings.batch_size,
                C=settings.C,
                svm_tol=settings.svm_tol,
                rbf_gamma=settings.rbf_gamma,
                arch=settings.arch,
            )
            result = run_experiment(pipeline, pools, base_seed + rep, run_settings)
            train_times.append(result.train_seconds)
            predict_times.append(result.predict_seconds)
        rows.append(
            {
                "pipeline": pipeline,
                "n_train": size,
                "train_seconds": float(np.median(train_times)),
                "predict_seconds": float(np.median(predict_times)),
                "n_ce_train": result.n_ce_train,
                "n_ce_predict": result.n_ce_predict,
            }
        )
    return rows


def loglog_slope(sizes, seconds) -> float:
    """Least-squares slope of log(seconds) vs log(size)."""
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(seconds, dtype=float))
    return float(np.polyfit(x, y, 1)[0])
