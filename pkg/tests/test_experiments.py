"""Experiment driver tests: determinism, execution accounting, sweeps, caching."""

import numpy as np
import pytest

from qpulsar.experiments import (
    ExperimentSettings,
    loglog_slope,
    noise_sweep,
    run_experiment,
    wall_benchmark,
)

FAST_QCNN = dict(epochs=3, batch_size=10)


def test_unknown_pipeline_rejected(pools):
    with pytest.raises(ValueError):
        run_experiment("svm", pools, 0)


def test_qsvm_run_shape_and_counts(pools):
    settings = ExperimentSettings(n_train=8, n_test=12)
    result = run_experiment("qsvm", pools, 3, settings)
    assert result.confusion.total == 12
    assert result.n_ce_train == 64
    assert result.n_ce_predict == 96
    assert result.loss_history is None


def test_qsvm_deterministic(pools):
    settings = ExperimentSettings(n_train=8, n_test=12)
    a = run_experiment("qsvm", pools, 3, settings)
    b = run_experiment("qsvm", pools, 3, settings)
    assert (a.confusion, a.report) == (b.confusion, b.report)


def test_qcnn_batched_run(pools):
    settings = ExperimentSettings(n_train=12, n_test=10, **FAST_QCNN)
    result = run_experiment("qcnn-batched", pools, 1, settings)
    assert result.n_ce_train == 3 * 10
    assert result.n_ce_predict == 10
    assert len(result.loss_history) == 3
    assert result.n_shift_executions == 3 * 10 * 56
    again = run_experiment("qcnn-batched", pools, 1, settings)
    assert np.array_equal(result.loss_history, again.loss_history)
    assert result.confusion == again.confusion


def test_qcnn_full_counts_use_training_size(pools):
    settings = ExperimentSettings(n_train=6, n_test=4, epochs=2)
    result = run_experiment("qcnn", pools, 1, settings)
    assert result.n_ce_train == 2 * 6


def test_csvm_pipeline_counts_no_circuits(pools):
    settings = ExperimentSettings(n_train=16, n_test=20)
    result = run_experiment("csvm", pools, 2, settings)
    assert result.n_ce_train == 0
    assert result.n_ce_predict == 0
    assert result.confusion.total == 20


def test_noisy_qsvm_deterministic(pools):
    settings = ExperimentSettings(n_train=6, n_test=6, noise_p=0.05, trajectories=16)
    a = run_experiment("qsvm", pools, 5, settings)
    b = run_experiment("qsvm", pools, 5, settings)
    assert a.confusion == b.confusion


def test_kernel_cache_round_trip(pools, tmp_path):
    settings = ExperimentSettings(n_train=8, n_test=10, kernel_cache=str(tmp_path))
    first = run_experiment("qsvm", pools, 7, settings)
    cached = list(tmp_path.glob("*.csv"))
    assert len(cached) == 2  # gram + cross blocks
    second = run_experiment("qsvm", pools, 7, settings)
    assert first.confusion == second.confusion


def test_noise_sweep_rows(pools):
    rows = noise_sweep(
        pools,
        [0.0, 0.5],
        n_train=6,
        n_test=10,
        runs=2,
        pipelines=("qsvm",),
        trajectories=8,
        qcnn_epochs=2,
    )
    assert len(rows) == 2
    assert {row["p"] for row in rows} == {0.0, 0.5}
    for row in rows:
        assert 0.0 <= row["balanced_accuracy_mean"] <= 1.0
        assert row["runs"] == 2
    with pytest.raises(ValueError):
        noise_sweep(pools, [1.5], runs=1, pipelines=("qsvm",))


def test_noise_sweep_table_layout(pools):
    rows = noise_sweep(
        pools,
        [0.0, 0.01],
        n_train=4,
        n_test=6,
        runs=1,
        pipelines=("qsvm", "qcnn"),
        trajectories=4,
        qcnn_epochs=1,
    )
    assert len(rows) == 4  # 2 p-values x 2 pipelines


def test_wall_benchmark_rows(pools):
    settings = ExperimentSettings(epochs=2, batch_size=None)
    rows = wall_benchmark(pools, [4, 8], "qsvm", n_test=6, repetitions=1, settings=settings)
    assert [row["n_train"] for row in rows] == [4, 8]
    assert all(row["train_seconds"] >= 0 for row in rows)
    assert rows[0]["n_ce_train"] == 16 and rows[1]["n_ce_train"] == 64
    with pytest.raises(ValueError):
        wall_benchmark(pools, [], "qsvm")
    with pytest.raises(ValueError):
        wall_benchmark(pools, [8, 4], "qsvm")


def test_loglog_slope_recovers_exponents():
    sizes = [10, 20, 40, 80]
    assert loglog_slope(sizes, [n**2 for n in sizes]) == pytest.approx(2.0, abs=1e-9)
    assert loglog_slope(sizes, [3.0 * n for n in sizes]) == pytest.approx(1.0, abs=1e-9)
