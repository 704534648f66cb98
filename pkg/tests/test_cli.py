"""CLI tests: subcommands, report files, exit codes, stable output."""

import json
import os

import pytest

from qpulsar.cli import main


def test_validate_data_counts(htru2_path, capsys):
    assert main(["validate-data", "--data", htru2_path]) == 0
    out = capsys.readouterr().out
    assert "rows: 16259" in out
    assert "positive: 1639" in out
    assert "feature 7:" in out


def test_validate_data_truncated_row(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("1,2,3,4,5,6,7,8,0\n1,2,3\n")
    assert main(["validate-data", "--data", str(path)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_validate_data_header_file(tmp_path, capsys):
    path = tmp_path / "header.csv"
    path.write_text("f1,f2,f3,f4,f5,f6,f7,f8,label\n")
    assert main(["validate-data", "--data", str(path)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_run_qsvm_writes_reports(htru2_path, tmp_path, capsys):
    out = tmp_path / "reports"
    code = main([
        "run", "qsvm",
        "--data", htru2_path,
        "--out", str(out),
        "--seeds", "0,1",
        "--n-train", "8",
        "--n-test", "10",
        "--stable-output",
    ])
    assert code == 0
    run_dir = out / "run-qsvm"
    report = json.loads((run_dir / "report.json").read_text())
    assert report["config"]["command"] == "run"
    assert "code_version" in report["config"]
    assert report["seeds"] == [0, 1]
    assert len(report["per_seed"]) == 2
    assert set(report["aggregate"]) >= {"accuracy", "recall", "specificity"}
    assert (run_dir / "per_seed.csv").exists()
    assert (run_dir / "aggregate.csv").exists()
    assert "qsvm accuracy" in capsys.readouterr().out


def test_run_degenerate_sizes_complete(htru2_path, tmp_path):
    code = main([
        "run", "qsvm",
        "--data", htru2_path,
        "--out", str(tmp_path),
        "--seeds", "0",
        "--n-train", "2",
        "--n-test", "2",
        "--stable-output",
    ])
    assert code == 0
    assert (tmp_path / "run-qsvm" / "report.json").exists()


def test_stable_output_reruns_byte_identical(htru2_path, tmp_path):
    argv = [
        "run", "qcnn-batched",
        "--data", htru2_path,
        "--out", str(tmp_path),
        "--seeds", "0,1",
        "--n-train", "8",
        "--n-test", "6",
        "--epochs", "2",
        "--stable-output",
    ]
    assert main(argv) == 0
    first = (tmp_path / "run-qcnn-batched" / "report.json").read_bytes()
    assert main(argv) == 0
    second = (tmp_path / "run-qcnn-batched" / "report.json").read_bytes()
    assert first == second


def test_run_insufficient_data_fails(htru2_path, tmp_path):
    code = main([
        "run", "qsvm",
        "--data", htru2_path,
        "--out", str(tmp_path),
        "--seeds", "0",
        "--n-train", "999999",
        "--stable-output",
    ])
    assert code == 1


def test_noise_sweep_single_point(htru2_path, tmp_path, capsys):
    code = main([
        "noise-sweep",
        "--data", htru2_path,
        "--out", str(tmp_path),
        "--seeds", "0,1",
        "--noise-levels", "0.0",
        "--pipelines", "qsvm",
        "--n-train", "4",
        "--n-test", "6",
        "--trajectories", "4",
        "--stable-output",
    ])
    assert code == 0
    lines = (tmp_path / "noise-sweep" / "noise_sweep.csv").read_text().strip().split("\n")
    assert len(lines) == 2  # header + 1 row
    assert "balanced accuracy" in capsys.readouterr().out


def test_noise_sweep_rejects_bad_probability(htru2_path, tmp_path, capsys):
    code = main([
        "noise-sweep",
        "--data", htru2_path,
        "--out", str(tmp_path),
        "--noise-levels", "1.5",
        "--pipelines", "qsvm",
        "--stable-output",
    ])
    assert code == 2
    assert "outside [0, 1]" in capsys.readouterr().err


def test_benchmark_rows_and_crossover(htru2_path, tmp_path, capsys):
    code = main([
        "benchmark",
        "--data", htru2_path,
        "--out", str(tmp_path),
        "--seeds", "0",
        "--sizes", "4,8",
        "--pipelines", "qsvm,qcnn-batched",
        "--epochs", "2",
        "--batch", "balanced10",
        "--repetitions", "1",
        "--stable-output",
    ])
    assert code == 0
    doc = json.loads((tmp_path / "benchmark" / "benchmark.json").read_text())
    assert len(doc["rows"]) == 4
    assert all("device_train_seconds" in row for row in doc["rows"])
    assert "crossover_n_train" in doc
    out = capsys.readouterr().out
    assert "log-log train-time slope" in out


def test_benchmark_empty_sizes_usage_error(htru2_path, tmp_path):
    with pytest.raises(SystemExit) as err:
        main([
            "benchmark",
            "--data", htru2_path,
            "--out", str(tmp_path),
            "--sizes", "",
        ])
    assert err.value.code == 2


def test_unknown_pipeline_usage_error(htru2_path, tmp_path):
    with pytest.raises(SystemExit) as err:
        main(["run", "svm", "--data", htru2_path, "--out", str(tmp_path)])
    assert err.value.code == 2
