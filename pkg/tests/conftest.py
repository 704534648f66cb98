"""Shared fixtures: the dataset file (real when provided, synthetic otherwise)."""

import os

import pytest

from qpulsar.data import load_htru2, normalize_to_angle, split_70_30
from synth import make_htru2_like

POOL_SEED = 1234


@pytest.fixture(scope="session")
def htru2_path(tmp_path_factory):
    """Path to the pulsar CSV: $HTRU2_CSV when set, else a generated stand-in."""
    real = os.environ.get("HTRU2_CSV")
    if real:
        if not os.path.exists(real):
            raise FileNotFoundError(f"HTRU2_CSV points at a missing file: {real}")
        return real
    path = tmp_path_factory.mktemp("data") / "htru2_like.csv"
    make_htru2_like(path)
    return str(path)


@pytest.fixture(scope="session")
def dataset(htru2_path):
    return load_htru2(htru2_path)


@pytest.fixture(scope="session")
def angle_dataset(dataset):
    return normalize_to_angle(dataset)


@pytest.fixture(scope="session")
def pools(angle_dataset):
    return split_70_30(angle_dataset, POOL_SEED)
