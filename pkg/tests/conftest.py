"""Shared fixtures"""
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from codes.dist import DistKind, from_coefficients, from_weights, point_mass, robust_soliton  # noqa: E402
from config.constants import EEP_RELAY_GAMMA, FOUR_SOURCE_ALPHA, FOUR_SOURCE_Q  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def rsd():
    return robust_soliton(100, 0.05, 0.5)


@pytest.fixture
def eep_gamma():
    return from_weights(EEP_RELAY_GAMMA, kind=DistKind.RELAY)


@pytest.fixture
def identity():
    """Omega(x) = x: every check has degree one"""
    return point_mass(1)


@pytest.fixture
def four_sources():
    return FOUR_SOURCE_Q, FOUR_SOURCE_ALPHA


@pytest.fixture
def single_q():
    return from_coefficients([1.0], kind=DistKind.SELECTION)


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("DLT_WORKERS", "DLT_SEED", "DLT_OUTPUT_DIR"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def write_file(tmp_path):
    """Write text to tmp_path/name and return the path"""
    def write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
