"""Test configuration and shared fixtures."""

import math
import os
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

from src.configuration import UnifiedConfig
from src.lattice import build_exhaustion
from src.observability import disable_logging
from src.operators import OperatorSpec

SCENARIO_DIR = Path(__file__).parent.parent / "scenarios"

# Three-node path with unit coefficients: the hand-checked oracle.
PATH3_LAMBDA0 = 2.0 - math.sqrt(2.0)
PATH3_GREEN = np.array(
    [
        [0.75, 0.5, 0.25],
        [0.5, 1.0, 0.5],
        [0.25, 0.5, 0.75],
    ]
)
PATH3_ETA_MAX = 1.0 / (3.0 - math.sqrt(2.0))


@pytest.fixture(autouse=True)
def quiet_logging():
    """Keep structured log output out of test captures."""
    with patch.dict(os.environ, {"CLAB_DISABLE_OBSERVABILITY": "true"}):
        disable_logging()
        yield


@pytest.fixture(scope="session")
def scenario_dir():
    return SCENARIO_DIR


@pytest.fixture
def config():
    return UnifiedConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def path3_exhaustion():
    return build_exhaustion(dimension=1, radii=[1], ambient_radius=1)


@pytest.fixture
def path3_spec():
    return OperatorSpec.from_descriptions()


@pytest.fixture
def drift_exhaustion():
    return build_exhaustion(dimension=1, radii=[3, 6, 9], ambient_radius=12)


@pytest.fixture
def drift_spec():
    return OperatorSpec.from_descriptions(b=0.3, b_tilde=0.0)


@pytest.fixture
def weighted_spec():
    """Nonsymmetric 2-D operator with a nontrivial weight, measure and potential."""
    return OperatorSpec.from_descriptions(b=0.2, b_tilde=-0.1, c=0.1, W="radial:-1")


@pytest.fixture
def weighted_exhaustion():
    return build_exhaustion(
        dimension=2, radii=[2, 3, 4], ambient_radius=6, measure_spec="checkerboard:1,2"
    )


@pytest.fixture
def write_scenario(tmp_path):
    """Write a TOML scenario into tmp_path and return its path."""

    def _write(text: str, name: str = "scenario.toml") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
