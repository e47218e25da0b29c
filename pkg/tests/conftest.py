"""Shared fixtures for the toolkit test suite."""

import numpy as np
import pytest

from app.schemas import DensityMatrix, Ensemble, OptimizerSettings
from app.utils import linalg, sampling
from app.utils.logger import configure_logging

PLUS = np.array([1.0, 1.0]) / np.sqrt(2.0)
MINUS = np.array([1.0, -1.0]) / np.sqrt(2.0)


@pytest.fixture(scope="session", autouse=True)
def quiet_logging():
    configure_logging("WARNING", json_logs=False)


@pytest.fixture
def paulis():
    return linalg.PAULIS


@pytest.fixture
def rng():
    return sampling.rng_for(1234)


@pytest.fixture
def mm2():
    """{(.5, |0>), (.5, |1>)}"""
    return Ensemble(probs=(0.5, 0.5), states=[[1.0, 0.0], [0.0, 1.0]])


@pytest.fixture
def plus_minus():
    """{(.5, |+>), (.5, |->)}, same density matrix as mm2."""
    return Ensemble(probs=(0.5, 0.5), states=[PLUS, MINUS])


@pytest.fixture
def mixed2():
    return DensityMatrix(mat=np.eye(2) / 2.0)


@pytest.fixture
def pure0():
    return DensityMatrix(mat=[[1.0, 0.0], [0.0, 0.0]])


@pytest.fixture
def small_budget():
    """Reduced c(S) budget for qudit searches."""
    return OptimizerSettings(random_starts=256, refine_starts=4, coordinate_iterations=120, seed=0)
