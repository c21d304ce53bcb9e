import logging

import numpy as np
import pytest

from src.core.config import AppConfig, EstimationBudget
from src.spectral.pspace import OperatorMatrix, WeightedPointSpace


@pytest.fixture
def budget() -> EstimationBudget:
    return EstimationBudget(starts=8, iterations=100, probes=8, seed=7)


@pytest.fixture
def app_config(tmp_path) -> AppConfig:
    return AppConfig(output_dir=str(tmp_path / "out"), seed=3, p_values=[2.0],
                     budget=EstimationBudget(starts=4, iterations=60, probes=4))


@pytest.fixture
def logger() -> logging.Logger:
    return logging.getLogger("experiments.test")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


def random_operator(rng: np.random.Generator, size: int) -> OperatorMatrix:
    space = WeightedPointSpace.counting(size)
    entries = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return OperatorMatrix(domain=space, codomain=space, entries=entries)
