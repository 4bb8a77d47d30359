import numpy as np
import pytest

from fitguide import REDUCED_CONFIG, TrainConfig, generate_dataset, train


@pytest.fixture(scope="session")
def reduced_dataset() -> np.ndarray:
    return generate_dataset(REDUCED_CONFIG)


@pytest.fixture(scope="session")
def trained(reduced_dataset):
    """Reduced-grid model trained once per session with default settings."""
    return train(reduced_dataset, TrainConfig())


@pytest.fixture(scope="session")
def model(trained):
    return trained[0]


@pytest.fixture(scope="session")
def train_report(trained):
    return trained[1]
