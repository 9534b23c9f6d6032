"""
Pytest fixtures for testing.

Provides seeded random streams, small LPN instances and datasets for unit
tests, file locations for repository tests and the shared context used by
the BDD scenarios.
"""

import logging

import numpy as np
import pytest

from lpnkit.core.rng import RngStreams
from lpnkit.models.bits import BitVector
from lpnkit.models.lpn import Dataset, LpnInstance
from lpnkit.repositories.run_log_repository import RunLogRepository
from lpnkit.services import lpn_service


# ============================================================================
# RANDOMNESS FIXTURES
# ============================================================================

@pytest.fixture
def streams():
    """
    Root random streams with a fixed seed.

    Returns:
        RngStreams: Streams derived from seed 2024
    """
    return RngStreams(2024)


@pytest.fixture
def rng(streams):
    """Generator for ad-hoc draws inside a single test."""
    return streams.stream("test")


# ============================================================================
# INSTANCE AND DATASET FIXTURES (Unit Tests)
# ============================================================================

@pytest.fixture
def noisy_instance(streams) -> LpnInstance:
    """
    Instance with n=16, tau=0.1 and a sparse secret of weight 1.

    Returns:
        LpnInstance: Instance whose oracle draws from the "data" stream
    """
    return lpn_service.create_instance(16, 0.1, streams.stream("secret"), streams.stream("data"))


@pytest.fixture
def noiseless_instance(streams) -> LpnInstance:
    """
    Instance with n=12, tau=0 and a uniformly random secret.

    A noiseless sparse secret would have weight floor(n * 0) = 0, so the
    secret is drawn uniformly instead.
    """
    return lpn_service.create_instance(
        12, 0.0, streams.stream("secret", "clean"), streams.stream("data", "clean"), uniform=True
    )


@pytest.fixture
def noisy_dataset(noisy_instance) -> Dataset:
    """512 samples of the noisy instance."""
    return lpn_service.generate_dataset(noisy_instance, 512)


@pytest.fixture
def noiseless_dataset(noiseless_instance) -> Dataset:
    """256 samples of the noiseless instance."""
    return lpn_service.generate_dataset(noiseless_instance, 256)


@pytest.fixture
def tiny_dataset() -> Dataset:
    """
    Hand-written dataset: n=3, secret 101, labels exact.

    Returns:
        Dataset: Four rows with known parities
    """
    inputs = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]], dtype=np.uint8)
    labels = np.array([1, 0, 1, 0], dtype=np.uint8)
    return Dataset.from_dense(inputs, labels, 0.0, "tiny", BitVector.from_string("101"))


# ============================================================================
# REPOSITORY FIXTURES
# ============================================================================

@pytest.fixture
def dataset_path(tmp_path):
    """Location for an LPN1 file inside the test's temporary directory."""
    return tmp_path / "samples.lpn"


@pytest.fixture
def checkpoint_path(tmp_path):
    """Location for an MLP1 checkpoint inside the test's temporary directory."""
    return tmp_path / "model.mlp"


@pytest.fixture
def run_log():
    """
    In-memory run log.

    Yields:
        RunLogRepository: Log collecting records without a file
    """
    log = RunLogRepository()
    yield log
    log.close()


# ============================================================================
# LOGGING FIXTURES
# ============================================================================

@pytest.fixture(autouse=True)
def reset_lpnkit_logging():
    """
    Drop handlers the CLI attached to the "lpnkit" logger.

    configure_logging binds a handler to the stderr of the moment, which
    pytest replaces per test.
    """
    yield
    root = logging.getLogger("lpnkit")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    root.propagate = True


# ============================================================================
# BDD FIXTURES
# ============================================================================

@pytest.fixture
def context():
    """
    Shared state between BDD steps (arguments, exit codes, files).

    Returns:
        dict: Empty context filled by the steps
    """
    return {}


def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line("markers", "slow: marks desk-scale acceptance runs")
    config.addinivalue_line("markers", "integration: marks end-to-end pipeline tests")
    config.addinivalue_line("markers", "unit: marks tests as unit tests")
    config.addinivalue_line("markers", "bdd: marks tests as BDD scenarios")
