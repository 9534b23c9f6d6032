"""
Samplers feeding the training loop.

A sampler returns a fresh batch of B samples on each call: the oracle
variant draws new LPN samples from an instance, the batch variant draws
B rows with replacement from a fixed dataset. ``get_batch`` hands the
training loop dense float arrays; ``get_data`` returns a Dataset.
"""

from abc import ABC, abstractmethod

import numpy as np

from lpnkit.exceptions import ConfigurationError, EmptyDatasetError
from lpnkit.models.lpn import Dataset, LpnInstance
from lpnkit.services import lpn_service


class Sampler(ABC):
    """Base class for samplers; counts how many batches were handed out."""

    variant: str = ""

    def __init__(self, batch_size: int):
        if batch_size < 1:
            raise ConfigurationError(f"Batch size must be at least 1, got {batch_size}")
        self.batch_size = batch_size
        self.calls = 0

    @abstractmethod
    def get_data(self) -> Dataset:
        """Return the next batch as a Dataset."""

    @abstractmethod
    def get_batch(self, dtype: type = np.float32) -> tuple[np.ndarray, np.ndarray]:
        """Return the next batch as dense (inputs, labels) arrays of ``dtype``."""

    def __repr__(self) -> str:
        return f"<{type(self).__name__}(batch_size={self.batch_size}, calls={self.calls})>"


class OracleSampler(Sampler):
    """Draws fresh samples from an instance with a known secret."""

    variant = "oracle"

    def __init__(self, instance: LpnInstance, batch_size: int):
        super().__init__(batch_size)
        self.instance = instance

    def get_data(self) -> Dataset:
        self.calls += 1
        return lpn_service.oracle_get_data(self.instance, self.batch_size)

    def get_batch(self, dtype: type = np.float32) -> tuple[np.ndarray, np.ndarray]:
        self.calls += 1
        inputs, labels = lpn_service.draw_samples(self.instance, self.batch_size)
        return inputs.astype(dtype), labels.astype(dtype)


class BatchSampler(Sampler):
    """
    Draws B rows i.i.d. with replacement from a fixed dataset.

    With ``full_batch=True`` every call returns the whole dataset in order,
    which is what "batch size = training set size" means for full-batch
    gradient descent.
    """

    variant = "batch"

    def __init__(self, dataset: Dataset, batch_size: int | None, rng: np.random.Generator, full_batch: bool = False):
        if dataset.size == 0:
            raise EmptyDatasetError("Batch sampler needs a nonempty dataset")
        super().__init__(dataset.size if batch_size is None else batch_size)
        self.dataset = dataset
        self.rng = rng
        self.full_batch = full_batch or batch_size is None
        self._dense_cache: dict[type, tuple[np.ndarray, np.ndarray]] = {}

    def _dense(self, dtype: type) -> tuple[np.ndarray, np.ndarray]:
        if dtype not in self._dense_cache:
            self._dense_cache[dtype] = (
                self.dataset.dense_inputs.astype(dtype),
                self.dataset.dense_labels.astype(dtype),
            )
        return self._dense_cache[dtype]

    def get_data(self) -> Dataset:
        self.calls += 1
        if self.full_batch:
            return self.dataset
        return lpn_service.batch_get_data(self.dataset, self.batch_size, self.rng)

    def get_batch(self, dtype: type = np.float32) -> tuple[np.ndarray, np.ndarray]:
        self.calls += 1
        inputs, labels = self._dense(dtype)
        if self.full_batch:
            return inputs, labels
        index = self.rng.integers(0, self.dataset.size, size=self.batch_size)
        return inputs[index], labels[index]
