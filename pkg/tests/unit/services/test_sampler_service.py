"""
Unit tests for the oracle and batch samplers.
"""

import numpy as np
import pytest

from lpnkit.exceptions import ConfigurationError, EmptyDatasetError
from lpnkit.models.lpn import Dataset
from lpnkit.services.sampler_service import BatchSampler, OracleSampler


class TestOracleSampler:
    """Test suite for OracleSampler."""

    def test_batches_have_requested_shape_and_dtype(self, noisy_instance):
        """
        Test that get_batch returns dense float arrays.

        Arrange: Oracle sampler with B=32
        Act: Draw a float64 batch
        Assert: Shapes (32, 16) and (32,), 0/1 values, call counted
        """
        # Arrange
        sampler = OracleSampler(noisy_instance, 32)

        # Act
        inputs, labels = sampler.get_batch(np.float64)

        # Assert
        assert inputs.shape == (32, 16)
        assert labels.shape == (32,)
        assert inputs.dtype == np.float64
        assert set(np.unique(inputs)) <= {0.0, 1.0}
        assert sampler.calls == 1

    def test_get_data_returns_dataset_with_secret(self, noisy_instance):
        """Test that get_data wraps fresh samples in a Dataset."""
        # Arrange
        sampler = OracleSampler(noisy_instance, 10)

        # Act
        dataset = sampler.get_data()

        # Assert
        assert dataset.size == 10
        assert dataset.secret == noisy_instance.secret
        assert dataset.meta.source == "oracle"

    def test_batch_size_must_be_positive(self, noisy_instance):
        """Test that B = 0 raises ConfigurationError."""
        # Act / Assert
        with pytest.raises(ConfigurationError):
            OracleSampler(noisy_instance, 0)


class TestBatchSampler:
    """Test suite for BatchSampler."""

    def test_full_batch_returns_whole_dataset_in_order(self, tiny_dataset, rng):
        """
        Test that batch_size None means full-batch training.

        Arrange: Batch sampler without batch size
        Act: Draw twice
        Assert: Both batches equal the dataset in order
        """
        # Arrange
        sampler = BatchSampler(tiny_dataset, None, rng)

        # Act
        first_inputs, first_labels = sampler.get_batch()
        second_inputs, _ = sampler.get_batch()

        # Assert
        assert sampler.full_batch
        assert sampler.batch_size == tiny_dataset.size
        assert np.array_equal(first_inputs, tiny_dataset.dense_inputs.astype(np.float32))
        assert np.array_equal(first_labels, tiny_dataset.dense_labels.astype(np.float32))
        assert np.array_equal(first_inputs, second_inputs)
        assert sampler.get_data() is tiny_dataset

    def test_minibatches_draw_with_replacement(self, tiny_dataset, rng):
        """
        Test that mini-batches may exceed the dataset size.

        Arrange: Four-row dataset, B = 20
        Act: Draw a batch
        Assert: 20 rows, each an existing row with its label
        """
        # Arrange
        sampler = BatchSampler(tiny_dataset, 20, rng)
        rows = {tuple(r) + (l,) for r, l in zip(tiny_dataset.dense_inputs.tolist(), tiny_dataset.dense_labels.tolist())}

        # Act
        inputs, labels = sampler.get_batch(np.uint8)

        # Assert
        assert inputs.shape == (20, 3)
        for row, label in zip(inputs.tolist(), labels.tolist()):
            assert tuple(row) + (label,) in rows

    def test_rows_are_drawn_uniformly(self, rng):
        """
        Test that every row is equally likely to be drawn.

        Arrange: 16 distinct rows (the binary expansions of 0..15), B = 1000
        Act: Draw 20 batches and count rows
        Assert: Chi-square statistic below the 0.999 quantile for 15 degrees of freedom
        """
        # Arrange
        codes = np.arange(16)
        inputs = ((codes[:, None] >> np.arange(4)) & 1).astype(np.uint8)
        sampler = BatchSampler(Dataset.from_dense(inputs, codes & 1, 0.0), 1000, rng)
        counts = np.zeros(16)

        # Act
        for _ in range(20):
            batch, _ = sampler.get_batch(np.uint8)
            counts += np.bincount(batch.astype(np.int64) @ (1 << np.arange(4)), minlength=16)

        # Assert
        expected = counts.sum() / 16
        chi_square = float(((counts - expected) ** 2 / expected).sum())
        assert counts.sum() == 20000
        assert chi_square < 37.7

    def test_same_stream_gives_same_batches(self, noisy_dataset, streams):
        """Test that batch draws depend only on the sampler stream."""
        # Arrange
        a = BatchSampler(noisy_dataset, 16, streams.stream("sampler"))
        b = BatchSampler(noisy_dataset, 16, streams.stream("sampler"))

        # Act / Assert
        assert np.array_equal(a.get_batch()[0], b.get_batch()[0])

    def test_empty_dataset_is_rejected(self, rng):
        """Test that a sampler needs at least one row."""
        # Arrange
        empty = Dataset.from_dense(np.zeros((0, 3), dtype=np.uint8), np.zeros(0, dtype=np.uint8), 0.1)

        # Act / Assert
        with pytest.raises(EmptyDatasetError):
            BatchSampler(empty, 4, rng)
