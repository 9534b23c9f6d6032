"""
Unit tests for LPN generation and dataset-level reductions.
"""

import numpy as np
import pytest

from lpnkit.core.rng import RngStreams
from lpnkit.exceptions import DimensionMismatchError, DomainError, EmptyDatasetError, InsufficientSamplesError
from lpnkit.models.bits import BitVector
from lpnkit.models.lpn import Dataset
from lpnkit.services import lpn_service


class TestSecretSampling:
    """Test suite for secret generation."""

    def test_sparse_weight_is_robust_to_round_off(self):
        """Test that floor(100 * 0.29) is 29 even though 0.29 * 100 < 29 in floating point."""
        # Act / Assert
        assert lpn_service.sparse_weight(100, 0.29) == 29
        assert lpn_service.sparse_weight(16, 0.1) == 1

    def test_secret_has_exact_default_weight(self, rng):
        """
        Test that the default secret weight is floor(n * tau).

        Arrange: n=100, tau=0.2
        Act: Sample several secrets
        Assert: Every secret has weight 20
        """
        # Act
        weights = [lpn_service.sample_secret(100, 0.2, rng).popcount() for _ in range(10)]

        # Assert
        assert weights == [20] * 10

    def test_weight_override_and_bounds(self, rng):
        """Test an explicit weight and the [0, n] bound."""
        # Act / Assert
        assert lpn_service.sample_secret(10, 0.1, rng, weight=7).popcount() == 7
        with pytest.raises(DomainError):
            lpn_service.sample_secret(10, 0.1, rng, weight=11)

    def test_same_streams_give_same_instance(self):
        """
        Test that an instance depends only on the seed and labels.

        Arrange: Two stream factories with seed 7
        Act: Create instances and draw data
        Assert: Identical secrets and datasets
        """
        # Arrange
        first, second = RngStreams(7), RngStreams(7)

        # Act
        a = lpn_service.create_instance(32, 0.125, first.stream("secret"), first.stream("data"))
        b = lpn_service.create_instance(32, 0.125, second.stream("secret"), second.stream("data"))

        # Assert
        assert a.secret == b.secret
        assert lpn_service.generate_dataset(a, 100) == lpn_service.generate_dataset(b, 100)

    def test_invalid_noise_rate_is_rejected(self, rng):
        """Test that tau = 0.6 raises DomainError."""
        # Act / Assert
        with pytest.raises(DomainError):
            lpn_service.create_instance(8, 0.6, rng, rng)


class TestGeneration:
    """Test suite for dataset generation and sampling."""

    def test_noiseless_labels_are_exact_parities(self, noiseless_dataset):
        """Test that tau = 0 gives labels equal to <x, s>."""
        # Act / Assert
        assert noiseless_dataset.inputs.parity_with(noiseless_dataset.secret) == noiseless_dataset.labels

    def test_noise_rate_is_close_to_tau(self, streams):
        """
        Test the empirical flip rate of generated data.

        Arrange: n=24, tau=0.2, m=40000
        Act: Measure the flip rate against the secret
        Assert: Within 0.015 of tau (about 7 standard deviations)
        """
        # Arrange
        instance = lpn_service.create_instance(24, 0.2, streams.stream("secret"), streams.stream("data"))

        # Act
        rate = lpn_service.label_flip_rate(lpn_service.generate_dataset(instance, 40000), instance.secret)

        # Assert
        assert abs(rate - 0.2) < 0.015

    def test_chunked_generation_keeps_shape(self, noisy_instance):
        """Test that chunking assembles all rows."""
        # Act
        dataset = lpn_service.generate_dataset(noisy_instance, 1000, chunk_rows=128)

        # Assert
        assert dataset.size == 1000
        assert dataset.n == 16
        assert dataset.secret == noisy_instance.secret

    def test_zero_samples_give_an_empty_dataset(self, noisy_instance):
        """Test that m = 0 is allowed."""
        # Act
        dataset = lpn_service.generate_dataset(noisy_instance, 0)

        # Assert
        assert dataset.size == 0
        assert dataset.n == 16

    def test_oracle_batch_is_fresh(self, noisy_instance):
        """Test that two oracle batches differ and carry the secret."""
        # Act
        first = lpn_service.oracle_get_data(noisy_instance, 64)
        second = lpn_service.oracle_get_data(noisy_instance, 64)

        # Assert
        assert first.secret == noisy_instance.secret
        assert first.inputs != second.inputs

    def test_batch_sampling_draws_existing_rows(self, tiny_dataset, rng):
        """
        Test that batch rows come from the dataset with their labels.

        Arrange: Tiny dataset with four distinct rows
        Act: Draw 50 rows with replacement
        Assert: Every row/label pair exists in the source
        """
        # Arrange
        source = {tuple(row) + (label,) for row, label in zip(tiny_dataset.dense_inputs.tolist(),
                                                              tiny_dataset.dense_labels.tolist())}

        # Act
        batch = lpn_service.batch_get_data(tiny_dataset, 50, rng)

        # Assert
        assert batch.size == 50
        for row, label in zip(batch.dense_inputs.tolist(), batch.dense_labels.tolist()):
            assert tuple(row) + (label,) in source

    def test_batch_sampling_from_empty_dataset_fails(self, rng):
        """Test that sampling from zero rows raises EmptyDatasetError."""
        # Arrange
        empty = Dataset.from_dense(np.zeros((0, 4), dtype=np.uint8), np.zeros(0, dtype=np.uint8), 0.1)

        # Act / Assert
        with pytest.raises(EmptyDatasetError):
            lpn_service.batch_get_data(empty, 5, rng)

    def test_clean_testset_is_noiseless(self, rng):
        """Test that the clean test set agrees with the secret everywhere."""
        # Arrange
        secret = BitVector.from_string("1100101")

        # Act
        clean = lpn_service.make_clean_testset(secret, 500, rng)

        # Assert
        assert lpn_service.label_flip_rate(clean, secret) == 0.0


class TestSparseSecretTransform:
    """Test suite for the sparse-secret transform."""

    def test_noiseless_transform_has_zero_secret_and_inverts(self, noiseless_dataset):
        """
        Test the transform on exact labels.

        Arrange: Noiseless dataset with a uniform secret
        Act: Transform and map the zero error block back
        Assert: Effective secret is zero, labels are all zero, secret recovered
        """
        # Act
        transformed, info = lpn_service.sparse_secret_transform(noiseless_dataset)

        # Assert
        n = noiseless_dataset.n
        assert transformed.size == noiseless_dataset.size - n
        assert transformed.secret == BitVector.zeros(n)
        assert transformed.labels.popcount() == 0
        assert lpn_service.recover_original_secret(info, BitVector.zeros(n)) == noiseless_dataset.secret

    def test_noisy_transform_relabels_with_error_block(self, noisy_dataset):
        """
        Test that the new secret is the error vector of the consumed rows.

        Arrange: Noisy dataset with known secret
        Act: Transform
        Assert: New labels follow e1 plus the remaining errors, and e1 maps back to s
        """
        # Arrange
        errors = (noisy_dataset.inputs.parity_with(noisy_dataset.secret) ^ noisy_dataset.labels).to_bits()

        # Act
        transformed, info = lpn_service.sparse_secret_transform(noisy_dataset)

        # Assert
        e1 = BitVector.from_bits(errors[info.consumed])
        e2 = BitVector.from_bits(errors[info.remaining])
        assert transformed.secret == e1
        assert transformed.labels == transformed.inputs.parity_with(e1) ^ e2
        assert lpn_service.recover_original_secret(info, e1) == noisy_dataset.secret

    def test_transform_needs_more_rows_than_dimension(self, tiny_dataset):
        """Test that m <= n raises InsufficientSamplesError."""
        # Act / Assert
        with pytest.raises(InsufficientSamplesError):
            lpn_service.sparse_secret_transform(tiny_dataset.slice(0, 3))


class TestSuffixReductions:
    """Test suite for bit guessing and suffix enumeration."""

    def test_correct_suffix_keeps_the_noise(self, noisy_dataset):
        """
        Test that the right suffix guess gives an LPN problem with the same errors.

        Arrange: Noisy dataset, k = 3, true suffix of the secret
        Act: Enumerate the suffix
        Assert: Reduced secret is the prefix and the flip rate is unchanged
        """
        # Arrange
        bits = noisy_dataset.secret.to_bits()
        suffix = bits[13:]

        # Act
        reduced = lpn_service.enumerate_suffix(noisy_dataset, 3, suffix)

        # Assert
        assert reduced.n == 13
        assert reduced.secret == BitVector.from_bits(bits[:13])
        assert lpn_service.label_flip_rate(reduced, reduced.secret) == pytest.approx(
            lpn_service.label_flip_rate(noisy_dataset, noisy_dataset.secret)
        )

    def test_wrong_suffix_drops_the_secret(self, noiseless_dataset):
        """Test that a wrong guess leaves no known effective secret."""
        # Arrange
        wrong = 1 - noiseless_dataset.secret.to_bits()[-2:]

        # Act
        reduced = lpn_service.enumerate_suffix(noiseless_dataset, 2, wrong)

        # Assert
        assert reduced.secret is None

    def test_guess_transform_is_a_one_bit_suffix(self, noiseless_dataset):
        """Test that guessing the true last bit keeps labels consistent."""
        # Arrange
        last = noiseless_dataset.secret[noiseless_dataset.n - 1]

        # Act
        reduced = lpn_service.guess_transform(noiseless_dataset, last)

        # Assert
        assert reduced.n == noiseless_dataset.n - 1
        assert lpn_service.label_flip_rate(reduced, reduced.secret) == 0.0

    def test_invalid_suffix_widths_raise(self, tiny_dataset):
        """Test k >= n, a wrong suffix length, and guessing in dimension 1."""
        # Act / Assert
        with pytest.raises(DimensionMismatchError):
            lpn_service.enumerate_suffix(tiny_dataset, 3, [0, 0, 0])
        with pytest.raises(DimensionMismatchError):
            lpn_service.enumerate_suffix(tiny_dataset, 2, [0])
        one_dim = Dataset.from_dense(np.ones((2, 1), dtype=np.uint8), np.ones(2, dtype=np.uint8), 0.0)
        with pytest.raises(DimensionMismatchError):
            lpn_service.guess_transform(one_dim, 0)

    def test_suffix_bits_are_little_endian(self):
        """Test that suffix[j] = (v >> j) & 1."""
        # Act / Assert
        assert lpn_service.suffix_bits(5, 3).tolist() == [1, 0, 1]
        assert lpn_service.suffix_bits(0, 0).tolist() == []
