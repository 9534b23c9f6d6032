"""
Unit tests for pooled Gaussian elimination, BKW and the hypothesis test.
"""

import numpy as np
import pytest

from lpnkit.exceptions import (
    DimensionMismatchError,
    DomainError,
    EmptyDatasetError,
    PoolTooSmallError,
    SampleStarvationError,
)
from lpnkit.models.bits import BitVector
from lpnkit.models.lpn import Dataset
from lpnkit.services import classic_service, lpn_service
from lpnkit.services.classic_service import BkwConfig, PooledGaussConfig


# ============================================================================
# FIXTURES
# ============================================================================


@pytest.fixture
def gauss_dataset(streams):
    """3000 rows of an n=16, tau=0.05 instance with a uniform secret."""
    instance = lpn_service.create_instance(
        16, 0.05, streams.stream("secret", "gauss"), streams.stream("data", "gauss"), uniform=True
    )
    return lpn_service.generate_dataset(instance, 3000)


class TestHypothesisTest:
    """Test suite for the hypothesis test and moderate thresholds."""

    def test_error_rate_against_threshold(self, tiny_dataset):
        """Test that the true secret has rate 0 and the zero vector rate 1/2."""
        # Act
        accepted, rate = classic_service.hypothesis_test(tiny_dataset.secret, tiny_dataset, 0.1)
        rejected, zero_rate = classic_service.hypothesis_test(BitVector.zeros(3), tiny_dataset, 0.1)

        # Assert
        assert accepted and rate == 0.0
        assert not rejected and zero_rate == 0.5

    def test_empty_test_set_raises(self, tiny_dataset):
        """Test that an empty test set raises EmptyDatasetError."""
        # Act / Assert
        with pytest.raises(EmptyDatasetError):
            classic_service.hypothesis_test(tiny_dataset.secret, tiny_dataset.slice(0, 0), 0.1)

    def test_moderate_sizes_and_threshold(self):
        """
        Test the held-out size and acceptance threshold formulas.

        Arrange: n=256, tau=0.1 for the size; n=10, tau=0.1, m1=300 for the threshold
        Act: Compute both
        Assert: m1 = 2 * 256 / 0.16 = 3200 and threshold = 0.9 - sqrt(0.04) = 0.7
        """
        # Act / Assert
        assert classic_service.moderate_test_size(256, 0.1) == 3200
        assert classic_service.moderate_accept_threshold(10, 0.1, 300) == pytest.approx(0.7)
        with pytest.raises(DomainError):
            classic_service.moderate_accept_threshold(10, 0.1, 0)


class TestPooledGauss:
    """Test suite for pooled Gaussian elimination."""

    def test_config_rejects_threshold_outside_open_interval(self, rng):
        """Test that tau' = 0.5 and tau' = 0 are invalid."""
        # Act / Assert
        with pytest.raises(DomainError):
            PooledGaussConfig(tau_prime=0.5, rng=rng)
        with pytest.raises(DomainError):
            PooledGaussConfig(tau_prime=0.0, rng=rng)

    def test_split_keeps_full_sizes_when_possible(self, gauss_dataset):
        """Test that 3000 rows split into a 2000-row pool and the last 1000 rows."""
        # Act
        pool, test = classic_service.split_for_gauss(gauss_dataset, 2000, 1000)

        # Assert
        assert pool.size == 2000
        assert test == gauss_dataset.slice(2000, 3000)

    def test_split_is_proportional_for_small_datasets(self, streams):
        """
        Test the proportional split of a dataset below the default sizes.

        Arrange: 600 rows of dimension 10, default pool and test sizes
        Act: Split
        Assert: 259 test rows (600 * 100000 // 231072) and 341 pool rows
        """
        # Arrange
        instance = lpn_service.create_instance(10, 0.1, streams.stream("secret"), streams.stream("data"))
        dataset = lpn_service.generate_dataset(instance, 600)

        # Act
        pool, test = classic_service.split_for_gauss(dataset, 131072, 100000)

        # Assert
        assert (pool.size, test.size) == (341, 259)

    def test_split_needs_more_rows_than_dimension(self, tiny_dataset):
        """Test that m <= n raises PoolTooSmallError."""
        # Act / Assert
        with pytest.raises(PoolTooSmallError):
            classic_service.split_for_gauss(tiny_dataset.slice(0, 3), 10, 10)

    def test_recovers_noiseless_secret(self, noiseless_dataset, rng):
        """Test that a noiseless pool gives the secret on the first nonsingular draw."""
        # Arrange
        pool, test = noiseless_dataset.slice(0, 192), noiseless_dataset.slice(192, 256)

        # Act
        result = classic_service.pooled_gauss(pool, test, PooledGaussConfig(tau_prime=0.01, rng=rng))

        # Assert
        assert result.found
        assert result.secret == noiseless_dataset.secret
        assert result.error_rate == 0.0
        assert result.iterations == result.singular_draws + 1
        assert len(result.draw) == 12

    def test_recovers_noisy_secret(self, gauss_dataset, rng):
        """
        Test recovery with noisy samples.

        Arrange: n=16, tau=0.05 (an error-free draw has probability about 0.44)
        Act: Run with tau' = 0.2 and 200 draws
        Assert: The secret is found with an error rate near tau
        """
        # Arrange
        pool, test = classic_service.split_for_gauss(gauss_dataset, 2000, 1000)

        # Act
        result = classic_service.pooled_gauss(
            pool, test, PooledGaussConfig(tau_prime=0.2, rng=rng, max_iterations=200)
        )

        # Assert
        assert result.secret == gauss_dataset.secret
        assert result.error_rate < 0.1

    def test_random_labels_exhaust_the_budget(self, streams, rng):
        """Test that labels independent of the inputs give no candidate within 20 draws."""
        # Arrange
        data_rng = streams.stream("random")
        inputs = data_rng.integers(0, 2, size=(1200, 16), dtype=np.uint8)
        labels = data_rng.integers(0, 2, size=1200, dtype=np.uint8)
        dataset = Dataset.from_dense(inputs, labels, 0.1)

        # Act
        result = classic_service.pooled_gauss(
            dataset.slice(0, 200), dataset.slice(200, 1200),
            PooledGaussConfig(tau_prime=0.05, rng=rng, max_iterations=20),
        )

        # Assert
        assert not result.found
        assert result.iterations == 20

    def test_undersized_pool_and_empty_test_raise(self, noiseless_dataset, rng):
        """Test the pool-size and test-size preconditions."""
        # Arrange
        cfg = PooledGaussConfig(tau_prime=0.1, rng=rng)

        # Act / Assert
        with pytest.raises(PoolTooSmallError):
            classic_service.pooled_gauss(noiseless_dataset.slice(0, 11), noiseless_dataset, cfg)
        with pytest.raises(EmptyDatasetError):
            classic_service.pooled_gauss(noiseless_dataset, noiseless_dataset.slice(0, 0), cfg)


class TestBkw:
    """Test suite for the BKW reduction."""

    def test_predicted_noise_follows_piling_up(self):
        """Test (1 - (1 - 2 tau)^(2^a)) / 2 at tau = 0.25, a = 3, and the zero-round identity."""
        # Act / Assert
        assert classic_service.predicted_bkw_noise(0.25, 3) == pytest.approx(0.498046875)
        assert classic_service.predicted_bkw_noise(0.1, 0) == pytest.approx(0.1)
        with pytest.raises(DomainError):
            classic_service.predicted_bkw_noise(0.5, 1)

    def test_config_bounds(self):
        """Test block widths outside [1, 62] and negative rounds."""
        # Act / Assert
        with pytest.raises(DomainError):
            BkwConfig(0, 1)
        with pytest.raises(DomainError):
            BkwConfig(63, 1)
        with pytest.raises(DomainError):
            BkwConfig(2, -1)

    def test_untruncated_output_has_zero_eliminated_block(self, noiseless_dataset):
        """
        Test that BKW zeroes the eliminated coordinates and keeps noiseless labels.

        Arrange: n=12 noiseless dataset, b=3, a=2
        Act: Reduce without truncation
        Assert: Columns 6..11 are zero and labels still equal <x, s>
        """
        # Act
        reduced = classic_service.bkw_reduce(noiseless_dataset, BkwConfig(3, 2), truncate=False)

        # Assert
        assert reduced.n == 12
        assert reduced.size > 0
        assert not reduced.dense_inputs[:, 6:].any()
        assert lpn_service.label_flip_rate(reduced, noiseless_dataset.secret) == 0.0

    def test_truncated_output_keeps_secret_prefix(self, noiseless_dataset):
        """Test the truncated dimension, the prefix secret and the nominal noise rate."""
        # Act
        reduced = classic_service.bkw_reduce(noiseless_dataset, BkwConfig(3, 2))

        # Assert
        assert reduced.n == 6
        assert reduced.secret == BitVector.from_bits(noiseless_dataset.secret.to_bits()[:6])
        assert reduced.meta.tau == 0.0
        assert lpn_service.label_flip_rate(reduced, reduced.secret) == 0.0

    def test_shared_ancestors_are_detected(self):
        """Test the row-wise common-entry check used to filter pairs."""
        # Arrange
        left = np.array([[0, 1], [2, 3], [4, 5]])
        right = np.array([[1, 7], [8, 9], [5, 4]])

        # Act
        overlap = classic_service._shares_ancestor(left, right, chunk=2)

        # Assert
        assert overlap.tolist() == [True, False, True]

    def test_ancestor_filter_only_removes_rows(self, noiseless_dataset):
        """Test that tracking ancestors keeps a subset of the unfiltered rows."""
        # Act
        filtered = classic_service.bkw_reduce(noiseless_dataset, BkwConfig(3, 2))
        unfiltered = classic_service.bkw_reduce(noiseless_dataset, BkwConfig(3, 2, distinct_ancestors=False))

        # Assert
        assert 0 < filtered.size <= unfiltered.size

    def test_memory_cap_limits_rows(self, noiseless_dataset):
        """Test that each round keeps at most memory_cap rows."""
        # Act
        reduced = classic_service.bkw_reduce(noiseless_dataset, BkwConfig(2, 1, memory_cap=50))

        # Assert
        assert reduced.size == 50

    def test_invalid_shapes_raise(self, tiny_dataset):
        """Test a b > n and a round that leaves no samples."""
        # Act / Assert
        with pytest.raises(DimensionMismatchError):
            classic_service.bkw_reduce(tiny_dataset, BkwConfig(2, 2))
        with pytest.raises(SampleStarvationError):
            classic_service.bkw_reduce(tiny_dataset.slice(0, 1), BkwConfig(1, 1))
