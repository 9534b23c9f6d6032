"""
Classical LPN decoders and reductions.

Pooled Gaussian elimination draws n samples from a pool, solves the square
system and keeps the candidate if its error rate on a held-out test set is
below tau'. BKW trades samples and noise for dimension by XORing samples
that agree on a block of coordinates.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from lpnkit.core.constants import HYPOTHESIS_TEST_SIZE, POOL_SIZE, POOLED_GAUSS_MAX_ITERATIONS, SCREEN_ROWS
from lpnkit.exceptions import (
    DimensionMismatchError,
    DomainError,
    EmptyDatasetError,
    PoolTooSmallError,
    SampleStarvationError,
    SingularMatrixError,
)
from lpnkit.models.bits import BitMatrix, BitVector
from lpnkit.models.lpn import Dataset, DatasetMeta
from lpnkit.services import gf2_service, lpn_service

logger = logging.getLogger(__name__)


# ============================================================================
# HYPOTHESIS TESTING
# ============================================================================


def hypothesis_test(candidate: BitVector, dataset: Dataset, tau_prime: float) -> tuple[bool, float]:
    """
    Empirical error rate of a candidate secret and whether it is at most tau'.

    Raises:
        EmptyDatasetError: If the dataset has no rows
    """
    if dataset.size == 0:
        raise EmptyDatasetError("Hypothesis test needs at least one sample")
    rate = lpn_service.label_flip_rate(dataset, candidate)
    return rate <= tau_prime, rate


def moderate_accept_threshold(n: int, tau: float, m1: int) -> float:
    """
    Accuracy a correct secret reaches on m1 held-out noisy rows with high probability.

    Returns:
        1 - tau - sqrt(3 (1/2 - tau) n / m1)
    """
    if m1 <= 0:
        raise DomainError(f"Test size must be positive, got {m1}")
    return 1.0 - tau - math.sqrt(3.0 * (0.5 - tau) * n / m1)


def moderate_test_size(n: int, tau: float) -> int:
    """Held-out test size m1 = ceil(2 n / (1/2 - tau)^2)."""
    if not 0.0 <= tau < 0.5:
        raise DomainError(f"Noise rate must lie in [0, 0.5), got {tau}")
    return math.ceil(round(2.0 * n / (0.5 - tau) ** 2, 6))


# ============================================================================
# POOLED GAUSSIAN ELIMINATION
# ============================================================================


@dataclass(kw_only=True)
class PooledGaussConfig:
    """
    Pooled Gaussian elimination parameters.

    Attributes:
        tau_prime: Acceptance threshold on the empirical error rate
        rng: Stream the draws come from
        pool_size: Pool rows taken from a dataset by :func:`split_for_gauss`
        test_size: Hypothesis-test rows taken from a dataset
        max_iterations: Draw budget, singular draws included
        screen_rows: Rows of the quick pre-test applied before the full test
    """

    tau_prime: float
    rng: np.random.Generator = field(repr=False)
    pool_size: int = POOL_SIZE
    test_size: int = HYPOTHESIS_TEST_SIZE
    max_iterations: int = POOLED_GAUSS_MAX_ITERATIONS
    screen_rows: int = SCREEN_ROWS

    def __post_init__(self):
        if not 0.0 < self.tau_prime < 0.5:
            raise DomainError(f"Threshold tau' must lie in (0, 0.5), got {self.tau_prime}")
        if self.pool_size < 1 or self.test_size < 1 or self.max_iterations < 1:
            raise DomainError("Pool size, test size and iteration budget must be positive")


@dataclass
class PooledGaussResult:
    """
    Outcome of a pooled Gaussian run.

    Attributes:
        secret: Accepted candidate, or None when not found
        iterations: Draws made, singular ones included
        singular_draws: Draws whose system was singular
        screened: Candidates that passed the quick pre-test
        error_rate: Test error rate of the accepted candidate
        draw: Pool row indices of the accepted draw
    """

    secret: BitVector | None
    iterations: int
    singular_draws: int
    screened: int = 0
    error_rate: float | None = None
    draw: list[int] | None = None

    @property
    def found(self) -> bool:
        return self.secret is not None


def split_for_gauss(dataset: Dataset, pool_size: int, test_size: int) -> tuple[Dataset, Dataset]:
    """
    Split a dataset into (pool, test), the test rows taken from the end.

    With at least ``pool_size + test_size`` rows both parts get their full
    size. Smaller datasets are divided in the same proportion, keeping at
    least n pool rows and one test row.

    Raises:
        PoolTooSmallError: If fewer than n + 1 rows are available
    """
    n, m = dataset.n, dataset.size
    if m <= n:
        raise PoolTooSmallError(m, n)
    if m >= pool_size + test_size:
        test, pool = test_size, pool_size
    else:
        test = min(max(1, m * test_size // (pool_size + test_size)), m - n)
        pool = m - test
    return dataset.slice(0, pool), dataset.slice(m - test, m)


def pooled_gauss(pool: Dataset, test: Dataset, cfg: PooledGaussConfig) -> PooledGaussResult:
    """
    Guess-then-eliminate decoding.

    Each iteration draws n distinct pool rows and solves the square system;
    singular draws are counted and redrawn. Candidates first face a quick
    screen on the first ``screen_rows`` test rows (threshold widened by three
    standard deviations of a fair coin) and are returned only if their error
    rate on the full test set is at most tau'.

    Raises:
        PoolTooSmallError: If the pool has fewer than n rows
        EmptyDatasetError: If the test set is empty
    """
    n = pool.n
    if pool.size < n:
        raise PoolTooSmallError(pool.size, n)
    if test.size == 0:
        raise EmptyDatasetError("Pooled Gaussian elimination needs hypothesis-test rows")
    if test.n != n:
        raise DimensionMismatchError("Pool and test set dimensions differ")

    screen_size = min(cfg.screen_rows, test.size)
    screen = test.slice(0, screen_size)
    screen_threshold = cfg.tau_prime + 3.0 * math.sqrt(0.25 / screen_size)
    labels = pool.dense_labels

    singular = 0
    screened = 0
    for iteration in range(1, cfg.max_iterations + 1):
        draw = cfg.rng.choice(pool.size, size=n, replace=False)
        try:
            candidate = gf2_service.solve_rows(pool.inputs.take_rows(draw), BitVector.from_bits(labels[draw]))
        except SingularMatrixError:
            singular += 1
            continue
        passed, _ = hypothesis_test(candidate, screen, screen_threshold)
        if not passed:
            continue
        screened += 1
        accepted, rate = hypothesis_test(candidate, test, cfg.tau_prime)
        logger.debug("Candidate %s at draw %d: error rate %.4f", candidate.to_hex(), iteration, rate)
        if accepted:
            logger.info("Pooled Gauss accepted a candidate after %d draws (%d singular)", iteration, singular)
            return PooledGaussResult(candidate, iteration, singular, screened, rate, [int(i) for i in draw])
    logger.info("Pooled Gauss found no candidate in %d draws", cfg.max_iterations)
    return PooledGaussResult(None, cfg.max_iterations, singular, screened)


# ============================================================================
# BKW
# ============================================================================


@dataclass(frozen=True)
class BkwConfig:
    """
    BKW reduction parameters.

    Attributes:
        block_width: Coordinates eliminated per round (b)
        rounds: Number of rounds (a)
        memory_cap: Maximum rows kept after each round
        distinct_ancestors: Skip a member when it and its representative stem
            from a common input sample, so every output row is the XOR of
            2^a distinct input samples
    """

    block_width: int
    rounds: int
    memory_cap: int | None = None
    distinct_ancestors: bool = True

    def __post_init__(self):
        if self.block_width < 1 or self.block_width > 62:
            raise DomainError("Block width must lie in [1, 62]")
        if self.rounds < 0:
            raise DomainError("Round count must be non-negative")
        if self.memory_cap is not None and self.memory_cap < 1:
            raise DomainError("Memory cap must be positive")


def predicted_bkw_noise(tau: float, rounds: int) -> float:
    """Noise rate after ``rounds`` BKW rounds: (1 - (1 - 2 tau)^(2^rounds)) / 2."""
    if not 0.0 <= tau < 0.5:
        raise DomainError(f"Noise rate must lie in [0, 0.5), got {tau}")
    if rounds < 0:
        raise DomainError("Round count must be non-negative")
    return (1.0 - (1.0 - 2.0 * tau) ** (2**rounds)) / 2.0


def _shares_ancestor(left: np.ndarray, right: np.ndarray, chunk: int = 1 << 16) -> np.ndarray:
    """Row-wise test whether two (k, s) ancestor arrays have a common entry."""
    overlap = np.zeros(left.shape[0], dtype=bool)
    for start in range(0, left.shape[0], chunk):
        a, b = left[start:start + chunk], right[start:start + chunk]
        overlap[start:start + chunk] = (a[:, :, np.newaxis] == b[:, np.newaxis, :]).any(axis=(1, 2))
    return overlap


def _bkw_round(
    inputs: np.ndarray,
    labels: np.ndarray,
    ancestors: np.ndarray | None,
    lo: int,
    hi: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    weights = np.left_shift(np.int64(1), np.arange(hi - lo, dtype=np.int64))
    keys = inputs[:, lo:hi].astype(np.int64) @ weights
    order = np.argsort(keys, kind="stable")
    ordered = keys[order]
    first = np.ones(order.shape[0], dtype=bool)
    first[1:] = ordered[1:] != ordered[:-1]
    group_start = np.maximum.accumulate(np.where(first, np.arange(order.shape[0]), 0))
    members = order[~first]
    representatives = order[group_start[~first]]
    merged = None
    if ancestors is not None:
        # a shared original sample would cancel out of the XOR
        keep = ~_shares_ancestor(ancestors[members], ancestors[representatives])
        members, representatives = members[keep], representatives[keep]
        merged = np.concatenate([ancestors[members], ancestors[representatives]], axis=1)
    return inputs[members] ^ inputs[representatives], labels[members] ^ labels[representatives], merged


def bkw_reduce(dataset: Dataset, cfg: BkwConfig, truncate: bool = True) -> Dataset:
    """
    BKW block-XOR reduction.

    Round r buckets the samples on coordinates [n - (r+1) b, n - r b); within a
    bucket the first sample is the representative, it is XORed into every
    other member and then discarded. After ``rounds`` rounds the eliminated
    coordinates are dropped (unless ``truncate`` is False).

    Returns:
        Dataset of dimension n - a b whose nominal noise rate is the predicted one

    Raises:
        DimensionMismatchError: If a b exceeds n
        SampleStarvationError: If a round leaves no samples
    """
    n, b, a = dataset.n, cfg.block_width, cfg.rounds
    if a * b > n:
        raise DimensionMismatchError(f"{a} rounds of width {b} exceed dimension {n}")
    inputs = np.array(dataset.dense_inputs)
    labels = np.array(dataset.dense_labels)
    ancestors = np.arange(dataset.size, dtype=np.int64)[:, np.newaxis] if cfg.distinct_ancestors else None
    for r in range(a):
        inputs, labels, ancestors = _bkw_round(inputs, labels, ancestors, n - (r + 1) * b, n - r * b)
        if cfg.memory_cap is not None:
            inputs, labels = inputs[: cfg.memory_cap], labels[: cfg.memory_cap]
            if ancestors is not None:
                ancestors = ancestors[: cfg.memory_cap]
        logger.debug("BKW round %d kept %d samples", r, inputs.shape[0])
        if inputs.shape[0] == 0:
            raise SampleStarvationError(r, 0)
    width = n - a * b if truncate else n
    secret = None
    if dataset.secret is not None:
        secret = dataset.secret if not truncate else BitVector.from_bits(dataset.secret.to_bits()[:width])
    tau_out = predicted_bkw_noise(dataset.meta.tau, a)
    return Dataset(
        BitMatrix.from_dense(inputs[:, :width]),
        BitVector.from_bits(labels),
        DatasetMeta(width, tau_out, f"bkw(a={a},b={b})"),
        secret,
    )
