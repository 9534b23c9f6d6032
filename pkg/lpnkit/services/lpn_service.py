"""
LPN instance generation and dataset-level reductions.

Provides secret sampling, the oracle and clean-test-set generators, the
sparse-secret transform (and its inverse for secret recovery), and the
bit-guess / suffix-enumeration reductions used by the restricted and
hybrid solvers.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from lpnkit.exceptions import DimensionMismatchError, DomainError, EmptyDatasetError, InsufficientSamplesError
from lpnkit.models.bits import BitMatrix, BitVector
from lpnkit.models.lpn import Dataset, DatasetMeta, LpnInstance, check_noise_rate
from lpnkit.services import gf2_service

logger = logging.getLogger(__name__)


def sparse_weight(n: int, tau: float) -> int:
    """Hamming weight floor(n * tau), robust to float round-off such as 0.29 * 100."""
    return math.floor(n * tau + 1e-9)


def sample_secret(n: int, tau: float, rng: np.random.Generator, weight: int | None = None) -> BitVector:
    """
    Draw a uniformly random secret of exact Hamming weight.

    Args:
        n: Dimension
        tau: Noise rate; sets the default weight floor(n * tau)
        rng: Random generator
        weight: Explicit weight overriding the default sparsity

    Returns:
        Secret of length n

    Raises:
        DomainError: If the weight does not fit in [0, n]
    """
    w = sparse_weight(n, tau) if weight is None else weight
    if not 0 <= w <= n:
        raise DomainError(f"Secret weight {w} must lie in [0, {n}]")
    bits = np.zeros(n, dtype=np.uint8)
    if w:
        bits[rng.choice(n, size=w, replace=False)] = 1
    return BitVector.from_bits(bits)


def sample_uniform_secret(n: int, rng: np.random.Generator) -> BitVector:
    """Draw a secret uniformly from {0,1}^n."""
    return BitVector.from_bits(rng.integers(0, 2, size=n, dtype=np.uint8))


def create_instance(
    n: int,
    tau: float,
    secret_rng: np.random.Generator,
    data_rng: np.random.Generator,
    weight: int | None = None,
    uniform: bool = False,
) -> LpnInstance:
    """
    Create an instance with a fresh secret.

    Args:
        n: Dimension
        tau: Noise rate
        secret_rng: Stream used for the secret only
        data_rng: Stream the oracle sampler draws from
        weight: Optional sparsity override
        uniform: Draw a uniform secret instead of a fixed-weight one
    """
    check_noise_rate(tau)
    secret = sample_uniform_secret(n, secret_rng) if uniform else sample_secret(n, tau, secret_rng, weight)
    return LpnInstance(n=n, tau=tau, secret=secret, rng=data_rng)


def parity_of(inputs: np.ndarray, support: np.ndarray) -> np.ndarray:
    """Parity of each dense row restricted to the secret support."""
    if support.size == 0:
        return np.zeros(inputs.shape[0], dtype=np.uint8)
    return np.bitwise_xor.reduce(inputs[:, support], axis=1).astype(np.uint8)


def draw_samples(instance: LpnInstance, count: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Draw dense oracle samples.

    Returns:
        (inputs, labels) as uint8 arrays of shapes (count, n) and (count,)
    """
    if instance.secret is None:
        raise DomainError("Oracle sampling requires an instance with a secret")
    inputs = instance.rng.integers(0, 2, size=(count, instance.n), dtype=np.uint8)
    noise = (instance.rng.random(count) < instance.tau).astype(np.uint8)
    return inputs, parity_of(inputs, instance.support) ^ noise


def oracle_get_data(instance: LpnInstance, batch_size: int) -> Dataset:
    """
    Draw ``batch_size`` fresh i.i.d. LPN samples from the instance oracle.
    """
    inputs, labels = draw_samples(instance, batch_size)
    return Dataset.from_dense(inputs, labels, instance.tau, "oracle", instance.secret)


def generate_dataset(instance: LpnInstance, m: int, chunk_rows: int = 1 << 18) -> Dataset:
    """
    Draw an m-row dataset in chunks so the dense intermediate stays small.
    """
    if m < 0:
        raise DomainError("Sample count must be non-negative")
    blocks: list[BitMatrix] = []
    labels: list[np.ndarray] = []
    for start in range(0, m, chunk_rows):
        inputs, chunk_labels = draw_samples(instance, min(chunk_rows, m - start))
        blocks.append(BitMatrix.from_dense(inputs))
        labels.append(chunk_labels)
    if not blocks:
        matrix = BitMatrix.zeros(0, instance.n)
        label_bits = np.zeros(0, dtype=np.uint8)
    else:
        matrix = BitMatrix(m, instance.n, np.concatenate([b.words for b in blocks]))
        label_bits = np.concatenate(labels)
    return Dataset(matrix, BitVector.from_bits(label_bits), DatasetMeta(instance.n, instance.tau, "generated"), instance.secret)


def batch_get_data(dataset: Dataset, batch_size: int, rng: np.random.Generator) -> Dataset:
    """
    Draw ``batch_size`` rows i.i.d. with replacement from ``dataset``.

    Raises:
        EmptyDatasetError: If the dataset has no rows
    """
    if dataset.size == 0:
        raise EmptyDatasetError("Cannot sample from an empty dataset")
    return dataset.take(rng.integers(0, dataset.size, size=batch_size))


def make_clean_testset(secret: BitVector, count: int, rng: np.random.Generator) -> Dataset:
    """Uniform inputs labeled with their exact parity under ``secret``."""
    inputs = rng.integers(0, 2, size=(count, secret.length), dtype=np.uint8)
    labels = parity_of(inputs, np.flatnonzero(secret.to_bits()))
    return Dataset.from_dense(inputs, labels, 0.0, "clean", secret)


@dataclass(frozen=True, eq=False)
class SparseBlockInfo:
    """
    Bookkeeping of the sparse-secret transform.

    Attributes:
        consumed: Dataset row indices forming the invertible block A1
        block_inverse: Inverse of A1 (columns of A1 are the consumed samples)
        consumed_labels: Labels y1 of the consumed rows
        remaining: Row indices that make up the transformed dataset, in order
    """

    consumed: list[int]
    block_inverse: BitMatrix
    consumed_labels: BitVector
    remaining: np.ndarray


def sparse_secret_transform(dataset: Dataset) -> tuple[Dataset, SparseBlockInfo]:
    """
    Turn an LPN dataset into one whose secret is the error of n consumed samples.

    With A = inputs^t split into an invertible block A1 and the rest A2,
    the output has inputs (A1^{-1} A2)^t and labels y1^t A1^{-1} A2 + y2^t.

    Returns:
        Transformed dataset of m - n rows and the block info needed to map a
        recovered error block back to the original secret

    Raises:
        InsufficientSamplesError: If m <= n
        RankDeficientError: If no n independent rows exist
    """
    n, m = dataset.n, dataset.size
    if m <= n:
        raise InsufficientSamplesError(f"Sparse-secret transform needs more than {n} samples, got {m}")
    consumed, block_inverse = gf2_service.select_invertible_block(dataset.inputs.transpose())
    mask = np.ones(m, dtype=bool)
    mask[consumed] = False
    remaining = np.flatnonzero(mask)

    consumed_labels = BitVector.from_bits(dataset.dense_labels[consumed])
    rest = dataset.inputs.take_rows(remaining)
    # rows of the new input matrix are columns of A1^{-1} A2, i.e. X_rest (A1^{-1})^t
    new_inputs = gf2_service.matmul(rest, block_inverse.transpose())
    new_labels = new_inputs.parity_with(consumed_labels) ^ BitVector.from_bits(dataset.dense_labels[remaining])

    effective_secret = None
    if dataset.secret is not None:
        consumed_rows = dataset.inputs.take_rows(consumed)
        effective_secret = consumed_rows.parity_with(dataset.secret) ^ consumed_labels

    logger.debug("Sparse-secret transform consumed rows %s", consumed)
    transformed = Dataset(
        new_inputs,
        new_labels,
        DatasetMeta(n, dataset.meta.tau, f"sparse({dataset.meta.source})"),
        effective_secret,
    )
    return transformed, SparseBlockInfo(consumed, block_inverse, consumed_labels, remaining)


def recover_original_secret(info: SparseBlockInfo, transformed_secret: BitVector) -> BitVector:
    """
    Map the error block e1 recovered on the transformed problem back to s.

    Uses s^t = (y1 + e1)^t A1^{-1}.
    """
    if transformed_secret.length != info.consumed_labels.length:
        raise DimensionMismatchError("Recovered secret length does not match the consumed block")
    return info.block_inverse.transpose().parity_with(info.consumed_labels ^ transformed_secret)


def _reduced_secret(dataset: Dataset, suffix: np.ndarray) -> BitVector | None:
    if dataset.secret is None:
        return None
    bits = dataset.secret.to_bits()
    k = suffix.shape[0]
    if np.array_equal(bits[dataset.n - k:], suffix):
        return BitVector.from_bits(bits[: dataset.n - k])
    return None


def enumerate_suffix(dataset: Dataset, k: int, suffix: np.ndarray | list[int]) -> Dataset:
    """
    Fix the last k secret coordinates to a guess and drop them.

    ``suffix[j]`` is the guess for coordinate ``n - k + j``. Each label is XORed
    with the parity of the dropped input bits against the guess, so a correct
    guess yields an LPN dataset of dimension n - k with the same noise rate.

    Raises:
        DimensionMismatchError: If k >= n or the suffix length differs from k
    """
    n = dataset.n
    guess = np.asarray(suffix, dtype=np.uint8).reshape(-1)
    if not 0 <= k < n:
        raise DimensionMismatchError(f"Suffix width must lie in [0, {n}), got {k}")
    if guess.shape[0] != k:
        raise DimensionMismatchError(f"Suffix has {guess.shape[0]} bits, expected {k}")
    if k == 0:
        return dataset
    dense = dataset.dense_inputs
    correction = parity_of(dense[:, n - k:], np.flatnonzero(guess))
    labels = dataset.dense_labels ^ correction
    return Dataset(
        BitMatrix.from_dense(dense[:, : n - k]),
        BitVector.from_bits(labels),
        DatasetMeta(n - k, dataset.meta.tau, dataset.meta.source),
        _reduced_secret(dataset, guess),
    )


def guess_transform(dataset: Dataset, guess: int) -> Dataset:
    """
    Guess the last secret bit and drop the last coordinate.

    Raises:
        DimensionMismatchError: If n < 2
    """
    if dataset.n < 2:
        raise DimensionMismatchError("Guess transform needs dimension at least 2")
    return enumerate_suffix(dataset, 1, [guess & 1])


def suffix_bits(value: int, k: int) -> np.ndarray:
    """Bits of the enumeration integer: ``suffix[j] = (value >> j) & 1``."""
    return np.array([(value >> j) & 1 for j in range(k)], dtype=np.uint8)


def label_flip_rate(dataset: Dataset, secret: BitVector) -> float:
    """Fraction of labels disagreeing with the parity under ``secret``."""
    if dataset.size == 0:
        raise EmptyDatasetError()
    parity = dataset.inputs.parity_with(secret).to_bits()
    return float(np.mean(parity != dataset.dense_labels))
