"""
LPN instances and datasets.
"""

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from lpnkit.exceptions import DimensionMismatchError, DomainError
from lpnkit.models.bits import BitMatrix, BitVector


def check_noise_rate(tau: float) -> float:
    """
    Validate a noise rate.

    Rate 0 is accepted as the noiseless limit; 0.5 and above carry no signal.

    Raises:
        DomainError: If tau is outside [0, 0.5)
    """
    if not 0.0 <= tau < 0.5:
        raise DomainError(f"Noise rate must lie in [0, 0.5), got {tau}")
    return float(tau)


@dataclass
class LpnInstance:
    """
    An LPN problem with (optionally) known secret and its own sample stream.

    Attributes:
        n: Secret dimension
        tau: Bernoulli noise rate
        secret: Ground truth, harness-only; None for external data
        rng: Generator feeding the oracle sampler
    """

    n: int
    tau: float
    secret: BitVector | None
    rng: np.random.Generator = field(repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"Dimension must be positive, got {self.n}")
        self.tau = check_noise_rate(self.tau)
        if self.secret is not None and self.secret.length != self.n:
            raise DimensionMismatchError(
                f"Secret of length {self.secret.length} does not match dimension {self.n}"
            )

    @cached_property
    def support(self) -> np.ndarray:
        """Indices of the secret's set bits."""
        if self.secret is None:
            raise DomainError("Instance has no secret")
        return np.flatnonzero(self.secret.to_bits())


@dataclass(frozen=True)
class DatasetMeta:
    """Provenance of a dataset: dimension, nominal noise rate and a source tag."""

    n: int
    tau: float
    source: str = "generated"


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Labeled LPN samples.

    Attributes:
        inputs: m x n matrix, one sample per row
        labels: m label bits
        meta: Provenance metadata
        secret: Effective secret when the harness knows it
    """

    inputs: BitMatrix
    labels: BitVector
    meta: DatasetMeta
    secret: BitVector | None = None

    def __post_init__(self):
        if self.inputs.rows != self.labels.length:
            raise DimensionMismatchError(
                f"{self.inputs.rows} input rows but {self.labels.length} labels"
            )
        if self.meta.n != self.inputs.cols:
            raise DimensionMismatchError(
                f"Metadata dimension {self.meta.n} does not match {self.inputs.cols} columns"
            )
        if self.secret is not None and self.secret.length != self.meta.n:
            raise DimensionMismatchError("Secret length does not match the dataset dimension")

    @classmethod
    def from_dense(
        cls,
        inputs: np.ndarray,
        labels: np.ndarray,
        tau: float,
        source: str = "generated",
        secret: BitVector | None = None,
    ) -> "Dataset":
        """Build a dataset from dense 0/1 arrays."""
        matrix = BitMatrix.from_dense(inputs)
        return cls(matrix, BitVector.from_bits(np.asarray(labels, dtype=np.uint8)), DatasetMeta(matrix.cols, tau, source), secret)

    @property
    def n(self) -> int:
        return self.meta.n

    @property
    def size(self) -> int:
        return self.inputs.rows

    def __len__(self) -> int:
        return self.inputs.rows

    @cached_property
    def dense_inputs(self) -> np.ndarray:
        """uint8 array of shape (m, n), read-only."""
        dense = self.inputs.to_dense()
        dense.flags.writeable = False
        return dense

    @cached_property
    def dense_labels(self) -> np.ndarray:
        """uint8 array of shape (m,), read-only."""
        dense = self.labels.to_bits()
        dense.flags.writeable = False
        return dense

    def take(self, indices: np.ndarray) -> "Dataset":
        """Rows at ``indices`` (repeats allowed)."""
        index = np.asarray(indices, dtype=np.intp)
        return Dataset(
            self.inputs.take_rows(index),
            BitVector.from_bits(self.dense_labels[index]),
            self.meta,
            self.secret,
        )

    def slice(self, start: int, stop: int) -> "Dataset":
        return Dataset(
            self.inputs.slice_rows(start, stop),
            BitVector.from_bits(self.dense_labels[start:stop]),
            self.meta,
            self.secret,
        )

    def with_source(self, source: str) -> "Dataset":
        return replace(self, meta=replace(self.meta, source=source))

    def without_secret(self) -> "Dataset":
        return replace(self, secret=None)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.inputs == other.inputs
            and self.labels == other.labels
            and self.meta.n == other.meta.n
            and self.meta.tau == other.meta.tau
            and self.secret == other.secret
        )

    __hash__ = None
