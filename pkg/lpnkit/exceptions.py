"""
Custom exceptions for the toolkit.

Defines the domain-specific failures raised by the GF(2), LPN, network and
solver layers. The CLI maps them onto exit codes.
"""


class LpnkitError(Exception):
    """Base class for every toolkit error."""

    def __init__(self, message: str = "LPN toolkit error"):
        self.message = message
        super().__init__(self.message)


class DimensionMismatchError(LpnkitError):
    """Raised when operand shapes or bit lengths do not agree."""

    def __init__(self, message: str = "Dimension mismatch"):
        super().__init__(message)


class SingularMatrixError(LpnkitError):
    """Raised when a square GF(2) system has no unique solution."""

    def __init__(self, message: str = "Matrix is singular over GF(2)"):
        super().__init__(message)


class RankDeficientError(LpnkitError):
    """Raised when a matrix does not contain an invertible n x n block."""

    def __init__(self, rank: int, needed: int):
        self.rank = rank
        self.needed = needed
        super().__init__(
            f"Matrix has rank {rank} but {needed} independent columns are required; "
            f"provide more samples"
        )


class DomainError(LpnkitError):
    """Raised when a value lies outside the domain of a function or parameter."""

    def __init__(self, message: str = "Value outside of domain"):
        super().__init__(message)


class UnsupportedLossError(LpnkitError):
    """Raised when a gradient is requested for an evaluation-only loss."""

    def __init__(self, loss: str):
        self.loss = loss
        super().__init__(f"Loss '{loss}' has no gradient and cannot be used for training")


class EmptyDatasetError(LpnkitError):
    """Raised when an operation needs at least one sample."""

    def __init__(self, message: str = "Dataset is empty"):
        super().__init__(message)


class ConfigurationError(LpnkitError):
    """Raised when a training or experiment configuration is inconsistent."""

    def __init__(self, message: str = "Invalid configuration"):
        super().__init__(message)


class SampleStarvationError(LpnkitError):
    """Raised when a BKW round runs out of samples."""

    def __init__(self, round_index: int, remaining: int):
        self.round_index = round_index
        self.remaining = remaining
        super().__init__(
            f"BKW round {round_index} left {remaining} samples; provide more input samples"
        )


class PoolTooSmallError(LpnkitError):
    """Raised when a pooled Gaussian pool cannot supply n samples."""

    def __init__(self, pool_size: int, n: int):
        self.pool_size = pool_size
        self.n = n
        super().__init__(f"Pool of {pool_size} samples is too small for dimension {n}")


class InsufficientSamplesError(LpnkitError):
    """Raised when a solver receives fewer samples than it requires."""

    def __init__(self, message: str = "Not enough samples"):
        super().__init__(message)


class DatasetFormatError(LpnkitError):
    """Raised when a dataset file is not a valid LPN1 file."""

    def __init__(self, message: str = "Invalid LPN1 dataset file"):
        super().__init__(message)


class CheckpointFormatError(LpnkitError):
    """Raised when a weight checkpoint is not a valid MLP1 file."""

    def __init__(self, message: str = "Invalid MLP1 checkpoint file"):
        super().__init__(message)


class UsageError(LpnkitError):
    """Raised when the command line combination is not meaningful."""

    def __init__(self, message: str = "Invalid command usage"):
        super().__init__(message)
