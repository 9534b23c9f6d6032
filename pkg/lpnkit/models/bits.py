"""
Bit-packed vectors and matrices over GF(2).

Bits are stored in unsigned 64-bit words, little-endian within a word:
bit ``i`` of a vector lives in word ``i // 64`` at position ``i % 64``.
Matrices are row-major, one packed vector per row. Padding bits past the
logical length are always zero, so AND + popcount never sees garbage.
"""

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from lpnkit.exceptions import DimensionMismatchError

WORD_BITS = 64


def words_for(nbits: int) -> int:
    """Number of 64-bit words needed to hold ``nbits`` bits."""
    return (nbits + WORD_BITS - 1) // WORD_BITS


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """
    Pack a 0/1 array along its last axis into little-endian uint64 words.

    Args:
        bits: Array of shape (..., nbits) holding 0/1 values

    Returns:
        Array of shape (..., words_for(nbits)) and dtype uint64
    """
    bits = np.asarray(bits, dtype=np.uint8)
    nbits = bits.shape[-1]
    nwords = words_for(nbits)
    pad = nwords * WORD_BITS - nbits
    if pad:
        widths = [(0, 0)] * (bits.ndim - 1) + [(0, pad)]
        bits = np.pad(bits, widths)
    packed = np.ascontiguousarray(np.packbits(bits & 1, axis=-1, bitorder="little"))
    return packed.view(np.dtype("<u8")).astype(np.uint64)


def unpack_bits(words: np.ndarray, nbits: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`; returns a uint8 0/1 array of shape (..., nbits)."""
    raw = np.ascontiguousarray(np.asarray(words, dtype=np.uint64).astype(np.dtype("<u8"))).view(np.uint8)
    return np.unpackbits(raw, axis=-1, count=nbits, bitorder="little")


def _freeze(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class BitVector:
    """
    Packed vector over GF(2).

    Attributes:
        length: Number of logical bits
        words: uint64 storage, read-only
    """

    length: int
    words: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.length < 0:
            raise DimensionMismatchError("BitVector length must be non-negative")
        words = np.asarray(self.words, dtype=np.uint64).reshape(-1)
        if words.shape[0] != words_for(self.length):
            raise DimensionMismatchError(
                f"{words.shape[0]} words cannot hold exactly {self.length} bits"
            )
        tail = self.length % WORD_BITS
        if tail and int(words[-1]) >> tail:
            raise DimensionMismatchError("Padding bits past the vector length must be zero")
        object.__setattr__(self, "words", _freeze(words.copy()))

    @classmethod
    def from_bits(cls, bits: Iterable[int] | np.ndarray) -> "BitVector":
        """Build a vector from a sequence of 0/1 values (index 0 first)."""
        array = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.uint8)
        if array.ndim != 1:
            raise DimensionMismatchError("BitVector.from_bits expects a one-dimensional input")
        return cls(int(array.shape[0]), pack_bits(array))

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        """Build a vector from a string such as ``"1011"`` (leftmost character is bit 0)."""
        return cls.from_bits([1 if ch == "1" else 0 for ch in text.strip()])

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, np.zeros(words_for(length), dtype=np.uint64))

    @classmethod
    def from_bytes(cls, data: bytes, length: int) -> "BitVector":
        """Decode ``ceil(length / 8)`` little-endian packed bytes."""
        needed = (length + 7) // 8
        if len(data) != needed:
            raise DimensionMismatchError(f"Expected {needed} bytes for {length} bits, got {len(data)}")
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), count=length, bitorder="little")
        return cls.from_bits(bits)

    @classmethod
    def from_hex(cls, text: str, length: int) -> "BitVector":
        return cls.from_bytes(bytes.fromhex(text), length)

    def to_bits(self) -> np.ndarray:
        """Dense uint8 0/1 copy of the vector."""
        return unpack_bits(self.words, self.length)

    def to_bytes(self) -> bytes:
        """Packed little-endian bytes, ``ceil(length / 8)`` of them."""
        return np.packbits(self.to_bits(), bitorder="little").tobytes()

    def to_hex(self) -> str:
        return self.to_bytes().hex()

    def popcount(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def concat(self, other: "BitVector") -> "BitVector":
        return BitVector.from_bits(np.concatenate([self.to_bits(), other.to_bits()]))

    def slice(self, start: int, stop: int) -> "BitVector":
        return BitVector.from_bits(self.to_bits()[start:stop])

    def _check_length(self, other: "BitVector") -> None:
        if self.length != other.length:
            raise DimensionMismatchError(
                f"Bit lengths differ: {self.length} != {other.length}"
            )

    def __xor__(self, other: "BitVector") -> "BitVector":
        self._check_length(other)
        return BitVector(self.length, self.words ^ other.words)

    def __and__(self, other: "BitVector") -> "BitVector":
        self._check_length(other)
        return BitVector(self.length, self.words & other.words)

    def __getitem__(self, index: int) -> int:
        if index < 0:
            index += self.length
        if not 0 <= index < self.length:
            raise IndexError("bit index out of range")
        word, bit = divmod(index, WORD_BITS)
        return int((int(self.words[word]) >> bit) & 1)

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.length == other.length and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.length, self.words.tobytes()))

    def __str__(self) -> str:
        return "".join(str(int(b)) for b in self.to_bits())


@dataclass(frozen=True, eq=False)
class BitMatrix:
    """
    Row-major packed matrix over GF(2); rows are samples, columns coordinates.

    Attributes:
        rows: Number of rows
        cols: Number of columns
        words: uint64 array of shape (rows, words_for(cols)), read-only
    """

    rows: int
    cols: int
    words: np.ndarray = field(repr=False)

    def __post_init__(self):
        words = np.asarray(self.words, dtype=np.uint64)
        expected = (self.rows, words_for(self.cols))
        if words.shape != expected:
            raise DimensionMismatchError(
                f"Storage shape {words.shape} does not match a {self.rows}x{self.cols} matrix"
            )
        tail = self.cols % WORD_BITS
        if tail and self.rows and np.any(words[:, -1] >> np.uint64(tail)):
            raise DimensionMismatchError("Padding bits past the last column must be zero")
        object.__setattr__(self, "words", _freeze(np.ascontiguousarray(words)))

    @classmethod
    def from_dense(cls, dense: np.ndarray | Sequence[Sequence[int]]) -> "BitMatrix":
        """Pack a (rows, cols) 0/1 array."""
        array = np.asarray(dense, dtype=np.uint8)
        if array.ndim != 2:
            raise DimensionMismatchError("BitMatrix.from_dense expects a two-dimensional input")
        rows, cols = array.shape
        return cls(rows, cols, pack_bits(array) if rows else np.zeros((0, words_for(cols)), np.uint64))

    @classmethod
    def from_rows(cls, rows: Sequence[BitVector]) -> "BitMatrix":
        if not rows:
            raise DimensionMismatchError("BitMatrix.from_rows needs at least one row")
        cols = rows[0].length
        for row in rows:
            if row.length != cols:
                raise DimensionMismatchError("All rows must have the same length")
        return cls(len(rows), cols, np.stack([row.words for row in rows]))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, words_for(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    def to_dense(self) -> np.ndarray:
        """Dense uint8 0/1 copy of shape (rows, cols)."""
        if self.rows == 0:
            return np.zeros((0, self.cols), dtype=np.uint8)
        return unpack_bits(self.words, self.cols)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def row(self, index: int) -> BitVector:
        return BitVector(self.cols, self.words[index])

    def take_rows(self, indices: np.ndarray | Sequence[int]) -> "BitMatrix":
        """Rows at ``indices`` (repeats allowed), in the given order."""
        index = np.asarray(indices, dtype=np.intp)
        return BitMatrix(int(index.shape[0]), self.cols, self.words[index])

    def slice_rows(self, start: int, stop: int) -> "BitMatrix":
        block = self.words[start:stop]
        return BitMatrix(int(block.shape[0]), self.cols, block)

    def take_columns(self, start: int, stop: int) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense()[:, start:stop])

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    def parity_with(self, vector: BitVector) -> BitVector:
        """
        Row-wise inner products with ``vector``.

        Returns:
            BitVector whose bit i is <row_i, vector> mod 2
        """
        if vector.length != self.cols:
            raise DimensionMismatchError(
                f"Vector of length {vector.length} cannot multiply {self.cols} columns"
            )
        if self.rows == 0:
            return BitVector.zeros(0)
        counts = np.bitwise_count(self.words & vector.words[np.newaxis, :]).sum(axis=1, dtype=np.uint64)
        return BitVector.from_bits((counts & np.uint64(1)).astype(np.uint8))

    def vstack(self, other: "BitMatrix") -> "BitMatrix":
        if other.cols != self.cols:
            raise DimensionMismatchError("Column counts differ")
        return BitMatrix(self.rows + other.rows, self.cols, np.concatenate([self.words, other.words]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __str__(self) -> str:
        return "\n".join("".join(str(int(b)) for b in row) for row in self.to_dense())
