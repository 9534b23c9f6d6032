"""
Unit tests for the packed GF(2) vector and matrix types.
"""

import numpy as np
import pytest

from lpnkit.exceptions import DimensionMismatchError
from lpnkit.models.bits import BitMatrix, BitVector, pack_bits, unpack_bits, words_for


class TestPacking:
    """Test suite for word packing helpers."""

    def test_words_for_rounds_up_to_whole_words(self):
        """
        Test that word counts round up at 64-bit boundaries.

        Arrange: Bit counts around a word boundary
        Act: Call words_for()
        Assert: 0, 1 and 2 words as expected
        """
        # Arrange / Act / Assert
        assert words_for(0) == 0
        assert words_for(1) == 1
        assert words_for(64) == 1
        assert words_for(65) == 2

    def test_pack_bits_is_little_endian_within_a_word(self):
        """
        Test that bit i lands at position i % 64 of word i // 64.

        Arrange: Bits with positions 0, 3 and 64 set
        Act: Pack and unpack
        Assert: Word values match the positions and unpacking restores the bits
        """
        # Arrange
        bits = np.zeros(70, dtype=np.uint8)
        bits[[0, 3, 64]] = 1

        # Act
        words = pack_bits(bits)

        # Assert
        assert words.dtype == np.uint64
        assert int(words[0]) == 0b1001
        assert int(words[1]) == 1
        assert np.array_equal(unpack_bits(words, 70), bits)


class TestBitVector:
    """Test suite for BitVector."""

    def test_from_string_reads_leftmost_character_as_bit_zero(self):
        """
        Test that "1011" sets bits 0, 2 and 3.

        Arrange: A bit string
        Act: Build the vector
        Assert: Indexing, popcount and str round-trip agree
        """
        # Arrange / Act
        vector = BitVector.from_string("1011")

        # Assert
        assert len(vector) == 4
        assert [vector[i] for i in range(4)] == [1, 0, 1, 1]
        assert vector[-1] == 1
        assert vector.popcount() == 3
        assert str(vector) == "1011"

    def test_bytes_follow_the_lpn1_bit_order(self):
        """
        Test that bit i is bit (i mod 8) of byte i // 8.

        Arrange: A 9-bit vector with bits 0 and 8 set
        Act: Encode to bytes and hex, decode again
        Assert: Two bytes 0x01 0x01 and equal vectors after decoding
        """
        # Arrange
        vector = BitVector.from_string("100000001")

        # Act
        data = vector.to_bytes()

        # Assert
        assert data == b"\x01\x01"
        assert vector.to_hex() == "0101"
        assert BitVector.from_bytes(data, 9) == vector
        assert BitVector.from_hex("0101", 9) == vector

    def test_from_bytes_rejects_wrong_byte_count(self):
        """
        Test that decoding checks the byte count.

        Arrange: Three bytes for a 9-bit vector
        Act: Decode
        Assert: DimensionMismatchError raised
        """
        # Arrange / Act / Assert
        with pytest.raises(DimensionMismatchError):
            BitVector.from_bytes(b"\x00\x00\x00", 9)

    def test_nonzero_padding_is_rejected(self):
        """
        Test that bits past the logical length must be zero.

        Arrange: Word 0b1000 for a 3-bit vector
        Act: Construct the vector
        Assert: DimensionMismatchError raised
        """
        # Arrange / Act / Assert
        with pytest.raises(DimensionMismatchError):
            BitVector(3, np.array([8], dtype=np.uint64))

    def test_xor_and_and_work_bitwise(self):
        """
        Test the GF(2) addition and the bitwise product.

        Arrange: Two 4-bit vectors
        Act: XOR and AND them
        Assert: Results match the bitwise truth tables
        """
        # Arrange
        a = BitVector.from_string("1100")
        b = BitVector.from_string("1010")

        # Act / Assert
        assert a ^ b == BitVector.from_string("0110")
        assert a & b == BitVector.from_string("1000")

    def test_operations_on_different_lengths_fail(self):
        """
        Test that mixing lengths raises.

        Arrange: Vectors of lengths 3 and 4
        Act: XOR them
        Assert: DimensionMismatchError raised
        """
        # Arrange / Act / Assert
        with pytest.raises(DimensionMismatchError):
            BitVector.from_string("101") ^ BitVector.from_string("1010")

    def test_index_out_of_range_raises(self):
        """Test that indexing past the end raises IndexError."""
        # Arrange
        vector = BitVector.zeros(5)

        # Act / Assert
        with pytest.raises(IndexError):
            vector[5]

    def test_concat_and_slice(self):
        """
        Test joining and cutting vectors.

        Arrange: Vectors "10" and "011"
        Act: Concatenate and slice
        Assert: Bits in the expected order
        """
        # Arrange
        joined = BitVector.from_string("10").concat(BitVector.from_string("011"))

        # Act / Assert
        assert str(joined) == "10011"
        assert str(joined.slice(1, 4)) == "001"

    def test_vectors_are_hashable_and_immutable(self):
        """
        Test that equal vectors hash alike and storage is read-only.

        Arrange: Two equal vectors
        Act: Put them in a set and try to write the storage
        Assert: One set element; ValueError on write
        """
        # Arrange
        a = BitVector.from_string("0110")
        b = BitVector.from_bits([0, 1, 1, 0])

        # Act / Assert
        assert len({a, b}) == 1
        with pytest.raises(ValueError):
            a.words[0] = 1


class TestBitMatrix:
    """Test suite for BitMatrix."""

    def test_dense_round_trip_across_word_boundary(self, rng):
        """
        Test that packing a 5 x 130 matrix is lossless.

        Arrange: Random dense matrix
        Act: Pack and unpack
        Assert: Same bits and three words per row
        """
        # Arrange
        dense = rng.integers(0, 2, size=(5, 130), dtype=np.uint8)

        # Act
        matrix = BitMatrix.from_dense(dense)

        # Assert
        assert matrix.shape == (5, 130)
        assert matrix.words.shape == (5, 3)
        assert np.array_equal(matrix.to_dense(), dense)

    def test_parity_with_matches_dense_product(self, rng):
        """
        Test that row parities equal (A s) mod 2.

        Arrange: Random 40 x 100 matrix and secret
        Act: Compute parity_with()
        Assert: Matches the dense integer product reduced mod 2
        """
        # Arrange
        dense = rng.integers(0, 2, size=(40, 100), dtype=np.uint8)
        secret_bits = rng.integers(0, 2, size=100, dtype=np.uint8)

        # Act
        parity = BitMatrix.from_dense(dense).parity_with(BitVector.from_bits(secret_bits))

        # Assert
        expected = (dense.astype(np.int64) @ secret_bits.astype(np.int64)) % 2
        assert np.array_equal(parity.to_bits(), expected)

    def test_parity_with_rejects_wrong_vector_length(self):
        """Test that the vector length must equal the column count."""
        # Arrange
        matrix = BitMatrix.zeros(2, 4)

        # Act / Assert
        with pytest.raises(DimensionMismatchError):
            matrix.parity_with(BitVector.zeros(5))

    def test_empty_matrix_has_empty_parity(self):
        """
        Test that a matrix without rows is valid.

        Arrange: 0 x 5 dense input
        Act: Pack and multiply
        Assert: Zero-length parity
        """
        # Arrange
        matrix = BitMatrix.from_dense(np.zeros((0, 5), dtype=np.uint8))

        # Act / Assert
        assert matrix.rows == 0
        assert matrix.parity_with(BitVector.zeros(5)).length == 0

    def test_transpose_and_take_rows(self):
        """
        Test transposition and row selection with repeats.

        Arrange: 2 x 3 matrix
        Act: Transpose; take rows [1, 1, 0]
        Assert: Dense results match numpy
        """
        # Arrange
        dense = np.array([[1, 0, 1], [0, 1, 1]], dtype=np.uint8)
        matrix = BitMatrix.from_dense(dense)

        # Act / Assert
        assert np.array_equal(matrix.transpose().to_dense(), dense.T)
        assert np.array_equal(matrix.take_rows([1, 1, 0]).to_dense(), dense[[1, 1, 0]])
        assert matrix.row(1) == BitVector.from_string("011")

    def test_vstack_requires_equal_columns(self):
        """Test that stacking checks the column count."""
        # Arrange
        top = BitMatrix.identity(3)

        # Act
        stacked = top.vstack(BitMatrix.zeros(2, 3))

        # Assert
        assert stacked.shape == (5, 3)
        with pytest.raises(DimensionMismatchError):
            top.vstack(BitMatrix.zeros(1, 4))

    def test_from_rows_rejects_ragged_rows(self):
        """Test that all rows must share one length."""
        # Arrange
        rows = [BitVector.from_string("10"), BitVector.from_string("101")]

        # Act / Assert
        with pytest.raises(DimensionMismatchError):
            BitMatrix.from_rows(rows)
