"""
Linear algebra over GF(2) on packed matrices.

Elimination works row-wise on the packed words, so one pivot step XORs
whole 64-column chunks at once. Pivot choice is the first row (from the
current position down) with the column bit set, which keeps every result
a deterministic function of the input.
"""

import logging

import numpy as np

from lpnkit.exceptions import DimensionMismatchError, RankDeficientError, SingularMatrixError
from lpnkit.models.bits import WORD_BITS, BitMatrix, BitVector, words_for

logger = logging.getLogger(__name__)


def dot_parity(a: BitVector, b: BitVector) -> int:
    """
    Inner product of two bit vectors over GF(2).

    Raises:
        DimensionMismatchError: If lengths differ
    """
    if a.length != b.length:
        raise DimensionMismatchError(f"Bit lengths differ: {a.length} != {b.length}")
    return int(np.bitwise_count(a.words & b.words).sum()) & 1


def row_reduce(words: np.ndarray, ncols: int) -> tuple[np.ndarray, list[int]]:
    """
    Gauss-Jordan reduction of packed rows over the first ``ncols`` columns.

    Args:
        words: (rows, nwords) uint64 array; not modified
        ncols: Number of leading columns to pivot on

    Returns:
        Reduced copy of ``words`` and the list of pivot columns; pivot ``k``
        sits in row ``k``
    """
    reduced = np.array(words, dtype=np.uint64, copy=True)
    nrows = reduced.shape[0]
    pivots: list[int] = []
    rank = 0
    for col in range(ncols):
        if rank == nrows:
            break
        word, bit = divmod(col, WORD_BITS)
        column = (reduced[:, word] >> np.uint64(bit)) & np.uint64(1)
        below = np.flatnonzero(column[rank:])
        if below.size == 0:
            continue
        pivot_row = rank + int(below[0])
        if pivot_row != rank:
            reduced[[rank, pivot_row]] = reduced[[pivot_row, rank]]
            column[[rank, pivot_row]] = column[[pivot_row, rank]]
        column[rank] = 0
        targets = column.astype(bool)
        if targets.any():
            reduced[targets] ^= reduced[rank]
        pivots.append(col)
        rank += 1
    return reduced, pivots


def rank(matrix: BitMatrix) -> int:
    """Rank of a matrix over GF(2)."""
    if matrix.rows == 0 or matrix.cols == 0:
        return 0
    _, pivots = row_reduce(matrix.words, matrix.cols)
    return len(pivots)


def _augment(matrix: BitMatrix, column: np.ndarray) -> np.ndarray:
    """Append one 0/1 column to the packed rows of ``matrix``."""
    n = matrix.cols
    words = np.array(matrix.words, dtype=np.uint64, copy=True)
    if words_for(n + 1) > words.shape[1]:
        words = np.concatenate([words, np.zeros((words.shape[0], 1), dtype=np.uint64)], axis=1)
    word, bit = divmod(n, WORD_BITS)
    words[:, word] |= np.asarray(column, dtype=np.uint64) << np.uint64(bit)
    return words


def solve_rows(inputs: BitMatrix, labels: BitVector) -> BitVector:
    """
    Solve ``inputs · s = labels`` for a square system (one equation per row).

    Raises:
        DimensionMismatchError: If the system is not square or labels do not match
        SingularMatrixError: If the rows are linearly dependent
    """
    n = inputs.cols
    if inputs.rows != n:
        raise DimensionMismatchError(f"Expected a square system, got {inputs.rows}x{n}")
    if labels.length != n:
        raise DimensionMismatchError(f"Expected {n} labels, got {labels.length}")
    reduced, pivots = row_reduce(_augment(inputs, labels.to_bits()), n)
    if len(pivots) < n:
        raise SingularMatrixError(f"System has rank {len(pivots)} < {n}")
    word, bit = divmod(n, WORD_BITS)
    solution = ((reduced[:, word] >> np.uint64(bit)) & np.uint64(1)).astype(np.uint8)
    return BitVector.from_bits(solution)


def gauss_solve(matrix: BitMatrix, y: BitVector) -> BitVector:
    """
    Solve ``s^t · A = y^t`` over GF(2); the columns of A are the samples.

    Args:
        matrix: Square matrix A
        y: Right-hand side, one bit per column of A

    Returns:
        The unique solution s, checked by re-multiplication

    Raises:
        DimensionMismatchError: If A is not square
        SingularMatrixError: If A is not invertible
    """
    if matrix.rows != matrix.cols:
        raise DimensionMismatchError(f"Expected a square matrix, got {matrix.rows}x{matrix.cols}")
    transposed = matrix.transpose()
    solution = solve_rows(transposed, y)
    if transposed.parity_with(solution) != y:
        raise SingularMatrixError("Solution failed re-multiplication check")
    return solution


def invert(matrix: BitMatrix) -> BitMatrix:
    """
    Inverse of a square matrix over GF(2).

    Raises:
        DimensionMismatchError: If the matrix is not square
        SingularMatrixError: If the matrix is singular
    """
    n = matrix.rows
    if n != matrix.cols:
        raise DimensionMismatchError(f"Expected a square matrix, got {matrix.rows}x{matrix.cols}")
    augmented = BitMatrix.from_dense(np.concatenate([matrix.to_dense(), np.eye(n, dtype=np.uint8)], axis=1))
    reduced, pivots = row_reduce(augmented.words, n)
    if len(pivots) < n:
        raise SingularMatrixError(f"Matrix has rank {len(pivots)} < {n}")
    dense = BitMatrix(n, 2 * n, reduced).to_dense()
    return BitMatrix.from_dense(dense[:, n:])


def matmul(left: BitMatrix, right: BitMatrix) -> BitMatrix:
    """
    Matrix product over GF(2).

    Sums of at most ``left.cols`` ones are exact in float64, so the product
    goes through BLAS and is reduced mod 2 afterwards.
    """
    if left.cols != right.rows:
        raise DimensionMismatchError(
            f"Cannot multiply {left.rows}x{left.cols} by {right.rows}x{right.cols}"
        )
    product = left.to_dense().astype(np.float64) @ right.to_dense().astype(np.float64)
    return BitMatrix.from_dense(np.remainder(product, 2.0).astype(np.uint8))


def _to_int(vector: BitVector) -> int:
    return int.from_bytes(vector.to_bytes(), "little")


def select_invertible_block(matrix: BitMatrix) -> tuple[list[int], BitMatrix]:
    """
    Pick the first n linearly independent columns of an n x m matrix.

    Columns are scanned left to right and kept whenever they raise the rank.

    Args:
        matrix: n x m matrix with m >= n

    Returns:
        Selected column indices (ascending) and the inverse of that n x n block

    Raises:
        DimensionMismatchError: If m < n
        RankDeficientError: If the matrix has rank below n
    """
    n, m = matrix.rows, matrix.cols
    if m < n:
        raise DimensionMismatchError(f"Need at least {n} columns, got {m}")
    columns = matrix.transpose()
    basis: list[tuple[int, int]] = []
    chosen: list[int] = []
    for index in range(m):
        vector = _to_int(columns.row(index))
        for pivot, reducer in basis:
            if (vector >> pivot) & 1:
                vector ^= reducer
        if vector:
            basis.append((vector.bit_length() - 1, vector))
            chosen.append(index)
            if len(chosen) == n:
                break
    if len(chosen) < n:
        raise RankDeficientError(len(chosen), n)
    block = columns.take_rows(chosen).transpose()
    logger.debug("Selected invertible block from columns %s", chosen)
    return chosen, invert(block)
