"""
Repository for LPN datasets stored in the LPN1 binary format.

Layout (little-endian): magic "LPN1", u32 n, u64 m, f64 tau, u8 has_secret,
the secret as ceil(n/8) packed bytes when has_secret is 1, m rows of
ceil(n/8) packed bytes, then ceil(m/8) packed label bytes. Bit i of a packed
vector is bit (i mod 8) of byte i // 8.

The harness secret can also live in a sidecar ``<path>.key`` holding one
line of secret hex, so that a public file never carries it.
"""

import logging
import os
import struct
from pathlib import Path

import numpy as np

from lpnkit.core.constants import DATASET_MAGIC
from lpnkit.exceptions import DatasetFormatError, DimensionMismatchError
from lpnkit.models.bits import BitMatrix, BitVector, words_for
from lpnkit.models.lpn import Dataset, DatasetMeta

logger = logging.getLogger(__name__)

HEADER = struct.Struct("<4sIQdB")


def row_bytes(n: int) -> int:
    return (n + 7) // 8


def expected_file_size(n: int, m: int, has_secret: bool) -> int:
    """Size in bytes of an LPN1 file."""
    return HEADER.size + (row_bytes(n) if has_secret else 0) + m * row_bytes(n) + (m + 7) // 8


def key_path(path: str | Path) -> Path:
    """Sidecar key file of a dataset path."""
    return Path(f"{path}.key")


def _rows_to_bytes(matrix: BitMatrix) -> np.ndarray:
    raw = matrix.words.astype("<u8", copy=False).view(np.uint8)
    return raw.reshape(matrix.rows, words_for(matrix.cols) * 8)[:, : row_bytes(matrix.cols)]


def _bytes_to_rows(raw: np.ndarray, n: int) -> BitMatrix:
    m = raw.shape[0]
    padded = np.zeros((m, words_for(n) * 8), dtype=np.uint8)
    padded[:, : raw.shape[1]] = raw
    words = padded.view("<u8").astype(np.uint64).reshape(m, words_for(n))
    # bits past n in the last byte must be zero
    if n % 8 and m and np.any(raw[:, -1] >> (n % 8)):
        raise DatasetFormatError("Nonzero padding bits in a dataset row")
    return BitMatrix(m, n, words)


class DatasetRepository:
    """
    Reads and writes LPN1 files.
    """

    def __init__(self, use_mmap: bool = False):
        """
        Initialize repository.

        Args:
            use_mmap: Map row data from disk instead of reading it into memory
        """
        self.use_mmap = use_mmap

    def save(self, dataset: Dataset, path: str | Path, public: bool = False, write_key: bool = True) -> Path:
        """
        Write a dataset.

        Args:
            dataset: Dataset to store
            path: Destination file
            public: Omit the secret from the file (has_secret = 0)
            write_key: Also write the secret hex to ``<path>.key`` when the secret is known

        Returns:
            Path written
        """
        path = Path(path)
        has_secret = dataset.secret is not None and not public
        with open(path, "wb") as handle:
            handle.write(HEADER.pack(DATASET_MAGIC, dataset.n, dataset.size, float(dataset.meta.tau), int(has_secret)))
            if has_secret:
                handle.write(dataset.secret.to_bytes())
            handle.write(_rows_to_bytes(dataset.inputs).tobytes())
            handle.write(dataset.labels.to_bytes())
        if write_key and dataset.secret is not None:
            key_path(path).write_text(dataset.secret.to_hex() + "\n", encoding="utf-8")
        logger.info("Wrote %d samples of dimension %d to %s (secret in file: %s)", dataset.size, dataset.n, path, has_secret)
        return path

    def load(self, path: str | Path, with_key: bool = False) -> Dataset:
        """
        Read a dataset.

        Args:
            path: LPN1 file
            with_key: Attach the secret from the sidecar key file when the
                file itself has none

        Raises:
            DatasetFormatError: On a bad magic, truncated or oversized file
                or nonzero padding
        """
        path = Path(path)
        size = os.path.getsize(path)
        with open(path, "rb") as handle:
            head = handle.read(HEADER.size)
            if len(head) < HEADER.size:
                raise DatasetFormatError(f"{path} is too short for an LPN1 header")
            magic, n, m, tau, has_secret = HEADER.unpack(head)
            if magic != DATASET_MAGIC:
                raise DatasetFormatError(f"{path} is not an LPN1 file (magic {magic!r})")
            if has_secret not in (0, 1) or n < 1:
                raise DatasetFormatError(f"{path} has a malformed header")
            if size != expected_file_size(n, m, bool(has_secret)):
                raise DatasetFormatError(f"{path} has {size} bytes, expected {expected_file_size(n, m, bool(has_secret))}")
            secret = BitVector.from_bytes(handle.read(row_bytes(n)), n) if has_secret else None
            offset = handle.tell()
        rb = row_bytes(n)
        if self.use_mmap and m:
            raw = np.memmap(path, dtype=np.uint8, mode="r", offset=offset, shape=(m, rb))
        else:
            raw = np.fromfile(path, dtype=np.uint8, count=m * rb, offset=offset).reshape(m, rb)
        inputs = _bytes_to_rows(np.asarray(raw), n)
        label_data = np.fromfile(path, dtype=np.uint8, offset=offset + m * rb).tobytes()
        try:
            labels = BitVector.from_bytes(label_data, m)
        except DimensionMismatchError as exc:
            raise DatasetFormatError(f"{path} has malformed labels: {exc}") from exc
        if secret is None and with_key:
            secret = self.load_key(path, n)
        return Dataset(inputs, labels, DatasetMeta(n, float(tau), path.name), secret)

    def load_key(self, path: str | Path, n: int) -> BitVector | None:
        """Secret from the sidecar key file, or None when there is none."""
        sidecar = key_path(path)
        if not sidecar.exists():
            return None
        return BitVector.from_hex(sidecar.read_text(encoding="utf-8").strip(), n)
