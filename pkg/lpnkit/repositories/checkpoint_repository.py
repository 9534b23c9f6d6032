"""
Repository for model checkpoints in the MLP1 format.

Layout (little-endian): magic "MLP1", u32 layer count, then per layer a
header (u32 out, u32 in, u8 activation tag) immediately followed by that
layer's weight matrix (row-major) and bias as 32-bit floats.
"""

import logging
import struct
from pathlib import Path

import numpy as np

from lpnkit.core.constants import ACTIVATION_TAGS, CHECKPOINT_MAGIC
from lpnkit.exceptions import CheckpointFormatError, DimensionMismatchError
from lpnkit.models.mlp import Layer, MlpWeights

logger = logging.getLogger(__name__)

PREAMBLE = struct.Struct("<4sI")
LAYER_HEADER = struct.Struct("<IIB")
ACTIVATION_BY_TAG = {tag: name for name, tag in ACTIVATION_TAGS.items()}


class CheckpointRepository:
    """
    Reads and writes MLP1 checkpoints; weights are stored at float32.
    """

    def encode(self, model: MlpWeights) -> bytes:
        chunks = [PREAMBLE.pack(CHECKPOINT_MAGIC, len(model.layers))]
        for layer in model.layers:
            chunks.append(LAYER_HEADER.pack(layer.fan_out, layer.fan_in, ACTIVATION_TAGS[layer.activation]))
            chunks.append(np.ascontiguousarray(layer.weight, dtype="<f4").tobytes())
            chunks.append(np.ascontiguousarray(layer.bias, dtype="<f4").tobytes())
        return b"".join(chunks)

    def decode(self, data: bytes) -> MlpWeights:
        """
        Parse checkpoint bytes.

        Raises:
            CheckpointFormatError: On a bad magic, unknown activation tag,
                truncated data or trailing bytes
        """
        if len(data) < PREAMBLE.size:
            raise CheckpointFormatError("Checkpoint is too short")
        magic, count = PREAMBLE.unpack_from(data, 0)
        if magic != CHECKPOINT_MAGIC:
            raise CheckpointFormatError(f"Not an MLP1 checkpoint (magic {magic!r})")
        if count == 0:
            raise CheckpointFormatError("Checkpoint has no layers")
        offset = PREAMBLE.size
        layers = []
        for _ in range(count):
            if offset + LAYER_HEADER.size > len(data):
                raise CheckpointFormatError("Checkpoint truncated in a layer header")
            fan_out, fan_in, tag = LAYER_HEADER.unpack_from(data, offset)
            offset += LAYER_HEADER.size
            if tag not in ACTIVATION_BY_TAG:
                raise CheckpointFormatError(f"Unknown activation tag {tag}")
            values = fan_out * fan_in + fan_out
            if offset + 4 * values > len(data):
                raise CheckpointFormatError("Checkpoint truncated in layer parameters")
            params = np.frombuffer(data, dtype="<f4", count=values, offset=offset).astype(np.float32)
            offset += 4 * values
            weight = params[: fan_out * fan_in].reshape(fan_out, fan_in)
            layers.append(Layer(weight, params[fan_out * fan_in:], ACTIVATION_BY_TAG[tag]))
        if offset != len(data):
            raise CheckpointFormatError(f"{len(data) - offset} trailing bytes after the last layer")
        try:
            return MlpWeights(layers)
        except DimensionMismatchError as exc:
            raise CheckpointFormatError(f"Layer chain is inconsistent: {exc}") from exc

    def save(self, model: MlpWeights, path: str | Path) -> Path:
        path = Path(path)
        path.write_bytes(self.encode(model))
        logger.info("Saved checkpoint %r to %s", model, path)
        return path

    def load(self, path: str | Path) -> MlpWeights:
        return self.decode(Path(path).read_bytes())
