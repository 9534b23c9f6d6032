"""
Seeded random streams.

Every experiment has one integer seed. Components draw from sub-streams keyed
by labels ("secret", "data", "init", "sampler", trial indices...) so that each
component can be reproduced on its own.
"""

import hashlib

import numpy as np


def _label_key(label: str | int) -> int:
    """Map a label onto a stable 32-bit integer (independent of PYTHONHASHSEED)."""
    if isinstance(label, int):
        return label & 0xFFFFFFFF
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "little")


class RngStreams:
    """
    Factory of independent numpy generators derived from one seed.

    Attributes:
        seed: Root experiment seed
        prefix: Labels prepended to every derived stream
    """

    def __init__(self, seed: int, prefix: tuple[str | int, ...] = ()):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.seed = seed
        self.prefix = prefix

    def stream(self, *labels: str | int) -> np.random.Generator:
        """
        Derive the generator for a labeled sub-stream.

        Args:
            *labels: Labels identifying the component, e.g. ("init", 3)

        Returns:
            A fresh generator; equal labels always give equal streams
        """
        key = tuple(_label_key(label) for label in (*self.prefix, *labels))
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=key)))

    def child(self, *labels: str | int) -> "RngStreams":
        """Return a stream factory whose streams are nested under the given labels."""
        return RngStreams(self.seed, (*self.prefix, *labels))

    def __repr__(self) -> str:
        return f"<RngStreams(seed={self.seed}, prefix={self.prefix})>"
