"""
Domain objects: packed GF(2) vectors and matrices, LPN instances and
datasets, and MLP weights.
"""

from lpnkit.models.bits import BitMatrix, BitVector
from lpnkit.models.lpn import Dataset, DatasetMeta, LpnInstance
from lpnkit.models.mlp import Layer, MlpWeights

__all__ = [
    # GF(2)
    "BitVector",
    "BitMatrix",
    # LPN
    "LpnInstance",
    "Dataset",
    "DatasetMeta",
    # Networks
    "Layer",
    "MlpWeights",
]
