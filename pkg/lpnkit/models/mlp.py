"""
Multi-layer perceptron weights.
"""

from dataclasses import dataclass, field

import numpy as np

from lpnkit.core.constants import ACTIVATIONS
from lpnkit.exceptions import DimensionMismatchError, DomainError


@dataclass
class Layer:
    """
    One affine map followed by an activation.

    Attributes:
        weight: Matrix of shape (out, in)
        bias: Vector of shape (out,)
        activation: Activation tag applied after the affine map
    """

    weight: np.ndarray = field(repr=False)
    bias: np.ndarray = field(repr=False)
    activation: str

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise DomainError(f"Unknown activation '{self.activation}'")
        if self.weight.ndim != 2 or self.bias.shape != (self.weight.shape[0],):
            raise DimensionMismatchError(
                f"Bias of shape {self.bias.shape} does not fit weight of shape {self.weight.shape}"
            )

    @property
    def fan_in(self) -> int:
        return int(self.weight.shape[1])

    @property
    def fan_out(self) -> int:
        return int(self.weight.shape[0])


@dataclass
class MlpWeights:
    """
    Ordered layers of an MLP; also used to hold gradients of the same shapes.

    Attributes:
        layers: Layers from input to output
    """

    layers: list[Layer]

    def __post_init__(self):
        if not self.layers:
            raise DimensionMismatchError("An MLP needs at least one layer")
        for previous, current in zip(self.layers, self.layers[1:]):
            if current.fan_in != previous.fan_out:
                raise DimensionMismatchError(
                    f"Layer expecting {current.fan_in} inputs follows a layer with {previous.fan_out} outputs"
                )

    @property
    def input_width(self) -> int:
        return self.layers[0].fan_in

    @property
    def hidden_width(self) -> int:
        return self.layers[0].fan_out

    @property
    def depth(self) -> int:
        """Number of hidden layers."""
        return len(self.layers) - 1

    @property
    def dtype(self) -> np.dtype:
        return self.layers[0].weight.dtype

    @property
    def activations(self) -> list[str]:
        return [layer.activation for layer in self.layers]

    def parameters(self) -> list[np.ndarray]:
        """Flat list ``[W1, b1, W2, b2, ...]``; the arrays are shared, not copied."""
        arrays: list[np.ndarray] = []
        for layer in self.layers:
            arrays.extend((layer.weight, layer.bias))
        return arrays

    def with_parameters(self, arrays: list[np.ndarray]) -> "MlpWeights":
        """New weights with the same activations and the given arrays."""
        if len(arrays) != 2 * len(self.layers):
            raise DimensionMismatchError(f"Expected {2 * len(self.layers)} arrays, got {len(arrays)}")
        layers = []
        for index, layer in enumerate(self.layers):
            weight, bias = arrays[2 * index], arrays[2 * index + 1]
            if weight.shape != layer.weight.shape or bias.shape != layer.bias.shape:
                raise DimensionMismatchError("Parameter shapes do not match the model")
            layers.append(Layer(weight, bias, layer.activation))
        return MlpWeights(layers)

    def parameter_count(self) -> int:
        return int(sum(array.size for array in self.parameters()))

    def astype(self, dtype: type) -> "MlpWeights":
        return self.with_parameters([array.astype(dtype) for array in self.parameters()])

    def copy(self) -> "MlpWeights":
        return self.with_parameters([array.copy() for array in self.parameters()])

    def zeros_like(self) -> "MlpWeights":
        return self.with_parameters([np.zeros_like(array) for array in self.parameters()])

    def allclose(self, other: "MlpWeights", atol: float = 0.0) -> bool:
        if self.activations != other.activations:
            return False
        return all(
            a.shape == b.shape and np.allclose(a, b, rtol=0.0, atol=atol)
            for a, b in zip(self.parameters(), other.parameters())
        )

    def __repr__(self) -> str:
        dims = [self.input_width] + [layer.fan_out for layer in self.layers]
        return f"<MlpWeights(dims={dims}, activations={self.activations})>"
