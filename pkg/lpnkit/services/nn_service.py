"""
Forward and backward passes for the MLP.

Implements the activations (ReLU, sigmoid, cosine, identity), the losses
(zero-one, logistic, MAE, MSE), L1/L2 regularizers, Kaiming-uniform
initialization of the base model, and the explicit parity network that
computes s^t x mod 2 with one ReLU layer of width n.

Training runs at float32; gradient checks pass float64 models through
the same code.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from lpnkit.core.constants import ACTIVATIONS, DEFAULT_DEPTH, LOSSES, MAX_DEPTH, REGULARIZERS
from lpnkit.exceptions import DimensionMismatchError, DomainError, UnsupportedLossError
from lpnkit.models.bits import BitVector
from lpnkit.models.mlp import Layer, MlpWeights

logger = logging.getLogger(__name__)


# ============================================================================
# ACTIVATIONS
# ============================================================================


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # exp of a non-positive argument never overflows
    x = np.asarray(x)
    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def activation_eval(tag: str, x: np.ndarray | float) -> np.ndarray | float:
    """Apply an activation elementwise."""
    if tag == "relu":
        return np.maximum(x, 0)
    if tag == "sigmoid":
        value = _sigmoid(x)
        return float(value) if value.ndim == 0 else value
    if tag == "cosine":
        return np.cos(x)
    if tag == "identity":
        return x
    raise DomainError(f"Unknown activation '{tag}'")


def activation_grad(tag: str, x: np.ndarray | float) -> np.ndarray | float:
    """Derivative of an activation at the pre-activation ``x``; relu'(0) is 0."""
    x = np.asarray(x)
    if tag == "relu":
        return (x > 0).astype(x.dtype if x.dtype.kind == "f" else np.float64)
    if tag == "sigmoid":
        s = _sigmoid(x)
        return s * (1.0 - s)
    if tag == "cosine":
        return -np.sin(x)
    if tag == "identity":
        return np.ones_like(x, dtype=x.dtype if x.dtype.kind == "f" else np.float64)
    raise DomainError(f"Unknown activation '{tag}'")


# ============================================================================
# LOSSES
# ============================================================================


def _check_loss(loss: str) -> None:
    if loss not in LOSSES:
        raise DomainError(f"Unknown loss '{loss}'")


def _check_labels(label: np.ndarray) -> None:
    if np.any((label != 0) & (label != 1)):
        raise DomainError("Labels must be 0 or 1")


def loss_eval(loss: str, prediction: np.ndarray | float, label: np.ndarray | float) -> np.ndarray | float:
    """
    Per-sample loss of a prediction in [0, 1] against a 0/1 label.

    Raises:
        DomainError: For an unknown loss, non-binary labels, or a logistic
            prediction outside (0, 1)
    """
    _check_loss(loss)
    p = np.asarray(prediction, dtype=np.float64)
    y = np.asarray(label, dtype=np.float64)
    _check_labels(y)
    if loss == "zero_one":
        value = ((p > 0.5).astype(np.float64) != y).astype(np.float64)
    elif loss == "logistic":
        if np.any((p <= 0.0) | (p >= 1.0)):
            raise DomainError("Logistic loss needs predictions strictly inside (0, 1)")
        value = -y * np.log(p) - (1.0 - y) * np.log1p(-p)
    elif loss == "mae":
        value = np.abs(p - y)
    else:
        value = (p - y) ** 2
    return float(value) if value.ndim == 0 else value


def logistic_from_logits(logits: np.ndarray, label: np.ndarray) -> np.ndarray:
    """Logistic loss of sigmoid(logits), computed as softplus(z) - y z."""
    z = np.asarray(logits, dtype=np.float64)
    return np.logaddexp(0.0, z) - np.asarray(label, dtype=np.float64) * z


def loss_grad(loss: str, prediction: np.ndarray | float, label: np.ndarray | float) -> np.ndarray | float:
    """
    Derivative of the per-sample loss with respect to the prediction.

    Raises:
        UnsupportedLossError: For the zero-one loss
        DomainError: As in :func:`loss_eval`
    """
    _check_loss(loss)
    if loss == "zero_one":
        raise UnsupportedLossError(loss)
    p = np.asarray(prediction)
    y = np.asarray(label, dtype=p.dtype if p.dtype.kind == "f" else np.float64)
    _check_labels(y)
    if loss == "logistic":
        if np.any((p <= 0.0) | (p >= 1.0)):
            raise DomainError("Logistic loss needs predictions strictly inside (0, 1)")
        value = (p - y) / (p * (1.0 - p))
    elif loss == "mae":
        value = np.sign(p - y)
    else:
        value = 2.0 * (p - y)
    return float(value) if np.ndim(value) == 0 else value


# ============================================================================
# REGULARIZERS
# ============================================================================


@dataclass(frozen=True)
class Regularizer:
    """Weight penalty: ``none``, ``l1`` (lambda * sum |w|) or ``l2`` ((lambda / 2) * sum w^2)."""

    tag: str = "none"
    lam: float = 0.0

    def __post_init__(self):
        if self.tag not in REGULARIZERS:
            raise DomainError(f"Unknown regularizer '{self.tag}'")
        if self.lam < 0:
            raise DomainError(f"Regularization factor must be non-negative, got {self.lam}")


NO_REGULARIZER = Regularizer()


def regularizer_eval(reg: Regularizer, weights: MlpWeights) -> float:
    """Penalty over every weight matrix and bias vector."""
    if reg.tag == "none" or reg.lam == 0.0:
        return 0.0
    arrays = weights.parameters()
    if reg.tag == "l1":
        return reg.lam * float(sum(np.abs(a).sum(dtype=np.float64) for a in arrays))
    return 0.5 * reg.lam * float(sum(np.square(a, dtype=np.float64).sum() for a in arrays))


def regularizer_grad(reg: Regularizer, weights: MlpWeights) -> list[np.ndarray] | None:
    """Gradient of the penalty, or None when it is identically zero."""
    if reg.tag == "none" or reg.lam == 0.0:
        return None
    if reg.tag == "l1":
        return [(reg.lam * np.sign(a)).astype(a.dtype) for a in weights.parameters()]
    return [(reg.lam * a).astype(a.dtype) for a in weights.parameters()]


# ============================================================================
# MODEL CONSTRUCTION
# ============================================================================


def _kaiming_layer(fan_out: int, fan_in: int, activation: str, rng: np.random.Generator, dtype: type) -> Layer:
    bound = math.sqrt(6.0 / fan_in)
    weight = rng.uniform(-bound, bound, size=(fan_out, fan_in)).astype(dtype)
    bias = rng.uniform(-bound, bound, size=fan_out).astype(dtype)
    return Layer(weight, bias, activation)


def build_base_model(
    n: int,
    width: int,
    rng: np.random.Generator,
    depth: int = DEFAULT_DEPTH,
    activation: str = "relu",
    dtype: type = np.float32,
) -> MlpWeights:
    """
    Build the base model: ``depth`` hidden layers of ``width`` units and one sigmoid output.

    Every weight and bias is drawn uniformly from (-sqrt(6 / fan_in), +sqrt(6 / fan_in)).

    Args:
        n: Input dimension
        width: Hidden width
        rng: Initialization stream
        depth: Number of hidden layers (1 to 3)
        activation: Hidden activation
        dtype: Floating point type of the parameters

    Raises:
        DomainError: For non-positive sizes, unsupported depth or unknown activation
    """
    if n < 1 or width < 1:
        raise DomainError(f"Input dimension and width must be positive, got n={n}, width={width}")
    if not 1 <= depth <= MAX_DEPTH:
        raise DomainError(f"Depth must lie in [1, {MAX_DEPTH}], got {depth}")
    if activation not in ACTIVATIONS:
        raise DomainError(f"Unknown activation '{activation}'")
    layers = []
    fan_in = n
    for _ in range(depth):
        layers.append(_kaiming_layer(width, fan_in, activation, rng, dtype))
        fan_in = width
    layers.append(_kaiming_layer(1, fan_in, "sigmoid", rng, dtype))
    return MlpWeights(layers)


def parity_output_weights(n: int) -> list[int]:
    """
    Output weights making sum_i w_i relu(k - i) equal k mod 2 for k = 0..n.

    Follows w_i = (i mod 2) - sum_{j < i} w_j (i - j + 1) with 1-based i,
    which gives (1, -2, 2, -2, ...).
    """
    weights: list[int] = []
    for i in range(1, n + 1):
        weights.append(i % 2 - sum(w * (i - j + 1) for j, w in enumerate(weights, start=1)))
    return weights


def build_parity_network(secret: BitVector, sharpness: float | None = None) -> MlpWeights:
    """
    Exact parity network for ``secret``.

    Hidden unit i computes relu(s^t x - i) for i = 0..n-1; the linear output
    combines them into s^t x mod 2. With ``sharpness`` k, a sigmoid unit
    sigmoid(k * (out - 1/2)) is appended so the model maps into (0, 1).

    Args:
        secret: Secret s of length n >= 1
        sharpness: Optional output steepness k > 0

    Returns:
        float64 weights
    """
    n = secret.length
    if n < 1:
        raise DomainError("Parity network needs n >= 1")
    s = secret.to_bits().astype(np.float64)
    hidden = Layer(np.tile(s, (n, 1)), -np.arange(n, dtype=np.float64), "relu")
    output = Layer(
        np.array([parity_output_weights(n)], dtype=np.float64),
        np.zeros(1, dtype=np.float64),
        "identity",
    )
    layers = [hidden, output]
    if sharpness is not None:
        if sharpness <= 0:
            raise DomainError("Sharpness must be positive")
        layers.append(Layer(np.array([[sharpness]], dtype=np.float64), np.array([-sharpness / 2.0]), "sigmoid"))
    return MlpWeights(layers)


# ============================================================================
# FORWARD / BACKWARD
# ============================================================================


def _as_batch(model: MlpWeights, inputs: np.ndarray) -> np.ndarray:
    x = np.asarray(inputs)
    if x.ndim == 1:
        x = x[np.newaxis, :]
    if x.ndim != 2 or x.shape[1] != model.input_width:
        raise DimensionMismatchError(
            f"Model expects {model.input_width} inputs per row, got shape {np.shape(inputs)}"
        )
    return x.astype(model.dtype, copy=False)


def forward_cache(model: MlpWeights, inputs: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """
    Forward pass keeping intermediates.

    Returns:
        (pre_activations, activations) where ``activations[0]`` is the input
        and ``activations[i + 1]`` is the output of layer i
    """
    a = _as_batch(model, inputs)
    pre: list[np.ndarray] = []
    post: list[np.ndarray] = [a]
    for layer in model.layers:
        z = a @ layer.weight.T + layer.bias
        a = activation_eval(layer.activation, z)
        pre.append(z)
        post.append(a)
    return pre, post


def forward(model: MlpWeights, inputs: np.ndarray) -> np.ndarray:
    """
    Model output for each row of ``inputs``.

    Returns:
        Vector of shape (B,) for a single-output model
    """
    _, post = forward_cache(model, inputs)
    out = post[-1]
    return out[:, 0] if out.shape[1] == 1 else out


def forward_logits(model: MlpWeights, inputs: np.ndarray) -> np.ndarray:
    """Output-layer pre-activation for each row."""
    pre, _ = forward_cache(model, inputs)
    return pre[-1][:, 0]


def batch_loss(
    model: MlpWeights,
    inputs: np.ndarray,
    labels: np.ndarray,
    loss: str,
    reg: Regularizer = NO_REGULARIZER,
) -> float:
    """Mean batch loss plus the regularization penalty."""
    if loss == "logistic" and model.layers[-1].activation == "sigmoid":
        values = logistic_from_logits(forward_logits(model, inputs), labels)
    else:
        values = np.asarray(loss_eval(loss, forward(model, inputs), labels))
    return float(values.mean(dtype=np.float64)) + regularizer_eval(reg, model)


def backward(
    model: MlpWeights,
    inputs: np.ndarray,
    labels: np.ndarray,
    loss: str,
    reg: Regularizer = NO_REGULARIZER,
    normalizer: int | None = None,
) -> MlpWeights:
    """
    Gradient of the mean batch loss plus regularizer.

    Args:
        model: Current weights
        inputs: Batch of shape (B, n)
        labels: Batch labels of shape (B,)
        loss: Differentiable loss tag
        reg: Regularizer
        normalizer: Divisor of the summed loss (defaults to B); lets callers
            accumulate one mean gradient over several chunks

    Returns:
        Gradients packed as MlpWeights of the same shapes

    Raises:
        UnsupportedLossError: For the zero-one loss
    """
    _check_loss(loss)
    if loss == "zero_one":
        raise UnsupportedLossError(loss)
    pre, post = forward_cache(model, inputs)
    dtype = model.dtype
    y = np.asarray(labels, dtype=dtype).reshape(-1, 1)
    scale = 1.0 / (normalizer if normalizer is not None else y.shape[0])
    last = model.layers[-1]
    prediction = post[-1]
    if loss == "logistic" and last.activation == "sigmoid":
        delta = (prediction - y) * dtype.type(scale)
    else:
        delta = np.asarray(loss_grad(loss, prediction, y), dtype=dtype) * dtype.type(scale)
        delta = delta * activation_grad(last.activation, pre[-1])

    grads: list[np.ndarray] = [np.empty(0)] * (2 * len(model.layers))
    for index in range(len(model.layers) - 1, -1, -1):
        layer = model.layers[index]
        grads[2 * index] = (delta.T @ post[index]).astype(dtype, copy=False)
        grads[2 * index + 1] = delta.sum(axis=0, dtype=np.float64).astype(dtype)
        if index:
            below = model.layers[index - 1]
            delta = (delta @ layer.weight) * activation_grad(below.activation, pre[index - 1])

    penalty = regularizer_grad(reg, model)
    if penalty is not None:
        grads = [g + p for g, p in zip(grads, penalty)]
    return model.with_parameters(grads)


def output_sensitivity(model: MlpWeights, inputs: np.ndarray) -> list[float]:
    """
    Largest per-sample |d model(x) / d w| over the rows of ``inputs``, per parameter block.

    Used as the constant C of the gradient-concentration bound.
    """
    pre, post = forward_cache(model, inputs)
    delta = activation_grad(model.layers[-1].activation, pre[-1]).astype(np.float64)
    bounds: list[float] = [0.0] * (2 * len(model.layers))
    for index in range(len(model.layers) - 1, -1, -1):
        layer = model.layers[index]
        delta_max = np.abs(delta).max(axis=1)
        input_max = np.abs(post[index]).max(axis=1)
        bounds[2 * index] = float((delta_max * input_max).max(initial=0.0))
        bounds[2 * index + 1] = float(delta_max.max(initial=0.0))
        if index:
            below = model.layers[index - 1]
            delta = (delta @ layer.weight.astype(np.float64)) * activation_grad(below.activation, pre[index - 1])
    return bounds


def predict_bits(model: MlpWeights, inputs: np.ndarray) -> np.ndarray:
    """Rounded predictions; an output of exactly 0.5 rounds to 0."""
    return (forward(model, inputs) > 0.5).astype(np.uint8)
