"""
SGD and Adam updates with weight decay folded into the gradient.

Both optimizers compute ``dW = lambda * W + g`` first. Adam uses the
textbook recursions with step-dependent bias correction.
"""

from dataclasses import dataclass, field

import numpy as np

from lpnkit.core.constants import ADAM_BETA1, ADAM_BETA2, ADAM_EPS, OPTIMIZERS
from lpnkit.exceptions import DimensionMismatchError, DomainError
from lpnkit.models.mlp import MlpWeights


@dataclass
class OptimizerState:
    """
    Optimizer hyperparameters and running state.

    Attributes:
        tag: ``sgd`` or ``adam``
        lr: Learning rate (eta)
        weight_decay: Decay factor (lambda) added as lambda * W to the gradient
        beta1, beta2, eps: Adam constants
        first_moment, second_moment: Adam moments, zero until the first step
        step: Number of updates applied so far
    """

    tag: str
    lr: float
    weight_decay: float = 0.0
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    eps: float = ADAM_EPS
    first_moment: list[np.ndarray] | None = field(default=None, repr=False)
    second_moment: list[np.ndarray] | None = field(default=None, repr=False)
    step: int = 0

    def __post_init__(self):
        if self.tag not in OPTIMIZERS:
            raise DomainError(f"Unknown optimizer '{self.tag}'")
        if self.lr < 0:
            raise DomainError(f"Learning rate must be non-negative, got {self.lr}")
        if self.weight_decay < 0:
            raise DomainError(f"Weight decay must be non-negative, got {self.weight_decay}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise DomainError("Adam betas must lie in [0, 1)")
        if self.eps <= 0:
            raise DomainError("Adam epsilon must be positive")


def _decayed_gradient(state: OptimizerState, weights: MlpWeights, grads: MlpWeights) -> list[np.ndarray]:
    params, gradients = weights.parameters(), grads.parameters()
    if len(params) != len(gradients) or any(p.shape != g.shape for p, g in zip(params, gradients)):
        raise DimensionMismatchError("Gradient shapes do not match the weights")
    if state.weight_decay == 0.0:
        return gradients
    return [state.weight_decay * p + g for p, g in zip(params, gradients)]


def sgd_update(state: OptimizerState, weights: MlpWeights, grads: MlpWeights) -> MlpWeights:
    """Return ``W - lr * (lambda * W + g)`` for every parameter array."""
    directions = _decayed_gradient(state, weights, grads)
    state.step += 1
    return weights.with_parameters(
        [(p - state.lr * d).astype(p.dtype, copy=False) for p, d in zip(weights.parameters(), directions)]
    )


def adam_update(state: OptimizerState, weights: MlpWeights, grads: MlpWeights) -> MlpWeights:
    """
    One Adam step; the moments in ``state`` are updated in place.

    Returns:
        New weights ``W - lr * m_hat / (sqrt(v_hat) + eps)``
    """
    directions = _decayed_gradient(state, weights, grads)
    params = weights.parameters()
    if state.first_moment is None or state.second_moment is None:
        state.first_moment = [np.zeros_like(p) for p in params]
        state.second_moment = [np.zeros_like(p) for p in params]
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1 ** state.step
    correction2 = 1.0 - b2 ** state.step
    updated = []
    for index, (p, d) in enumerate(zip(params, directions)):
        m = state.first_moment[index]
        v = state.second_moment[index]
        m *= b1
        m += (1.0 - b1) * d
        v *= b2
        v += (1.0 - b2) * np.square(d)
        m_hat = m / correction1
        v_hat = v / correction2
        updated.append((p - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)).astype(p.dtype, copy=False))
    return weights.with_parameters(updated)


def apply_update(state: OptimizerState, weights: MlpWeights, grads: MlpWeights) -> MlpWeights:
    """Dispatch to the optimizer named by ``state.tag``."""
    if state.tag == "sgd":
        return sgd_update(state, weights, grads)
    return adam_update(state, weights, grads)
