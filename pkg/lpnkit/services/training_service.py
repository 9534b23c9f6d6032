"""
Gradient-based training loop, stop criteria and accuracy evaluation.

Also hosts the gradient-scaling probe: with the MAE loss, the gradient on
labels flipped with rate tau is, in expectation, (1 - 2 tau) times the
clean gradient; the probe measures how far a finite batch strays from that.
"""

import logging
import math
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from lpnkit.core.config import settings
from lpnkit.core.constants import DEFAULT_EVAL_INTERVAL
from lpnkit.exceptions import ConfigurationError, DomainError, EmptyDatasetError, UnsupportedLossError
from lpnkit.models.bits import unpack_bits
from lpnkit.models.lpn import Dataset, LpnInstance
from lpnkit.models.mlp import MlpWeights
from lpnkit.schemas.report import TracePoint, TrainReport
from lpnkit.services import lpn_service, nn_service
from lpnkit.services.nn_service import Regularizer
from lpnkit.services.optimizer_service import OptimizerState, apply_update
from lpnkit.services.sampler_service import Sampler

logger = logging.getLogger(__name__)


# ============================================================================
# STOP CRITERIA
# ============================================================================


class StopCriterion(ABC):
    """Base class; ``reason`` names the criterion in reports."""

    reason: str = ""

    @abstractmethod
    def fired(self, step: int, elapsed: float, accuracy: float | None) -> bool:
        """Whether training should stop before the next step."""


@dataclass
class ByTime(StopCriterion):
    """Stop once ``seconds`` of wall time have elapsed (checked between steps)."""

    seconds: float
    reason = "time"

    def __post_init__(self):
        if self.seconds <= 0:
            raise ConfigurationError("Time threshold must be positive")

    def fired(self, step: int, elapsed: float, accuracy: float | None) -> bool:
        return elapsed >= self.seconds


@dataclass
class ByStep(StopCriterion):
    """Stop after ``steps`` optimizer updates."""

    steps: int
    reason = "step"

    def __post_init__(self):
        if self.steps < 0:
            raise ConfigurationError("Step threshold must be non-negative")

    def fired(self, step: int, elapsed: float, accuracy: float | None) -> bool:
        return step >= self.steps


@dataclass
class ByAccuracy(StopCriterion):
    """Stop once accuracy on ``dataset`` reaches ``threshold``; evaluated every ``eval_interval`` steps."""

    dataset: Dataset | None
    threshold: float
    eval_interval: int = DEFAULT_EVAL_INTERVAL
    reason = "accuracy"

    def __post_init__(self):
        if not 0 < self.threshold <= 1:
            raise ConfigurationError("Accuracy threshold must lie in (0, 1]")
        if self.eval_interval < 1:
            raise ConfigurationError("Evaluation interval must be at least 1")

    def fired(self, step: int, elapsed: float, accuracy: float | None) -> bool:
        return accuracy is not None and accuracy >= self.threshold


# ============================================================================
# EVALUATION
# ============================================================================


def accuracy_on_arrays(model: MlpWeights, inputs: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of rows whose rounded prediction equals the label."""
    if inputs.shape[0] == 0:
        raise EmptyDatasetError("Cannot evaluate accuracy on zero rows")
    predictions = nn_service.predict_bits(model, inputs)
    return float(np.mean(predictions == np.asarray(labels).astype(np.uint8)))


def evaluate_accuracy(model: MlpWeights, dataset: Dataset, chunk_rows: int | None = None) -> float:
    """
    Accuracy of the rounded model on a dataset; outputs of exactly 0.5 round to 0.

    Rows are unpacked and evaluated in chunks of ``chunk_rows``.

    Raises:
        EmptyDatasetError: If the dataset has no rows
    """
    if dataset.size == 0:
        raise EmptyDatasetError("Cannot evaluate accuracy on an empty dataset")
    chunk = chunk_rows or settings.EVAL_CHUNK_ROWS
    labels = dataset.dense_labels
    correct = 0
    for start in range(0, dataset.size, chunk):
        stop = min(start + chunk, dataset.size)
        inputs = unpack_bits(dataset.inputs.words[start:stop], dataset.n)
        correct += int(np.count_nonzero(nn_service.predict_bits(model, inputs) == labels[start:stop]))
    return correct / dataset.size


# ============================================================================
# TRAINING LOOP
# ============================================================================


def run_training(
    model: MlpWeights,
    sampler: Sampler,
    loss: str,
    regularizer: Regularizer,
    optimizer: OptimizerState,
    stop: StopCriterion | Sequence[StopCriterion],
    eval_dataset: Dataset | None = None,
    eval_interval: int | None = None,
    clock: Callable[[], float] = time.perf_counter,
    on_trace: Callable[[TracePoint], None] | None = None,
) -> TrainReport:
    """
    Train until any stop criterion fires.

    Each step draws one batch, computes the gradient of the regularized loss
    and applies one optimizer update. Every ``eval_interval`` steps the train
    accuracy on the current batch and the test accuracy on the evaluation set
    are recorded.

    Args:
        model: Initial weights (not modified)
        sampler: Batch source
        loss: Differentiable loss tag
        regularizer: Explicit penalty
        optimizer: Optimizer state, advanced in place
        stop: One criterion or several; the first to fire ends training
        eval_dataset: Evaluation set when no ByAccuracy criterion supplies one
        eval_interval: Evaluation cadence; defaults to the ByAccuracy cadence
        clock: Time source in seconds
        on_trace: Callback receiving each trace point

    Returns:
        TrainReport with final weights

    Raises:
        ConfigurationError: If a ByAccuracy criterion has no dataset
        UnsupportedLossError: If the loss has no gradient
    """
    criteria = [stop] if isinstance(stop, StopCriterion) else list(stop)
    if not criteria:
        raise ConfigurationError("At least one stop criterion is required")
    by_accuracy = [c for c in criteria if isinstance(c, ByAccuracy)]
    for criterion in by_accuracy:
        if criterion.dataset is None:
            raise ConfigurationError("Stop-by-accuracy needs an evaluation dataset")
    evaluation = by_accuracy[0].dataset if by_accuracy else eval_dataset
    interval = eval_interval or (by_accuracy[0].eval_interval if by_accuracy else DEFAULT_EVAL_INTERVAL)
    if loss == "zero_one":
        raise UnsupportedLossError(loss)

    dtype = model.dtype.type
    weights = model
    trace: list[TracePoint] = []
    step = 0
    last_accuracy: float | None = None
    start = clock()
    inputs = labels = None

    def record() -> None:
        nonlocal last_accuracy
        train_acc = accuracy_on_arrays(weights, inputs, labels) if inputs is not None else None
        test_acc = evaluate_accuracy(weights, evaluation) if evaluation is not None else None
        point = TracePoint(step=step, wall_ms=(clock() - start) * 1000.0, train_acc=train_acc, test_acc=test_acc)
        trace.append(point)
        last_accuracy = test_acc
        if on_trace is not None:
            on_trace(point)
        logger.debug("step %d train_acc=%s test_acc=%s", step, train_acc, test_acc)

    logger.info("Training started: loss=%s optimizer=%s lr=%g", loss, optimizer.tag, optimizer.lr)
    while True:
        elapsed = clock() - start
        reason = next((c.reason for c in criteria if c.fired(step, elapsed, last_accuracy)), None)
        if reason is not None:
            break
        inputs, labels = sampler.get_batch(dtype)
        grads = nn_service.backward(weights, inputs, labels, loss, regularizer)
        weights = apply_update(optimizer, weights, grads)
        step += 1
        if step % interval == 0:
            record()

    if step and (not trace or trace[-1].step != step):
        record()
    wall = clock() - start
    logger.info("Training stopped after %d steps (%s) in %.2fs", step, reason, wall)
    return TrainReport(steps=step, wall_seconds=max(wall, 0.0), trace=trace, stop_reason=reason, weights=weights)


# ============================================================================
# GRADIENT SCALING
# ============================================================================


@dataclass
class ProbeResult:
    """Clean and noisy MAE gradients on shared inputs and their scaled deviation per block."""

    clean: MlpWeights
    noisy: MlpWeights
    deviation: list[float]


def gradient_scaling_probe(
    model: MlpWeights,
    instance: LpnInstance,
    batch_size: int,
    tau: float,
    chunk_rows: int | None = None,
) -> ProbeResult:
    """
    Compare MAE gradients on clean labels and on the same labels flipped with rate tau.

    Inputs are drawn from the instance oracle; both gradients use the same
    rows and are computed at float64. The deviation of block w is
    ||grad_noisy(w) / (1 - 2 tau) - grad_clean(w)||_2.

    Raises:
        DomainError: If tau is not in [0, 0.5) or the instance has no secret
    """
    if not 0.0 <= tau < 0.5:
        raise DomainError(f"Noise rate must lie in [0, 0.5), got {tau}")
    if instance.secret is None:
        raise DomainError("Gradient probe needs an instance with a secret")
    reference = model.astype(np.float64)
    clean = [np.zeros_like(p) for p in reference.parameters()]
    noisy = [np.zeros_like(p) for p in reference.parameters()]
    chunk = chunk_rows or settings.EVAL_CHUNK_ROWS
    for start in range(0, batch_size, chunk):
        rows = min(chunk, batch_size - start)
        inputs = instance.rng.integers(0, 2, size=(rows, instance.n), dtype=np.uint8).astype(np.float64)
        clean_labels = lpn_service.parity_of(inputs.astype(np.uint8), instance.support)
        flips = (instance.rng.random(rows) < tau).astype(np.uint8)
        g_clean = nn_service.backward(reference, inputs, clean_labels, "mae", normalizer=batch_size)
        g_noisy = nn_service.backward(reference, inputs, clean_labels ^ flips, "mae", normalizer=batch_size)
        for acc, g in zip(clean, g_clean.parameters()):
            acc += g
        for acc, g in zip(noisy, g_noisy.parameters()):
            acc += g
    scale = 1.0 / (1.0 - 2.0 * tau)
    deviation = [float(np.linalg.norm(scale * gn - gc)) for gn, gc in zip(noisy, clean)]
    return ProbeResult(reference.with_parameters(clean), reference.with_parameters(noisy), deviation)


def gradient_bound_constant(model: MlpWeights, inputs: np.ndarray) -> float:
    """Empirical C: largest |d model(x) / d w| over the given rows and all parameter blocks."""
    return max(nn_service.output_sensitivity(model.astype(np.float64), np.asarray(inputs, dtype=np.float64)))


def gradient_deviation_bound(n: int, width: int, tau: float, batch_size: int, bound: float, confidence: float = 0.99) -> float:
    """
    Deviation level the concentration bound guarantees with the given confidence.

    Solves 8 n d exp(-eps^2 (1 - 2 tau)^2 B / (2 n d C^2)) = 1 - confidence for eps.
    """
    if not 0.0 <= tau < 0.5:
        raise DomainError(f"Noise rate must lie in [0, 0.5), got {tau}")
    if not 0.0 < confidence < 1.0:
        raise DomainError("Confidence must lie in (0, 1)")
    entries = n * width
    return math.sqrt(
        2.0 * entries * bound**2 * math.log(8.0 * entries / (1.0 - confidence))
        / ((1.0 - 2.0 * tau) ** 2 * batch_size)
    )
