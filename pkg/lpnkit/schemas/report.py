"""
Pydantic schemas for training reports, solver results and run-log records.
"""

from typing import Any, Literal

from pydantic import BaseModel, Field

from lpnkit.models.bits import BitVector
from lpnkit.schemas.profile import HyperProfile


class TracePoint(BaseModel):
    """
    One evaluation point of a training run.

    Attributes:
        step: Optimizer steps completed
        wall_ms: Milliseconds since training started
        train_acc: Accuracy on the current training batch
        test_acc: Accuracy on the evaluation set, when one is configured
    """
    step: int = Field(..., ge=0)
    wall_ms: float = Field(..., ge=0)
    train_acc: float | None = Field(None, ge=0, le=1)
    test_acc: float | None = Field(None, ge=0, le=1)


class TrainReport(BaseModel):
    """
    Outcome of one training loop.

    Attributes:
        steps: Optimizer steps performed
        wall_seconds: Wall time of the loop
        trace: Evaluation points in increasing step order
        stop_reason: ``time``, ``step`` or ``accuracy``
        weights: Final weights (not serialized)
    """
    steps: int = Field(..., ge=0)
    wall_seconds: float = Field(..., ge=0)
    trace: list[TracePoint] = Field(default_factory=list)
    stop_reason: str
    weights: Any = Field(None, exclude=True)

    @property
    def final_test_accuracy(self) -> float | None:
        for point in reversed(self.trace):
            if point.test_acc is not None:
                return point.test_acc
        return None


class SolveResult(BaseModel):
    """
    Outcome of an end-to-end solver.

    Attributes:
        setting: Solver name
        secret_bits: Recovered secret bits, or None if nothing was recovered
        bit_indices: Original coordinates of ``secret_bits``
        verification_accuracy: Accuracy of the recovered secret on held-out rows
        threshold: Acceptance threshold the verification had to clear
        wall_seconds: Total wall time
        phase_seconds: Wall time per phase
        success: Whether the recovered secret passed verification
        details: Solver-specific diagnostics
        weights: Trained model, when the solver trains one (not serialized)
    """
    setting: str
    secret_bits: list[int] | None = None
    bit_indices: list[int] = Field(default_factory=list)
    verification_accuracy: float | None = None
    threshold: float | None = None
    wall_seconds: float = 0.0
    phase_seconds: dict[str, float] = Field(default_factory=dict)
    success: bool = False
    details: dict[str, Any] = Field(default_factory=dict)
    weights: Any = Field(None, exclude=True)

    @property
    def secret(self) -> BitVector | None:
        if self.secret_bits is None:
            return None
        return BitVector.from_bits(self.secret_bits)

    @property
    def secret_hex(self) -> str | None:
        secret = self.secret
        return None if secret is None else secret.to_hex()


class RestrictedResult(BaseModel):
    """
    Outcome of the restricted-sample last-bit solver.

    Attributes:
        status: ``decided`` or ``inconclusive``
        guess: Returned guess for the last secret bit
        gamma: Test-accuracy threshold
        accuracies: Test accuracies per guess, one per initialization tried
        wall_seconds: Total wall time
    """
    status: Literal["decided", "inconclusive"]
    guess: int | None = None
    gamma: float
    accuracies: dict[int, list[float]] = Field(default_factory=dict)
    wall_seconds: float = 0.0


class TuneEntry(BaseModel):
    """One tuning-table row: a profile and its measured value (seconds or samples)."""
    profile: HyperProfile
    value: float
    runs: list[float] = Field(default_factory=list)


class TuneResult(BaseModel):
    """
    Outcome of a meta hyperparameter search.

    Attributes:
        setting: ``abundant`` (value = seconds) or ``restricted`` (value = samples)
        entries: One row per profile, in input order
        best_index: Index of the argmin row
    """
    setting: str
    entries: list[TuneEntry]
    best_index: int

    @property
    def best(self) -> TuneEntry:
        return self.entries[self.best_index]


class ConfigRecord(BaseModel):
    """First record of every run log: the fully resolved configuration."""
    record: Literal["config"] = "config"
    version: str
    config: dict[str, Any]


class PhaseRecord(BaseModel):
    record: Literal["phase"] = "phase"
    name: str
    wall_ms: float


class TraceRecord(TracePoint):
    record: Literal["trace"] = "trace"


class ResultRecord(BaseModel):
    """Last record of every run log."""
    record: Literal["result"] = "result"
    success: bool
    status: str
    secret_hex: str | None = None
    exit_code: int
    wall_ms: float = 0.0
    details: dict[str, Any] = Field(default_factory=dict)


class CheckReport(BaseModel):
    """
    Outcome of one theory check.

    Attributes:
        check: Check name (``parity-net``, ``grad-check``, ...)
        passed: Whether every case met its tolerance
        cases: Number of cases evaluated
        failures: Number of cases outside tolerance
        measurements: Check-specific figures (worst error, rates, bounds)
    """
    check: str
    passed: bool
    cases: int = Field(0, ge=0)
    failures: int = Field(0, ge=0)
    measurements: dict[str, Any] = Field(default_factory=dict)
