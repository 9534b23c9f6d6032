"""
Pydantic schemas for hyperparameter profiles and stop criteria.
"""

from typing import Any

from pydantic import BaseModel, Field, field_validator, model_validator

from lpnkit.core.constants import (
    ACTIVATIONS,
    DEFAULT_DEPTH,
    DEFAULT_EVAL_INTERVAL,
    DEFAULT_WIDTH,
    LOSSES,
    MAX_DEPTH,
    OPTIMIZERS,
    REGULARIZERS,
    SETTING_DEFAULTS,
    SETTING_STOPS,
)


class StopSpec(BaseModel):
    """
    Stop criterion description; training stops as soon as any set limit fires.

    Attributes:
        max_seconds: Wall-time limit
        max_steps: Optimizer step limit
        target_accuracy: Accuracy threshold on the evaluation set
        eval_interval: Steps between accuracy evaluations
    """
    max_seconds: float | None = Field(None, gt=0, description="Stop after this many seconds")
    max_steps: int | None = Field(None, ge=0, description="Stop after this many optimizer steps")
    target_accuracy: float | None = Field(None, gt=0, le=1, description="Stop once evaluation accuracy reaches this value")
    eval_interval: int = Field(DEFAULT_EVAL_INTERVAL, ge=1, description="Steps between accuracy evaluations")

    @model_validator(mode="after")
    def validate_any_limit(self) -> "StopSpec":
        """Require at least one limit."""
        if self.max_seconds is None and self.max_steps is None and self.target_accuracy is None:
            raise ValueError("A stop criterion needs a time, step or accuracy limit")
        return self

    @classmethod
    def parse(cls, text: str, eval_interval: int = DEFAULT_EVAL_INTERVAL) -> "StopSpec":
        """
        Parse ``time:<s>``, ``step:<n>`` and ``acc:<x>`` items joined by ``+``.

        Example: ``"acc:0.8+time:600"``.
        """
        values: dict[str, Any] = {"eval_interval": eval_interval}
        for item in text.split("+"):
            kind, _, raw = item.strip().partition(":")
            if kind == "time":
                values["max_seconds"] = float(raw)
            elif kind == "step":
                values["max_steps"] = int(raw)
            elif kind in ("acc", "accuracy"):
                values["target_accuracy"] = float(raw)
            else:
                raise ValueError(f"Unknown stop criterion '{item}'")
        return cls(**values)

    def describe(self) -> str:
        parts = []
        if self.target_accuracy is not None:
            parts.append(f"acc:{self.target_accuracy:g}")
        if self.max_steps is not None:
            parts.append(f"step:{self.max_steps}")
        if self.max_seconds is not None:
            parts.append(f"time:{self.max_seconds:g}")
        return "+".join(parts)


class HyperProfile(BaseModel):
    """
    Hyperparameters of one training configuration.

    Attributes:
        lr: Learning rate
        batch_size: Batch size; None trains on the full training set
        weight_decay: Optimizer weight decay lambda
        width: Hidden width
        depth: Number of hidden layers
        activation: Hidden activation
        loss: Training loss
        optimizer: ``adam`` or ``sgd``
        regularizer: Explicit penalty added to the loss (``none``, ``l1``, ``l2``)
        reg_lambda: Penalty factor of the explicit regularizer
        stop: Stop criterion
    """
    lr: float = Field(..., gt=0, description="Learning rate")
    batch_size: int | None = Field(None, ge=1, description="Batch size (None = full training set)")
    weight_decay: float = Field(0.0, ge=0, description="Weight decay lambda")
    width: int = Field(DEFAULT_WIDTH, ge=1, description="Hidden layer width")
    depth: int = Field(DEFAULT_DEPTH, ge=1, le=MAX_DEPTH, description="Number of hidden layers")
    activation: str = Field("relu", description="Hidden activation")
    loss: str = Field("logistic", description="Training loss")
    optimizer: str = Field("adam", description="Optimizer")
    regularizer: str = Field("none", description="Explicit loss penalty")
    reg_lambda: float = Field(0.0, ge=0, description="Explicit penalty factor")
    stop: StopSpec = Field(default_factory=lambda: StopSpec(max_steps=1000), description="Stop criterion")

    @field_validator("activation")
    @classmethod
    def validate_activation(cls, v: str) -> str:
        """Validate the activation tag."""
        if v not in ACTIVATIONS:
            raise ValueError(f"Activation must be one of: {', '.join(ACTIVATIONS)}")
        return v

    @field_validator("loss")
    @classmethod
    def validate_loss(cls, v: str) -> str:
        """Validate the loss tag; zero-one has no gradient."""
        if v not in LOSSES:
            raise ValueError(f"Loss must be one of: {', '.join(LOSSES)}")
        if v == "zero_one":
            raise ValueError("Loss 'zero_one' is evaluation-only and cannot be trained on")
        return v

    @field_validator("optimizer")
    @classmethod
    def validate_optimizer(cls, v: str) -> str:
        """Validate the optimizer tag."""
        if v not in OPTIMIZERS:
            raise ValueError(f"Optimizer must be one of: {', '.join(OPTIMIZERS)}")
        return v

    @field_validator("regularizer")
    @classmethod
    def validate_regularizer(cls, v: str) -> str:
        """Validate the regularizer tag."""
        if v not in REGULARIZERS:
            raise ValueError(f"Regularizer must be one of: {', '.join(REGULARIZERS)}")
        return v

    @classmethod
    def for_setting(cls, setting: str, **overrides: Any) -> "HyperProfile":
        """
        Default profile of a setting (``abundant``, ``restricted``, ``moderate``).

        Args:
            setting: Setting name
            **overrides: Field values replacing the defaults; None values are ignored
        """
        if setting not in SETTING_DEFAULTS:
            raise ValueError(f"Unknown setting '{setting}'")
        values: dict[str, Any] = dict(SETTING_DEFAULTS[setting])
        values["stop"] = StopSpec(**SETTING_STOPS[setting])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def label(self) -> str:
        """Short identifier used in tuning tables."""
        batch = "full" if self.batch_size is None else str(self.batch_size)
        return f"lr={self.lr:g} B={batch} wd={self.weight_decay:g} d={self.width} depth={self.depth} act={self.activation}"

    model_config = {
        "json_schema_extra": {
            "examples": [{"lr": 2e-4, "batch_size": 131072, "weight_decay": 0.0, "width": 1000}]
        }
    }
