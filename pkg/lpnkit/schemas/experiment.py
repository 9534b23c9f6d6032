"""
Pydantic schema for a fully resolved experiment configuration.

Values come from defaults, then a flat ``key=value`` config file, then
command-line flags, later sources winning.
"""

from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field, field_validator, model_validator

from lpnkit.core.config import settings
from lpnkit.exceptions import ConfigurationError

SOLVE_SETTINGS = ("abundant", "restricted", "moderate", "gauss", "hybrid")
TUNE_SETTINGS = ("abundant", "restricted")
INNER_SOLVERS = ("gauss", "moderate")


def _split(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    if value is None or isinstance(value, (list, tuple)):
        return value
    return [value]


def parse_config_file(path: str | Path) -> dict[str, str]:
    """
    Read a flat ``key=value`` file; keys are long flag names (``time-cap``).

    Blank lines and lines starting with ``#`` are skipped.

    Raises:
        ConfigurationError: On a line without ``=``
    """
    values: dict[str, str] = {}
    for number, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigurationError(f"{path}:{number}: expected key=value, got '{line}'")
        values[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return values


class ExperimentConfig(BaseModel):
    """
    Resolved configuration of one command.

    Grid-capable fields (``lr``, ``batch``, ``wd``) hold lists; ``solve``
    accepts a single value each, ``tune`` sweeps their product.

    Attributes:
        command: ``gen``, ``solve``, ``tune`` or ``verify-theory``
        setting: Solver or tuner name
        n: Secret dimension
        tau: Noise rate
        m: Sample count, or ``oracle`` for fresh samples on demand
        seed: Root seed of every random stream
        data: LPN1 file to solve instead of generating samples
        out: Output path (dataset for ``gen``, checkpoint for ``solve``)
        log: Run-log path; records go to stdout when unset
    """
    command: Literal["gen", "solve", "tune", "verify-theory"]
    setting: str | None = None
    seed: int = Field(..., ge=0, description="Root seed; mandatory for every run")

    # instance
    n: int | None = Field(None, ge=1, description="Secret dimension")
    tau: float | None = Field(None, ge=0, lt=0.5, description="Noise rate")
    m: int | Literal["oracle"] | None = Field(None, description="Sample count or 'oracle'")
    sparsity: int | None = Field(None, ge=0, description="Secret Hamming weight override")
    data: Path | None = Field(None, description="LPN1 dataset to load")

    # hyperparameters
    lr: list[float] | None = Field(None, description="Learning rate(s)")
    batch: list[int | None] | None = Field(None, description="Batch size(s); 'full' = whole training set")
    wd: list[float] | None = Field(None, description="Weight decay(s)")
    width: int | None = Field(None, ge=1)
    depth: int | None = Field(None, ge=1, le=3)
    activation: str | None = None
    loss: str | None = None
    opt: str | None = None
    regularizer: str | None = None
    reg_lambda: float | None = Field(None, ge=0)
    stop: str | None = Field(None, description="Stop criterion, e.g. acc:0.8+time:600")
    steps: int | None = Field(None, ge=0, description="Step limit added to the stop criterion")
    time_cap: float | None = Field(None, gt=0, description="Wall-time limit in seconds")

    # solver knobs
    gamma: float | None = Field(None, gt=0, le=1)
    tau_prime: float | None = Field(None, gt=0, lt=0.5)
    suffix_bits: int = Field(0, ge=0)
    inner: str = Field("gauss", description="Inner solver of the hybrid setting")
    repeat: int | None = Field(None, ge=1)
    repeat_post: int | None = Field(None, ge=1)
    m_grid: list[float] | None = Field(None, description="log2 sample sizes for the restricted tuner")
    check: str | None = None

    # run control
    public: bool = False
    deterministic: bool = Field(default_factory=lambda: settings.DETERMINISTIC)
    workers: int | None = Field(None, ge=1)
    out: Path | None = None
    log: Path | None = None
    config: Path | None = None

    model_config = {"extra": "forbid"}

    @field_validator("lr", "wd", "m_grid", mode="before")
    @classmethod
    def split_floats(cls, v: Any) -> Any:
        """Accept comma-separated strings."""
        return _split(v)

    @field_validator("batch", mode="before")
    @classmethod
    def split_batches(cls, v: Any) -> Any:
        """Accept comma-separated strings; ``full`` means the whole training set."""
        items = _split(v)
        if items is None:
            return None
        return [None if str(item).lower() == "full" else item for item in items]

    @field_validator("m", mode="before")
    @classmethod
    def validate_m(cls, v: Any) -> Any:
        """Keep ``oracle`` as is, coerce other values to int."""
        if isinstance(v, str) and v.strip().lower() == "oracle":
            return "oracle"
        return v

    @field_validator("inner")
    @classmethod
    def validate_inner(cls, v: str) -> str:
        if v not in INNER_SOLVERS:
            raise ValueError(f"Inner solver must be one of: {', '.join(INNER_SOLVERS)}")
        return v

    @model_validator(mode="after")
    def validate_command(self) -> "ExperimentConfig":
        """Check that the command has the inputs its setting needs."""
        if self.command == "gen":
            if self.n is None or self.tau is None or not isinstance(self.m, int) or self.out is None:
                raise ValueError("gen needs --n, --tau, an integer --m and --out")
        elif self.command == "solve":
            if self.setting not in SOLVE_SETTINGS:
                raise ValueError(f"solve needs a setting among: {', '.join(SOLVE_SETTINGS)}")
            if self.setting == "abundant":
                if self.data is not None or isinstance(self.m, int):
                    raise ValueError("abundant draws oracle samples; do not pass --data or an integer --m")
                if self.n is None or self.tau is None:
                    raise ValueError("abundant needs --n and --tau")
            elif self.data is None:
                if self.n is None or self.tau is None or not isinstance(self.m, int):
                    raise ValueError(f"{self.setting} needs --data or --n, --tau and an integer --m")
            if self.suffix_bits and self.setting != "hybrid":
                raise ValueError("--suffix-bits only applies to the hybrid setting")
            for name in ("lr", "batch", "wd"):
                values = getattr(self, name)
                if values is not None and len(values) != 1:
                    raise ValueError(f"solve takes a single --{name} value")
        elif self.command == "tune":
            if self.setting not in TUNE_SETTINGS:
                raise ValueError(f"tune needs a setting among: {', '.join(TUNE_SETTINGS)}")
            if self.n is None or self.tau is None:
                raise ValueError("tune needs --n and --tau")
            if self.setting == "restricted" and not self.m_grid:
                raise ValueError("tune restricted needs --m-grid")
        elif self.check is None:
            raise ValueError("verify-theory needs --check")
        return self

    @classmethod
    def resolve(
        cls,
        cli_values: dict[str, Any],
        file_values: dict[str, Any] | None = None,
    ) -> "ExperimentConfig":
        """
        Merge defaults, config-file values and CLI flags (highest precedence).

        None CLI values mean "not given" and do not override the file.
        """
        values: dict[str, Any] = dict(file_values or {})
        values.update({k: v for k, v in cli_values.items() if v is not None})
        return cls(**values)

    def first(self, name: str) -> Any:
        """Single value of a grid-capable field, or None."""
        values = getattr(self, name)
        return None if not values else values[0]
