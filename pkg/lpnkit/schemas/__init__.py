"""
Pydantic schemas for profiles, experiment configuration, results and run-log records.
"""

from lpnkit.schemas.experiment import ExperimentConfig
from lpnkit.schemas.profile import HyperProfile, StopSpec
from lpnkit.schemas.report import (
    CheckReport,
    ConfigRecord,
    PhaseRecord,
    RestrictedResult,
    ResultRecord,
    SolveResult,
    TracePoint,
    TraceRecord,
    TrainReport,
    TuneEntry,
    TuneResult,
)

__all__ = [
    # Configuration
    "ExperimentConfig",
    "HyperProfile",
    "StopSpec",
    # Results
    "TracePoint",
    "TrainReport",
    "SolveResult",
    "RestrictedResult",
    "TuneEntry",
    "TuneResult",
    "CheckReport",
    # Run-log records
    "ConfigRecord",
    "PhaseRecord",
    "TraceRecord",
    "ResultRecord",
]
