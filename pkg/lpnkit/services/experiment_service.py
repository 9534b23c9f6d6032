"""
Service layer behind the command-line harness.

Turns a resolved ExperimentConfig into instances, datasets and profiles,
runs the matching generator, solver, tuner or theory check, and writes
the run log: the resolved configuration first, phase timings and training
trace in between, the result last.
"""

import itertools
import logging
import time
from dataclasses import dataclass
from typing import Any

from lpnkit.core.config import settings
from lpnkit.core.constants import (
    ABUNDANT_ACCURACY_THRESHOLD,
    EXIT_FAILURE,
    EXIT_INCONCLUSIVE,
    EXIT_SUCCESS,
    MODERATE_REPEAT,
    MODERATE_REPEAT_POST,
    RESTRICTED_REPEAT,
    TUNE_REPEAT,
)
from lpnkit.core.rng import RngStreams
from lpnkit.models.bits import BitVector
from lpnkit.models.lpn import Dataset
from lpnkit.repositories.checkpoint_repository import CheckpointRepository
from lpnkit.repositories.dataset_repository import DatasetRepository
from lpnkit.repositories.run_log_repository import RunLogRepository
from lpnkit.schemas.experiment import ExperimentConfig
from lpnkit.schemas.profile import HyperProfile, StopSpec
from lpnkit.schemas.report import (
    CheckReport,
    ConfigRecord,
    PhaseRecord,
    ResultRecord,
    TracePoint,
    TraceRecord,
    TuneResult,
)
from lpnkit.services import lpn_service
from lpnkit.services.solver_service import SolverService
from lpnkit.services.theory_service import TheoryService
from lpnkit.services.tuning_service import TuningService, log2_grid

logger = logging.getLogger(__name__)


@dataclass
class CommandOutcome:
    """Exit code of a command and the object it produced."""

    exit_code: int
    payload: Any = None


def build_profile(config: ExperimentConfig, setting: str) -> HyperProfile:
    """
    Setting defaults overlaid with the configured hyperparameters.

    ``--stop`` replaces the default stop criterion; ``--steps`` and
    ``--time-cap`` then set its step and time limits, and ``--gamma`` its
    target accuracy in the abundant setting.
    """
    profile = HyperProfile.for_setting(
        setting,
        lr=config.first("lr"),
        batch_size=config.first("batch"),
        weight_decay=config.first("wd"),
        width=config.width,
        depth=config.depth,
        activation=config.activation,
        loss=config.loss,
        optimizer=config.opt,
        regularizer=config.regularizer,
        reg_lambda=config.reg_lambda,
    )
    if config.batch is not None and config.batch[0] is None:
        profile = profile.model_copy(update={"batch_size": None})
    stop = StopSpec.parse(config.stop, profile.stop.eval_interval) if config.stop else profile.stop
    limits = stop.model_dump()
    if config.steps is not None:
        limits["max_steps"] = config.steps
    if config.time_cap is not None:
        limits["max_seconds"] = config.time_cap
    if setting == "abundant" and config.gamma is not None:
        limits["target_accuracy"] = config.gamma
    return profile.model_copy(update={"stop": StopSpec(**limits)})


def grid_profiles(config: ExperimentConfig, setting: str) -> list[HyperProfile]:
    """Profiles of the lr x batch x wd product; unset axes keep the setting default."""
    base = build_profile(config.model_copy(update={"lr": None, "batch": None, "wd": None}), setting)
    lrs = config.lr or [base.lr]
    batches = config.batch or [base.batch_size]
    decays = config.wd or [base.weight_decay]
    return [
        base.model_copy(update={"lr": lr, "batch_size": batch, "weight_decay": wd})
        for lr, batch, wd in itertools.product(lrs, batches, decays)
    ]


def format_tune_table(result: TuneResult) -> str:
    """Plain-text table of a tuning result; the argmin row is starred."""
    unit = "seconds" if result.setting == "abundant" else "samples"
    lines = [f"{'':2}{'profile':<72} {unit:>12}"]
    for index, entry in enumerate(result.entries):
        mark = "*" if index == result.best_index else " "
        value = "inf" if entry.value == float("inf") else f"{entry.value:g}"
        lines.append(f"{mark} {entry.profile.label():<72} {value:>12}")
    return "\n".join(lines)


class ExperimentService:
    """
    Orchestrates the commands of the harness.
    """

    def __init__(
        self,
        dataset_repository: DatasetRepository | None = None,
        checkpoint_repository: CheckpointRepository | None = None,
    ):
        """
        Initialize service with its repositories.

        Args:
            dataset_repository: LPN1 reader/writer
            checkpoint_repository: MLP1 reader/writer
        """
        self.dataset_repository = dataset_repository or DatasetRepository()
        self.checkpoint_repository = checkpoint_repository or CheckpointRepository()

    def _solver(self, config: ExperimentConfig) -> SolverService:
        # one worker keeps the trace records of parallel trials in a fixed order;
        # deterministic solvers also count time budgets in steps
        workers = 1 if config.deterministic else (config.workers or settings.DEFAULT_WORKERS)
        return SolverService(workers=workers, deterministic=config.deterministic)

    def run(self, config: ExperimentConfig, log: RunLogRepository) -> CommandOutcome:
        """
        Run one command and log it.

        Args:
            config: Resolved configuration
            log: Run-log sink; receives the config record first and the
                result record last

        Returns:
            CommandOutcome with the stable exit code
        """
        log.append(ConfigRecord(version=settings.APP_VERSION, config=config.model_dump(mode="json")))
        started = time.perf_counter()
        handlers = {
            "gen": self.generate,
            "solve": self.solve,
            "tune": self.tune,
            "verify-theory": self.verify_theory,
        }
        outcome, status, secret_hex, details = handlers[config.command](config, log)
        log.append(
            ResultRecord(
                success=outcome.exit_code == EXIT_SUCCESS,
                status=status,
                secret_hex=secret_hex,
                exit_code=outcome.exit_code,
                wall_ms=(time.perf_counter() - started) * 1000.0,
                details=details,
            )
        )
        return outcome

    # ------------------------------------------------------------------
    # Data
    # ------------------------------------------------------------------

    def _instance(self, config: ExperimentConfig, streams: RngStreams):
        return lpn_service.create_instance(
            config.n, config.tau, streams.stream("secret"), streams.stream("data"), weight=config.sparsity
        )

    def _dataset(self, config: ExperimentConfig, streams: RngStreams) -> tuple[Dataset, BitVector | None]:
        """Dataset to solve and the ground truth used for reporting only."""
        if config.data is not None:
            dataset = self.dataset_repository.load(config.data)
            truth = dataset.secret if dataset.secret is not None else self.dataset_repository.load_key(config.data, dataset.n)
            return dataset, truth
        dataset = lpn_service.generate_dataset(self._instance(config, streams), config.m)
        return dataset, dataset.secret

    def generate(self, config: ExperimentConfig, log: RunLogRepository):
        """Write a seeded dataset (and its key sidecar) to ``config.out``."""
        streams = RngStreams(config.seed)
        mark = time.perf_counter()
        dataset = lpn_service.generate_dataset(self._instance(config, streams), config.m)
        self.dataset_repository.save(dataset, config.out, public=config.public)
        log.append(PhaseRecord(name="gen", wall_ms=(time.perf_counter() - mark) * 1000.0))
        details = {"path": str(config.out), "n": dataset.n, "m": dataset.size, "public": config.public}
        return CommandOutcome(EXIT_SUCCESS, dataset), "written", dataset.secret.to_hex(), details

    # ------------------------------------------------------------------
    # Solvers
    # ------------------------------------------------------------------

    def solve(self, config: ExperimentConfig, log: RunLogRepository):
        """
        Dispatch to the configured solver.

        Returns:
            Exit 0 when the solver reports success, 1 on failure and 2 when
            the restricted solver is inconclusive
        """
        streams = RngStreams(config.seed)
        solver = self._solver(config)
        setting = config.setting

        def on_trace(point: TracePoint) -> None:
            log.append(TraceRecord(**point.model_dump()))

        if setting == "restricted":
            return self._solve_restricted(config, solver, streams)

        truth: BitVector | None
        if setting == "abundant":
            instance = self._instance(config, streams)
            truth = instance.secret
            result = solver.solve_abundant(instance, build_profile(config, "abundant"), streams, on_trace=on_trace)
        else:
            mark = time.perf_counter()
            dataset, truth = self._dataset(config, streams)
            log.append(PhaseRecord(name="load", wall_ms=(time.perf_counter() - mark) * 1000.0))
            if setting == "gauss":
                result = solver.solve_gauss(dataset, streams, tau_prime=config.tau_prime)
            elif setting == "moderate":
                result = solver.solve_moderate(
                    dataset,
                    build_profile(config, "moderate"),
                    streams,
                    repeat=config.repeat or MODERATE_REPEAT,
                    repeat_post=config.repeat_post or MODERATE_REPEAT_POST,
                    tau_prime=config.tau_prime,
                    on_trace=on_trace,
                )
            else:
                if config.inner == "moderate":
                    inner = solver.moderate_inner(
                        build_profile(config, "moderate"),
                        repeat=config.repeat or MODERATE_REPEAT,
                        repeat_post=config.repeat_post or MODERATE_REPEAT_POST,
                        tau_prime=config.tau_prime,
                    )
                else:
                    inner = solver.gauss_inner(tau_prime=config.tau_prime)
                result = solver.solve_hybrid(dataset, config.suffix_bits, inner, streams)

        for name, seconds in result.phase_seconds.items():
            log.append(PhaseRecord(name=name, wall_ms=seconds * 1000.0))
        if config.out is not None:
            if result.weights is None:
                logger.warning("Solver %s trains no model; nothing written to %s", setting, config.out)
            else:
                self.checkpoint_repository.save(result.weights, config.out)
        details = result.model_dump(exclude={"secret_bits", "phase_seconds", "wall_seconds"})
        if truth is not None and result.secret is not None:
            details["matches_truth"] = result.secret == truth
        exit_code = EXIT_SUCCESS if result.success else EXIT_FAILURE
        status = "success" if result.success else "failure"
        return CommandOutcome(exit_code, result), status, result.secret_hex, details

    def _solve_restricted(self, config: ExperimentConfig, solver: SolverService, streams: RngStreams):
        dataset, truth = self._dataset(config, streams)
        result = solver.solve_restricted(
            dataset,
            build_profile(config, "restricted"),
            streams,
            repeat=config.repeat or RESTRICTED_REPEAT,
            gamma=config.gamma,
        )
        details = result.model_dump(exclude={"wall_seconds"})
        if result.status == "inconclusive":
            return CommandOutcome(EXIT_INCONCLUSIVE, result), "inconclusive", None, details
        correct = truth is None or result.guess == truth[dataset.n - 1]
        if truth is not None:
            details["matches_truth"] = correct
        return CommandOutcome(EXIT_SUCCESS if correct else EXIT_FAILURE, result), "decided", None, details

    # ------------------------------------------------------------------
    # Tuners and checks
    # ------------------------------------------------------------------

    def tune(self, config: ExperimentConfig, log: RunLogRepository):
        """Sweep the lr x batch x wd grid; the table goes into the result details."""
        streams = RngStreams(config.seed)
        tuner = TuningService(self._solver(config))
        profiles = grid_profiles(config, config.setting)
        repeat = config.repeat or TUNE_REPEAT
        if config.setting == "abundant":
            gamma = config.gamma or ABUNDANT_ACCURACY_THRESHOLD
            result = tuner.tune_abundant(config.n, config.tau, profiles, streams, repeat=repeat, gamma=gamma)
        else:
            result = tuner.tune_restricted(config.n, config.tau, log2_grid(config.m_grid), profiles, streams, repeat=repeat)
        details = {
            "table": [{"profile": e.profile.label(), "value": e.value, "runs": e.runs} for e in result.entries],
            "best": result.best.profile.model_dump(mode="json"),
            "best_index": result.best_index,
        }
        return CommandOutcome(EXIT_SUCCESS, result), "tuned", None, details

    def verify_theory(self, config: ExperimentConfig, log: RunLogRepository):
        """Run one theory check; exit 1 on any failing case."""
        options: dict[str, Any] = {}
        size = config.m if isinstance(config.m, int) else None
        if config.check in ("parity-net", "grad-scaling", "piling-up"):
            options["n"] = config.n
        if config.check == "grad-scaling":
            options["batch_size"] = size
        if config.check == "piling-up":
            options["m"] = size
            options["tau"] = config.tau
        count_option = {"parity-net": "secrets", "grad-check": "cases", "lemma1": "trials", "piling-up": "trials"}
        if config.check in count_option:
            options[count_option[config.check]] = config.repeat
        mark = time.perf_counter()
        report: CheckReport = TheoryService(RngStreams(config.seed)).run(config.check, **options)
        log.append(PhaseRecord(name=config.check, wall_ms=(time.perf_counter() - mark) * 1000.0))
        exit_code = EXIT_SUCCESS if report.passed else EXIT_FAILURE
        return CommandOutcome(exit_code, report), "pass" if report.passed else "fail", None, report.model_dump()

