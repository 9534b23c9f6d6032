"""
Command-line controllers.

Parses flags, resolves the experiment configuration (flags > --config file >
defaults), hands it to the ExperimentService and maps outcomes and domain
errors onto the stable exit codes: 0 success, 1 failure, 2 inconclusive,
64 usage error.
"""

import argparse
import logging
import sys
from typing import Sequence

from pydantic import ValidationError

from lpnkit.core.config import settings
from lpnkit.core.constants import EXIT_FAILURE, EXIT_USAGE
from lpnkit.core.logging_config import configure_logging
from lpnkit.exceptions import (
    ConfigurationError,
    DimensionMismatchError,
    DomainError,
    InsufficientSamplesError,
    LpnkitError,
    PoolTooSmallError,
    UsageError,
)
from lpnkit.repositories.run_log_repository import RunLogRepository
from lpnkit.schemas.experiment import SOLVE_SETTINGS, TUNE_SETTINGS, ExperimentConfig, parse_config_file
from lpnkit.schemas.report import TuneResult
from lpnkit.services.experiment_service import ExperimentService, format_tune_table
from lpnkit.services.theory_service import CHECKS

logger = logging.getLogger(__name__)

USAGE_ERRORS = (
    UsageError,
    ConfigurationError,
    DomainError,
    DimensionMismatchError,
    InsufficientSamplesError,
    PoolTooSmallError,
)


def _add_common(parser: argparse.ArgumentParser) -> None:
    # defaults stay None so that config-file values are not overridden
    group = parser.add_argument_group("instance")
    group.add_argument("--n", type=int, help="Secret dimension")
    group.add_argument("--tau", type=float, help="Noise rate in [0, 0.5)")
    group.add_argument("--m", help="Sample count, or 'oracle'")
    group.add_argument("--seed", type=int, help="Root seed (mandatory)")
    group.add_argument("--sparsity", type=int, help="Secret Hamming weight (default floor(n * tau))")
    group.add_argument("--data", help="LPN1 dataset to load instead of generating samples")

    group = parser.add_argument_group("hyperparameters")
    group.add_argument("--width", type=int, help="Hidden width")
    group.add_argument("--depth", type=int, help="Hidden layers (1-3)")
    group.add_argument("--activation", help="relu, sigmoid, cosine or identity")
    group.add_argument("--lr", help="Learning rate; comma-separated list for tune")
    group.add_argument("--batch", help="Batch size or 'full'; comma-separated list for tune")
    group.add_argument("--wd", help="Weight decay; comma-separated list for tune")
    group.add_argument("--loss", help="logistic, mae or mse")
    group.add_argument("--opt", help="adam or sgd")
    group.add_argument("--regularizer", help="none, l1 or l2")
    group.add_argument("--reg-lambda", type=float, help="Explicit penalty factor")
    group.add_argument("--stop", help="Stop criterion, e.g. acc:0.8+time:600 or step:300000")
    group.add_argument("--steps", type=int, help="Step limit")
    group.add_argument("--time-cap", type=float, help="Wall-time limit in seconds")

    group = parser.add_argument_group("solver")
    group.add_argument("--gamma", type=float, help="Accuracy threshold (abundant target / restricted gamma)")
    group.add_argument("--tau-prime", type=float, help="Pooled-Gauss hypothesis threshold")
    group.add_argument("--suffix-bits", type=int, help="Secret bits enumerated by the hybrid solver")
    group.add_argument("--inner", help="Inner solver of the hybrid setting: gauss or moderate")
    group.add_argument("--repeat", type=int, help="Repetitions (initializations, runs or trials)")
    group.add_argument("--repeat-post", type=int, help="Pooled-Gauss runs per trained model")
    group.add_argument("--m-grid", help="Comma-separated log2 sample sizes for tune restricted")

    group = parser.add_argument_group("run control")
    group.add_argument("--public", action="store_true", default=None, help="Leave the secret out of the dataset file")
    group.add_argument("--deterministic", action=argparse.BooleanOptionalAction, default=None,
                       help="Run trials sequentially so logs are reproducible (default on)")
    group.add_argument("--workers", type=int, help="Thread workers for independent trials")
    group.add_argument("--out", help="Output file (dataset for gen, checkpoint for solve)")
    group.add_argument("--log", help="Run-log file (default: stdout)")
    group.add_argument("--config", help="Flat key=value file with default flag values")
    group.add_argument("--log-level", help="Log level for stderr diagnostics")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with the gen, solve, tune and verify-theory commands."""
    parser = argparse.ArgumentParser(prog=settings.APP_NAME, description="LPN solver toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="Generate a seeded LPN1 dataset")
    _add_common(gen)

    solve = commands.add_parser("solve", help="Run a solver")
    solve.add_argument("setting", choices=SOLVE_SETTINGS)
    _add_common(solve)

    tune = commands.add_parser("tune", help="Run a hyperparameter search")
    tune.add_argument("setting", choices=TUNE_SETTINGS)
    _add_common(tune)

    verify = commands.add_parser("verify-theory", help="Run a theory check")
    verify.add_argument("--check", required=True, choices=CHECKS)
    _add_common(verify)
    return parser


def get_experiment_service() -> ExperimentService:
    """Provides an ExperimentService instance."""
    return ExperimentService()


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """
    Build the configuration from parsed flags and the optional config file.

    Raises:
        ValidationError: If the merged values violate the schema
        ConfigurationError: On a malformed config file
    """
    cli_values = {k: v for k, v in vars(args).items() if k != "log_level"}
    file_values = parse_config_file(args.config) if args.config else {}
    return ExperimentConfig.resolve(cli_values, file_values)


def run_command(args: argparse.Namespace, service: ExperimentService | None = None) -> int:
    """
    Execute a parsed command.

    Returns:
        Exit code
    """
    service = service or get_experiment_service()
    try:
        config = resolve_config(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (LpnkitError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        log = RunLogRepository(config.log, stream=None if config.log else sys.stdout)
    except OSError as e:
        logger.error("Cannot open run log: %s", e)
        return EXIT_FAILURE
    try:
        outcome = service.run(config, log)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except USAGE_ERRORS as e:
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_USAGE
    except LpnkitError as e:
        logger.error("Command failed: %s", e.message)
        return EXIT_FAILURE
    except OSError as e:
        logger.error("I/O failure: %s", e)
        return EXIT_FAILURE
    finally:
        log.close()

    if isinstance(outcome.payload, TuneResult):
        print(format_tune_table(outcome.payload), file=sys.stderr)
    return outcome.exit_code


def main(argv: Sequence[str] | None = None) -> int:
    """CLI entry point."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad flags, which would read as "inconclusive"
        return EXIT_USAGE if e.code else 0
    configure_logging(args.log_level)
    return run_command(args)
