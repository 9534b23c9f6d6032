"""
Meta hyperparameter search for the abundant and restricted settings.

The abundant tuner measures, per profile, the shortest time (over a few
fresh secrets) to reach a target clean accuracy. The restricted tuner
binary-searches a sample-size grid for the smallest m at which the last
secret bit is found reliably.
"""

import logging
import math
from typing import Callable, Sequence

from lpnkit.core.constants import ABUNDANT_ACCURACY_THRESHOLD, CLEAN_TEST_SIZE, TUNE_REPEAT
from lpnkit.core.rng import RngStreams
from lpnkit.exceptions import ConfigurationError
from lpnkit.schemas.profile import HyperProfile
from lpnkit.schemas.report import TuneEntry, TuneResult
from lpnkit.services import lpn_service
from lpnkit.services.solver_service import SolverService

logger = logging.getLogger(__name__)

# (profile, trial index) -> seconds to reach the target, or inf
AbundantTrial = Callable[[HyperProfile, int], float]
# (profile, sample count, trial index) -> whether the last bit was found
RestrictedTrial = Callable[[HyperProfile, int, int], bool]


def log2_grid(exponents: Sequence[float]) -> list[int]:
    """Sample sizes m = round(2^v); half-integer exponents give geometric midpoints."""
    return [int(round(2.0**v)) for v in exponents]


def success_quorum(repeat: int) -> int:
    """Trials that must succeed: floor(2 * repeat / 3)."""
    return (2 * repeat) // 3


def _argmin(values: Sequence[float]) -> int:
    return min(range(len(values)), key=lambda i: (values[i], i))


class TuningService:
    """
    Runs the meta searches on top of a SolverService.
    """

    def __init__(self, solver_service: SolverService):
        """
        Initialize service with a solver.

        Args:
            solver_service: Solver used by the default trials
        """
        self.solver_service = solver_service

    def _abundant_trial(
        self, n: int, tau: float, gamma: float, streams: RngStreams, clean_test_size: int
    ) -> AbundantTrial:
        def trial(profile: HyperProfile, index: int) -> float:
            child = streams.child("abundant", index)
            instance = lpn_service.create_instance(n, tau, child.stream("secret"), child.stream("data"))
            stop = profile.stop.model_copy(update={"target_accuracy": gamma})
            result = self.solver_service.solve_abundant(
                instance, profile.model_copy(update={"stop": stop}), child, clean_test_size
            )
            if not result.details.get("reached_target"):
                return math.inf
            if self.solver_service.deterministic:
                # wall time differs between runs; report the step count in budget seconds
                return self.solver_service.nominal_seconds(result.details["steps"])
            return result.phase_seconds["train"]

        return trial

    def tune_abundant(
        self,
        n: int,
        tau: float,
        profiles: Sequence[HyperProfile],
        streams: RngStreams,
        repeat: int = TUNE_REPEAT,
        gamma: float = ABUNDANT_ACCURACY_THRESHOLD,
        clean_test_size: int = CLEAN_TEST_SIZE,
        trial_fn: AbundantTrial | None = None,
    ) -> TuneResult:
        """
        Pick the profile that reaches clean accuracy gamma fastest.

        Each profile runs ``repeat`` fresh-secret trials; its score is the
        minimum time over the trials (inf when none reached gamma within the
        profile's time cap). Trials of different profiles share secrets.

        Raises:
            ConfigurationError: If no profile is given
        """
        if not profiles:
            raise ConfigurationError("Tuning needs at least one profile")
        trial = trial_fn or self._abundant_trial(n, tau, gamma, streams, clean_test_size)
        entries = []
        for profile in profiles:
            runs = [trial(profile, index) for index in range(repeat)]
            entries.append(TuneEntry(profile=profile, value=min(runs), runs=runs))
            logger.info("Profile %s: best time %s", profile.label(), min(runs))
        return TuneResult(setting="abundant", entries=entries, best_index=_argmin([e.value for e in entries]))

    def _restricted_trial(self, n: int, tau: float, streams: RngStreams) -> RestrictedTrial:
        def trial(profile: HyperProfile, m: int, index: int) -> bool:
            child = streams.child("restricted", m, index)
            instance = lpn_service.create_instance(n, tau, child.stream("secret"), child.stream("data"))
            dataset = lpn_service.generate_dataset(instance, m)
            result = self.solver_service.solve_restricted(dataset, profile, child)
            return result.status == "decided" and result.guess == instance.secret[n - 1]

        return trial

    def minimal_samples(
        self,
        profile: HyperProfile,
        grid: Sequence[int],
        trial: RestrictedTrial,
        repeat: int,
    ) -> tuple[float, dict[int, int]]:
        """
        Binary search for the smallest grid value where the success quorum is met.

        Returns:
            The minimal m (inf when even the largest grid value fails) and the
            success count of every grid value evaluated
        """
        quorum = success_quorum(repeat)
        counts: dict[int, int] = {}

        def succeeds(index: int) -> bool:
            m = grid[index]
            if m not in counts:
                counts[m] = sum(1 for t in range(repeat) if trial(profile, m, t))
                logger.debug("Profile %s at m=%d: %d/%d", profile.label(), m, counts[m], repeat)
            return counts[m] >= quorum

        low, high = 0, len(grid) - 1
        while low < high:
            middle = (low + high) // 2
            if succeeds(middle):
                high = middle
            else:
                low = middle + 1
        return (float(grid[low]) if succeeds(low) else math.inf), counts

    def tune_restricted(
        self,
        n: int,
        tau: float,
        grid: Sequence[int],
        profiles: Sequence[HyperProfile],
        streams: RngStreams,
        repeat: int = TUNE_REPEAT,
        trial_fn: RestrictedTrial | None = None,
    ) -> TuneResult:
        """
        Pick the profile needing the fewest samples.

        Raises:
            ConfigurationError: If there is no profile, the grid is empty or not ascending
        """
        if not profiles:
            raise ConfigurationError("Tuning needs at least one profile")
        if not grid or any(a >= b for a, b in zip(grid, grid[1:])):
            raise ConfigurationError("The sample grid must be nonempty and strictly ascending")
        trial = trial_fn or self._restricted_trial(n, tau, streams)
        entries = []
        for profile in profiles:
            value, counts = self.minimal_samples(profile, grid, trial, repeat)
            entries.append(TuneEntry(profile=profile, value=value, runs=[float(counts[m]) for m in sorted(counts)]))
            logger.info("Profile %s: minimal m %s", profile.label(), value)
        return TuneResult(setting="restricted", entries=entries, best_index=_argmin([e.value for e in entries]))
