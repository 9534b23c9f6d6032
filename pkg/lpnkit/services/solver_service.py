"""
End-to-end LPN solvers.

- abundant: train on fresh oracle samples, then read bit i of the secret
  as the rounded model output at the unit vector e_i
- restricted: guess the last secret bit; the right guess is the one whose
  reduced problem a network can learn to beyond-chance test accuracy
- moderate: train on a fixed dataset, relabel fresh random inputs with the
  (rebalanced) model, and decode that boosting set with pooled Gauss
- gauss: pooled Gaussian elimination directly on the dataset
- hybrid: enumerate the last k secret bits around an inner solver

Failures are reported through the result objects, never raised.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from lpnkit.core.config import settings
from lpnkit.core.constants import (
    CLEAN_TEST_SIZE,
    HYPOTHESIS_TEST_SIZE,
    MAX_SUFFIX_BITS,
    MODERATE_REPEAT,
    MODERATE_REPEAT_POST,
    MODERATE_TIME_BUDGET_SECONDS,
    POOL_SIZE,
    POOLED_GAUSS_MAX_ITERATIONS,
    RESTRICTED_REPEAT,
    SETTING_DEFAULTS,
    TAU_PRIME_MARGIN,
)
from lpnkit.core.rng import RngStreams
from lpnkit.exceptions import DimensionMismatchError, DomainError, InsufficientSamplesError
from lpnkit.models.bits import BitVector
from lpnkit.models.lpn import Dataset, LpnInstance
from lpnkit.models.mlp import MlpWeights
from lpnkit.schemas.profile import HyperProfile, StopSpec
from lpnkit.schemas.report import RestrictedResult, SolveResult, TracePoint, TrainReport
from lpnkit.services import classic_service, lpn_service, nn_service, training_service
from lpnkit.services.classic_service import PooledGaussConfig
from lpnkit.services.nn_service import Regularizer
from lpnkit.services.optimizer_service import OptimizerState
from lpnkit.services.sampler_service import BatchSampler, OracleSampler, Sampler

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

InnerSolver = Callable[[Dataset, RngStreams], SolveResult]


def restricted_gamma(m: int, log_base: str = "e") -> float:
    """Test-accuracy threshold 1/2 + sqrt(log(20) / m), natural log unless ``log_base`` is ``"2"``."""
    if m <= 0:
        raise DomainError("Sample count must be positive")
    log20 = math.log2(20.0) if log_base == "2" else math.log(20.0)
    return 0.5 + math.sqrt(log20 / m)


def estimate_tau_prime(noisy_accuracy: float, tau: float, margin: float = TAU_PRIME_MARGIN) -> float:
    """
    Boosting-set threshold from the model's accuracy on noisy rows.

    The clean agreement a solves acc = tau + a (1 - 2 tau); the boosting set
    then has error rate 1 - a, and tau' sits ``margin`` above it.
    """
    clean = (noisy_accuracy - tau) / (1.0 - 2.0 * tau)
    return float(np.clip(1.0 - clean + margin, 1e-3, 0.5 - 1e-3))


def first_accepted(
    tasks: Sequence[T],
    run: Callable[[T], R],
    accepted: Callable[[R], bool],
    workers: int = 1,
) -> tuple[int | None, list[R]]:
    """
    Run tasks in order until one is accepted.

    With several workers, tasks run in consecutive chunks of ``workers``; the
    answer is always the lowest accepted index, so it does not depend on the
    worker count.

    Returns:
        Index of the first accepted task (or None) and the results computed
    """
    results: list[R] = []
    if workers <= 1:
        for index, task in enumerate(tasks):
            result = run(task)
            results.append(result)
            if accepted(result):
                return index, results
        return None, results
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for start in range(0, len(tasks), workers):
            chunk = list(pool.map(run, tasks[start:start + workers]))
            for offset, result in enumerate(chunk):
                results.append(result)
                if accepted(result):
                    return start + offset, results
    return None, results


class SolverService:
    """
    Runs the end-to-end solvers.

    Wall-time budgets taken from profiles are multiplied by ``time_scale``;
    independent trials run on up to ``workers`` threads. A deterministic
    service turns every wall-time budget into a fixed step budget of
    ``steps_per_second`` steps per scaled second, so two runs with the same
    seed stop at the same step.
    """

    def __init__(
        self,
        workers: int | None = None,
        time_scale: float | None = None,
        deterministic: bool = False,
        steps_per_second: float | None = None,
    ):
        """
        Initialize the service.

        Args:
            workers: Thread workers for independent trials (defaults to settings)
            time_scale: Multiplier for wall-time budgets (defaults to settings)
            deterministic: Replace wall-time budgets by step budgets
            steps_per_second: Step rate of that conversion (defaults to settings)
        """
        self.workers = workers or settings.DEFAULT_WORKERS
        self.time_scale = time_scale if time_scale is not None else settings.TIME_SCALE
        self.deterministic = deterministic
        self.steps_per_second = (
            steps_per_second if steps_per_second is not None else settings.DETERMINISTIC_STEPS_PER_SECOND
        )
        if self.steps_per_second <= 0:
            raise DomainError("Steps per second must be positive")

    # ------------------------------------------------------------------
    # Shared training plumbing
    # ------------------------------------------------------------------

    def time_budget(self, seconds: float) -> training_service.StopCriterion:
        """
        Stop criterion for a wall-time budget of ``seconds`` before scaling.

        Deterministic services return ``ByStep`` with
        ``ceil(seconds * time_scale * steps_per_second)`` steps (at least one).
        """
        scaled = seconds * self.time_scale
        if self.deterministic:
            return training_service.ByStep(max(1, math.ceil(scaled * self.steps_per_second)))
        return training_service.ByTime(scaled)

    def nominal_seconds(self, steps: int) -> float:
        """Inverse of the deterministic conversion: steps expressed as budget seconds."""
        return steps / (self.time_scale * self.steps_per_second)

    def _stop_criteria(
        self,
        stop: StopSpec,
        accuracy_set: Dataset | None,
        threshold: float | None = None,
    ) -> list[training_service.StopCriterion]:
        criteria: list[training_service.StopCriterion] = []
        target = threshold if threshold is not None else stop.target_accuracy
        if target is not None and accuracy_set is not None:
            criteria.append(training_service.ByAccuracy(accuracy_set, target, stop.eval_interval))
        if stop.max_steps is not None:
            criteria.append(training_service.ByStep(stop.max_steps))
        if stop.max_seconds is not None:
            criteria.append(self.time_budget(stop.max_seconds))
        if not criteria:
            criteria.append(self.time_budget(MODERATE_TIME_BUDGET_SECONDS))
        return criteria

    def train(
        self,
        n: int,
        profile: HyperProfile,
        sampler: Sampler,
        init_rng: np.random.Generator,
        accuracy_set: Dataset | None = None,
        threshold: float | None = None,
        on_trace: Callable[[TracePoint], None] | None = None,
    ) -> TrainReport:
        """
        Build a fresh base model from ``profile`` and train it.

        Args:
            n: Input dimension
            profile: Hyperparameters
            sampler: Batch source
            init_rng: Initialization stream
            accuracy_set: Evaluation set (also the stop-by-accuracy set)
            threshold: Overrides the profile's target accuracy
            on_trace: Callback for trace points
        """
        model = nn_service.build_base_model(n, profile.width, init_rng, profile.depth, profile.activation)
        optimizer = OptimizerState(profile.optimizer, profile.lr, profile.weight_decay)
        regularizer = Regularizer(profile.regularizer, profile.reg_lambda)
        return training_service.run_training(
            model,
            sampler,
            profile.loss,
            regularizer,
            optimizer,
            self._stop_criteria(profile.stop, accuracy_set, threshold),
            eval_dataset=accuracy_set,
            eval_interval=profile.stop.eval_interval,
            on_trace=on_trace,
        )

    # ------------------------------------------------------------------
    # Abundant setting
    # ------------------------------------------------------------------

    def solve_abundant(
        self,
        instance: LpnInstance,
        profile: HyperProfile,
        streams: RngStreams,
        clean_test_size: int = CLEAN_TEST_SIZE,
        on_trace: Callable[[TracePoint], None] | None = None,
    ) -> SolveResult:
        """
        Abundant-sample solver with oracle access.

        Trains on fresh oracle batches until the stop criterion fires, reads
        each secret bit from the model at the unit vectors, and verifies the
        result on a fresh clean test set.

        Args:
            instance: Instance with a harness-known secret
            profile: Hyperparameters; ``stop.target_accuracy`` is measured on clean data
            streams: Random streams of this run
            clean_test_size: Rows of the clean evaluation and verification sets
            on_trace: Callback for trace points

        Returns:
            SolveResult; unsuccessful when training timed out before reaching
            the target accuracy or verification failed
        """
        if instance.secret is None:
            raise DomainError("The abundant solver needs oracle access to an instance with a secret")
        started = time.perf_counter()
        batch = profile.batch_size or int(SETTING_DEFAULTS["abundant"]["batch_size"])
        sampler = OracleSampler(instance, batch)
        clean = lpn_service.make_clean_testset(instance.secret, clean_test_size, streams.stream("clean"))
        report = self.train(instance.n, profile, sampler, streams.stream("init"), clean, on_trace=on_trace)
        trained = time.perf_counter()

        recovered = BitVector.from_bits(nn_service.predict_bits(report.weights, np.eye(instance.n)))
        verify_set = lpn_service.make_clean_testset(instance.secret, clean_test_size, streams.stream("verify"))
        accuracy = 1.0 - lpn_service.label_flip_rate(verify_set, recovered)
        target = profile.stop.target_accuracy
        reached = target is None or (report.final_test_accuracy or 0.0) >= target
        success = reached and accuracy >= 1.0
        finished = time.perf_counter()
        logger.info("Abundant solve: steps=%d reached=%s verified=%.4f", report.steps, reached, accuracy)
        return SolveResult(
            setting="abundant",
            secret_bits=recovered.to_bits().tolist(),
            bit_indices=list(range(instance.n)),
            verification_accuracy=accuracy,
            threshold=1.0,
            wall_seconds=finished - started,
            phase_seconds={"train": report.wall_seconds, "verify": finished - trained},
            success=success,
            details={
                "steps": report.steps,
                "stop_reason": report.stop_reason,
                "clean_accuracy": report.final_test_accuracy,
                "reached_target": reached,
                "trace": [point.model_dump() for point in report.trace],
            },
            weights=report.weights,
        )

    # ------------------------------------------------------------------
    # Restricted setting
    # ------------------------------------------------------------------

    def solve_restricted(
        self,
        dataset: Dataset,
        profile: HyperProfile,
        streams: RngStreams,
        repeat: int = RESTRICTED_REPEAT,
        gamma: float | None = None,
        log_base: str = "e",
    ) -> RestrictedResult:
        """
        Decide the last secret bit from a fixed sample of size m.

        The first floor(m/2) rows train, the next floor(m/2) rows test. For
        g = 0 then g = 1 the guess transform is applied to both halves and up
        to ``repeat`` initializations are trained; the first guess whose test
        accuracy exceeds gamma is returned.

        Raises:
            InsufficientSamplesError: If m < 4
        """
        started = time.perf_counter()
        m = dataset.size
        if m < 4:
            raise InsufficientSamplesError(f"The restricted solver needs at least 4 samples, got {m}")
        gamma = restricted_gamma(m, log_base) if gamma is None else gamma
        if gamma >= 1.0:
            logger.info("Threshold gamma=%.4f is unreachable with %d samples", gamma, m)
            return RestrictedResult(status="inconclusive", gamma=gamma, wall_seconds=time.perf_counter() - started)

        half = m // 2
        train, test = dataset.slice(0, half), dataset.slice(half, 2 * half)
        reduced = {g: (lpn_service.guess_transform(train, g), lpn_service.guess_transform(test, g)) for g in (0, 1)}
        # stop as soon as the test accuracy strictly exceeds gamma
        stop_at = math.nextafter(gamma, 2.0)

        def attempt(task: tuple[int, int]) -> tuple[int, float]:
            g, r = task
            train_g, test_g = reduced[g]
            sampler = BatchSampler(train_g, profile.batch_size, streams.stream("sampler", g, r))
            report = self.train(train_g.n, profile, sampler, streams.stream("init", g, r), test_g, stop_at)
            accuracy = training_service.evaluate_accuracy(report.weights, test_g)
            logger.debug("Guess %d init %d: test accuracy %.4f", g, r, accuracy)
            return g, accuracy

        tasks = [(g, r) for g in (0, 1) for r in range(repeat)]
        winner, results = first_accepted(tasks, attempt, lambda result: result[1] > gamma, self.workers)
        accuracies: dict[int, list[float]] = {0: [], 1: []}
        for g, accuracy in results:
            accuracies[g].append(accuracy)
        wall = time.perf_counter() - started
        if winner is None:
            return RestrictedResult(status="inconclusive", gamma=gamma, accuracies=accuracies, wall_seconds=wall)
        return RestrictedResult(status="decided", guess=tasks[winner][0], gamma=gamma, accuracies=accuracies, wall_seconds=wall)

    # ------------------------------------------------------------------
    # Gauss baseline
    # ------------------------------------------------------------------

    def solve_gauss(
        self,
        dataset: Dataset,
        streams: RngStreams,
        tau_prime: float | None = None,
        pool_size: int = POOL_SIZE,
        test_size: int = HYPOTHESIS_TEST_SIZE,
        max_iterations: int = POOLED_GAUSS_MAX_ITERATIONS,
    ) -> SolveResult:
        """
        Pooled Gaussian elimination on a dataset.

        tau' defaults to the midpoint between the nominal noise rate and 1/2.
        """
        started = time.perf_counter()
        tau = dataset.meta.tau
        tau_prime = tau + (0.5 - tau) / 2.0 if tau_prime is None else tau_prime
        pool, test = classic_service.split_for_gauss(dataset, pool_size, test_size)
        cfg = PooledGaussConfig(
            tau_prime=tau_prime,
            rng=streams.stream("gauss"),
            pool_size=pool_size,
            test_size=test_size,
            max_iterations=max_iterations,
        )
        outcome = classic_service.pooled_gauss(pool, test, cfg)
        wall = time.perf_counter() - started
        return SolveResult(
            setting="gauss",
            secret_bits=None if outcome.secret is None else outcome.secret.to_bits().tolist(),
            bit_indices=list(range(dataset.n)),
            verification_accuracy=None if outcome.error_rate is None else 1.0 - outcome.error_rate,
            threshold=1.0 - tau_prime,
            wall_seconds=wall,
            phase_seconds={"gauss": wall},
            success=outcome.found,
            details={
                "iterations": outcome.iterations,
                "singular_draws": outcome.singular_draws,
                "screened": outcome.screened,
                "tau_prime": tau_prime,
                "pool_rows": pool.size,
                "test_rows": test.size,
            },
        )

    # ------------------------------------------------------------------
    # Moderate setting
    # ------------------------------------------------------------------

    def boosting_set(self, model: MlpWeights, count: int, rng: np.random.Generator, tau: float) -> Dataset:
        """
        Pseudo-labeled set of ``count`` fresh random (n+1)-bit inputs.

        The label of (x, r) is round(model(x)) XOR r, so the labels are balanced
        whatever the model's bias, and the effective secret is (s, 1).
        """
        n = model.input_width
        inputs = rng.integers(0, 2, size=(count, n + 1), dtype=np.uint8)
        chunk = settings.EVAL_CHUNK_ROWS
        labels = np.empty(count, dtype=np.uint8)
        for start in range(0, count, chunk):
            stop = min(start + chunk, count)
            labels[start:stop] = nn_service.predict_bits(model, inputs[start:stop, :n]) ^ inputs[start:stop, n]
        return Dataset.from_dense(inputs, labels, tau, "boosting")

    def solve_moderate(
        self,
        dataset: Dataset,
        profile: HyperProfile,
        streams: RngStreams,
        repeat: int = MODERATE_REPEAT,
        repeat_post: int = MODERATE_REPEAT_POST,
        boost_size: int = POOL_SIZE + HYPOTHESIS_TEST_SIZE,
        pool_size: int = POOL_SIZE,
        tau_prime: float | None = None,
        max_iterations: int = POOLED_GAUSS_MAX_ITERATIONS,
        count_occurrences: bool = False,
        on_trace: Callable[[TracePoint], None] | None = None,
    ) -> SolveResult:
        """
        Moderate-sample solver: network training followed by pooled-Gauss boosting.

        The last m1 = ceil(2n / (1/2 - tau)^2) rows are held out. Each of the
        ``repeat`` runs trains a model on the rest, builds a rebalanced boosting
        set of ``boost_size`` rows (the first ``pool_size`` form the pool, the
        remainder the hypothesis test), and runs pooled Gauss ``repeat_post``
        times. A candidate (last bit stripped) is accepted when its accuracy on
        the held-out rows reaches 1 - tau - sqrt(3 (1/2 - tau) n / m1).

        Args:
            dataset: Noisy samples; ``meta.tau`` must be the nominal noise rate
            profile: Hyperparameters
            streams: Random streams of this run
            repeat: Training runs
            repeat_post: Pooled-Gauss runs per trained model
            boost_size: Boosting-set rows
            pool_size: Pool rows within the boosting set
            tau_prime: Pooled-Gauss threshold; estimated from held-out accuracy when None
            max_iterations: Draw budget of each pooled-Gauss run
            count_occurrences: Run every pooled-Gauss repetition and count how
                often the true secret (if known) comes out
            on_trace: Callback for trace points

        Raises:
            InsufficientSamplesError: If m <= m1
        """
        started = time.perf_counter()
        n, tau, m = dataset.n, dataset.meta.tau, dataset.size
        m1 = classic_service.moderate_test_size(n, tau)
        if m <= m1:
            raise InsufficientSamplesError(f"The moderate solver needs more than m1={m1} samples, got {m}")
        if not 0 < pool_size < boost_size:
            raise DomainError("The pool must be a proper part of the boosting set")
        train, test = dataset.slice(0, m - m1), dataset.slice(m - m1, m)
        threshold = classic_service.moderate_accept_threshold(n, tau, m1)
        phases = {"train": 0.0, "boost": 0.0, "gauss": 0.0}
        details: dict = {"m1": m1, "runs": []}
        accepted: BitVector | None = None
        accepted_accuracy: float | None = None
        occurrences = 0
        last_model: MlpWeights | None = None
        extended = None if dataset.secret is None else dataset.secret.concat(BitVector.from_bits([1]))

        for rep in range(repeat):
            mark = time.perf_counter()
            sampler = BatchSampler(train, profile.batch_size, streams.stream("sampler", rep))
            report = self.train(n, profile, sampler, streams.stream("init", rep), on_trace=on_trace)
            noisy_accuracy = training_service.evaluate_accuracy(report.weights, test)
            last_model = report.weights
            phases["train"] += time.perf_counter() - mark

            mark = time.perf_counter()
            boost = self.boosting_set(report.weights, boost_size, streams.stream("boost", rep), tau)
            run_tau_prime = tau_prime if tau_prime is not None else estimate_tau_prime(noisy_accuracy, tau)
            run: dict = {
                "steps": report.steps,
                "noisy_test_accuracy": noisy_accuracy,
                "tau_prime": run_tau_prime,
                "boost_label_mean": float(boost.dense_labels.mean()),
            }
            if extended is not None:
                flip_rate = lpn_service.label_flip_rate(boost, extended)
                run["boost_flip_rate"] = flip_rate
                run["clean_accuracy"] = 1.0 - flip_rate
            phases["boost"] += time.perf_counter() - mark
            logger.info("Moderate run %d: noisy test accuracy %.4f, tau'=%.4f", rep, noisy_accuracy, run_tau_prime)

            mark = time.perf_counter()
            pool, boost_test = boost.slice(0, pool_size), boost.slice(pool_size, boost.size)
            found: list[str] = []
            for post in range(repeat_post):
                cfg = PooledGaussConfig(
                    tau_prime=run_tau_prime,
                    rng=streams.stream("gauss", rep, post),
                    max_iterations=max_iterations,
                )
                outcome = classic_service.pooled_gauss(pool, boost_test, cfg)
                if outcome.secret is None:
                    continue
                candidate = outcome.secret.slice(0, n)
                accuracy = 1.0 - lpn_service.label_flip_rate(test, candidate)
                found.append(candidate.to_hex())
                if dataset.secret is not None and candidate == dataset.secret:
                    occurrences += 1
                if accepted is None and accuracy >= threshold:
                    accepted, accepted_accuracy = candidate, accuracy
                if accepted is not None and not count_occurrences:
                    break
            phases["gauss"] += time.perf_counter() - mark
            run["candidates"] = found
            details["runs"].append(run)
            if accepted is not None and not count_occurrences:
                break

        if dataset.secret is not None:
            details["correct_occurrences"] = occurrences
        return SolveResult(
            setting="moderate",
            secret_bits=None if accepted is None else accepted.to_bits().tolist(),
            bit_indices=list(range(n)),
            verification_accuracy=accepted_accuracy,
            threshold=threshold,
            wall_seconds=time.perf_counter() - started,
            phase_seconds=phases,
            success=accepted is not None,
            details=details,
            weights=last_model,
        )

    # ------------------------------------------------------------------
    # Suffix enumeration
    # ------------------------------------------------------------------

    def solve_hybrid(
        self,
        dataset: Dataset,
        k: int,
        inner: InnerSolver,
        streams: RngStreams,
        holdout_size: int | None = None,
        suffix_order: Iterable[int] | None = None,
    ) -> SolveResult:
        """
        Enumerate the last k secret bits around an inner solver.

        The last ``holdout_size`` rows are held out. Suffixes are tried in
        ascending integer order (``suffix[j] = (v >> j) & 1`` guesses
        coordinate n - k + j); the inner solver runs on the reduced rest, and
        the first full candidate whose holdout accuracy reaches the moderate
        acceptance threshold wins.

        Raises:
            DomainError: If k exceeds the enumeration guard
            DimensionMismatchError: If k >= n
        """
        started = time.perf_counter()
        n, tau, m = dataset.n, dataset.meta.tau, dataset.size
        if k > MAX_SUFFIX_BITS:
            raise DomainError(f"Suffix width {k} exceeds the enumeration guard of {MAX_SUFFIX_BITS} bits")
        if not 0 <= k < n:
            raise DimensionMismatchError(f"Suffix width must lie in [0, {n}), got {k}")
        if holdout_size is None:
            holdout_size = min(m // 4, classic_service.moderate_test_size(n, tau))
        if not 0 < holdout_size < m:
            raise InsufficientSamplesError(f"Cannot hold out {holdout_size} of {m} samples")
        body, holdout = dataset.slice(0, m - holdout_size), dataset.slice(m - holdout_size, m)
        threshold = classic_service.moderate_accept_threshold(n, tau, holdout_size)
        order = list(suffix_order) if suffix_order is not None else list(range(2**k))

        def attempt(value: int) -> tuple[int, SolveResult, BitVector | None, float | None]:
            bits = lpn_service.suffix_bits(value, k)
            reduced = lpn_service.enumerate_suffix(body, k, bits)
            result = inner(reduced, streams.child("suffix", value))
            if not result.success or result.secret is None:
                return value, result, None, None
            candidate = BitVector.from_bits(np.concatenate([result.secret.to_bits(), bits]))
            accuracy = 1.0 - lpn_service.label_flip_rate(holdout, candidate)
            logger.debug("Suffix %d: holdout accuracy %.4f", value, accuracy)
            return value, result, candidate, accuracy

        winner, results = first_accepted(
            order, attempt, lambda r: r[2] is not None and r[3] >= threshold, self.workers
        )
        wall = time.perf_counter() - started
        details = {"suffix_bits": k, "suffixes_tried": len(results), "holdout_rows": holdout_size}
        if winner is None:
            return SolveResult(setting="hybrid", bit_indices=list(range(n)), threshold=threshold,
                               wall_seconds=wall, phase_seconds={"enumerate": wall}, details=details)
        value, inner_result, candidate, accuracy = results[winner]
        details.update({"suffix": value, "inner": inner_result.setting, "inner_details": inner_result.details})
        logger.info("Hybrid solve accepted suffix %d after %d attempts", value, len(results))
        return SolveResult(
            setting="hybrid",
            secret_bits=candidate.to_bits().tolist(),
            bit_indices=list(range(n)),
            verification_accuracy=accuracy,
            threshold=threshold,
            wall_seconds=wall,
            phase_seconds={"enumerate": wall},
            success=True,
            details=details,
        )

    # ------------------------------------------------------------------
    # Inner solvers for the hybrid pipeline
    # ------------------------------------------------------------------

    def gauss_inner(self, **kwargs) -> InnerSolver:
        """Inner solver running :meth:`solve_gauss` with fixed keyword arguments."""
        return lambda reduced, streams: self.solve_gauss(reduced, streams, **kwargs)

    def moderate_inner(self, profile: HyperProfile, **kwargs) -> InnerSolver:
        """Inner solver running :meth:`solve_moderate` with fixed arguments."""
        return lambda reduced, streams: self.solve_moderate(reduced, profile, streams, **kwargs)
