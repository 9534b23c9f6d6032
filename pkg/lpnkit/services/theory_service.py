"""
Property checks backing the solvers' theory.

Each check runs at fixed seeds and returns a CheckReport:

- parity-net: the exact parity network agrees with the packed parity on every input
- grad-check: backpropagation agrees with central finite differences
- grad-scaling: noisy MAE gradients rescaled by 1/(1 - 2 tau) stay within the
  concentration bound of the clean ones
- lemma1: the sparse-secret transform relabels exactly and inverts exactly
- piling-up: BKW output noise matches the predicted composition
"""

import logging
import math
from typing import Callable

import numpy as np

from lpnkit.core.rng import RngStreams
from lpnkit.exceptions import DomainError, RankDeficientError
from lpnkit.models.bits import BitMatrix, BitVector
from lpnkit.models.mlp import MlpWeights
from lpnkit.schemas.report import CheckReport
from lpnkit.services import classic_service, lpn_service, nn_service, training_service
from lpnkit.services.classic_service import BkwConfig
from lpnkit.services.nn_service import NO_REGULARIZER, Regularizer

logger = logging.getLogger(__name__)

CHECKS: tuple[str, ...] = ("parity-net", "grad-check", "grad-scaling", "lemma1", "piling-up")

GRAD_TOLERANCE = 1e-4
FINITE_DIFFERENCE_STEP = 1e-5
# relative errors are taken against at least this magnitude
GRAD_FLOOR = 1e-3
KINK_MARGIN = 1e-3


def all_inputs(n: int) -> np.ndarray:
    """Every vector of {0,1}^n as a (2^n, n) uint8 array; row k holds the bits of k."""
    values = np.arange(2**n, dtype=np.int64)
    return ((values[:, np.newaxis] >> np.arange(n)) & 1).astype(np.uint8)


def numerical_gradient(
    model: MlpWeights,
    inputs: np.ndarray,
    labels: np.ndarray,
    loss: str,
    reg: Regularizer = NO_REGULARIZER,
    step: float = FINITE_DIFFERENCE_STEP,
) -> list[np.ndarray]:
    """Central finite differences of the regularized batch loss, one array per parameter block."""
    params = [p.copy() for p in model.parameters()]
    grads = []
    for block in params:
        grad = np.zeros_like(block)
        for index in np.ndindex(block.shape):
            saved = block[index]
            block[index] = saved + step
            upper = nn_service.batch_loss(model.with_parameters(params), inputs, labels, loss, reg)
            block[index] = saved - step
            lower = nn_service.batch_loss(model.with_parameters(params), inputs, labels, loss, reg)
            block[index] = saved
            grad[index] = (upper - lower) / (2.0 * step)
        grads.append(grad)
    return grads


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = GRAD_FLOOR) -> float:
    """Largest |a - b| / max(|a|, |b|, floor) over the entries."""
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / scale, initial=0.0))


class TheoryService:
    """
    Runs the theory checks from one seed.
    """

    def __init__(self, streams: RngStreams):
        """
        Initialize service.

        Args:
            streams: Root streams; each check draws from its own labeled child
        """
        self.streams = streams.child("theory")

    def run(self, check: str, **options) -> CheckReport:
        """
        Run a check by name.

        Raises:
            DomainError: If the check name is unknown
        """
        runners: dict[str, Callable[..., CheckReport]] = {
            "parity-net": self.check_parity_network,
            "grad-check": self.check_gradients,
            "grad-scaling": self.check_gradient_scaling,
            "lemma1": self.check_sparse_transform,
            "piling-up": self.check_piling_up,
        }
        if check not in runners:
            raise DomainError(f"Unknown check '{check}'; choose from {', '.join(CHECKS)}")
        report = runners[check](**{k: v for k, v in options.items() if v is not None})
        logger.info("Check %s: %s (%d/%d cases failed)", check, "pass" if report.passed else "FAIL",
                    report.failures, report.cases)
        return report

    def check_parity_network(self, n: int = 12, secrets: int = 100) -> CheckReport:
        """
        Compare the exact parity network with the packed parity on all 2^n inputs.

        Args:
            n: Dimension, at most 16
            secrets: Number of uniformly random secrets
        """
        if not 1 <= n <= 16:
            raise DomainError(f"Exhaustive parity check supports 1 <= n <= 16, got {n}")
        rng = self.streams.stream("parity-net")
        dense = all_inputs(n)
        packed = BitMatrix.from_dense(dense)
        inputs = dense.astype(np.float64)
        failures = 0
        mismatches = 0
        for _ in range(secrets):
            secret = lpn_service.sample_uniform_secret(n, rng)
            expected = packed.parity_with(secret).to_bits().astype(np.float64)
            output = nn_service.forward(nn_service.build_parity_network(secret), inputs)
            wrong = int(np.count_nonzero(output != expected))
            mismatches += wrong
            failures += wrong > 0
        return CheckReport(
            check="parity-net",
            passed=failures == 0,
            cases=secrets,
            failures=failures,
            measurements={"n": n, "inputs": 2**n, "mismatches": mismatches},
        )

    def _gradient_case(self, case: int, rng: np.random.Generator) -> tuple[MlpWeights, np.ndarray, np.ndarray, str, Regularizer]:
        activation = ("relu", "sigmoid", "cosine")[case % 3]
        loss = ("logistic", "mse", "mae")[(case // 3) % 3]
        reg = NO_REGULARIZER if case % 2 == 0 else Regularizer("l2", 0.01)
        while True:
            n = int(rng.integers(2, 11))
            width = int(rng.integers(2, 17))
            depth = 1 + case % 2
            model = nn_service.build_base_model(n, width, rng, depth, activation, dtype=np.float64)
            inputs = rng.integers(0, 2, size=(8, n)).astype(np.float64)
            labels = rng.integers(0, 2, size=8).astype(np.uint8)
            if activation != "relu":
                return model, inputs, labels, loss, reg
            pre, _ = nn_service.forward_cache(model, inputs)
            # finite differences are meaningless across a ReLU kink
            if min(float(np.abs(z).min()) for z in pre[:-1]) > KINK_MARGIN:
                return model, inputs, labels, loss, reg

    def check_gradients(self, cases: int = 50, tolerance: float = GRAD_TOLERANCE) -> CheckReport:
        """
        Backpropagation against central finite differences on small float64 models.

        Cases cycle through activations, losses and regularization.
        """
        rng = self.streams.stream("grad-check")
        worst = 0.0
        failures = 0
        for case in range(cases):
            model, inputs, labels, loss, reg = self._gradient_case(case, rng)
            analytic = nn_service.backward(model, inputs, labels, loss, reg).parameters()
            numeric = numerical_gradient(model, inputs, labels, loss, reg)
            error = max(relative_error(a, b) for a, b in zip(analytic, numeric))
            logger.debug("grad-check case %d (%s, %s): %.3e", case, loss, model.activations[0], error)
            worst = max(worst, error)
            failures += error >= tolerance
        return CheckReport(
            check="grad-check",
            passed=failures == 0,
            cases=cases,
            failures=failures,
            measurements={"max_relative_error": worst, "tolerance": tolerance},
        )

    def check_gradient_scaling(
        self,
        n: int = 8,
        width: int = 16,
        batch_size: int = 1_000_000,
        taus: tuple[float, ...] = (0.1, 0.3, 0.45),
        confidence: float = 0.99,
    ) -> CheckReport:
        """
        Scaled noisy MAE gradient against the clean one, per parameter block.

        C is the largest per-sample output derivative over all 2^n inputs.
        """
        streams = self.streams.child("grad-scaling")
        model = nn_service.build_base_model(n, width, streams.stream("init"), dtype=np.float64)
        bound = training_service.gradient_bound_constant(model, all_inputs(n))
        failures = 0
        rows = []
        for index, tau in enumerate(taus):
            instance = lpn_service.create_instance(
                n, tau, streams.stream("secret", index), streams.stream("data", index), uniform=True
            )
            probe = training_service.gradient_scaling_probe(model, instance, batch_size, tau)
            epsilon = training_service.gradient_deviation_bound(n, width, tau, batch_size, bound, confidence)
            deviation = max(probe.deviation)
            failures += deviation >= epsilon
            rows.append({"tau": tau, "deviation": deviation, "epsilon": epsilon})
        return CheckReport(
            check="grad-scaling",
            passed=failures == 0,
            cases=len(taus),
            failures=failures,
            measurements={"C": bound, "batch_size": batch_size, "rows": rows},
        )

    def check_sparse_transform(self, trials: int = 50, max_n: int = 8, max_m: int = 64) -> CheckReport:
        """
        Sparse-secret transform on small instances with known secrets.

        The transformed labels must equal e1^t A-bar + e2 with the errors
        recomputed from the secret, and the original secret must come back
        from the consumed errors (all-zero on noiseless data).
        """
        rng = self.streams.stream("lemma1")
        failures = 0
        for trial in range(trials):
            tau = (0.0, 0.25)[trial % 2]
            n = int(rng.integers(1, max_n + 1))
            m = int(rng.integers(n + 1, max_m + 1))
            instance = lpn_service.create_instance(n, tau, rng, rng, uniform=True)
            while True:
                dataset = lpn_service.generate_dataset(instance, m)
                try:
                    transformed, info = lpn_service.sparse_secret_transform(dataset)
                    break
                except RankDeficientError:
                    continue
            errors = dataset.inputs.parity_with(instance.secret) ^ dataset.labels
            error_bits = errors.to_bits()
            e1 = BitVector.from_bits(error_bits[info.consumed])
            e2 = BitVector.from_bits(error_bits[info.remaining])
            ok = transformed.labels == transformed.inputs.parity_with(e1) ^ e2
            ok &= transformed.secret == e1
            ok &= lpn_service.recover_original_secret(info, e1) == instance.secret
            if tau == 0.0:
                ok &= e1.popcount() == 0
                ok &= lpn_service.recover_original_secret(info, BitVector.zeros(n)) == instance.secret
            failures += not ok
        return CheckReport(check="lemma1", passed=failures == 0, cases=trials, failures=failures)

    def check_piling_up(
        self,
        n: int = 24,
        block_width: int = 4,
        rounds: tuple[int, ...] = (1, 2, 3),
        tau: float = 0.25,
        m: int = 1_000_000,
        trials: int = 10,
    ) -> CheckReport:
        """
        BKW output flip rate against (1 - (1 - 2 tau)^(2^a)) / 2.

        Rows sharing a representative have correlated noise, so the standard
        error comes from the spread over independent trials (floored by the
        binomial one). Also checks that three rounds at tau = 0.25 predict 0.498.
        """
        streams = self.streams.child("piling-up")
        failures = 0
        rows = []
        for a in rounds:
            predicted = classic_service.predicted_bkw_noise(tau, a)
            rates, sizes = [], []
            for trial in range(trials):
                instance = lpn_service.create_instance(
                    n, tau, streams.stream("secret", a, trial), streams.stream("data", a, trial), uniform=True
                )
                reduced = classic_service.bkw_reduce(lpn_service.generate_dataset(instance, m), BkwConfig(block_width, a))
                rates.append(lpn_service.label_flip_rate(reduced, reduced.secret))
                sizes.append(reduced.size)
            mean = float(np.mean(rates))
            binomial = math.sqrt(predicted * (1.0 - predicted) / sum(sizes))
            spread = float(np.std(rates, ddof=1)) / math.sqrt(trials) if trials > 1 else 0.0
            sigma = max(spread, binomial)
            ok = abs(mean - predicted) <= 3.0 * sigma
            failures += not ok
            rows.append({"rounds": a, "predicted": predicted, "empirical": mean, "sigma": sigma, "rows": sizes[-1]})
        endpoint = classic_service.predicted_bkw_noise(0.25, 3)
        endpoint_ok = abs(endpoint - 0.498) <= 0.0005
        failures += not endpoint_ok
        return CheckReport(
            check="piling-up",
            passed=failures == 0,
            cases=len(rounds) + 1,
            failures=failures,
            measurements={"rows": rows, "predicted_a3_tau025": endpoint},
        )
