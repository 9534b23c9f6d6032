"""
Constants shared by the solvers, file formats and the CLI.

Hyperparameter defaults are the tuned values per setting; sizes are the
ones the solvers were calibrated with.
"""

# Hyperparameter defaults per setting: (learning rate, batch size, weight decay)
# batch size None means "whole training set"
SETTING_DEFAULTS: dict[str, dict[str, float | int | None]] = {
    "abundant": {"lr": 2e-4, "batch_size": 131072, "weight_decay": 0.0},
    "restricted": {"lr": 1e-4, "batch_size": None, "weight_decay": 2e-3},
    "moderate": {"lr": 2e-3, "batch_size": 1048576, "weight_decay": 0.0},
}

# Shared architecture: base model of width 1000, Kaiming init, logistic loss, Adam
DEFAULT_WIDTH: int = 1000
DEFAULT_DEPTH: int = 1
MAX_DEPTH: int = 3

ACTIVATIONS: tuple[str, ...] = ("relu", "sigmoid", "cosine", "identity")
LOSSES: tuple[str, ...] = ("zero_one", "logistic", "mae", "mse")
OPTIMIZERS: tuple[str, ...] = ("sgd", "adam")
REGULARIZERS: tuple[str, ...] = ("none", "l1", "l2")

# Adam defaults
ADAM_BETA1: float = 0.9
ADAM_BETA2: float = 0.999
ADAM_EPS: float = 1e-8

# Stop-by-accuracy threshold used when tuning the abundant setting
ABUNDANT_ACCURACY_THRESHOLD: float = 0.8

# Clean test set size for the abundant tuner
CLEAN_TEST_SIZE: int = 131072

# Evaluation cadence (steps between accuracy evaluations)
ABUNDANT_EVAL_INTERVAL: int = 10
DEFAULT_EVAL_INTERVAL: int = 100

# Restricted setting
RESTRICTED_STEPS: int = 300_000
RESTRICTED_REPEAT: int = 8

# Moderate setting
MODERATE_TIME_BUDGET_SECONDS: float = 20 * 60
MODERATE_REPEAT: int = 1
MODERATE_REPEAT_POST: int = 20
TAU_PRIME_MARGIN: float = 0.005

# Pooled Gaussian elimination
POOL_SIZE: int = 131072
HYPOTHESIS_TEST_SIZE: int = 100000
BOOSTING_SET_SIZE: int = POOL_SIZE + HYPOTHESIS_TEST_SIZE
SCREEN_ROWS: int = 1024
POOLED_GAUSS_MAX_ITERATIONS: int = 1_000_000

# Tuners
TUNE_REPEAT: int = 3

# Hybrid enumeration guard
MAX_SUFFIX_BITS: int = 24

# File formats
DATASET_MAGIC: bytes = b"LPN1"
CHECKPOINT_MAGIC: bytes = b"MLP1"
ACTIVATION_TAGS: dict[str, int] = {"identity": 0, "relu": 1, "sigmoid": 2, "cosine": 3}

# CLI exit codes
EXIT_SUCCESS: int = 0
EXIT_FAILURE: int = 1
EXIT_INCONCLUSIVE: int = 2
EXIT_USAGE: int = 64

# Default stop criteria per setting (StopSpec fields)
SETTING_STOPS: dict[str, dict[str, float | int]] = {
    "abundant": {
        "target_accuracy": ABUNDANT_ACCURACY_THRESHOLD,
        "max_seconds": MODERATE_TIME_BUDGET_SECONDS,
        "eval_interval": ABUNDANT_EVAL_INTERVAL,
    },
    "restricted": {"max_steps": RESTRICTED_STEPS, "eval_interval": DEFAULT_EVAL_INTERVAL},
    "moderate": {"max_seconds": MODERATE_TIME_BUDGET_SECONDS, "eval_interval": DEFAULT_EVAL_INTERVAL},
}
