# latent-shift-lab/src/latent_shift_lab/core/constants.py

# --- Differentiation engine ---
LEAKY_RELU_SLOPE = 0.2
GRAD_CHECK_TOLERANCE = 1e-4

# --- Latent causal model (synthetic benchmark) ---
NOISE_MEAN_RANGE = (1.0, 2.0)
NOISE_VARIANCE_RANGE = (0.3, 1.0)
BENCHMARK_SAMPLES_PER_DOMAIN = 1000
MIXING_CONDITION_LIMIT = 1e3
MIXING_MAX_ATTEMPTS = 100
SINGULAR_RATIO = 1e-10

# --- Variational model ---
LOG_VARIANCE_BOUND = 8.0

# --- Label-shift resampler ---
MARGINAL_FLOOR = 1e-6
KL_TOLERANCE = 0.05
KL_EARLY_EXIT = 0.02
SOLVER_MAX_ITERATIONS = 5000
SOLVER_LEARNING_RATE = 0.05
DIRICHLET_CONCENTRATION = 5.0
RESAMPLE_KL_TARGETS = (0.3, 0.5, 0.7)

# --- CLI exit codes ---
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_NUMERIC_ERROR = 3
EXIT_IO_ERROR = 4
