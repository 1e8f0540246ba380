"""Configuration constants"""

VERSION = "0.1.0"

# CSV column headers for simulated erasure-rate curves
SIMULATION_CSV_HEADERS = [
    "overhead",
    "scope",
    "erasure_rate",
    "trials",
    "K",
    "scheme",
    "seed",
]

# CSV column headers for density-evolution curves
DE_CSV_HEADERS = [
    "epsilon_r",
    "scope",
    "P_fixed",
    "iterations",
    "converged",
]

# CSV column headers for ML lower-bound curves
BOUND_CSV_HEADERS = [
    "epsilon_r",
    "scope",
    "bound",
]

# CSV column headers for the mu_bar sweep of the relay LP
SWEEP_CSV_HEADERS = [
    "mu_bar",
    "epsilon_r_star",
    "status",
]

# Significant digits used for every float written to CSV
CSV_FLOAT_DIGITS = 10

# Degree distributions
NORMALIZATION_TOLERANCE = 1e-9

# Robust Soliton defaults for the source check-node distribution
DEFAULT_RSD_K = 100
DEFAULT_RSD_C = 0.05
DEFAULT_RSD_DELTA = 0.5

# Density evolution
DE_TOLERANCE = 1e-10
DE_MAX_ITERS = 2000

# Linear programs
LP_RESIDUAL_TOLERANCE = 1e-7
LP_NEGATIVE_TOLERANCE = 1e-9
LP_VALIDATION_MARGIN = 1.02
DEFAULT_LP_GRID = 100

# Overhead targets used when comparing simulation against DE
COMPARISON_TARGETS = (1e-1, 3e-2, 1e-2)

# Published example: relay distribution from LP1 for four sources, d_max = 4
EEP_RELAY_GAMMA = (0.7520, 0.1685, 0.0455, 0.0340)

# Published example: relay distribution from LP2 for the same four sources.
# Printed with rounding (sums to 0.9999), so it is normalized on load.
UEP_RELAY_GAMMA = (0.6021, 0.3086, 0.0511, 0.0381)

# Four-source UEP example
FOUR_SOURCE_Q = (0.08, 0.29, 0.27, 0.36)
FOUR_SOURCE_ALPHA = (0.05, 0.20, 0.30, 0.45)

# Eight-source, three-relay UEP example
EIGHT_SOURCE_Q = (0.130, 0.140, 0.125, 0.145, 0.110, 0.130, 0.110, 0.110)
EIGHT_SOURCE_ALPHA = (0.08, 0.10, 0.10, 0.13, 0.12, 0.15, 0.15, 0.17)
THREE_RELAY_DELTAS = (0.1, 0.08, 0.05)

# Default experiment values
DEFAULT_SCHEME = "shift_buffer"
DEFAULT_SCHEDULING = "random_one"
DEFAULT_CONVENTIONAL_POLICY = "stall"
DEFAULT_OVERHEADS = "0.5:2.5:0.1"
DEFAULT_TRIALS = 20

# Guard against configurations that can never reach the last overhead point
MAX_ROUNDS_FACTOR = 1000
