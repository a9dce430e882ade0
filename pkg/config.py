# -*- coding: utf-8 -*-
"""
Configuration Module for the Hashtag Epidemic Pipeline
Contains all constants, column definitions, and default parameters.
"""

# =============================================================================
# SMOOTHING & EXTRACTION
# =============================================================================
DEFAULT_WINDOW_HOURS = 1.0      # one-hour centered boxcar
DEFAULT_STEP_HOURS = 0.25       # 4 samples per default window
DEFAULT_FRACTION = 0.01         # occurrence bounds at 1/100 of the peak
SWEEP_WINDOWS_HOURS = (0.5, 1.0, 2.0, 4.0)

# =============================================================================
# INTEGRATOR
# =============================================================================
ODE_METHOD = "RK45"
ODE_RTOL = 1e-6
ODE_ATOL = 1e-8
NEGATIVE_SLACK = 1e-9           # states below -slack are clamped to 0
SIR_INITIAL_RECOVERED = 0.0
SIRI_INITIAL_RECOVERED = 1.0    # dR/dt stays 0 forever if R starts at 0

# =============================================================================
# SAMPLER
# =============================================================================
DEFAULT_TOTAL_SAMPLES = 20000
DEFAULT_BURN_IN = 0.5
DEFAULT_STRETCH_A = 2.0
MIN_WALKERS = 50
DEFAULT_SEED = 42
INIT_MAX_RETRIES = 100
DEGENERATE_ACCEPTANCE = 0.02
MIN_CHAIN_LENGTH = 100
CREDIBLE_LOW = 2.5
CREDIBLE_HIGH = 97.5

PARAM_NAMES = ["beta", "decay", "s0", "i0", "sigma"]

# =============================================================================
# PRIOR DEFAULTS (rates in 1/hour, populations in persons, noise in counts)
# =============================================================================
PRIOR_BETA_MAX = 50.0
PRIOR_DECAY_MAX = 50.0
PRIOR_S0_MIN = 1.0
PRIOR_S0_SCALE = 100.0          # s0 upper bound = scale x total occurrence count
PRIOR_SIGMA_FLOOR = 1.0

# =============================================================================
# ANALYSIS
# =============================================================================
DEFAULT_THRESHOLD = 1.0
DEFAULT_BINS = 20
EDGE_SNAP_RTOL = 1e-9

# =============================================================================
# COLUMN DEFINITIONS
# =============================================================================
CSV_REQUIRED_COLUMNS = ["timestamp", "hashtag"]
CSV_OPTIONAL_COLUMNS = ["location"]
NDJSON_TIME_KEY = "ts"
NDJSON_TAG_KEY = "tag"
NDJSON_LOCATION_KEY = "loc"

SERIES_COLS = ["t_hours", "value"]
TRAJECTORY_COLS = ["t_hours", "S", "I", "R"]

SUMMARY_COLS = [
    "hashtag",
    "location",
    "model",
    "beta_med",
    "beta_lo",
    "beta_hi",
    "decay_med",
    "decay_lo",
    "decay_hi",
    "s0_med",
    "i0_med",
    "sigma_med",
    "R_med",
    "R_lo",
    "R_hi",
    "accept_frac",
    "n_samples",
]

SKIP_COLS = ["hashtag", "location", "model", "reason"]

TRUTH_COLS = ["hashtag", "location", "model", "beta", "decay", "s0", "i0", "sigma", "R_true"]

SCATTER_COLS = ["hashtag", "location", "beta_med", "decay_med", "above_line", "distance"]
HISTOGRAM_COLS = ["bin_lo", "bin_hi", "count"]
TRACE_COLS = ["t_hours", "observed", "model_I"]

# =============================================================================
# OUTPUT
# =============================================================================
DEFAULT_OUT_DIR = "hashtag_output"
CSV_FLOAT_FORMAT = "%.10g"
ALL_LOCATIONS = "all"
