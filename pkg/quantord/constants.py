import math


class Constants:
    COLOR_ORANGE = "\033[38;2;255;111;60m"

    # Sampler defaults (12,000 sweeps after 3,000 burn-in, iota = sqrt(3))
    ITERATIONS = 12000
    BURN_IN = 3000
    THIN = 1
    SEED = 0
    IOTA = math.sqrt(3.0)
    QUANTILES = (0.25, 0.5, 0.75)
    OR2_CUTPOINTS = (0.0, 1.0)
    CUTPOINT_ANCHOR = 0.0

    # Default priors
    BETA_PRIOR_VAR = 1.0
    DELTA_PRIOR_VAR = 0.25
    SIGMA_SHAPE_N0 = 5.0
    SIGMA_RATE_D0 = 8.0

    # Numerical guards
    GIG_LAMBDA_FLOOR = 1e-300
    EXP_CLAMP = 300.0
    TRUNCNORM_TAIL = 0.47
    HESSIAN_STEP = 1e-4
    FALLBACK_DHAT_SCALE = 0.01
    BLOCK_PROPOSAL_DF = 8.0
    MAX_REDRAW_ROUNDS = 200
    SENTINEL_TOLERANCE = 0.001

    # Exit codes
    EXIT_OK = 0
    EXIT_FAILURE = 1
    EXIT_CONFIG = 2
    EXIT_DATA = 3
    EXIT_NUMERICAL = 4
    EXIT_INTERRUPTED = 130

    # Output files
    RUN_LOG = "qolog.txt"
    SUMMARY_FILE = "summary.csv"
    DIAGNOSTICS_FILE = "diagnostics.json"
    DRAWS_FILE = "draws.csv"
    DIC_FILE = "dic_comparison.csv"
    EFFECTS_FILE = "effects.csv"
    SUMMARY_FORMAT = "%.6g"
    DRAWS_FORMAT = "%.17g"
