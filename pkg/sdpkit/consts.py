DETERMINISTIC = "deterministic"
NON_DETERMINISTIC = "nondeterministic"
STOCHASTIC = "stochastic"

PROB_TOLERANCE = 1e-9
VALUE_TOLERANCE = 1e-9
MEAS_MON_TOLERANCE = 1e-12
PROB_DIGITS = 9
VALUE_DIGITS = 9

DEFAULT_CAP = 10**6
DEFAULT_SLIP = 0.2
DEFAULT_LAW_SAMPLES = 1000

MEASURE_EXPECTED = "expected"
MEASURE_WORST = "worst"
MEASURE_BEST = "best"
MEASURE_MEAN_VARIANCE = "mean-variance"

VIOLATION_EMPTY_STEP = "EmptyStep"
VIOLATION_LAYER = "LayerViolation"
VIOLATION_NORMALIZATION = "NormalizationViolation"
VIOLATION_STEP_ERROR = "StepError"
VIOLATION_ORDER = "OrderViolation"
VIOLATION_NO_VIABLE_START = "NoViableStart"

EXAMPLE_CYL_DET = "cyl-det"
EXAMPLE_CYL_TIME = "cyl-time"
EXAMPLE_CYL_NONDET = "cyl-nondet"
EXAMPLE_CYL_STOCH = "cyl-stoch"
EXAMPLE_KNAPSACK = "knapsack"

EXIT_OK = 0
EXIT_INTERNAL = 1
# a failed verification shares the code of internal errors
EXIT_CHECK_FAILED = 1
EXIT_ILL_POSED = 2
EXIT_DOMAIN = 3
EXIT_TOO_LARGE = 4

ARROW = "->"
