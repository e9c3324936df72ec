"""Constants for the univoque analysis."""

DOMAIN = "univoque"

DEFAULT_DEPTH = 12
DEFAULT_TOLERANCE = 1e-9
DEFAULT_FRONTIER_BUDGET = 10**6
DEFAULT_SLACK = 1e-6
DEFAULT_OVERLAP_DEPTH = 6
DEFAULT_AUTOMATON_DEPTH = 10
DEFAULT_SPECTRAL_ITERATIONS = 200
DEFAULT_REFINE_ROUNDS = 1
DEFAULT_WORKERS = 1

# Shadow words are kept while they lie this many intersection hops from a T-word.
DEFAULT_SHADOW_REACH = DEFAULT_REFINE_ROUNDS + 1

# Reported floats are rounded to this many decimals.
REPORT_DIGITS = 5

# Multiplies tolerances where a safety margin is needed.
GUARD_FACTOR = 10

# Decimal digits used by mpmath evaluations.
WORKING_DPS = 40

CACHE_VERSION = 1
REPORT_VERSION = 1
