from dotenv import load_dotenv
import math
import os

load_dotenv()

# Multiplier on every search budget (shrink exponents, Gauss tries, patch rounds)
BUDGET_SCALE = float(os.getenv("ISOK1_BUDGET_SCALE", "1.0"))
if BUDGET_SCALE <= 0:
    raise ValueError("ISOK1_BUDGET_SCALE must be positive")

SEED = int(os.getenv("ISOK1_SEED", "20240607"))

DEFAULT_PRIME = int(os.getenv("ISOK1_PRIME", "7"))
if DEFAULT_PRIME < 5:
    raise ValueError("ISOK1_PRIME must be a prime >= 5")

WORKERS = max(1, int(os.getenv("ISOK1_WORKERS", "1")))
LOG_LEVEL = os.getenv("ISOK1_LOG_LEVEL", "WARNING").upper()


def _doubling(limit: int) -> tuple[int, ...]:
    out, k = [], 1
    while k < limit:
        out.append(k)
        k *= 2
    out.append(limit)
    return tuple(out)


# Dilation exponents tried by shrink / shift / suslin / excision
SHRINK_LIMIT = max(1, math.ceil(64 * BUDGET_SCALE))
SHRINK_SCHEDULE = _doubling(SHRINK_LIMIT)

# Output words longer than factor × input length × scale are a budget failure
WORD_LENGTH_FACTOR = 10

GAUSS_SEARCH_TRIES = max(4, math.ceil(200 * BUDGET_SCALE))
LAURENT_SEARCH_TRIES = max(4, math.ceil(60 * BUDGET_SCALE))
PATCH_ROUNDS = max(2, math.ceil(12 * BUDGET_SCALE))

SUITE_BASE = {
    "relations": 1,
    "sigma": 200,
    "gauss": 500,
    "suslin": 200,
    "laurent": 200,
    "identities": 1,
    "k1": 100,
    "determinism": 1,
}
SUITE_COUNTS = {
    name: (max(1, math.ceil(n * BUDGET_SCALE)) if BUDGET_SCALE < 1 else n)
    for name, n in SUITE_BASE.items()
}


def set_budget_scale(scale: float) -> None:
    """Recompute every search budget for a job-level ISOK1_BUDGET_SCALE override."""
    global BUDGET_SCALE, SHRINK_LIMIT, SHRINK_SCHEDULE, GAUSS_SEARCH_TRIES, LAURENT_SEARCH_TRIES
    global PATCH_ROUNDS, SUITE_COUNTS
    if scale <= 0:
        raise ValueError("budget scale must be positive")
    BUDGET_SCALE = float(scale)
    SHRINK_LIMIT = max(1, math.ceil(64 * BUDGET_SCALE))
    SHRINK_SCHEDULE = _doubling(SHRINK_LIMIT)
    GAUSS_SEARCH_TRIES = max(4, math.ceil(200 * BUDGET_SCALE))
    LAURENT_SEARCH_TRIES = max(4, math.ceil(60 * BUDGET_SCALE))
    PATCH_ROUNDS = max(2, math.ceil(12 * BUDGET_SCALE))
    SUITE_COUNTS = {
        name: (max(1, math.ceil(n * BUDGET_SCALE)) if BUDGET_SCALE < 1 else n)
        for name, n in SUITE_BASE.items()
    }
