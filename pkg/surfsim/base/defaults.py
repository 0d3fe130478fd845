#!/usr/bin/env python

"""
Global defaults for surfsim.

Every public function that searches or simulates accepts keyword
overrides of these values; the module constants are only the fallback.
"""

import os
from loguru import logger


# reserved state names
BLANK = "O"             # blank species of sCRN-family systems
NULL = "null"           # empty position / null glue of tile systems
EPSILON = "-"           # unobserved slot, missing flag, absent tail
UND = "UND"             # image of a transient simulator state

# search bounds
DEFAULT_RADIUS = 3
DEFAULT_DEPTH = 12
MAX_STATES = 100_000    # memory budget of a single bounded search

# trace simulation
DEFAULT_STEPS = 100
DEFAULT_SEED = None


def workers_from_env(name="WORKBENCH_THREADS"):
    """Number of BFS workers, capped by the environment variable."""
    value = os.environ.get(name)
    if value is None:
        return 1
    try:
        workers = int(value)
    except ValueError:
        logger.warning(f"ignoring {name}={value!r}, not an integer")
        return 1
    if workers < 1:
        logger.warning(f"ignoring {name}={value!r}, must be >= 1")
        return 1
    return workers


WORKERS = workers_from_env()


if __name__ == "__main__":
    print(WORKERS)
