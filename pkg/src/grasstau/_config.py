"""Runtime switches read from the environment."""

import os

THREADS_ENV = "GRASSTAU_THREADS"
DISABLE_NUMBA_ENV = "GRASSTAU_DISABLE_NUMBA"


def _truthy(value):
    return value.strip().lower() not in ("", "0", "false", "no", "off")


def numba_disabled():
    return _truthy(os.environ.get(DISABLE_NUMBA_ENV, ""))


def max_threads():
    """Parallelism cap for campaigns; 1 means run trials serially."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(1, value)
