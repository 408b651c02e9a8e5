"""Size ceilings that keep exponential searches finite.

Every ceiling can be overridden per call; the module defaults can in turn
be overridden through environment variables so command-line runs can relax
them without code changes.
"""

import os

# Largest target graph accepted by embedding enumeration by default.
DEFAULT_MAX_TARGET = 24

# Largest ambient accepted by closure / dimension searches by default.
DEFAULT_MAX_AMBIENT = 24

# Largest candidate set considered when searching for relatively-tight sets.
DEFAULT_MAX_SET_SIZE = 8

_ENV_PREFIX = "ABINITIO_"


def _env_int(name: str, fallback: int) -> int:
    raw = os.environ.get(_ENV_PREFIX + name)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError:
        return fallback


def max_target(override: "int | None" = None) -> int:
    if override is not None:
        return override
    return _env_int("MAX_TARGET", DEFAULT_MAX_TARGET)


def max_ambient(override: "int | None" = None) -> int:
    if override is not None:
        return override
    return _env_int("MAX_AMBIENT", DEFAULT_MAX_AMBIENT)


def max_set_size(override: "int | None" = None) -> int:
    if override is not None:
        return override
    return _env_int("MAX_SET_SIZE", DEFAULT_MAX_SET_SIZE)
