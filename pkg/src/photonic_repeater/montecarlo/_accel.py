"""Optional numba acceleration.

Set ``PHOTONIC_REPEATER_NUMBA=0`` to force the pure-numpy path even when
numba is installed.  The flag is read once, at import time.
"""
from __future__ import annotations

import os

ENV_FLAG = "PHOTONIC_REPEATER_NUMBA"


def _wanted() -> bool:
    return os.environ.get(ENV_FLAG, "1").strip().lower() not in {"0", "false", "no", "off"}


try:
    if not _wanted():
        raise ImportError("disabled by environment")
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:
    _njit = None
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise a no-op decorator."""
    if HAVE_NUMBA:
        return _njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn
