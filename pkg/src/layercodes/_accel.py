"""Backend selection for the hot kernels.

Numba is used when it imports cleanly and ``LAYERCODES_NO_NUMBA`` is unset
(or set to ``0``). The pure-numpy fallbacks in :mod:`layercodes._kernels`
compute the same results and are exercised by the test suite either way.
"""

from __future__ import annotations

import os

ENV_FLAG = "LAYERCODES_NO_NUMBA"


def _numba_requested() -> bool:
    return os.environ.get(ENV_FLAG, "0").strip().lower() in ("", "0", "false", "no")


try:
    if not _numba_requested():
        raise ImportError("numba disabled by " + ENV_FLAG)
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False
    _njit = None


def njit(*args, **kwargs):
    """``numba.njit(cache=True)`` when available, identity decorator otherwise."""
    kwargs.setdefault("cache", True)
    if HAVE_NUMBA:
        return _njit(*args, **kwargs)

    def wrap(fn):
        return fn

    if args and callable(args[0]):
        return args[0]
    return wrap


def backend_name() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
