"""Backend selection for the hot loops.

Set ``VOFRAC_DISABLE_NUMBA=1`` before import to force the pure-numpy
path. Numba being absent has the same effect.
"""

import os

_FLAG = os.environ.get("VOFRAC_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and _FLAG not in ("1", "true", "yes", "on")


def maybe_njit(*args, **kwargs):
    """``numba.njit`` when the numba backend is active, identity otherwise.

    The undecorated function always stays reachable as ``.py_func`` so
    callers can pick the interpreted version explicitly.
    """

    def wrap(func):
        if USE_NUMBA:
            return numba.njit(**kwargs)(func)
        func.py_func = func
        return func

    if args and callable(args[0]):
        return wrap(args[0])
    return wrap


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
