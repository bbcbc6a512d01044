"""Kernel acceleration switch.

All numerical kernels in :mod:`diqkd._kernels` are written as plain scalar
numpy code and decorated with :func:`jit`.  By default the decorator is
``numba.njit(cache=True)``; setting the environment variable
``DIQKD_DISABLE_NUMBA=1`` before import turns :func:`jit` into a no-op so the
exact same source runs as ordinary Python.  The fallback path produces
identical numbers (same IEEE-754 operations in the same order), it is just
orders of magnitude slower, which makes it useful for debugging and for
checking that compilation does not change results.
"""

import os

_DISABLE = os.environ.get("DIQKD_DISABLE_NUMBA", "").strip().lower()
NUMBA_ENABLED = _DISABLE not in ("1", "true", "yes")

if NUMBA_ENABLED:
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a hard dependency
        NUMBA_ENABLED = False

if NUMBA_ENABLED:
    from numba import prange

    def jit(func=None, parallel=False):
        """numba.njit with caching; pass parallel=True for prange loops."""
        import numba

        def wrap(f):
            return numba.njit(cache=True, parallel=parallel)(f)

        return wrap(func) if func is not None else wrap
else:
    prange = range

    def jit(func=None, parallel=False):
        """Identity decorator: run kernels as plain Python."""

        def wrap(f):
            return f

        return wrap(func) if func is not None else wrap


def set_threads(n):
    """Pin the kernel thread count (no-op on the fallback path).

    :param n: requested thread count; clamped to what the runtime allows.
    :return: the thread count actually in effect.
    """
    if not NUMBA_ENABLED:
        return 1
    import numba

    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return n
