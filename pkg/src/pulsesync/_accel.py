"""Backend selection for the hot loops.

Kernels are written once as plain Python over scalars. When numba is
importable and ``PULSESYNC_DISABLE_NUMBA`` is unset (or ``0``), they are
compiled with ``@njit``; otherwise the same source runs interpreted and the
grid operations switch to vectorized numpy.

The flag is read once, at import.
"""
import os

_flag = os.environ.get("PULSESYNC_DISABLE_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError
    import numba
    from numba import types as _nbt
except ImportError:
    numba = None

USE_NUMBA = numba is not None
BACKEND = "numba" if USE_NUMBA else "numpy"

if USE_NUMBA:
    SCALAR_SIG = _nbt.float64(_nbt.float64, _nbt.float64)
    PRF_FN = _nbt.FunctionType(SCALAR_SIG)
else:
    SCALAR_SIG = PRF_FN = None


def kernel(signature=None):
    """Decorate a loop kernel: ``njit(nogil=True, cache=True)`` or identity."""

    def wrap(fn):
        if not USE_NUMBA:
            return fn
        if signature is None:
            return numba.njit(nogil=True, cache=True)(fn)
        return numba.njit(signature, nogil=True, cache=True)(fn)

    return wrap


def compile_scalar(fn, cache=False):
    """Compile ``fn(phi, eps) -> float`` for use as a kernel argument.

    Only functions defined at module level in a real source file may use
    ``cache=True``; generated and closure functions must not.
    """
    if not USE_NUMBA:
        return fn
    return numba.njit(SCALAR_SIG, cache=cache, error_model="numpy")(fn)


def helper(fn):
    """Lazily-typed ``njit`` for functions called from compiled callables."""
    if not USE_NUMBA:
        return fn
    return numba.njit(error_model="numpy")(fn)
