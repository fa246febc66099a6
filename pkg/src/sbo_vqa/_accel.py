"""JIT switch for the hot kernels.

Set ``SBO_VQA_DISABLE_JIT=1`` (or numba's own ``NUMBA_DISABLE_JIT=1``) to
force the pure-numpy code paths. numba missing from the environment has the
same effect.
"""

import os

_TRUTHY = {"1", "true", "yes", "on"}


def _flag(name):
    return os.environ.get(name, "").strip().lower() in _TRUTHY


try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    _numba = None

USE_NUMBA = (
    _numba is not None
    and not _flag("SBO_VQA_DISABLE_JIT")
    and not _flag("NUMBA_DISABLE_JIT")
)


def njit(*args, **kwargs):
    """``numba.njit(cache=True)`` when available, else a no-op decorator.

    The decorated function is always compiled lazily, so importing a module
    full of kernels costs nothing until a kernel is first called.
    """
    if _numba is None:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return _numba.njit(*args, **kwargs)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
