"""Kernel backend selection.

``ALLMACH_BACKEND=numpy`` forces the vectorised numpy path; the default is
numba when it can be imported.
"""
import os
import warnings

ENV_FLAG = "ALLMACH_BACKEND"

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    HAVE_NUMBA = False


def requested_backend():
    name = os.environ.get(ENV_FLAG, "numba").strip().lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"{ENV_FLAG} must be 'numba' or 'numpy', got {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        warnings.warn("numba not importable, falling back to numpy kernels")
        return "numpy"
    return name


def njit(*args, **kwargs):
    """``numba.njit`` with cache on; identity decorator without numba."""
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    import numba

    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)
