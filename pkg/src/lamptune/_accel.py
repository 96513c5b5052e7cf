"""Backend selection for the hot kernels.

Numba is used when it imports and ``LAMPTUNE_DISABLE_NUMBA`` is unset (or
``0``). Setting the flag selects the vectorised NumPy implementations. The
choice can also be switched at runtime with :func:`use_backend`, which the
benchmarks and the cross-backend tests rely on.
"""

import contextlib
import os

try:
    import numba  # noqa: F401
    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

BACKENDS = ("numba", "numpy")


def _initial_backend():
    flag = os.environ.get("LAMPTUNE_DISABLE_NUMBA", "").strip().lower()
    if flag not in ("", "0", "false", "no") or not HAS_NUMBA:
        return "numpy"
    return "numba"


_backend = _initial_backend()


def get_backend():
    return _backend


def set_backend(name):
    global _backend
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


@contextlib.contextmanager
def use_backend(name):
    previous = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)
