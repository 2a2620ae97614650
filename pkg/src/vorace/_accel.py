"""Backend selection for the hot kernels.

Set ``VORACE_DISABLE_NUMBA=1`` to run every kernel through its pure-numpy
implementation.  When numba is not importable the numpy path is used
unconditionally.  ``VORACE_THREADS`` caps worker threads for block-parallel
loops (default 1).
"""

from __future__ import annotations

import os
from contextlib import contextmanager

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_FALSY = {"", "0", "false", "no", "off"}

_backend = "numpy" if (not HAVE_NUMBA or os.environ.get("VORACE_DISABLE_NUMBA", "").lower() not in _FALSY) else "numba"


def njit(fn):
    """Compile ``fn`` with numba when available; otherwise return it unchanged."""
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


def backend() -> str:
    return _backend


def use_numba() -> bool:
    return _backend == "numba"


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


@contextmanager
def using_backend(name: str):
    previous = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def thread_count() -> int:
    raw = os.environ.get("VORACE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
