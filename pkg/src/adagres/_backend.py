"""Numba availability and the pure-numpy override.

Set ``ADAGRES_DISABLE_NUMBA=1`` before import to force the numpy kernels.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}


def _flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() not in _FALSY


try:
    import numba  # noqa: F401

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and not _flag("ADAGRES_DISABLE_NUMBA")


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
