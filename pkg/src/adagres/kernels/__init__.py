"""Hot loops: greedy selection, subset enumeration, submodularity-gap search.

Every kernel has a numba and a pure-numpy implementation with identical
signatures. The numba path is used unless ``ADAGRES_DISABLE_NUMBA`` is set.

Arguments are plain arrays: ``qs`` query similarities (n,), ``S`` the
chunk-chunk similarity matrix (n, n) with zero diagonal, ``lengths`` int64
token lengths (n,).
"""

from .._backend import USE_NUMBA, backend_name
from . import _numpy as numpy_kernels

BUDGET_EXHAUSTED = numpy_kernels.BUDGET_EXHAUSTED
NO_POSITIVE_GAIN = numpy_kernels.NO_POSITIVE_GAIN
POOL_EXHAUSTED = numpy_kernels.POOL_EXHAUSTED

if USE_NUMBA:
    from . import _numba as numba_kernels

    _impl = numba_kernels
else:
    numba_kernels = None
    _impl = numpy_kernels

greedy = _impl.greedy
subset_values = _impl.subset_values
gap_exhaustive = _impl.gap_exhaustive

__all__ = [
    "BUDGET_EXHAUSTED",
    "NO_POSITIVE_GAIN",
    "POOL_EXHAUSTED",
    "backend_name",
    "gap_exhaustive",
    "greedy",
    "numba_kernels",
    "numpy_kernels",
    "subset_values",
]
