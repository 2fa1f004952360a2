"""Kernel dispatch: numba-compiled hot loops with a pure-numpy fallback.

The Rips clique expansion and the boundary-matrix reduction dominate
runtime on realistic inputs, so they ship in two implementations with
identical semantics. Set ``HTGNN_NO_NUMBA=1`` to force the numpy path
(also used automatically when numba is not importable). Both paths
produce bit-identical results; ``benchmarks/bench_kernels.py`` compares
their speed.
"""

from __future__ import annotations

import os

_ENV_FLAG = "HTGNN_NO_NUMBA"


def numba_enabled() -> bool:
    """True when the njit kernels should be used."""
    if os.environ.get(_ENV_FLAG, "").strip().lower() in ("1", "true", "yes"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def get_kernels():
    """Return the active kernel module (numba or numpy variant)."""
    if numba_enabled():
        from . import _kernels_numba

        return _kernels_numba
    from . import _kernels_numpy

    return _kernels_numpy
