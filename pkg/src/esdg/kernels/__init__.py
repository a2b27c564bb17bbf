"""Volume-kernel backend selection.

Set ESDG_KERNELS=numpy or ESDG_KERNELS=numba to force a backend; the
default tries numba and falls back to numpy when it is unavailable.
"""

from __future__ import annotations

import os

from . import numpy_impl

prepare = numpy_impl.prepare


def _resolve(name: str | None):
    name = (name or os.environ.get("ESDG_KERNELS", "auto")).lower()
    if name == "numpy":
        return numpy_impl.hadamard_sum, "numpy"
    if name in ("numba", "auto"):
        try:
            from . import numba_impl

            return numba_impl.hadamard_sum, "numba"
        except ImportError:
            if name == "numba":
                raise
    return numpy_impl.hadamard_sum, "numpy"


def get_backend(name: str | None = None):
    """Return (hadamard_sum, backend_name) for the requested backend."""
    return _resolve(name)
