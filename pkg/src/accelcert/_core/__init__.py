"""Backend selection for the hot kernels.

The compiled Cython kernel is preferred when the extension built; otherwise
the numpy fallback is used. Setting ``ACCELCERT_PURE_PYTHON=1`` forces the
fallback regardless (useful for benchmarking and debugging).
"""

import os

import numpy as np

from .fallback import ista_solve as ista_solve_python

try:
    from ._kernel import ista_solve as ista_solve_compiled
except ImportError:
    ista_solve_compiled = None

HAVE_COMPILED = ista_solve_compiled is not None
_FORCE_PYTHON = bool(os.environ.get("ACCELCERT_PURE_PYTHON"))


def backend_name():
    return "compiled" if (HAVE_COMPILED and not _FORCE_PYTHON) else "python"


def ista_solve(AtA, Atb, lam, s, x0, iters):
    """Dispatch the reference proximal-gradient solve to the active backend."""
    AtA = np.ascontiguousarray(AtA, dtype=float)
    Atb = np.ascontiguousarray(Atb, dtype=float)
    x0 = np.ascontiguousarray(x0, dtype=float)
    if backend_name() == "compiled":
        return ista_solve_compiled(AtA, Atb, float(lam), float(s), x0, int(iters))
    return ista_solve_python(AtA, Atb, float(lam), float(s), x0, int(iters))
