"""Water-filling kernel selection.

Two interchangeable implementations of the same inner loop exist: a compiled
Cython extension and a vectorised NumPy fallback.  The extension is preferred
when importable.  Set QSEARCH_BACKEND=python to force the fallback, or
QSEARCH_BACKEND=c to require the extension (ImportError if it is missing
rather than a silent slowdown).
"""

import os

from . import _waterfill_py

_BACKEND = "python"
waterfill = _waterfill_py.waterfill

_requested = os.environ.get("QSEARCH_BACKEND", "").strip().lower()
if _requested not in ("python", "py"):
    try:
        from . import _waterfill as _waterfill_c

        waterfill = _waterfill_c.waterfill
        _BACKEND = "c"
    except ImportError:
        if _requested in ("c", "cython", "ext"):
            raise


def kernel_backend():
    """Name of the active water-filling kernel: 'c' or 'python'."""
    return _BACKEND
