"""Kernel backend selection.

Imports the compiled extension when present, the pure-Python twin otherwise.
Set ``CIG_PURE_PYTHON=1`` to force the fallback (useful for benchmarking and
for testing backend equivalence).
"""

import os

if os.environ.get("CIG_PURE_PYTHON"):
    from cig import _core_py as _backend
else:
    try:
        from cig import _core as _backend  # type: ignore[no-redef]
    except ImportError:
        from cig import _core_py as _backend

BACKEND: str = _backend.BACKEND

perm_closure = _backend.perm_closure
iso_backtrack = _backend.iso_backtrack
twin_labels = _backend.twin_labels
