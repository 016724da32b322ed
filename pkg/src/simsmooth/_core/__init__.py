"""Tableau kernels for the dense simplex.

The compiled module ``_tableau`` is used when it was built; otherwise the
numpy implementation in :mod:`._tableau_py` is used. Set
``SIMSMOOTH_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _tableau_py

if os.environ.get("SIMSMOOTH_PURE_PYTHON", "") not in ("", "0"):
    _impl = _tableau_py
else:
    try:
        from . import _tableau as _impl
    except ImportError:
        _impl = _tableau_py

BACKEND = "compiled" if _impl is not _tableau_py else "python"

pivot = _impl.pivot
entering_bland = _impl.entering_bland
leaving_bland = _impl.leaving_bland

__all__ = ["BACKEND", "pivot", "entering_bland", "leaving_bland"]
