"""Kernel dispatch: the compiled extension when importable, numpy otherwise.

Set ``DUALCAVITY_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

fallback = _fallback

if os.environ.get("DUALCAVITY_PURE_PYTHON", "") not in ("", "0"):
    compiled = None
else:
    try:
        from . import _kernels as compiled
    except ImportError:  # extension not built
        compiled = None

BACKEND = "compiled" if compiled is not None else "python"

rk4_evolve = (compiled or fallback).rk4_evolve
