"""Hot-kernel backend selection.

The compiled extension is preferred when importable; otherwise the numpy
twin takes over.  Set GENGM_BACKEND=numpy or GENGM_BACKEND=compiled to
force one side (the benchmark and the cross-backend tests do this).
"""
import os

_requested = os.environ.get("GENGM_BACKEND", "").strip().lower()

if _requested == "numpy":
    from . import _numpy as _impl

    BACKEND = "numpy"
elif _requested == "compiled":
    from . import _core as _impl  # noqa: F401  (ImportError is the answer)

    BACKEND = "compiled"
else:
    try:
        from . import _core as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _numpy as _impl

        BACKEND = "numpy"

STATUS_OK = _impl.STATUS_OK
STATUS_NOT_SPD = _impl.STATUS_NOT_SPD
STATUS_SINGULAR_GRADIENT = _impl.STATUS_SINGULAR_GRADIENT

smooth_eval = _impl.smooth_eval
