"""Kernel backend selection.

The compiled extension is preferred; the numpy fallback is selected when the
extension is missing or when COEA_LAB_BACKEND=python is set. Both backends
consume the underlying bit stream identically, so results do not depend on
which one is active (tests assert this whenever the extension is available).
"""

import os

_requested = os.environ.get("COEA_LAB_BACKEND", "").strip().lower()

if _requested in ("", "c", "compiled"):
    try:
        from . import _ckernel as _impl
    except ImportError:
        if _requested:
            raise
        from . import _pykernel as _impl
elif _requested in ("python", "py"):
    from . import _pykernel as _impl
else:
    raise RuntimeError(
        f"COEA_LAB_BACKEND={_requested!r} not recognised (use 'c' or 'python')"
    )

BACKEND = _impl.BACKEND_NAME
coea_chunk = _impl.coea_chunk
ea_chunk = _impl.ea_chunk
coea_step_samples = _impl.coea_step_samples


def backend() -> str:
    """Name of the active kernel backend: 'c' or 'python'."""
    return BACKEND
