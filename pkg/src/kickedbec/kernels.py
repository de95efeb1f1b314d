"""Backend selection for the convolution kernel.

The compiled Cython extension is used when it was built; otherwise the
numpy fallback takes over transparently. Set KICKEDBEC_KERNELS=numpy or
=cython before import to force a backend (cython raises if unavailable).
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_FORCED = os.environ.get("KICKEDBEC_KERNELS", "").strip().lower()

if _FORCED in ("", "auto"):
    _impl = _compiled if _compiled is not None else _kernels_py
elif _FORCED == "numpy":
    _impl = _kernels_py
elif _FORCED == "cython":
    if _compiled is None:
        raise ImportError("KICKEDBEC_KERNELS=cython but the compiled kernels "
                          "are not built; reinstall with a working compiler")
    _impl = _compiled
else:
    raise ImportError(f"unknown KICKEDBEC_KERNELS value {_FORCED!r} "
                      "(expected auto, cython or numpy)")


def _name_of(impl) -> str:
    return "cython" if impl is _compiled and _compiled is not None else "numpy"


convolve_banded = _impl.convolve_banded
BACKEND = _name_of(_impl)


def available_backends() -> tuple[str, ...]:
    return ("cython", "numpy") if _compiled is not None else ("numpy",)


def force_backend(name: str) -> str:
    """Rebind the active kernel (for benchmarks/tests). Returns the previous name."""
    global convolve_banded, BACKEND
    previous = BACKEND
    if name == "numpy":
        impl = _kernels_py
    elif name == "cython":
        if _compiled is None:
            raise ValueError("compiled kernels are not built")
        impl = _compiled
    else:
        raise ValueError(f"unknown backend {name!r}")
    convolve_banded = impl.convolve_banded
    BACKEND = _name_of(impl)
    return previous
