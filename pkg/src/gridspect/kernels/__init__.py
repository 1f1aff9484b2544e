"""Hot-loop kernels with two interchangeable backends.

The compiled Cython extension is used when present; otherwise the pure
NumPy implementation takes over. Both produce bit-identical results.
Set the environment variable ``GRIDSPECT_PURE=1`` to force the pure
backend (checked once, at import).
"""

import os

from . import pure

_impl = pure
if not os.environ.get("GRIDSPECT_PURE"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

BACKEND = "pure" if _impl is pure else "compiled"

unfold_amplitude = _impl.unfold_amplitude
hough_segments = _impl.hough_segments


def get_backend(name: str):
    """Return the named backend module ('pure' or 'compiled'), or None."""
    if name == "pure":
        return pure
    if name == "compiled":
        try:
            from . import _ckernels

            return _ckernels
        except ImportError:
            return None
    raise ValueError(f"unknown backend {name!r}")
