"""Hot kernels: compiled extension when available, numpy fallback otherwise.

Set ``HEAVYTAILS_PURE=1`` to force the fallback.
"""
import os

from . import _pure

BACKEND = "pure"
_impl = _pure
if os.environ.get("HEAVYTAILS_PURE", "") in ("", "0"):
    try:
        from . import _ext as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:
        _impl = _pure

anneal_int = _impl.anneal_int
anneal_float = _impl.anneal_float
enumerate_ground = _impl.enumerate_ground
descend = _impl.descend

__all__ = ["BACKEND", "anneal_int", "anneal_float", "enumerate_ground", "descend"]
