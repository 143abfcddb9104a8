"""Hot-loop kernels with a compiled/pure split chosen at import time.

Both backends implement the same two functions with identical semantics and
identical outputs:

    rref_mod(a, p)        in-place reduced row echelon form mod p
    count_vanishing(...)  count parameter vectors killing every composed
                          coefficient

Set RCL_PURE=1 to force the numpy fallback even when the compiled extension
is installed.
"""
import os

from rclab._kernels import _fallback

_impl = _fallback
if os.environ.get("RCL_PURE", "") in ("", "0"):
    try:
        from rclab._kernels import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _fallback

rref_mod = _impl.rref_mod
count_vanishing = _impl.count_vanishing

BACKEND = "pure" if _impl is _fallback else "compiled"
