"""Kernel selection: the compiled module when importable, else the pure fallback.

Set ``SLOTFORGE_PURE=1`` before import to force the pure-Python kernels
(used by the parity tests and the benchmark).
"""

import os

if os.environ.get("SLOTFORGE_PURE"):
    from . import _native as _impl
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _native as _impl

fnv1a64 = _impl.fnv1a64
SplitMix64 = _impl.SplitMix64
token_containment = _impl.token_containment

#: "speedups" when the compiled extension is active, "native" otherwise.
KERNEL_BACKEND = _impl.__name__.rsplit(".", 1)[-1].lstrip("_")

__all__ = ["fnv1a64", "SplitMix64", "token_containment", "KERNEL_BACKEND"]
