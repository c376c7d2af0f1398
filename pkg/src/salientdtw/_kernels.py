"""Kernel backend selection.

The compiled ``_core`` extension is used when it imports; otherwise the
pure-Python kernels take over. Set ``SALIENTDTW_PURE=1`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("SALIENTDTW_PURE"):
    _impl = _kernels_py
else:
    try:
        from . import _core as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

dtw_full = _impl.dtw_full
dtw_banded = _impl.dtw_banded
prune_ranked = _impl.prune_ranked
dominant_pairs = _impl.dominant_pairs
band_rows = _impl.band_rows


def backend_module(name):
    """Return the kernel module for ``name`` (``"compiled"`` or ``"python"``)."""
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _core
        return _core
    raise ValueError(f"unknown backend {name!r}")
