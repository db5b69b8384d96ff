"""Kernel backend selection.

Prefers the compiled Cython core; falls back to the NumPy implementation when
the extension is missing or when SPECKLEDIST_NO_EXT=1 is set.  `BACKEND`
records which one is active ("compiled" or "numpy").
"""

from __future__ import annotations

import os

if os.environ.get("SPECKLEDIST_NO_EXT", "0") == "1":
    from . import _ref as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _ref as _impl

        BACKEND = "numpy"

kde_gauss = _impl.kde_gauss
ecf = _impl.ecf
powexp_sum = _impl.powexp_sum
softplus_sum = _impl.softplus_sum

__all__ = ["BACKEND", "kde_gauss", "ecf", "powexp_sum", "softplus_sum"]
