"""Backend selection for the simulation hot loop.

Prefers the compiled extension and falls back to the numpy twin when the
extension is unavailable; RDAFRONT_PURE_PYTHON=1 forces the fallback."""

from __future__ import annotations

import os

if os.environ.get("RDAFRONT_PURE_PYTHON", "") == "1":
    from ._kernels_py import rhs_into, sspstage1, sspstage2, sspstage3

    BACKEND = "python"
else:
    try:
        from ._kernels import (  # type: ignore[attr-defined]
            rhs_into,
            sspstage1,
            sspstage2,
            sspstage3,
        )

        BACKEND = "cython"
    except ImportError:
        from ._kernels_py import rhs_into, sspstage1, sspstage2, sspstage3

        BACKEND = "python"

__all__ = ["rhs_into", "sspstage1", "sspstage2", "sspstage3", "BACKEND"]
