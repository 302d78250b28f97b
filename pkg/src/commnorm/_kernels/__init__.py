"""Kernel selection: compiled extension when present, NumPy fallback otherwise.

Both implementations are exact integer computations with identical
contracts; ``BACKEND`` records which one is active.  Set the environment
variable COMMNORM_FORCE_PY_KERNELS=1 before import to force the fallback.
"""
from __future__ import annotations

import os

from .pyfallback import gram_pair_sum as gram_pair_sum_py

gram_pair_sum_compiled = None
if not os.environ.get("COMMNORM_FORCE_PY_KERNELS"):
    try:
        from ._gram import gram_pair_sum as gram_pair_sum_compiled  # type: ignore[no-redef]
    except ImportError:
        gram_pair_sum_compiled = None

if gram_pair_sum_compiled is not None:
    gram_pair_sum = gram_pair_sum_compiled
    BACKEND = "compiled"
else:
    gram_pair_sum = gram_pair_sum_py
    BACKEND = "python"

__all__ = ["gram_pair_sum", "gram_pair_sum_py", "gram_pair_sum_compiled", "BACKEND"]
