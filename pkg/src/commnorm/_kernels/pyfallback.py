"""NumPy fallback for the Gram-form norm sum.

Same contract as the compiled kernel: exact integer result, packed uint64
rows, bit set = +1.
"""
from __future__ import annotations

import numpy as np


def gram_pair_sum(rows: np.ndarray, ncols: int, row_lo: int = 0, row_hi: int = -1) -> int:
    nrows = rows.shape[0]
    if row_hi < 0:
        row_hi = nrows
    total = 0
    for i in range(row_lo, row_hi):
        total += ncols * ncols
        rest = rows[i + 1 :]
        if rest.size:
            pc = np.bitwise_count(rest ^ rows[i]).sum(axis=1, dtype=np.int64)
            ip = ncols - 2 * pc
            total += 2 * int(np.dot(ip, ip))
    return int(total)
