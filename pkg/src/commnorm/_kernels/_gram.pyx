# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled popcount kernel for the Gram-form norm sum.

For packed +-1 rows (bit set = +1), the inner product of two rows of
length ncols is ncols - 2 * popcount(xor).  The kernel accumulates the
squared inner products over all ordered row pairs with first index in
[row_lo, row_hi); the result fits int64 for every n <= 20 table
(|S| <= 2^40).
"""

cdef extern from *:
    """
    static inline int popcnt64(unsigned long long x) {
        return __builtin_popcountll(x);
    }
    """
    int popcnt64(unsigned long long x) nogil


def gram_pair_sum(const unsigned long long[:, ::1] rows, long long ncols,
                  Py_ssize_t row_lo=0, Py_ssize_t row_hi=-1):
    cdef Py_ssize_t nrows = rows.shape[0]
    cdef Py_ssize_t words = rows.shape[1]
    cdef Py_ssize_t i, j, k
    cdef long long total = 0, ip
    cdef long long pc
    if row_hi < 0:
        row_hi = nrows
    with nogil:
        for i in range(row_lo, row_hi):
            # diagonal pair (i, i): inner product is ncols
            total += ncols * ncols
            # pairs (i, j) with j > i, counted once for each order below
            for j in range(i + 1, nrows):
                pc = 0
                for k in range(words):
                    pc += popcnt64(rows[i, k] ^ rows[j, k])
                ip = ncols - 2 * pc
                total += 2 * ip * ip
    return total
