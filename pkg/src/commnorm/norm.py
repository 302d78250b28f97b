"""Exact and Monte-Carlo 2-party norms and the natural-property test.

The 2-party norm of f : {0,1}^a x {0,1}^b -> {-1,1} is the expectation of
the product of f over the 2x2 grid built from two row-halves and two
column-halves:

    R2(f) = E[ f(a0,b0) f(a0,b1) f(a1,b0) f(a1,b1) ]

with all four halves uniform.  The unnormalized sum S over all
2^(2n) tuples satisfies S = sum over row pairs of the squared row inner
product, which is what the packed popcount kernel computes.  We keep S as
an exact integer: r2 = S / 2^(2n) and alpha = 2^n * r2 = S / 2^n are exact
rationals, and the property threshold |alpha| <= 2^(2n/3) becomes the
integer test |S|^3 <= 2^(5n).
"""
from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .corefn import InputPartition, TruthTable, sign_matrix, packed_rows
from .errors import SizeCapError, SupportNotEnumerableError

NAIVE_MAX_N = 12
PAIR_EXACT_MAX_WORK = 10**8


@dataclass(frozen=True)
class NormResult:
    """Exact norm of a truth table: raw integer sum plus derived rationals."""

    n: int
    raw_sum: int

    @property
    def r2(self) -> Fraction:
        return Fraction(self.raw_sum, 1 << (2 * self.n))

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.raw_sum, 1 << self.n)


@dataclass(frozen=True)
class NormEstimate:
    """Monte-Carlo norm estimate; sampled products are +-1 so stderr = 1/sqrt(N)."""

    mean: float
    samples: int

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("need at least one sample")
        if abs(self.mean) > 1 + 1e-12:
            raise ValueError(f"mean {self.mean} outside [-1, 1]")

    @property
    def stderr(self) -> float:
        return 1.0 / math.sqrt(self.samples)


def r2_exact_naive(table: TruthTable, partition: InputPartition | None = None) -> NormResult:
    """Literal four-fold sum over all 2^(2n) half tuples (n <= 12).

    Kept deliberately free of the Gram rearrangement and of bit packing so
    it can serve as an independent oracle for r2_exact_gram.
    """
    if table.n > NAIVE_MAX_N:
        raise SizeCapError(f"naive norm capped at n={NAIVE_MAX_N}, got {table.n}")
    m = sign_matrix(table, partition)
    left = m[:, None, :, None].astype(np.int8) * m[:, None, None, :]
    right = m[None, :, :, None].astype(np.int8) * m[None, :, None, :]
    s = int((left.astype(np.int64) * right).sum(dtype=np.int64))
    return NormResult(table.n, s)


def r2_exact_gram(
    table: TruthTable,
    partition: InputPartition | None = None,
    threads: int = 1,
) -> NormResult:
    """Exact norm via packed rows and the popcount kernel (n <= 20)."""
    rows, ncols = packed_rows(table, partition)
    nrows = rows.shape[0]
    if threads <= 1 or nrows < 4 * threads:
        s = _kernels.gram_pair_sum(rows, ncols)
    else:
        bounds = np.linspace(0, nrows, threads + 1, dtype=int)
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            parts = pool.map(
                lambda lo_hi: _kernels.gram_pair_sum(rows, ncols, int(lo_hi[0]), int(lo_hi[1])),
                zip(bounds[:-1], bounds[1:]),
            )
            s = sum(parts)
    return NormResult(table.n, int(s))


def natural_property(
    table: TruthTable,
    partition: InputPartition | None = None,
    threads: int = 1,
) -> tuple[int, NormResult]:
    """1 iff |alpha| <= 2^(2n/3), decided exactly as |S|^3 <= 2^(5n)."""
    result = r2_exact_gram(table, partition, threads=threads)
    accepted = 1 if abs(result.raw_sum) ** 3 <= 1 << (5 * table.n) else 0
    return accepted, result


def table_pair_function(table: TruthTable, partition: InputPartition | None = None):
    """Adapt a truth table to the two-argument pair-function interface.

    The returned callable maps (row index, col index) -> +-1 and carries a
    vectorized ``batch`` attribute used by the Monte-Carlo estimator.
    """
    part = partition or InputPartition(table.n)
    m = sign_matrix(table, part)

    def pair(a: int, b: int) -> int:
        return int(m[a, b])

    pair.batch = lambda aa, bb: m[aa, bb]
    pair.size_a = part.size_a
    pair.size_b = part.size_b
    return pair


def r2_estimate_mc(
    pair_fn,
    size_a: int,
    size_b: int,
    n_samples: int,
    rng: np.random.Generator,
) -> NormEstimate:
    """Monte-Carlo norm of a black-box pair function on 2^size_a x 2^size_b.

    Draws n_samples iid uniform tuples (a0, a1, b0, b1) and averages the
    grid product.  ``pair_fn(a, b)`` must return +-1; a vectorized
    ``pair_fn.batch(a_array, b_array)`` is used when available.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    a = rng.integers(0, 1 << size_a, size=(2, n_samples))
    b = rng.integers(0, 1 << size_b, size=(2, n_samples))
    batch = getattr(pair_fn, "batch", None)
    if batch is not None:
        prod = (
            batch(a[0], b[0]).astype(np.int64)
            * batch(a[0], b[1])
            * batch(a[1], b[0])
            * batch(a[1], b[1])
        )
        total = int(prod.sum())
    else:
        total = 0
        for i in range(n_samples):
            total += (
                pair_fn(int(a[0, i]), int(b[0, i]))
                * pair_fn(int(a[0, i]), int(b[1, i]))
                * pair_fn(int(a[1, i]), int(b[0, i]))
                * pair_fn(int(a[1, i]), int(b[1, i]))
            )
    return NormEstimate(total / n_samples, n_samples)


def _scaled_integer_weights(weights) -> tuple[list[int], int]:
    fracs = [Fraction(w) for w in weights]
    if any(w < 0 for w in fracs):
        raise ValueError("weights must be nonnegative")
    denom = math.lcm(*(w.denominator for w in fracs)) if fracs else 1
    ints = [int(w * denom) for w in fracs]
    return ints, sum(ints)


def r2_pair_exact(rule, mu, rho) -> Fraction:
    """Exact norm of the pair function xi(x, y) = rule(mu(x), rho(y)).

    Uses R2(xi) = E_{z,w ~ rho}[ (E_{f ~ mu} f(z) f(w))^2 ], which needs one
    pass over support(mu) x support(rho)^2 with exact integer arithmetic.
    Both distributions must expose finite weighted supports.
    """
    reps, mu_w = _enumerated(mu)
    xs, rho_w = _enumerated(rho)
    work = len(reps) * len(xs) * len(xs)
    if work > PAIR_EXACT_MAX_WORK:
        raise SizeCapError(
            f"support sizes give {work} pairwise work units (cap {PAIR_EXACT_MAX_WORK})"
        )
    p, p_total = _scaled_integer_weights(mu_w)
    q, q_total = _scaled_integer_weights(rho_w)
    if p_total == 0 or q_total == 0:
        raise ValueError("weights must not all be zero")

    xs_arr = np.asarray(xs, dtype=np.int64)
    values = np.empty((len(reps), len(xs)), dtype=np.int64)
    for i, rep in enumerate(reps):
        values[i] = rule.evaluate_batch(rep, xs_arr)

    exact_dtype = object if p_total**2 * q_total**2 > 2**62 else np.int64
    e = values.astype(exact_dtype)
    pv = np.asarray(p, dtype=exact_dtype)
    qv = np.asarray(q, dtype=exact_dtype)
    gram = e.T @ (pv[:, None] * e)
    numerator = int(qv @ (gram * gram) @ qv)
    return Fraction(numerator, p_total**2 * q_total**2)


def _enumerated(dist):
    support = getattr(dist, "support_weights", None)
    if support is None:
        raise SupportNotEnumerableError(f"{dist!r} does not expose an enumerable support")
    points, weights = support()
    if len(points) != len(weights) or not points:
        raise SupportNotEnumerableError("support enumeration returned no points")
    return list(points), list(weights)
