"""Boolean-function substrate: truth tables, threshold gates, depth-2 circuits.

Conventions used everywhere in the package:

* An n-bit input ``x`` is indexed MSB-first: ``idx(x) = sum x[i] * 2^(n-1-i)``,
  so the packed integer of the bit vector *is* its table index.
* Function values are +-1.  Inside a truth table, stored bit 1 encodes +1
  and bit 0 encodes -1.  Gate-level vote counting is 0/1; conversions are
  explicit at the boundaries.
* The canonical input partition puts the ceil(n/2) high-order bits on the
  row side and the floor(n/2) low-order bits on the column side.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ArityError,
    FileFormatError,
    InvalidCircuitError,
    WeightOverflowError,
)

MAX_ARITY = 20
INT64_MAX = 2**63 - 1

BitVector = Sequence[int]
BitsOrIndex = "BitVector | int"


def index_of_input(bits: BitVector) -> int:
    """Packed table index of a bit vector, MSB-first."""
    idx = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bit vector entries must be 0/1, got {b!r}")
        idx = (idx << 1) | b
    return idx


def input_of_index(idx: int, n: int) -> tuple[int, ...]:
    """Inverse of index_of_input for n-bit inputs."""
    if not 0 <= idx < (1 << n):
        raise ValueError(f"index {idx} out of range for n={n}")
    return tuple((idx >> (n - 1 - i)) & 1 for i in range(n))


def as_index(x: "BitsOrIndex", n: int) -> int:
    """Accept either a packed index or a bit vector of length n."""
    if isinstance(x, (int, np.integer)):
        if not 0 <= x < (1 << n):
            raise ValueError(f"input {x} out of range for n={n}")
        return int(x)
    if len(x) != n:
        raise ArityError(f"expected {n} input bits, got {len(x)}")
    return index_of_input(x)


def enumerate_inputs(n: int) -> np.ndarray:
    """All 2^n inputs as a (2^n, n) uint8 matrix in index order."""
    idx = np.arange(1 << n, dtype=np.uint32)
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint32)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def _check_arity(n: int) -> None:
    if not 1 <= n <= MAX_ARITY:
        raise ArityError(f"arity must be in [1, {MAX_ARITY}], got {n}")


class TruthTable:
    """Bit-packed table of a +-1 function on n <= 20 inputs."""

    __slots__ = ("n", "_bits")

    def __init__(self, n: int, bits):
        _check_arity(n)
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1 or arr.shape[0] != (1 << n):
            raise ValueError(f"expected {1 << n} bits for n={n}, got shape {arr.shape}")
        if arr.max(initial=0) > 1:
            raise ValueError("table bits must be 0/1")
        arr = arr.copy()
        arr.flags.writeable = False
        self.n = n
        self._bits = arr

    @classmethod
    def from_string(cls, n: int, bits: str) -> "TruthTable":
        return cls(n, [int(c) for c in bits])

    @property
    def size(self) -> int:
        return 1 << self.n

    def bit(self, idx: int) -> int:
        return int(self._bits[idx])

    def value(self, x: "BitsOrIndex") -> int:
        """Function value +-1 at an input (packed index or bit vector)."""
        return 1 if self._bits[as_index(x, self.n)] else -1

    def bits_array(self) -> np.ndarray:
        return self._bits

    def signs(self) -> np.ndarray:
        """All 2^n values as an int8 array of +-1 in index order."""
        return (self._bits.astype(np.int8) << 1) - 1

    def bit_string(self) -> str:
        return "".join("1" if b else "0" for b in self._bits)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TruthTable)
            and self.n == other.n
            and bool(np.array_equal(self._bits, other._bits))
        )

    def __hash__(self) -> int:
        return hash((self.n, self._bits.tobytes()))

    def __repr__(self) -> str:
        if self.n <= 4:
            return f"TruthTable(n={self.n}, bits={self.bit_string()!r})"
        return f"TruthTable(n={self.n}, 2^{self.n} bits)"


@dataclass(frozen=True)
class InputPartition:
    """Split of n input coordinates into a row side and a column side.

    The canonical partition takes the high-order ceil(n/2) coordinates as
    rows.  ``perm`` optionally permutes coordinates first: coordinate
    perm[j] of the original input becomes position j of the permuted one.
    """

    n: int
    perm: tuple[int, ...] | None = None

    def __post_init__(self):
        _check_arity(self.n)
        if self.perm is not None:
            if sorted(self.perm) != list(range(self.n)):
                raise ValueError("perm must be a permutation of range(n)")

    @property
    def size_a(self) -> int:
        return (self.n + 1) // 2

    @property
    def size_b(self) -> int:
        return self.n // 2

    def row_col_of_index(self) -> tuple[np.ndarray, np.ndarray]:
        """Arrays mapping each table index to its (row, col) pair."""
        idx = np.arange(1 << self.n, dtype=np.uint32)
        if self.perm is None:
            return (idx >> self.size_b).astype(np.uint32), (idx & ((1 << self.size_b) - 1)).astype(np.uint32)
        bits = enumerate_inputs(self.n).astype(np.uint32)
        order = np.asarray(self.perm, dtype=np.intp)
        permuted = bits[:, order]
        weights_a = (1 << np.arange(self.size_a - 1, -1, -1, dtype=np.uint32))
        weights_b = (1 << np.arange(self.size_b - 1, -1, -1, dtype=np.uint32))
        rows = permuted[:, : self.size_a] @ weights_a
        cols = permuted[:, self.size_a :] @ weights_b
        return rows.astype(np.uint32), cols.astype(np.uint32)


def sign_matrix(table: TruthTable, partition: InputPartition | None = None) -> np.ndarray:
    """The 2^sizeA x 2^sizeB matrix of +-1 values under a partition."""
    part = partition or InputPartition(table.n)
    if part.n != table.n:
        raise ArityError(f"partition arity {part.n} != table arity {table.n}")
    rows, cols = part.row_col_of_index()
    out = np.empty((1 << part.size_a, 1 << part.size_b), dtype=np.int8)
    out[rows, cols] = table.signs()
    return out


def packed_rows(table: TruthTable, partition: InputPartition | None = None) -> tuple[np.ndarray, int]:
    """Rows of the sign matrix packed into uint64 words (bit set = +1).

    Returns (rows, ncols) where rows has shape (2^sizeA, ceil(2^sizeB / 64)).
    """
    part = partition or InputPartition(table.n)
    m = sign_matrix(table, part)
    ncols = m.shape[1]
    bits = (m > 0).astype(np.uint8)
    pad = (-ncols) % 64
    if pad:
        bits = np.concatenate([bits, np.zeros((bits.shape[0], pad), dtype=np.uint8)], axis=1)
    # pack LSB-first inside each 64-bit word so column c lands at bit c % 64
    packed8 = np.packbits(
        bits.reshape(bits.shape[0], -1, 64), axis=-1, bitorder="little"
    ).astype(np.uint64)
    shifts = np.arange(8, dtype=np.uint64) * np.uint64(8)
    rows64 = (packed8 << shifts[None, None, :]).sum(axis=-1, dtype=np.uint64)
    return np.ascontiguousarray(rows64), ncols


def tt_from_function(n: int, f: Callable[[tuple[int, ...]], int]) -> TruthTable:
    """Materialize a black-box +-1 function into a table.

    ``f`` receives the input as a tuple of 0/1 bits, MSB-first.
    """
    _check_arity(n)
    bits = np.empty(1 << n, dtype=np.uint8)
    for idx in range(1 << n):
        v = f(input_of_index(idx, n))
        if v not in (-1, 1):
            raise ValueError(f"function returned {v!r}, expected -1 or +1")
        bits[idx] = 1 if v == 1 else 0
    return TruthTable(n, bits)


def random_truth_table(n: int, rng: np.random.Generator) -> TruthTable:
    """Table with 2^n independent uniform bits."""
    _check_arity(n)
    return TruthTable(n, rng.integers(0, 2, size=1 << n, dtype=np.uint8))


@dataclass(frozen=True)
class LinearThreshold:
    """Integer threshold gate: fires (outputs +1) iff sum(w_i * x_i) >= theta.

    Weights and threshold are checked at construction so that no 0/1 input
    can overflow signed 64-bit arithmetic; overflow is an error, never a
    silent wrap.
    """

    weights: tuple[int, ...]
    theta: int

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "theta", int(self.theta))
        if not self.weights:
            raise ArityError("threshold gate needs at least one input")
        reach = sum(abs(w) for w in self.weights)
        if reach > INT64_MAX or abs(self.theta) > INT64_MAX:
            raise WeightOverflowError(
                f"gate arithmetic exceeds 64-bit bounds (|w| sum {reach}, theta {self.theta})"
            )

    @property
    def arity(self) -> int:
        return len(self.weights)

    def weighted_sum(self, x: "BitsOrIndex") -> int:
        idx = as_index(x, self.arity)
        n = self.arity
        return sum(w for i, w in enumerate(self.weights) if (idx >> (n - 1 - i)) & 1)

    def fires(self, x: "BitsOrIndex") -> bool:
        return self.weighted_sum(x) >= self.theta

    def is_or_gate(self) -> bool:
        return all(w in (0, 1) for w in self.weights) and self.theta == 1


def ltf_eval(gate: LinearThreshold, x: "BitsOrIndex") -> int:
    """+1 iff the weighted sum reaches the threshold, else -1."""
    return 1 if gate.fires(x) else -1


class CircuitKind(Enum):
    MAJ_OF_THR = "MAJ-of-THR"
    AND_OF_THR = "AND-of-THR"
    OR_GATE_THR = "OR-gate-THR"


@dataclass(frozen=True)
class GateCircuit:
    """Depth-2 circuit over threshold gates.

    MAJ-of-THR outputs +1 iff 2 * (number of firing gates) >= fan-in, so an
    exact tie goes to +1 and an empty majority is +1.  AND-of-THR (and its
    OR-gate-THR restriction, whose gates must be 0/1-weighted with theta=1)
    outputs +1 iff every gate fires; the empty conjunction is +1.
    """

    kind: CircuitKind
    gates: tuple[LinearThreshold, ...]
    arity: int = field(default=0)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        arities = {g.arity for g in self.gates}
        if len(arities) > 1:
            raise InvalidCircuitError(f"gates disagree on arity: {sorted(arities)}")
        if self.arity == 0:
            if not arities:
                raise InvalidCircuitError("empty circuit needs an explicit arity")
            object.__setattr__(self, "arity", arities.pop())
        elif arities and arities != {self.arity}:
            raise InvalidCircuitError(
                f"declared arity {self.arity} != gate arity {arities.pop()}"
            )
        if self.kind is CircuitKind.OR_GATE_THR:
            for i, g in enumerate(self.gates):
                if not g.is_or_gate():
                    raise InvalidCircuitError(
                        f"OR-gate-THR gate {i} must have 0/1 weights and theta=1"
                    )

    @property
    def fan_in(self) -> int:
        return len(self.gates)


def circuit_eval(circuit: GateCircuit, x: "BitsOrIndex") -> int:
    """Top-gate output +-1 on one input."""
    idx = as_index(x, circuit.arity)
    firing = sum(1 for g in circuit.gates if g.fires(idx))
    if circuit.kind is CircuitKind.MAJ_OF_THR:
        return 1 if 2 * firing >= circuit.fan_in else -1
    return 1 if firing == circuit.fan_in else -1


def tt_from_circuit(circuit: GateCircuit) -> TruthTable:
    """Vectorized truth table of a depth-2 circuit (arity <= 20)."""
    n = circuit.arity
    _check_arity(n)
    x = enumerate_inputs(n).astype(np.int64)
    if circuit.gates:
        w = np.array([g.weights for g in circuit.gates], dtype=np.int64)
        th = np.array([g.theta for g in circuit.gates], dtype=np.int64)
        firing = (x @ w.T >= th[None, :]).sum(axis=1)
    else:
        firing = np.zeros(1 << n, dtype=np.int64)
    if circuit.kind is CircuitKind.MAJ_OF_THR:
        out = 2 * firing >= circuit.fan_in
    else:
        out = firing == circuit.fan_in
    return TruthTable(n, out.astype(np.uint8))


# ---------------------------------------------------------------------------
# File formats.
#
# Truth table:   line 1 "n=<k>", line 2 exactly 2^k characters from {0,1}
#                in index order (bit 1 = +1).
# Threshold list: line 1 "m=<count> n=<arity>", then m lines
#                "w_1 ... w_n ; theta" with decimal integers.
# ---------------------------------------------------------------------------


def format_truth_table(table: TruthTable) -> str:
    return f"n={table.n}\n{table.bit_string()}\n"


def parse_truth_table(text: str) -> TruthTable:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("n="):
        raise FileFormatError('expected header "n=<k>"', line=1)
    try:
        n = int(lines[0][2:])
    except ValueError:
        raise FileFormatError(f"bad arity {lines[0][2:]!r}", line=1) from None
    if not 1 <= n <= MAX_ARITY:
        raise FileFormatError(f"arity {n} outside [1, {MAX_ARITY}]", line=1)
    if len(lines) < 2:
        raise FileFormatError("missing bit line", line=2)
    bits = lines[1].strip()
    if len(bits) != 1 << n:
        raise FileFormatError(
            f"expected exactly 2^{n} = {1 << n} bits, got {len(bits)}", line=2
        )
    if set(bits) - {"0", "1"}:
        raise FileFormatError("bit line may contain only 0 and 1", line=2)
    return TruthTable.from_string(n, bits)


def read_truth_table(path) -> TruthTable:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_truth_table(fh.read())


def write_truth_table(table: TruthTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_truth_table(table))


def format_ltf_list(gates: Sequence[LinearThreshold]) -> str:
    if not gates:
        raise ValueError("threshold list must be nonempty")
    n = gates[0].arity
    lines = [f"m={len(gates)} n={n}"]
    for g in gates:
        lines.append(" ".join(str(w) for w in g.weights) + f" ; {g.theta}")
    return "\n".join(lines) + "\n"


def parse_ltf_list(text: str) -> list[LinearThreshold]:
    lines = text.splitlines()
    if not lines:
        raise FileFormatError("empty file", line=1)
    head = lines[0].split()
    if len(head) != 2 or not head[0].startswith("m=") or not head[1].startswith("n="):
        raise FileFormatError('expected header "m=<count> n=<arity>"', line=1)
    try:
        m, n = int(head[0][2:]), int(head[1][2:])
    except ValueError:
        raise FileFormatError("bad count or arity in header", line=1) from None
    if m < 1:
        raise FileFormatError("count must be >= 1", line=1)
    if len(lines) < 1 + m:
        raise FileFormatError(f"expected {m} gate lines, found {len(lines) - 1}", line=len(lines) + 1)
    gates = []
    for i in range(m):
        lineno = i + 2
        parts = lines[1 + i].split(";")
        if len(parts) != 2:
            raise FileFormatError('expected "w_1 ... w_n ; theta"', line=lineno)
        try:
            weights = [int(tok) for tok in parts[0].split()]
            theta = int(parts[1].strip())
        except ValueError:
            raise FileFormatError("weights and theta must be decimal integers", line=lineno) from None
        if len(weights) != n:
            raise FileFormatError(f"expected {n} weights, got {len(weights)}", line=lineno)
        try:
            gates.append(LinearThreshold(tuple(weights), theta))
        except WeightOverflowError as exc:
            raise FileFormatError(str(exc), line=lineno) from None
    return gates


def read_ltf_list(path) -> list[LinearThreshold]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_ltf_list(fh.read())


def write_ltf_list(gates: Sequence[LinearThreshold], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_ltf_list(gates))
