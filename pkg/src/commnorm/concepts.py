"""Concept classes as evaluation rules, target/example distributions, oracle.

A concept class is presented by an evaluation rule: a fixed map
(representation bits, input bits) -> +-1.  Representations and inputs are
packed MSB-first integers throughout.

The majority/polytope/CNF rule constructors realize "majority (or
conjunction) over the active gates" through one fixed depth-2 circuit that
reads representation and input together.  Activity is encoded by z_i = 0;
an inactive gate is forced off by an extra representation input z_i
carrying a large negative weight, and auxiliary vote bits pad the top
majority gate so that it reproduces exact majority (or conjunction) over
the active gates alone:

* majority form, fan-in 2m: with |y| = floor((m + |z|) / 2) one-votes, the
  top gate fires iff k + |y| >= m iff 2k >= m - |z|, exact majority over
  the M = m - |z| active gates for every parity of m and |z|.
* conjunction form, fan-in 3m: with |y| + |v| = ceil(3m/2) - M one-votes,
  the top gate fires iff k >= M, i.e. iff every active gate fires.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .corefn import (
    CircuitKind,
    GateCircuit,
    LinearThreshold,
    enumerate_inputs,
)
from .errors import (
    ArityError,
    DistributionSpecError,
    InvalidCircuitError,
    SupportNotEnumerableError,
    WeightOverflowError,
)

ThresholdList = Sequence[LinearThreshold]


def _bits_matrix(xs: np.ndarray, n: int) -> np.ndarray:
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)
    return ((xs.astype(np.uint64)[:, None] >> shifts[None, :]) & 1).astype(np.int64)


class EvaluationRule:
    """Deterministic total map (representation, input) -> +-1."""

    def __init__(self, n, s, fn, batch_fn=None, circuit_builder=None, name=""):
        self.n = int(n)
        self.s = int(s)
        self._fn = fn
        self._batch_fn = batch_fn
        self._circuit_builder = circuit_builder
        self.name = name

    def evaluate(self, rep: int, x: int) -> int:
        return self._fn(int(rep), int(x))

    def evaluate_batch(self, rep: int, xs: np.ndarray) -> np.ndarray:
        """Vector of +-1 values of the concept ``rep`` on packed inputs ``xs``."""
        if self._batch_fn is not None:
            return self._batch_fn(int(rep), np.asarray(xs))
        return np.array([self._fn(int(rep), int(x)) for x in np.asarray(xs)], dtype=np.int8)

    def truth_values(self, rep: int) -> np.ndarray:
        return self.evaluate_batch(rep, np.arange(1 << self.n, dtype=np.int64))

    def as_circuit(self) -> GateCircuit:
        """The fixed depth-2 circuit over (representation || input) bits."""
        if self._circuit_builder is None:
            raise InvalidCircuitError(f"rule {self.name or '<anonymous>'} has no circuit form")
        return self._circuit_builder()

    def __repr__(self):
        return f"EvaluationRule({self.name or 'anonymous'}, n={self.n}, s={self.s})"


@dataclass
class TargetDistribution:
    """Seeded sampler over concept representations, optionally enumerable."""

    s: int
    sample: Callable[[np.random.Generator], int]
    support: Callable[[], tuple[list[int], list[Fraction]]] | None = None
    sampling_time_class: str = "poly"

    def support_weights(self) -> tuple[list[int], list[Fraction]]:
        if self.support is None:
            raise SupportNotEnumerableError("target distribution has no enumerable support")
        return self.support()


@dataclass
class ExampleDistribution:
    """Seeded sampler over n-bit inputs, optionally enumerable."""

    n: int
    sample: Callable[[np.random.Generator], int]
    support: Callable[[], tuple[list[int], list[Fraction]]] | None = None
    sample_batch: Callable[[int, np.random.Generator], np.ndarray] | None = None

    def support_weights(self) -> tuple[list[int], list[Fraction]]:
        if self.support is None:
            raise SupportNotEnumerableError("example distribution has no enumerable support")
        return self.support()

    def draw_batch(self, count: int, rng: np.random.Generator) -> np.ndarray:
        if self.sample_batch is not None:
            return self.sample_batch(count, rng)
        return np.array([self.sample(rng) for _ in range(count)], dtype=np.int64)


class ExampleOracle:
    """Noise-free labelled-example oracle for a hidden concept over rho."""

    def __init__(self, rule: EvaluationRule, rep: int, rho: ExampleDistribution):
        if rho.n != rule.n:
            raise ArityError(f"rho arity {rho.n} != rule input arity {rule.n}")
        self.rule = rule
        self.hidden_rep = int(rep)
        self.rho = rho

    def draw(self, rng: np.random.Generator) -> tuple[int, int]:
        x = int(self.rho.sample(rng))
        return x, self.rule.evaluate(self.hidden_rep, x)

    def draw_batch(self, count: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        xs = self.rho.draw_batch(count, rng)
        return xs, self.rule.evaluate_batch(self.hidden_rep, xs)


def oracle_draw(oracle, rng: np.random.Generator) -> tuple[int, int]:
    """One labelled example <x, f(x)> with x ~ rho."""
    return oracle.draw(rng)


# ---------------------------------------------------------------------------
# Gate modification: force-off weight for the activity bit.
# ---------------------------------------------------------------------------


def gate_off_weight(gate: LinearThreshold) -> int:
    """Weight for the activity input that forces the gate off when set.

    The gate fires iff sum(w_j x_j) + w_z >= theta; taking
    w_z = theta - 1 - sum(max(w_j, 0)) makes that impossible for every 0/1
    input, for arbitrary signed weights and thresholds.
    """
    return gate.theta - 1 - sum(w for w in gate.weights if w > 0)


def modified_gate(gate: LinearThreshold) -> LinearThreshold:
    """The gate extended with its activity input (x_1..x_n, z)."""
    try:
        return LinearThreshold(gate.weights + (gate_off_weight(gate),), gate.theta)
    except WeightOverflowError as exc:
        raise WeightOverflowError(f"activity-weight derivation overflows: {exc}") from exc


def _validate_list(gates: ThresholdList) -> tuple[LinearThreshold, ...]:
    gates = tuple(gates)
    if not gates:
        raise InvalidCircuitError("threshold list must contain at least one gate")
    arities = {g.arity for g in gates}
    if len(arities) != 1:
        raise InvalidCircuitError(f"threshold list mixes arities {sorted(arities)}")
    return gates


@dataclass(frozen=True)
class _RuleTables:
    """Precomputed arrays for vectorized rule evaluation."""

    weights: np.ndarray   # (m, n) int64
    thetas: np.ndarray    # (m,) int64
    off: np.ndarray       # (m,) int64

    @classmethod
    def build(cls, gates):
        return cls(
            np.array([g.weights for g in gates], dtype=np.int64),
            np.array([g.theta for g in gates], dtype=np.int64),
            np.array([gate_off_weight(g) for g in gates], dtype=np.int64),
        )


def _firing_counts(tables: _RuleTables, z: int, xs: np.ndarray, m: int) -> np.ndarray:
    z_bits = np.array([(z >> (m - 1 - i)) & 1 for i in range(m)], dtype=np.int64)
    x_bits = _bits_matrix(np.asarray(xs), tables.weights.shape[1])
    sums = x_bits @ tables.weights.T + z_bits[None, :] * tables.off[None, :]
    return (sums >= tables.thetas[None, :]).sum(axis=1)


def _vote_circuit_builder(gates, m, n, s, aux_positions):
    """Circuit over (representation || input) realizing the padded majority vote."""

    def build():
        total = s + n
        layer = []
        for i, g in enumerate(gates):
            w = [0] * total
            for j, wj in enumerate(g.weights):
                w[s + j] = wj
            w[s - 2 * m + i] = gate_off_weight(g)  # z_i position
            layer.append(LinearThreshold(tuple(w), g.theta))
        for pos in aux_positions:
            w = [0] * total
            w[pos] = 1
            layer.append(LinearThreshold(tuple(w), 1))
        return GateCircuit(CircuitKind.MAJ_OF_THR, tuple(layer), arity=total)

    return build


def majthr_rule(gates: ThresholdList) -> EvaluationRule:
    """Rule for majority over the active gates; representation = (z || y).

    z_i = 0 marks gate i active; the y bits are padding votes whose count
    the sampler fixes to floor((m + |z|) / 2).  The rule itself is one
    fixed majority-of-thresholds circuit on 2m + n inputs.
    """
    gates = _validate_list(gates)
    m, n = len(gates), gates[0].arity
    tables = _RuleTables.build(gates)
    mask = (1 << m) - 1

    def fn(rep: int, x: int) -> int:
        z, y = (rep >> m) & mask, rep & mask
        votes = int(_firing_counts(tables, z, np.array([x]), m)[0]) + y.bit_count()
        return 1 if 2 * votes >= 2 * m else -1

    def batch(rep: int, xs: np.ndarray) -> np.ndarray:
        z, y = (rep >> m) & mask, rep & mask
        votes = _firing_counts(tables, z, xs, m) + y.bit_count()
        return np.where(2 * votes >= 2 * m, 1, -1).astype(np.int8)

    builder = _vote_circuit_builder(gates, m, n, 2 * m, aux_positions=range(m, 2 * m))
    return EvaluationRule(n, 2 * m, fn, batch, builder, name=f"majthr(m={m})")


def sample_mu_L(gates: ThresholdList, mu_theta: TargetDistribution, rng) -> int:
    """Representation (z || y) with z ~ mu_theta and |y| = floor((m + |z|) / 2)."""
    gates = _validate_list(gates)
    m = len(gates)
    z = int(mu_theta.sample(rng))
    k = (m + z.bit_count()) // 2
    y = _random_fixed_weight(m, k, rng)
    return (z << m) | y


def _random_fixed_weight(m: int, k: int, rng) -> int:
    ones = rng.choice(m, size=k, replace=False) if k else []
    out = 0
    for pos in ones:
        out |= 1 << (m - 1 - int(pos))
    return out


def _fixed_weight_strings(m: int, k: int):
    for ones in itertools.combinations(range(m), k):
        out = 0
        for pos in ones:
            out |= 1 << (m - 1 - pos)
        yield out


def mu_L_distribution(gates: ThresholdList, mu_theta: TargetDistribution) -> TargetDistribution:
    """Target distribution over (z || y) representations for majthr_rule."""
    gates = _validate_list(gates)
    m = len(gates)

    def support():
        zs, zw = mu_theta.support_weights()
        reps, weights = [], []
        for z, wz in zip(zs, zw):
            k = (m + int(z).bit_count()) // 2
            count = math.comb(m, k)
            for y in _fixed_weight_strings(m, k):
                reps.append((int(z) << m) | y)
                weights.append(wz / count)
        return reps, weights

    return TargetDistribution(
        s=2 * m,
        sample=lambda rng: sample_mu_L(gates, mu_theta, rng),
        support=support if mu_theta.support is not None else None,
    )


def direct_concept_eval(gates: ThresholdList, z: int, x) -> int:
    """Reference semantics: majority vote over gates with z_i = 0, tie -> +1."""
    gates = _validate_list(gates)
    m = len(gates)
    active = [g for i, g in enumerate(gates) if not (z >> (m - 1 - i)) & 1]
    votes = sum(1 for g in active if g.fires(x))
    return 1 if 2 * votes >= len(active) else -1


def _conjunction_rule(gates: ThresholdList, name: str) -> EvaluationRule:
    gates = _validate_list(gates)
    m, n = len(gates), gates[0].arity
    tables = _RuleTables.build(gates)
    mask = (1 << m) - 1

    def split(rep):
        return (rep >> 2 * m) & mask, (rep >> m) & mask, rep & mask

    def fn(rep: int, x: int) -> int:
        v, z, y = split(rep)
        votes = int(_firing_counts(tables, z, np.array([x]), m)[0]) + y.bit_count() + v.bit_count()
        return 1 if 2 * votes >= 3 * m else -1

    def batch(rep: int, xs: np.ndarray) -> np.ndarray:
        v, z, y = split(rep)
        votes = _firing_counts(tables, z, xs, m) + y.bit_count() + v.bit_count()
        return np.where(2 * votes >= 3 * m, 1, -1).astype(np.int8)

    builder = _vote_circuit_builder(
        gates, m, n, 3 * m, aux_positions=list(range(0, m)) + list(range(2 * m, 3 * m))
    )
    return EvaluationRule(n, 3 * m, fn, batch, builder, name=name)


def polytope_rule(gates: ThresholdList) -> EvaluationRule:
    """Rule for conjunction of the active gates; representation = (v || z || y)."""
    return _conjunction_rule(gates, name=f"polytope(m={len(tuple(gates))})")


def cnf_rule(gates: ThresholdList) -> EvaluationRule:
    """Conjunction-of-disjunctions rule; every gate must be an OR gate.

    An OR gate is a threshold gate with 0/1 weights and theta = 1.  The
    class named "DNF" alongside the majority and polytope families is in
    fact this conjunction-of-disjunctions form; the constructor keeps the
    CNF name to match what it computes.
    """
    gates = _validate_list(gates)
    for i, g in enumerate(gates):
        if not g.is_or_gate():
            raise InvalidCircuitError(f"gate {i} is not an OR gate (0/1 weights, theta=1)")
    return _conjunction_rule(gates, name=f"cnf(m={len(gates)})")


def sample_mu_and_L(gates: ThresholdList, mu_theta: TargetDistribution, rng) -> int:
    """Representation (v || z || y) with |y| + |v| = ceil(3m/2) - (m - |z|)."""
    gates = _validate_list(gates)
    m = len(gates)
    z = int(mu_theta.sample(rng))
    active = m - z.bit_count()
    total_ones = -(-3 * m // 2) - active
    assert 0 <= total_ones <= 2 * m
    vy = _random_fixed_weight(2 * m, total_ones, rng)
    v, y = vy >> m, vy & ((1 << m) - 1)
    return (v << 2 * m) | (z << m) | y


def conjunction_mu_distribution(
    gates: ThresholdList, mu_theta: TargetDistribution
) -> TargetDistribution:
    """Target distribution over (v || z || y) for polytope_rule / cnf_rule."""
    gates = _validate_list(gates)
    m = len(gates)

    def support():
        zs, zw = mu_theta.support_weights()
        reps, weights = [], []
        for z, wz in zip(zs, zw):
            total_ones = -(-3 * m // 2) - (m - int(z).bit_count())
            count = math.comb(2 * m, total_ones)
            for vy in _fixed_weight_strings(2 * m, total_ones):
                v, y = vy >> m, vy & ((1 << m) - 1)
                reps.append((v << 2 * m) | (int(z) << m) | y)
                weights.append(wz / count)
        return reps, weights

    return TargetDistribution(
        s=3 * m,
        sample=lambda rng: sample_mu_and_L(gates, mu_theta, rng),
        support=support if mu_theta.support is not None else None,
    )


# ---------------------------------------------------------------------------
# Distribution constructors.
# ---------------------------------------------------------------------------


def uniform_reps(s: int) -> TargetDistribution:
    """Uniform over all s-bit representations."""
    return TargetDistribution(
        s=s,
        sample=lambda rng: int(rng.integers(0, 1 << s)),
        support=lambda: (list(range(1 << s)), [Fraction(1, 1 << s)] * (1 << s)),
    )


def point_mass_rep(rep: int, s: int) -> TargetDistribution:
    return TargetDistribution(
        s=s, sample=lambda rng: int(rep), support=lambda: ([int(rep)], [Fraction(1)])
    )


def rep_support_dist(reps: Sequence[int], s: int, weights=None) -> TargetDistribution:
    reps = [int(r) for r in reps]
    if weights is None:
        weights = [Fraction(1, len(reps))] * len(reps)
    else:
        weights = _normalized(weights)
    cum = _cumulative(weights)

    def sample(rng):
        return reps[int(np.searchsorted(cum, rng.random(), side="right"))]

    return TargetDistribution(s=s, sample=sample, support=lambda: (reps, weights))


def _cumulative(weights) -> np.ndarray:
    cum = np.cumsum([float(w) for w in weights])
    cum[-1] = 1.0  # guard against float round-off; rng.random() < 1 always
    return cum


def _normalized(weights) -> list[Fraction]:
    ws = [Fraction(w) for w in weights]
    if any(w < 0 for w in ws):
        raise DistributionSpecError("weights must be nonnegative")
    total = sum(ws)
    if total == 0:
        raise DistributionSpecError("weights must not all be zero")
    return [w / total for w in ws]


def uniform_inputs(n: int) -> ExampleDistribution:
    return ExampleDistribution(
        n=n,
        sample=lambda rng: int(rng.integers(0, 1 << n)),
        support=lambda: (list(range(1 << n)), [Fraction(1, 1 << n)] * (1 << n)),
        sample_batch=lambda count, rng: rng.integers(0, 1 << n, size=count, dtype=np.int64),
    )


def bernoulli_product(p, n: int) -> ExampleDistribution:
    """Independent bits, bit i one with probability p (scalar or per-bit)."""
    ps = [float(p)] * n if np.isscalar(p) else [float(q) for q in p]
    if len(ps) != n:
        raise DistributionSpecError(f"need {n} probabilities, got {len(ps)}")
    if any(not 0.0 <= q <= 1.0 for q in ps):
        raise DistributionSpecError("probabilities must lie in [0, 1]")
    parr = np.array(ps)

    def sample_batch(count, rng):
        bits = rng.random((count, n)) < parr[None, :]
        weights = 1 << np.arange(n - 1, -1, -1, dtype=np.int64)
        return bits.astype(np.int64) @ weights

    def support():
        fps = [Fraction(q) for q in ps]
        points, weights = [], []
        for x in range(1 << n):
            w = Fraction(1)
            for i, q in enumerate(fps):
                w *= q if (x >> (n - 1 - i)) & 1 else 1 - q
            if w:
                points.append(x)
                weights.append(w)
        return points, weights

    return ExampleDistribution(
        n=n,
        sample=lambda rng: int(sample_batch(1, rng)[0]),
        support=support,
        sample_batch=sample_batch,
    )


def empirical_inputs(points: Sequence[int], n: int, weights=None) -> ExampleDistribution:
    points = [int(x) for x in points]
    if not points:
        raise DistributionSpecError("empirical distribution needs at least one point")
    if weights is None:
        weights = [Fraction(1, len(points))] * len(points)
    else:
        weights = _normalized(weights)
    cum = _cumulative(weights)
    pts = np.asarray(points, dtype=np.int64)

    def sample_batch(count, rng):
        return pts[np.searchsorted(cum, rng.random(count), side="right")]

    return ExampleDistribution(
        n=n,
        sample=lambda rng: int(sample_batch(1, rng)[0]),
        support=lambda: (points, weights),
        sample_batch=sample_batch,
    )


def pushforward_inputs(source_bits: int, fn: Callable[[int], int], n: int) -> ExampleDistribution:
    """Uniform source_bits-bit string pushed through a deterministic map."""

    def support():
        if source_bits > 22:
            raise SupportNotEnumerableError(
                f"pushforward source of {source_bits} bits is too large to enumerate"
            )
        counts: dict[int, int] = {}
        for r in range(1 << source_bits):
            v = int(fn(r))
            counts[v] = counts.get(v, 0) + 1
        points = sorted(counts)
        return points, [Fraction(counts[x], 1 << source_bits) for x in points]

    return ExampleDistribution(
        n=n,
        sample=lambda rng: int(fn(int(rng.integers(0, 1 << source_bits)))),
        support=support,
    )


def _parse_point(value, n: int) -> int:
    if isinstance(value, str):
        if len(value) != n or set(value) - {"0", "1"}:
            raise DistributionSpecError(f"point {value!r} is not an {n}-bit string")
        return int(value, 2)
    x = int(value)
    if not 0 <= x < 1 << n:
        raise DistributionSpecError(f"point {x} out of range for n={n}")
    return x


def make_rho(spec: dict, n: int | None = None) -> ExampleDistribution:
    """Example distribution from a config-style dict spec.

    Supported: {"type": "uniform", "n"}, {"type": "bernoulli", "p", "n"},
    {"type": "empirical", "n", "points", ["weights"]}.
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise DistributionSpecError(f"bad example-distribution spec: {spec!r}")
    kind = spec["type"]
    n = int(spec.get("n", n) or 0)
    if n < 1:
        raise DistributionSpecError("example-distribution spec needs an arity n")
    if kind == "uniform":
        return uniform_inputs(n)
    if kind == "bernoulli":
        if "p" not in spec:
            raise DistributionSpecError("bernoulli spec needs p")
        return bernoulli_product(spec["p"], n)
    if kind == "empirical":
        points = [_parse_point(x, n) for x in spec.get("points", [])]
        return empirical_inputs(points, n, spec.get("weights"))
    raise DistributionSpecError(f"unknown example-distribution type {kind!r}")


def make_mu_theta(spec: dict, m: int) -> TargetDistribution:
    """Activity-vector distribution over m bits from a config-style dict spec.

    Supported: {"type": "uniform"} (all m-bit strings),
    {"type": "uniform", "support": [...]} (uniform over listed strings),
    {"type": "bernoulli", "p"}, {"type": "support", "support", ["weights"]}.
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise DistributionSpecError(f"bad theta spec: {spec!r}")
    kind = spec["type"]
    if kind == "uniform" and "support" not in spec:
        return uniform_reps(m)
    if kind in ("uniform", "support"):
        points = [_parse_point(x, m) for x in spec.get("support", [])]
        if not points:
            raise DistributionSpecError("support spec needs a nonempty support list")
        weights = spec.get("weights") if kind == "support" else None
        return rep_support_dist(points, m, weights)
    if kind == "bernoulli":
        rho = bernoulli_product(spec.get("p", 0.5), m)
        return TargetDistribution(s=m, sample=rho.sample, support=rho.support)
    raise DistributionSpecError(f"unknown theta type {kind!r}")
