"""Exact machinery for small instances.

Everything here enumerates all 2^n assignments, so it is only meant for
instances below ``DEFAULT_CAP`` variables.  The biased instance carries
fractional tie-breaking weights; they are stored exactly as integers scaled
by 2^(2n+1), so no rounding happens anywhere.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .formula import (
    Assignment,
    Backbone,
    ContractError,
    WeightedClause,
    WeightedInstance,
    evaluate,
)

DEFAULT_CAP = 22


class CapacityError(ContractError):
    """The instance is too large for exhaustive enumeration."""


def _check_cap(instance: WeightedInstance, cap: int) -> None:
    if instance.num_variables > cap:
        raise CapacityError(
            f"instance has {instance.num_variables} variables, oracle cap is {cap}"
        )


@total_ordering
@dataclass(frozen=True)
class ExactWeight:
    """A dyadic weight stored as ``scaled_value / 2**scale_bits``."""

    scaled_value: int
    scale_bits: int

    @classmethod
    def from_int(cls, weight: int, scale_bits: int) -> "ExactWeight":
        return cls(weight << scale_bits, scale_bits)

    def _same_scale(self, other: "ExactWeight") -> None:
        if self.scale_bits != other.scale_bits:
            raise ContractError("ExactWeight scales differ")

    def __add__(self, other: "ExactWeight") -> "ExactWeight":
        self._same_scale(other)
        return ExactWeight(self.scaled_value + other.scaled_value, self.scale_bits)

    def __lt__(self, other: "ExactWeight") -> bool:
        self._same_scale(other)
        return self.scaled_value < other.scaled_value

    @property
    def integer_part(self) -> int:
        return self.scaled_value >> self.scale_bits

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.scaled_value, 1 << self.scale_bits)


@dataclass(frozen=True)
class OptimaSet:
    optimal_weight: int
    optima: Tuple[Assignment, ...]


def gray_walk(instance: WeightedInstance) -> Iterator[Tuple[int, Sequence[bool], int]]:
    """Yield ``(step, values, weight)`` for all 2^n assignments in Gray-code order.

    ``values`` is the live buffer and changes after each yield; copy it to
    keep it.  Each step flips one variable and updates the weight from that
    variable's occurrences only.
    """
    n = instance.num_variables
    values = [False] * n
    true_count = []
    weight = 0
    for clause in instance.clauses:
        k = sum(1 for lit in clause.literals if lit < 0)
        true_count.append(k)
        if k:
            weight += clause.weight
    weights = instance.weights()
    occ = instance.occurrences
    yield 0, values, weight
    for step in range(1, 1 << n):
        var = (step & -step).bit_length()
        old = values[var - 1]
        values[var - 1] = not old
        falsified = var if old else -var
        for c in occ[falsified]:
            true_count[c] -= 1
            if true_count[c] == 0:
                weight -= weights[c]
        for c in occ[-falsified]:
            true_count[c] += 1
            if true_count[c] == 1:
                weight += weights[c]
        yield step, values, weight


def exact_optima(instance: WeightedInstance, cap: int = DEFAULT_CAP) -> OptimaSet:
    _check_cap(instance, cap)
    best = -1
    optima: List[Assignment] = []
    for _, values, weight in gray_walk(instance):
        if weight > best:
            best = weight
            optima = [tuple(values)]
        elif weight == best:
            optima.append(tuple(values))
    return OptimaSet(best, tuple(sorted(optima)))


def all_weights(instance: WeightedInstance, cap: int = DEFAULT_CAP) -> List[int]:
    _check_cap(instance, cap)
    return [w for _, _, w in gray_walk(instance)]


def backbone_of(optima: Sequence[Assignment], n: int) -> Backbone:
    out: List[Optional[bool]] = []
    for i in range(n):
        vals = {a[i] for a in optima}
        out.append(vals.pop() if len(vals) == 1 else None)
    return tuple(out)


def exact_backbone(instance: WeightedInstance, cap: int = DEFAULT_CAP) -> Backbone:
    return backbone_of(exact_optima(instance, cap).optima, instance.num_variables)


@dataclass(frozen=True)
class BiasedInstance:
    """The perturbed instance with a unique optimum.

    ``scaled`` holds the same clauses as the biased instance with every
    weight multiplied by ``2**scale_bits``; its optima are the biased
    instance's optima and its weights are exact.
    """

    original: WeightedInstance
    scaled: WeightedInstance
    scale_bits: int

    def weight(self, assignment: Sequence[bool]) -> ExactWeight:
        return ExactWeight(evaluate(self.scaled, assignment), self.scale_bits)

    def clause_weight(self, index: int) -> ExactWeight:
        return ExactWeight(self.scaled.clauses[index].weight, self.scale_bits)

    def total_weight(self) -> ExactWeight:
        return ExactWeight(self.scaled.total_weight, self.scale_bits)


def build_biased_instance(instance: WeightedInstance, cap: int = DEFAULT_CAP) -> BiasedInstance:
    """Add both unit clauses per variable with bias 2^-(2j) for x_j and 2^-(2j+1) for not x_j.

    A unit clause already present gets the bias added to its first copy
    instead of a duplicate clause.  Scaled by 2^(2n+1), the bias of x_j is
    2^(2n+1-2j) and that of not x_j is 2^(2n-2j), so all biases together sum
    to 2^(2n) - 1, that is 1/2 - 2^-(2n+1) before scaling.
    """
    _check_cap(instance, cap)
    n = instance.num_variables
    bits = 2 * n + 1
    for c in instance.clauses:
        if not isinstance(c.weight, int) or isinstance(c.weight, bool):
            raise ContractError("biased construction needs integer weights")
    weights = [c.weight << bits for c in instance.clauses]
    lits = [c.literals for c in instance.clauses]
    first_unit: Dict[int, int] = {}
    for idx, c in enumerate(instance.clauses):
        if len(c.literals) == 1:
            first_unit.setdefault(c.literals[0], idx)
    for j in range(1, n + 1):
        for lit, bias in ((j, 1 << (bits - 2 * j)), (-j, 1 << (bits - 2 * j - 1))):
            if lit in first_unit:
                weights[first_unit[lit]] += bias
            else:
                lits.append((lit,))
                weights.append(bias)
    scaled = WeightedInstance(n, tuple(WeightedClause(l, w) for l, w in zip(lits, weights)))
    return BiasedInstance(instance, scaled, bits)


def biased_optimum(instance: WeightedInstance, cap: int = DEFAULT_CAP) -> Assignment:
    """The unique optimum of the biased instance (an optimum of ``instance``)."""
    opt = exact_optima(build_biased_instance(instance, cap).scaled, cap)
    if len(opt.optima) != 1:
        raise AssertionError("biased instance has several optima")
    return opt.optima[0]


def verify_lemma1(instance: WeightedInstance, cap: int = DEFAULT_CAP) -> bool:
    """The biased instance has a unique optimum and, stronger, all 2^n
    assignments have pairwise distinct biased weights."""
    biased = build_biased_instance(instance, cap)
    weights = all_weights(biased.scaled, cap)
    distinct = len(set(weights)) == len(weights)
    unique = len(exact_optima(biased.scaled, cap).optima) == 1
    return distinct and unique


def verify_lemma2(instance: WeightedInstance, cap: int = DEFAULT_CAP) -> bool:
    """The biased optimum is optimal under the original weights."""
    biased = build_biased_instance(instance, cap)
    opt = exact_optima(biased.scaled, cap)
    if len(opt.optima) != 1:
        return False
    return evaluate(instance, opt.optima[0]) == exact_optima(instance, cap).optimal_weight


def check_bias_identity(instance: WeightedInstance, cap: int = DEFAULT_CAP) -> bool:
    """Summed biased weight equals the original total plus 1/2 - 2^-(2n+1), exactly."""
    biased = build_biased_instance(instance, cap)
    n = instance.num_variables
    expected = (instance.total_weight << biased.scale_bits) + (1 << (2 * n)) - 1
    return (
        biased.scaled.total_weight == expected
        and biased.total_weight().fraction
        == instance.total_weight + Fraction(1, 2) - Fraction(1, 2 ** (2 * n + 1))
    )


@dataclass(frozen=True)
class FixResult:
    reduced: WeightedInstance
    satisfied_weight_offset: int
    lost_weight: int
    # variable_map[old_var] = new_var for every variable kept
    variable_map: Dict[int, int]

    def lift(self, literal: int, reduced_assignment: Sequence[bool]) -> Assignment:
        """Extend an assignment of the reduced instance with the fixed literal."""
        n = len(self.variable_map) + 1
        out = [False] * n
        out[abs(literal) - 1] = literal > 0
        for old, new in self.variable_map.items():
            out[old - 1] = bool(reduced_assignment[new - 1])
        return tuple(out)


def fix_literal(instance: WeightedInstance, literal: int) -> FixResult:
    """Set ``literal`` true and drop its variable.

    Clauses containing the literal are satisfied and leave; their weight
    becomes the offset.  The negated literal is deleted from the remaining
    clauses; clauses that become empty can never be satisfied and their
    weight is reported as ``lost_weight``.
    """
    var = abs(literal)
    if literal == 0 or var > instance.num_variables:
        raise ContractError(f"literal {literal} not over [1, {instance.num_variables}]")
    mapping = {}
    for v in range(1, instance.num_variables + 1):
        if v != var:
            mapping[v] = len(mapping) + 1
    offset = lost = 0
    kept = []
    for c in instance.clauses:
        if literal in c.literals:
            offset += c.weight
            continue
        rest = tuple(
            (mapping[l] if l > 0 else -mapping[-l]) for l in c.literals if l != -literal
        )
        if not rest:
            lost += c.weight
            continue
        kept.append(WeightedClause(rest, c.weight))
    reduced = WeightedInstance(instance.num_variables - 1, tuple(kept))
    return FixResult(reduced, offset, lost, mapping)


@dataclass(frozen=True)
class ReductionStep:
    literal: int  # in the ORIGINAL variable numbering
    satisfied_weight_offset: int
    lost_weight: int
    variables_left: int


@dataclass(frozen=True)
class ReductionTrace:
    steps: Tuple[ReductionStep, ...]
    assignment: Assignment
    weight: int


def reduce_by_backbone(instance: WeightedInstance, cap: int = DEFAULT_CAP) -> ReductionTrace:
    """Solve ``instance`` literal by literal.

    Each round takes the biased instance's unique optimum (its full
    backbone), fixes the literal of the lowest-numbered remaining variable
    in the current instance, and continues on the reduced instance.
    """
    _check_cap(instance, cap)
    current = instance
    # current variable -> original variable
    to_original = list(range(1, instance.num_variables + 1))
    values: List[Optional[bool]] = [None] * instance.num_variables
    steps = []
    while current.num_variables:
        bone = biased_optimum(current, cap)
        lit = 1 if bone[0] else -1
        fixed = fix_literal(current, lit)
        orig = to_original[0]
        values[orig - 1] = bone[0]
        steps.append(
            ReductionStep(
                orig if bone[0] else -orig,
                fixed.satisfied_weight_offset,
                fixed.lost_weight,
                fixed.reduced.num_variables,
            )
        )
        to_original = [to_original[old - 1] for old in sorted(fixed.variable_map, key=fixed.variable_map.get)]
        current = fixed.reduced
    assignment = tuple(bool(v) for v in values)
    return ReductionTrace(tuple(steps), assignment, evaluate(instance, assignment))


def random_literal_and_extension(
    instance: WeightedInstance, rng: random.Random
) -> Tuple[int, Assignment]:
    """A random literal and a random assignment in which it is true."""
    n = instance.num_variables
    var = rng.randint(1, n)
    lit = var if rng.random() < 0.5 else -var
    values = [rng.random() < 0.5 for _ in range(n)]
    values[var - 1] = lit > 0
    return lit, tuple(values)


def check_fix_conservation(
    instance: WeightedInstance, rng: random.Random, literals: int = 4, samples: int = 16
) -> bool:
    """original weight = offset + reduced weight, for assignments extending the fixed literal."""
    if instance.num_variables == 0:
        return True
    for _ in range(literals):
        lit, _ = random_literal_and_extension(instance, rng)
        fixed = fix_literal(instance, lit)
        for _ in range(samples):
            reduced_values = tuple(rng.random() < 0.5 for _ in range(fixed.reduced.num_variables))
            full = fixed.lift(lit, reduced_values)
            if evaluate(instance, full) != fixed.satisfied_weight_offset + evaluate(fixed.reduced, reduced_values):
                return False
    return True


def check_backbone_fixing(instance: WeightedInstance, cap: int = DEFAULT_CAP) -> bool:
    """Fixing any exact-backbone literal keeps the optimum; fixing its negation loses it."""
    opt = exact_optima(instance, cap)
    bone = backbone_of(opt.optima, instance.num_variables)
    for i, val in enumerate(bone):
        if val is None:
            continue
        lit = (i + 1) if val else -(i + 1)
        kept = fix_literal(instance, lit)
        if kept.satisfied_weight_offset + exact_optima(kept.reduced, cap).optimal_weight != opt.optimal_weight:
            return False
        neg = fix_literal(instance, -lit)
        if neg.satisfied_weight_offset + exact_optima(neg.reduced, cap).optimal_weight >= opt.optimal_weight:
            return False
    return True
