"""Pseudo-backbone frequencies sampled from local optima, and guided picks.

Every guided pick uses add-one smoothing, so options never seen in a
sample stay reachable and equal counts reduce to a uniform choice.

* initial value of variable i: P(true) = (true_count[i] + 1) / (samples + 2)
* clause among max-weight unsatisfied candidates: weight clause_sat_count[j] + 1
* variable among flip candidates: weight 1 + (number of samples holding the
  value the variable would take after the flip)
"""
from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

from .formula import ContractError, WeightedInstance, check_assignment

log = logging.getLogger(__name__)


@dataclass
class PseudoBackboneFrequencies:
    num_variables: int
    num_clauses: int
    samples: int = 0
    var_true_count: List[int] = field(default_factory=list)
    clause_sat_count: List[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.var_true_count:
            self.var_true_count = [0] * self.num_variables
        if not self.clause_sat_count:
            self.clause_sat_count = [0] * self.num_clauses
        if len(self.var_true_count) != self.num_variables or len(self.clause_sat_count) != self.num_clauses:
            raise ContractError("count arrays do not match instance dimensions")

    @classmethod
    def for_instance(cls, instance: WeightedInstance) -> "PseudoBackboneFrequencies":
        return cls(instance.num_variables, instance.num_clauses)

    def record(self, instance: WeightedInstance, local_optimum: Sequence[bool]) -> "PseudoBackboneFrequencies":
        check_assignment(instance, local_optimum)
        if instance.num_clauses != self.num_clauses:
            raise ContractError("instance does not match frequencies")
        self.samples += 1
        for i, v in enumerate(local_optimum):
            if v:
                self.var_true_count[i] += 1
        for j, clause in enumerate(instance.clauses):
            if clause.satisfied_by(local_optimum):
                self.clause_sat_count[j] += 1
        return self

    def merge(self, other: "PseudoBackboneFrequencies") -> "PseudoBackboneFrequencies":
        """Componentwise sum, returned as a new object."""
        if (self.num_variables, self.num_clauses) != (other.num_variables, other.num_clauses):
            raise ContractError("cannot merge frequencies of different instances")
        return PseudoBackboneFrequencies(
            self.num_variables,
            self.num_clauses,
            self.samples + other.samples,
            [a + b for a, b in zip(self.var_true_count, other.var_true_count)],
            [a + b for a, b in zip(self.clause_sat_count, other.clause_sat_count)],
        )

    def true_probability(self, var: int) -> float:
        return (self.var_true_count[var - 1] + 1) / (self.samples + 2)

    def majority_values(self) -> List[bool | None]:
        """Per-variable majority value over the samples; None on a tie."""
        out = []
        for c in self.var_true_count:
            twice = 2 * c
            out.append(None if twice == self.samples else twice > self.samples)
        return out

    def to_dict(self) -> dict:
        return {
            "num_variables": self.num_variables,
            "num_clauses": self.num_clauses,
            "samples": self.samples,
            "var_true_count": list(self.var_true_count),
            "clause_sat_count": list(self.clause_sat_count),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PseudoBackboneFrequencies":
        freqs = cls(
            int(data["num_variables"]),
            int(data["num_clauses"]),
            int(data["samples"]),
            [int(x) for x in data["var_true_count"]],
            [int(x) for x in data["clause_sat_count"]],
        )
        if any(not 0 <= c <= freqs.samples for c in freqs.var_true_count + freqs.clause_sat_count):
            raise ContractError("counts must lie in [0, samples]")
        return freqs

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PseudoBackboneFrequencies":
        return cls.from_dict(json.loads(text))


def guided_initial_assignment(freqs: PseudoBackboneFrequencies, rng: random.Random) -> List[bool]:
    if freqs.samples == 0:
        log.info("no samples recorded; guided start falls back to uniform")
        return [rng.random() < 0.5 for _ in range(freqs.num_variables)]
    denom = freqs.samples + 2
    return [rng.random() < (c + 1) / denom for c in freqs.var_true_count]


def guided_pick_clause(freqs: PseudoBackboneFrequencies, candidates: Sequence[int], rng: random.Random) -> int:
    """Favor candidates that were satisfied in many sampled local optima."""
    if not candidates:
        raise ContractError("no candidate clauses")
    counts = freqs.clause_sat_count
    return rng.choices(candidates, weights=[counts[j] + 1 for j in candidates])[0]


def guided_pick_variable(
    freqs: PseudoBackboneFrequencies,
    candidates: Sequence[Tuple[int, bool]],
    rng: random.Random,
) -> int:
    """Favor flips that move a variable toward its frequent value.

    ``candidates`` holds ``(variable, current value)`` pairs.
    """
    if not candidates:
        raise ContractError("no candidate variables")
    samples = freqs.samples
    counts = freqs.var_true_count
    weights = []
    for var, value in candidates:
        c = counts[var - 1]
        weights.append(1 + (samples - c if value else c))
    return rng.choices([v for v, _ in candidates], weights=weights)[0]
