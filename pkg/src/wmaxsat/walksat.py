"""Walksat for weighted MAX-SAT: one try with dynamic noise.

The flip loop keeps, per clause, the number of currently true literals.  A
clause is unsatisfied exactly when that count is zero, and the unsatisfied
clauses are held in an indexable set (list plus position table) so that
insertion, removal and uniform sampling are all O(1).
"""
from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .backbone import (
    PseudoBackboneFrequencies,
    guided_initial_assignment,
    guided_pick_clause,
    guided_pick_variable,
)
from .formula import Assignment, ContractError, WeightedInstance, check_assignment, evaluate

BREAK_METRICS = ("count", "weight")


def derive_seed(master_seed: int, phase: int, index: int) -> int:
    """Seed of the child stream for try ``index`` of ``phase``.

    The child seed is the first 8 bytes (big-endian) of
    ``sha256("wmaxsat:<master>:<phase>:<index>")``.  Each try then owns a
    ``random.Random`` (MT19937) seeded with it, so results do not depend on
    the order or the process in which tries run.
    """
    digest = hashlib.sha256(f"wmaxsat:{master_seed}:{phase}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def make_rng(master_seed: int, phase: int, index: int) -> random.Random:
    return random.Random(derive_seed(master_seed, phase, index))


@dataclass(frozen=True)
class WalksatParams:
    num: int = 400
    p0: float = 0.0
    phi: float = 0.2
    break_metric: str = "count"

    def __post_init__(self):
        if self.num < 1:
            raise ContractError("num must be >= 1")
        if not 0.0 <= self.p0 <= 1.0:
            raise ContractError("p0 must lie in [0, 1]")
        if not 0.0 < self.phi < 1.0:
            raise ContractError("phi must lie in (0, 1)")
        if self.break_metric not in BREAK_METRICS:
            raise ContractError(f"break_metric must be one of {BREAK_METRICS}")


@dataclass(frozen=True)
class NoiseState:
    p: float
    phi: float


def update_noise(noise: NoiseState, quality_decreased: bool) -> NoiseState:
    p, phi = noise.p, noise.phi
    if quality_decreased:
        p = p + (1.0 - p) * phi
    else:
        p = p - p * phi / 2.0
    # guard against float drift just outside [0, 1]
    return NoiseState(min(1.0, max(0.0, p)), phi)


@dataclass(frozen=True)
class TryResult:
    best_assignment: Assignment
    best_weight: int
    flips_used: int
    final_p: float
    noise_trajectory: Optional[Tuple[float, ...]] = None


class SearchState:
    """Mutable search state of a single try, owned by one worker."""

    def __init__(self, instance: WeightedInstance, values: Sequence[bool], break_metric: str = "count"):
        check_assignment(instance, values)
        if break_metric not in BREAK_METRICS:
            raise ContractError(f"break_metric must be one of {BREAK_METRICS}")
        self.instance = instance
        self.break_metric = break_metric
        self.values: List[bool] = [bool(v) for v in values]
        self.occurrences = instance.occurrences
        self.weights: List[int] = instance.weights()
        self.clause_vars: List[Tuple[int, ...]] = [c.variables() for c in instance.clauses]
        self.true_count: List[int] = []
        self.unsat: List[int] = []
        self.unsat_pos: List[int] = [-1] * instance.num_clauses
        weight = 0
        for idx, clause in enumerate(instance.clauses):
            k = sum(1 for lit in clause.literals if self.values[abs(lit) - 1] == (lit > 0))
            self.true_count.append(k)
            if k:
                weight += clause.weight
            else:
                self.unsat_pos[idx] = len(self.unsat)
                self.unsat.append(idx)
        self.weight = weight
        self.best_weight = weight
        self.best_values: Assignment = tuple(self.values)

    def assignment(self) -> Assignment:
        return tuple(self.values)

    def _mark_unsat(self, c: int) -> None:
        self.unsat_pos[c] = len(self.unsat)
        self.unsat.append(c)

    def _mark_sat(self, c: int) -> None:
        pos = self.unsat_pos[c]
        last = self.unsat.pop()
        if last != c:
            self.unsat[pos] = last
            self.unsat_pos[last] = pos
        self.unsat_pos[c] = -1

    def flip(self, var: int) -> int:
        """Flip ``var`` (1-based) and return the new weight."""
        old = self.values[var - 1]
        self.values[var - 1] = not old
        falsified = var if old else -var
        tc = self.true_count
        w = self.weights
        for c in self.occurrences[falsified]:
            tc[c] -= 1
            if tc[c] == 0:
                self._mark_unsat(c)
                self.weight -= w[c]
        for c in self.occurrences[-falsified]:
            tc[c] += 1
            if tc[c] == 1:
                self._mark_sat(c)
                self.weight += w[c]
        if self.weight > self.best_weight:
            self.best_weight = self.weight
            self.best_values = tuple(self.values)
        return self.weight

    def check(self) -> None:
        """Compare the incremental bookkeeping with a full recomputation."""
        inst = self.instance
        fresh = evaluate(inst, self.values)
        assert self.weight == fresh, (self.weight, fresh)
        for idx, clause in enumerate(inst.clauses):
            k = sum(1 for lit in clause.literals if self.values[abs(lit) - 1] == (lit > 0))
            assert self.true_count[idx] == k
            assert (self.unsat_pos[idx] >= 0) == (k == 0)
        assert len(set(self.unsat)) == len(self.unsat)
        for pos, c in enumerate(self.unsat):
            assert self.unsat_pos[c] == pos


def break_count(state: SearchState, var: int) -> int:
    """Satisfied clauses that flipping ``var`` would falsify.

    With ``break_metric="weight"`` the total weight of those clauses is
    returned instead of their number.
    """
    lit = var if state.values[var - 1] else -var
    tc = state.true_count
    if state.break_metric == "count":
        return sum(1 for c in state.occurrences[lit] if tc[c] == 1)
    w = state.weights
    return sum(w[c] for c in state.occurrences[lit] if tc[c] == 1)


def make_count(state: SearchState, var: int) -> int:
    """Weight of the unsatisfied clauses that flipping ``var`` would satisfy."""
    lit = -var if state.values[var - 1] else var
    tc = state.true_count
    w = state.weights
    return sum(w[c] for c in state.occurrences[lit] if tc[c] == 0)


def max_weight_unsat(state: SearchState) -> List[int]:
    unsat = state.unsat
    if not unsat:
        return []
    w = state.weights
    top = max(w[c] for c in unsat)
    return [c for c in unsat if w[c] == top]


def pick_clause(
    state: SearchState,
    rng: random.Random,
    guidance: Optional[PseudoBackboneFrequencies] = None,
) -> Optional[int]:
    """An unsatisfied clause of maximum weight, or None when all are satisfied."""
    candidates = max_weight_unsat(state)
    if not candidates:
        return None
    if len(candidates) == 1:
        return candidates[0]
    if guidance is not None:
        return guided_pick_clause(guidance, candidates, rng)
    return candidates[rng.randrange(len(candidates))]


def pick_variable(
    state: SearchState,
    clause: int,
    noise: NoiseState,
    rng: random.Random,
    guidance: Optional[PseudoBackboneFrequencies] = None,
) -> int:
    variables = state.clause_vars[clause]
    breaks = [break_count(state, v) for v in variables]
    candidates = [v for v, b in zip(variables, breaks) if b == 0]
    if not candidates:
        if rng.random() < noise.p:
            candidates = list(variables)
        else:
            least = min(breaks)
            candidates = [v for v, b in zip(variables, breaks) if b == least]
    if len(candidates) == 1:
        return candidates[0]
    if guidance is not None:
        values = state.values
        return guided_pick_variable(guidance, [(v, values[v - 1]) for v in candidates], rng)
    return candidates[rng.randrange(len(candidates))]


def run_try(
    instance: WeightedInstance,
    params: WalksatParams,
    rng: random.Random,
    guidance: Optional[PseudoBackboneFrequencies] = None,
    check: bool = False,
    record_noise: bool = False,
) -> TryResult:
    """One try: random start followed by at most ``num - 1`` flips.

    With ``guidance`` every random choice of the try is biased by the
    pseudo-backbone frequencies.  ``check`` re-verifies the incremental
    state against a full recount after every flip (slow; for tests).
    """
    n = instance.num_variables
    if guidance is not None:
        values = guided_initial_assignment(guidance, rng)
    else:
        values = [rng.random() < 0.5 for _ in range(n)]
    state = SearchState(instance, values, params.break_metric)
    noise = NoiseState(params.p0, params.phi)
    trajectory = [noise.p] if record_noise else None
    flips = 0
    for _ in range(params.num - 1):
        clause = pick_clause(state, rng, guidance)
        if clause is None:
            break
        var = pick_variable(state, clause, noise, rng, guidance)
        before = state.weight
        after = state.flip(var)
        flips += 1
        noise = update_noise(noise, after < before)
        if record_noise:
            trajectory.append(noise.p)
        if check:
            state.check()
    return TryResult(
        best_assignment=state.best_values,
        best_weight=state.best_weight,
        flips_used=flips,
        final_p=noise.p,
        noise_trajectory=tuple(trajectory) if record_noise else None,
    )


def run_walksat(
    instance: WeightedInstance,
    tries: int,
    params: WalksatParams,
    master_seed: int = 0,
) -> Tuple[TryResult, List[TryResult]]:
    """Best of ``tries`` independent plain tries, using the sampling-phase seed streams."""
    results = [run_try(instance, params, make_rng(master_seed, 1, i)) for i in range(tries)]
    best = results[0]
    for r in results[1:]:
        if r.best_weight > best.best_weight:
            best = r
    return best, results
