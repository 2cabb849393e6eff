"""How far sampled local optima sit from a reference optimum."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .backbone import PseudoBackboneFrequencies
from .bgls import make_pool, run_tries
from .formula import Assignment, ContractError, ParseError, WeightedInstance, evaluate, hamming_distance
from .walksat import WalksatParams, derive_seed

ANALYZE_COLUMNS = ["try", "weight", "normalized_distance"]


@dataclass(frozen=True)
class LocalOptimumRecord:
    index: int
    weight: int
    normalized_distance: float


@dataclass(frozen=True)
class AnalysisReport:
    reference_weight: int
    local_optima: Tuple[LocalOptimumRecord, ...]
    majority_match_fraction: float
    majority_ties: int
    frequencies: PseudoBackboneFrequencies

    def to_dict(self) -> dict:
        return {
            "reference_weight": self.reference_weight,
            "majority_match_fraction": self.majority_match_fraction,
            "majority_ties": self.majority_ties,
            "mean_normalized_distance": (
                sum(r.normalized_distance for r in self.local_optima) / len(self.local_optima)
                if self.local_optima
                else None
            ),
            "local_optima": [
                {"try": r.index, "weight": r.weight, "normalized_distance": r.normalized_distance}
                for r in self.local_optima
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(ANALYZE_COLUMNS)
        for r in self.local_optima:
            w.writerow([r.index, r.weight, repr(r.normalized_distance)])
        return buf.getvalue()


def majority_match(freqs: PseudoBackboneFrequencies, reference: Sequence[bool]) -> Tuple[float, int]:
    """Fraction of variables whose reference value is their majority value.

    A variable with a tied count has no majority value and counts as a
    mismatch.  Returns ``(fraction, number of ties)``.
    """
    majority = freqs.majority_values()
    if not majority:
        return 1.0, 0
    hits = sum(1 for m, r in zip(majority, reference) if m is not None and m == bool(r))
    ties = sum(1 for m in majority if m is None)
    return hits / len(majority), ties


def analyze_local_optima(
    instance: WeightedInstance,
    reference: Sequence[bool],
    tries: int = 50,
    params: WalksatParams = WalksatParams(num=200, p0=0.0),
    master_seed: int = 0,
    jobs: int = 1,
) -> AnalysisReport:
    if len(reference) != instance.num_variables:
        raise ContractError("reference assignment has the wrong length")
    n = instance.num_variables
    seeds = [derive_seed(master_seed, 1, i) for i in range(tries)]
    pool = make_pool(instance, jobs)
    try:
        results = run_tries(instance, params, seeds, pool=pool)
    finally:
        if pool is not None:
            pool.shutdown()
    freqs = PseudoBackboneFrequencies.for_instance(instance)
    records: List[LocalOptimumRecord] = []
    for i, res in enumerate(results):
        freqs.record(instance, res.best_assignment)
        dist = hamming_distance(res.best_assignment, reference) / n if n else 0.0
        records.append(LocalOptimumRecord(i, res.best_weight, dist))
    fraction, ties = majority_match(freqs, reference)
    return AnalysisReport(evaluate(instance, reference), tuple(records), fraction, ties, freqs)


def parse_assignment(text: str, n: Optional[int] = None) -> Assignment:
    """Read signed literals (``1 -2 3 ...``); ``v`` markers, comments and a trailing 0 are ignored."""
    lits = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = line.split()
        if not toks or toks[0] in ("c", "s"):
            continue
        for tok in toks:
            if tok == "v":
                continue
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno) from None
            if lit:
                lits.append(lit)
    size = n if n is not None else max((abs(l) for l in lits), default=0)
    values: List[Optional[bool]] = [None] * size
    for lit in lits:
        if abs(lit) > size:
            raise ContractError(f"literal {lit} outside [1, {size}]")
        values[abs(lit) - 1] = lit > 0
    if any(v is None for v in values):
        raise ContractError("reference assignment does not cover every variable")
    return tuple(values)
