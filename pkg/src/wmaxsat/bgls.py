"""Backbone guided local search: a sampling phase of plain Walksat tries
followed by a backbone phase of frequency-guided tries."""
from __future__ import annotations

import csv
import io
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .backbone import PseudoBackboneFrequencies
from .formula import Assignment, ContractError, WeightedInstance, evaluate
from .walksat import TryResult, WalksatParams, derive_seed, run_try

# seed-stream phase ids
SAMPLING, BACKBONE = 1, 2


@dataclass(frozen=True)
class BglsParams:
    n1: int = 50
    n2: int = 50
    num: int = 400
    p0: float = 0.0
    phi: float = 0.2
    master_seed: int = 0
    break_metric: str = "count"
    # Optional wall-clock cap in seconds per phase; off by default because
    # it makes results depend on machine speed.
    phase_time_limit: Optional[float] = None

    def __post_init__(self):
        if self.n1 < 1:
            raise ContractError("n1 must be >= 1")
        if self.n2 < 0:
            raise ContractError("n2 must be >= 0")
        self.walksat()  # validates num, p0, phi, break_metric

    def walksat(self) -> WalksatParams:
        return WalksatParams(self.num, self.p0, self.phi, self.break_metric)


@dataclass(frozen=True)
class TryRecord:
    phase: str
    index: int
    seed: int
    weight: int
    flips: int
    final_p: float


@dataclass
class RunReport:
    best_assignment: Assignment
    best_weight: int
    tries: List[TryRecord]
    frequencies: PseudoBackboneFrequencies
    phase_millis: dict = field(default_factory=dict)

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "best_weight": self.best_weight,
            "best_assignment": [i + 1 if v else -(i + 1) for i, v in enumerate(self.best_assignment)],
            "tries": [
                {
                    "phase": t.phase,
                    "index": t.index,
                    "seed": t.seed,
                    "weight": t.weight,
                    "flips": t.flips,
                    "final_p": t.final_p,
                }
                for t in self.tries
            ],
            "frequencies": self.frequencies.to_dict(),
        }
        if timing:
            out["phase_millis"] = dict(self.phase_millis)
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)


SUMMARY_COLUMNS = ["instance", "best_weight", "optimum", "gap_pct", "millis"]


def gap_percent(weight: int, optimum: Optional[int]) -> Optional[float]:
    if not optimum:
        return None
    return 100.0 * (optimum - weight) / optimum


def summary_csv(name: str, report: RunReport, optimum: Optional[int] = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    gap = gap_percent(report.best_weight, optimum)
    writer.writerow([
        name,
        report.best_weight,
        "" if optimum is None else optimum,
        "" if gap is None else f"{gap:.4f}",
        f"{sum(report.phase_millis.values()):.1f}",
    ])
    return buf.getvalue()


# Worker-process state, set once per pool by the initializer.
_worker_instance: Optional[WeightedInstance] = None


def _init_worker(instance: WeightedInstance) -> None:
    global _worker_instance
    _worker_instance = instance


def _pool_try(args) -> TryResult:
    params, seed, guidance = args
    return run_try(_worker_instance, params, random.Random(seed), guidance)


def run_tries(
    instance: WeightedInstance,
    params: WalksatParams,
    seeds: Sequence[int],
    guidance: Optional[PseudoBackboneFrequencies] = None,
    pool: Optional[ProcessPoolExecutor] = None,
    time_limit: Optional[float] = None,
) -> List[TryResult]:
    """One try per seed, results in seed order.

    With ``time_limit`` (seconds) tries run serially and no new try starts
    once the limit is exceeded; at least one try always runs.
    """
    if pool is not None and time_limit is None:
        return list(pool.map(_pool_try, [(params, s, guidance) for s in seeds]))
    out = []
    start = time.monotonic()
    for i, seed in enumerate(seeds):
        if time_limit is not None and i and time.monotonic() - start > time_limit:
            break
        out.append(run_try(instance, params, random.Random(seed), guidance))
    return out


def make_pool(instance: WeightedInstance, jobs: int) -> Optional[ProcessPoolExecutor]:
    if jobs <= 1:
        return None
    return ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(instance,))


def _run_phase(instance, params: BglsParams, phase: int, count: int, guidance, pool):
    seeds = [derive_seed(params.master_seed, phase, i) for i in range(count)]
    results = run_tries(instance, params.walksat(), seeds, guidance, pool, params.phase_time_limit)
    return list(zip(seeds, results))


def run_bgls(
    instance: WeightedInstance,
    params: BglsParams,
    jobs: int = 1,
    frequencies: Optional[PseudoBackboneFrequencies] = None,
) -> RunReport:
    """Run both phases and return the best assignment over all tries.

    Results are identical for any ``jobs``: each try draws from its own seed
    stream and tries are folded in index order.  Passing saved
    ``frequencies`` skips the sampling phase and resumes with the backbone
    phase.
    """
    pool = make_pool(instance, jobs)
    try:
        records: List[TryRecord] = []
        best_weight = -1
        best_assignment: Assignment = ()
        millis = {}

        t0 = time.monotonic()
        if frequencies is None:
            freqs = PseudoBackboneFrequencies.for_instance(instance)
            sampled = _run_phase(instance, params, SAMPLING, params.n1, None, pool)
        else:
            if (frequencies.num_variables, frequencies.num_clauses) != (instance.num_variables, instance.num_clauses):
                raise ContractError("saved frequencies do not match the instance")
            freqs = PseudoBackboneFrequencies.from_dict(frequencies.to_dict())
            sampled = []
        for i, (seed, res) in enumerate(sampled):
            freqs.record(instance, res.best_assignment)  # frozen once this phase ends
            records.append(TryRecord("sampling", i, seed, res.best_weight, res.flips_used, res.final_p))
            if res.best_weight > best_weight:
                best_weight, best_assignment = res.best_weight, res.best_assignment
        millis["sampling"] = 1000.0 * (time.monotonic() - t0)

        t0 = time.monotonic()
        guided = _run_phase(instance, params, BACKBONE, params.n2, freqs, pool) if params.n2 else []
        for i, (seed, res) in enumerate(guided):
            records.append(TryRecord("backbone", i, seed, res.best_weight, res.flips_used, res.final_p))
            if res.best_weight > best_weight:
                best_weight, best_assignment = res.best_weight, res.best_assignment
        millis["backbone"] = 1000.0 * (time.monotonic() - t0)
    finally:
        if pool is not None:
            pool.shutdown()

    if best_weight < 0:
        raise ContractError("no tries were run")
    assert evaluate(instance, best_assignment) == best_weight
    return RunReport(best_assignment, best_weight, records, freqs, millis)
