"""Seeded random instance generators."""
from __future__ import annotations

import random
from typing import List, Tuple

from .formula import WeightedClause, WeightedInstance


def random_instance(
    rng: random.Random,
    n: int,
    m: int,
    max_len: int = 3,
    weights: Tuple[int, int] = (1, 100),
) -> WeightedInstance:
    """Clauses of length uniform in [1, max_len] over distinct variables,
    random signs, weights uniform in ``weights`` (inclusive)."""
    clauses = []
    for _ in range(m):
        k = rng.randint(1, min(max_len, n))
        vars_ = rng.sample(range(1, n + 1), k)
        lits = tuple(v if rng.random() < 0.5 else -v for v in vars_)
        clauses.append(WeightedClause(lits, rng.randint(*weights)))
    return WeightedInstance(n, tuple(clauses))


def random_suite(
    seed: int,
    count: int,
    n_range: Tuple[int, int] = (4, 10),
    m_range: Tuple[int, int] = (5, 40),
    weights: Tuple[int, int] = (1, 100),
) -> List[WeightedInstance]:
    """``count`` instances; instance i depends only on (seed, i)."""
    out = []
    for i in range(count):
        rng = random.Random(f"suite:{seed}:{i}")
        n = rng.randint(*n_range)
        m = rng.randint(*m_range)
        out.append(random_instance(rng, n, m, weights=weights))
    return out


def jnh_like(
    rng: random.Random,
    n: int = 100,
    m: int = 850,
    include_prob: float = 0.045,
    weights: Tuple[int, int] = (1, 1000),
) -> WeightedInstance:
    """Random clauses in the style of the jnh family: every variable joins a
    clause with probability ``include_prob`` and a random sign; clauses with
    fewer than two literals are redrawn.  The default density puts 850
    clauses over 100 variables just past the satisfiability threshold.
    These are not the jnh files themselves."""
    clauses = []
    while len(clauses) < m:
        lits = [v if rng.random() < 0.5 else -v for v in range(1, n + 1) if rng.random() < include_prob]
        if len(lits) < 2:
            continue
        clauses.append(WeightedClause(tuple(lits), rng.randint(*weights)))
    return WeightedInstance(n, tuple(clauses))
