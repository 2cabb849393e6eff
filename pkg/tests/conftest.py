import itertools
import os
import random
from pathlib import Path

import hypothesis.strategies as st
import pytest

from wmaxsat.formula import WeightedClause, WeightedInstance

REPO = Path(__file__).resolve().parent.parent


def naive_weight(clauses, values):
    """Independent evaluation over raw (literals, weight) pairs."""
    total = 0
    for lits, w in clauses:
        if any((lit > 0 and values[abs(lit) - 1]) or (lit < 0 and not values[abs(lit) - 1]) for lit in lits):
            total += w
    return total


def raw(instance):
    return [(c.literals, c.weight) for c in instance.clauses]


def brute_force(instance):
    """(optimum, list of optimal assignments) by itertools.product."""
    clauses = raw(instance)
    best, arg = -1, []
    for bits in itertools.product([False, True], repeat=instance.num_variables):
        w = naive_weight(clauses, bits)
        if w > best:
            best, arg = w, [bits]
        elif w == best:
            arg.append(bits)
    return best, arg


@st.composite
def instances(draw, max_vars=8, max_clauses=20, max_weight=50, max_len=4):
    n = draw(st.integers(1, max_vars))
    m = draw(st.integers(0, max_clauses))
    clauses = []
    for _ in range(m):
        vars_ = draw(st.lists(st.integers(1, n), min_size=1, max_size=min(max_len, n), unique=True))
        lits = tuple(v if draw(st.booleans()) else -v for v in vars_)
        clauses.append(WeightedClause(lits, draw(st.integers(1, max_weight))))
    return WeightedInstance(n, tuple(clauses))


def assignments(n):
    return st.lists(st.booleans(), min_size=n, max_size=n).map(tuple)


def jnh_dir():
    """Directory holding the weighted jnh files, if present."""
    env = os.environ.get("WMAXSAT_JNH_DIR")
    path = Path(env) if env else REPO / "data" / "jnh"
    return path if path.is_dir() else None


def jnh_path(name):
    d = jnh_dir()
    if d is None:
        return None
    for cand in sorted(d.glob(f"{name}*")):
        if cand.name.split(".")[0] == name:
            return cand
    return None


@pytest.fixture
def rng():
    return random.Random(12345)
