import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st
from scipy.stats import chisquare

from wmaxsat.backbone import (
    PseudoBackboneFrequencies,
    guided_initial_assignment,
    guided_pick_clause,
    guided_pick_variable,
)
from wmaxsat.formula import ContractError, WeightedInstance
from wmaxsat.generate import jnh_like
from wmaxsat.walksat import WalksatParams, make_rng, run_try

from conftest import assignments, instances

ALPHA = 0.01


def freqs_with(n=2, m=2, samples=0, var=None, clause=None):
    return PseudoBackboneFrequencies(n, m, samples, list(var or [0] * n), list(clause or [0] * m))


def test_record_example():
    i = WeightedInstance.from_lists(2, [([1], 1), ([2], 1)])
    f = PseudoBackboneFrequencies.for_instance(i).record(i, (True, False))
    assert f.samples == 1
    assert f.var_true_count == [1, 0]
    assert f.clause_sat_count == [1, 0]


@given(instances(), st.data(), st.integers(1, 6))
def test_record_is_linear(i, data, k):
    a = data.draw(assignments(i.num_variables))
    once = PseudoBackboneFrequencies.for_instance(i).record(i, a)
    many = PseudoBackboneFrequencies.for_instance(i)
    for _ in range(k):
        many.record(i, a)
    assert many.samples == k
    assert many.var_true_count == [k * c for c in once.var_true_count]
    assert many.clause_sat_count == [k * c for c in once.clause_sat_count]


@settings(max_examples=40)
@given(instances(), st.data())
def test_record_commutes_and_merge_associates(i, data):
    pool = data.draw(st.lists(assignments(i.num_variables), min_size=1, max_size=6))
    perm = data.draw(st.permutations(pool))

    def fill(seq):
        f = PseudoBackboneFrequencies.for_instance(i)
        for a in seq:
            f.record(i, a)
        return f

    assert fill(pool) == fill(perm)
    cut = data.draw(st.integers(0, len(pool)))
    left, right = fill(pool[:cut]), fill(pool[cut:])
    assert left.merge(right) == fill(pool)
    # record-then-merge equals merge-then-record
    extra = pool[0]
    a = fill(pool[:cut]).record(i, extra).merge(fill(pool[cut:]))
    b = fill(pool[:cut]).merge(fill(pool[cut:])).record(i, extra)
    assert a == b


def test_record_sweep_at_jnh_scale():
    i = jnh_like(random.Random(11))
    f = PseudoBackboneFrequencies.for_instance(i)
    for k in range(50):
        f.record(i, run_try(i, WalksatParams(), make_rng(1, 1, k)).best_assignment)
    assert f.samples == 50
    assert all(0 <= c <= 50 for c in f.var_true_count + f.clause_sat_count)


def test_record_length_mismatch():
    i = WeightedInstance.from_lists(2, [([1], 1)])
    with pytest.raises(ContractError):
        PseudoBackboneFrequencies.for_instance(i).record(i, (True,))


def test_json_round_trip():
    f = freqs_with(3, 2, 4, [4, 0, 2], [3, 1])
    assert PseudoBackboneFrequencies.from_json(f.to_json()) == f
    with pytest.raises(ContractError):
        PseudoBackboneFrequencies.from_dict({**f.to_dict(), "samples": 1})


# --- guided picks: formulas -----------------------------------------------------


def test_initial_probabilities():
    f = freqs_with(2, 0, 50, [50, 25])
    assert f.true_probability(1) == pytest.approx(51 / 52)
    assert f.true_probability(2) == pytest.approx(0.5)


def test_initial_frequencies_monte_carlo():
    f = freqs_with(4, 0, 50, [50, 25, 0, 10])
    rng = random.Random(21)
    draws = 100_000
    trues = [0] * 4
    for _ in range(draws):
        for k, v in enumerate(guided_initial_assignment(f, rng)):
            trues[k] += v
    for k in range(4):
        p = f.true_probability(k + 1)
        sigma = math.sqrt(draws * p * (1 - p))
        assert abs(trues[k] - draws * p) <= 3 * sigma


def test_initial_without_samples_is_uniform():
    f = freqs_with(3, 0)
    rng = random.Random(0)
    trues = sum(sum(guided_initial_assignment(f, rng)) for _ in range(10_000))
    assert abs(trues - 15_000) <= 3 * math.sqrt(30_000 * 0.25)


def test_clause_pick_example():
    f = freqs_with(1, 2, 50, [0], [49, 0])
    rng = random.Random(22)
    draws = 100_000
    counts = Counter(guided_pick_clause(f, [0, 1], rng) for _ in range(draws))
    assert chisquare([counts[0], counts[1]], [draws * 50 / 51, draws / 51]).pvalue > ALPHA


def test_variable_pick_example():
    # x1 true with 25/50: flipping it moves to a value seen 25 times -> weight 26.
    # x2 false with 50/50 true: flipping moves toward the unanimous value -> 51.
    f = freqs_with(2, 0, 50, [25, 50])
    rng = random.Random(23)
    draws = 100_000
    counts = Counter(guided_pick_variable(f, [(1, True), (2, False)], rng) for _ in range(draws))
    assert chisquare([counts[1], counts[2]], [draws * 26 / 77, draws * 51 / 77]).pvalue > ALPHA


def test_equal_counts_degenerate_to_uniform():
    f = freqs_with(3, 3, 10, [5, 5, 5], [7, 7, 7])
    rng = random.Random(24)
    c = Counter(guided_pick_clause(f, [0, 1, 2], rng) for _ in range(30_000))
    assert chisquare([c[0], c[1], c[2]]).pvalue > ALPHA
    v = Counter(guided_pick_variable(f, [(1, True), (2, False), (3, True)], rng) for _ in range(30_000))
    assert chisquare([v[1], v[2], v[3]]).pvalue > ALPHA
    zero = freqs_with(2, 0)
    z = Counter(guided_pick_variable(zero, [(1, True), (2, False)], rng) for _ in range(20_000))
    assert chisquare([z[1], z[2]]).pvalue > ALPHA


@given(st.data())
def test_guided_picks_stay_in_candidates(data):
    n = data.draw(st.integers(1, 8))
    samples = data.draw(st.integers(0, 20))
    counts = data.draw(st.lists(st.integers(0, samples), min_size=n, max_size=n))
    f = freqs_with(n, n, samples, counts, counts)
    cands = data.draw(st.lists(st.integers(1, n), min_size=1, unique=True))
    rng = random.Random(data.draw(st.integers(0, 1000)))
    assert guided_pick_clause(f, [c - 1 for c in cands], rng) in [c - 1 for c in cands]
    pairs = [(v, data.draw(st.booleans())) for v in cands]
    assert guided_pick_variable(f, pairs, rng) in cands
