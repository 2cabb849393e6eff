import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from wmaxsat.bgls import BglsParams, run_bgls
from wmaxsat.formula import WeightedClause, WeightedInstance, evaluate
from wmaxsat.generate import random_suite
from wmaxsat.oracle import (
    CapacityError,
    ExactWeight,
    all_weights,
    build_biased_instance,
    check_backbone_fixing,
    check_bias_identity,
    check_fix_conservation,
    exact_backbone,
    exact_optima,
    fix_literal,
    gray_walk,
    reduce_by_backbone,
    verify_lemma1,
    verify_lemma2,
)
from wmaxsat.walksat import WalksatParams, run_walksat

from conftest import assignments, brute_force, instances

T, F = True, False


def inst(n, *clauses):
    return WeightedInstance.from_lists(n, clauses)


SYMMETRIC = inst(1, ([1], 1), ([-1], 1))


def test_exact_optima_examples():
    o = exact_optima(inst(2, ([1, 2], 1)))
    assert o.optimal_weight == 1
    assert set(o.optima) == {(T, T), (T, F), (F, T)}
    o = exact_optima(SYMMETRIC)
    assert o.optimal_weight == 1 and set(o.optima) == {(T,), (F,)}


@settings(max_examples=80)
@given(instances(max_vars=8))
def test_exact_optima_matches_product_enumeration(i):
    best, arg = brute_force(i)
    o = exact_optima(i)
    assert o.optimal_weight == best
    assert sorted(o.optima) == sorted(arg)


def test_gray_walk_visits_every_assignment_once():
    i = inst(5, ([1, -2], 3), ([3, 4, -5], 2), ([2], 7))
    seen = {}
    for _, values, w in gray_walk(i):
        seen[tuple(values)] = w
    assert len(seen) == 32
    assert all(evaluate(i, a) == w for a, w in seen.items())


def test_capacity():
    big = inst(5, ([1], 1))
    with pytest.raises(CapacityError):
        exact_optima(big, cap=4)
    with pytest.raises(CapacityError):
        reduce_by_backbone(big, cap=4)


def test_backbone_examples():
    assert exact_backbone(SYMMETRIC) == (None,)
    assert exact_backbone(inst(1, ([1], 5))) == (True,)
    assert exact_backbone(inst(2, ([1, 2], 1))) == (None, None)


# --- biased instance ------------------------------------------------------------


def test_biased_example_n2():
    b = build_biased_instance(inst(2, ([1, 2], 1)))
    assert b.scale_bits == 5
    assert [c.literals for c in b.scaled.clauses] == [(1, 2), (1,), (-1,), (2,), (-2,)]
    assert [c.weight for c in b.scaled.clauses] == [32, 8, 4, 2, 1]
    assert b.scaled.total_weight == 47 == 32 + 16 - 1
    weights = {a: evaluate(b.scaled, a) for a in itertools.product([T, F], repeat=2)}
    assert weights == {(T, T): 42, (T, F): 41, (F, T): 38, (F, F): 5}
    assert exact_optima(b.scaled).optima == ((T, T),)
    assert b.weight((T, T)).fraction == Fraction(42, 32)


def test_biased_existing_unit_clause_gets_bias():
    b = build_biased_instance(inst(2, ([2], 3), ([-1], 4), ([2], 9)))
    # x2 (j=2) present: first copy gets +2^(5-4); not x1 (j=1) present: +2^(5-3)
    ws = [c.weight for c in b.scaled.clauses]
    assert ws[:3] == [3 * 32 + 2, 4 * 32 + 4, 9 * 32]
    assert [c.literals for c in b.scaled.clauses[3:]] == [(1,), (-2,)]
    assert ws[3:] == [8, 1]
    assert check_bias_identity(inst(2, ([2], 3), ([-1], 4), ([2], 9)))


@given(instances(max_vars=10))
def test_bias_identity_exact(i):
    b = build_biased_instance(i)
    n = i.num_variables
    total = b.total_weight()
    assert total.fraction == i.total_weight + Fraction(1, 2) - Fraction(1, 2 ** (2 * n + 1))
    assert total.integer_part == i.total_weight
    assert check_bias_identity(i)


@settings(max_examples=60)
@given(instances(max_vars=9), st.data())
def test_biased_integer_part_is_original_weight(i, data):
    a = data.draw(assignments(i.num_variables))
    b = build_biased_instance(i)
    assert b.weight(a).integer_part == evaluate(i, a)


def test_exact_weight_arithmetic():
    a, b = ExactWeight.from_int(3, 5), ExactWeight(1, 5)
    assert (a + b).scaled_value == 97 and a > b
    with pytest.raises(ValueError):
        a + ExactWeight(1, 4)


def test_lemmas_on_symmetric_instance():
    assert len(exact_optima(SYMMETRIC).optima) == 2
    assert verify_lemma1(SYMMETRIC) and verify_lemma2(SYMMETRIC)
    b = build_biased_instance(SYMMETRIC)
    opt = exact_optima(b.scaled).optima
    assert len(opt) == 1 and evaluate(SYMMETRIC, opt[0]) == 1
    assert exact_backbone(b.scaled) == (True,)


def test_lemmas_trivial():
    assert verify_lemma1(inst(1, ([1], 1)))
    assert verify_lemma2(inst(3, ([1, -2, 3], 4)))


@settings(max_examples=60)
@given(instances(max_vars=8))
def test_lemmas_hold(i):
    assert verify_lemma1(i)
    assert verify_lemma2(i)
    assert len(set(all_weights(build_biased_instance(i).scaled))) == 2 ** i.num_variables
    assert all(v is not None for v in exact_backbone(build_biased_instance(i).scaled))


def test_lemmas_on_random_suite():
    for i in random_suite(17, 100, (4, 10), (5, 40)):
        assert verify_lemma1(i) and verify_lemma2(i)


# --- literal fixing ---------------------------------------------------------------


def test_fix_literal_example():
    i = inst(2, ([1, 2], 3), ([-1, 2], 2), ([-1], 5))
    r = fix_literal(i, 1)
    assert r.reduced.num_variables == 1
    assert r.reduced.clauses == (WeightedClause((1,), 2),)
    assert r.variable_map == {2: 1}
    assert (r.satisfied_weight_offset, r.lost_weight) == (3, 5)


@settings(max_examples=80)
@given(instances(max_vars=8), st.data())
def test_fix_literal_conservation(i, data):
    var = data.draw(st.integers(1, i.num_variables))
    lit = var if data.draw(st.booleans()) else -var
    r = fix_literal(i, lit)
    assert r.satisfied_weight_offset + r.lost_weight + r.reduced.total_weight == i.total_weight
    reduced_a = data.draw(assignments(r.reduced.num_variables))
    full = r.lift(lit, reduced_a)
    assert evaluate(i, full) == r.satisfied_weight_offset + evaluate(r.reduced, reduced_a)


def test_fix_conservation_helper():
    rng = random.Random(2)
    for i in random_suite(3, 20, (4, 8), (5, 30)):
        assert check_fix_conservation(i, rng)


def test_backbone_fixing_identity():
    hits = 0
    for i in random_suite(19, 100, (4, 10), (5, 40)):
        opt = exact_optima(i)
        bone = exact_backbone(i)
        for k, val in enumerate(bone):
            if val is None:
                continue
            hits += 1
            lit = k + 1 if val else -(k + 1)
            kept = fix_literal(i, lit)
            assert kept.satisfied_weight_offset + exact_optima(kept.reduced).optimal_weight == opt.optimal_weight
            lost = fix_literal(i, -lit)
            assert lost.satisfied_weight_offset + exact_optima(lost.reduced).optimal_weight < opt.optimal_weight
        assert check_backbone_fixing(i)
    assert hits > 100  # the suite exercises plenty of backbone literals


# --- reduction --------------------------------------------------------------------


def test_reduce_single_variable():
    t = reduce_by_backbone(inst(1, ([1], 5)))
    assert len(t.steps) == 1 and t.steps[0].literal == 1
    assert t.weight == 5


@settings(max_examples=50, deadline=None)
@given(instances(max_vars=8))
def test_reduce_reconstructs_optimum(i):
    t = reduce_by_backbone(i)
    assert len(t.steps) == i.num_variables
    assert t.weight == exact_optima(i).optimal_weight
    assert sorted(abs(s.literal) for s in t.steps) == list(range(1, i.num_variables + 1))


def test_heuristics_never_beat_oracle():
    for k, i in enumerate(random_suite(23, 100, (4, 12), (5, 40))):
        opt = exact_optima(i).optimal_weight
        best, _ = run_walksat(i, 5, WalksatParams(num=100))
        assert best.best_weight <= opt
        assert run_bgls(i, BglsParams(n1=3, n2=3, num=100, master_seed=k)).best_weight <= opt
