"""Oracle contracts per system variant, against from-the-definition references."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from mmsalloc.core import (
    BudgetSystem,
    ConflictSystem,
    EpsilonOutOfRange,
    ExplicitSystem,
    FreeSystem,
    IndeterminateZeroValueSingleton,
    IntervalSystem,
)
from mmsalloc.generators import gen_two_thirds_bound
from mmsalloc.valuation import AdversarialOracle, ValuationOracle, oracle_for

from conftest import brute_member, brute_schedulable, brute_value

F = Fraction


class CountingOracle(ValuationOracle):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.exact_calls = 0

    def exact_value(self, bundle):
        self.exact_calls += 1
        return super().exact_value(bundle)


def test_free_system_values_are_additive():
    oracle = ValuationOracle(FreeSystem(), (F(3), F(4)))
    assert oracle.exact_value(frozenset({0, 1})) == 7


def test_gadget_agent_value_is_capped_at_three():
    inst = gen_two_thirds_bound(2)
    oracle = oracle_for(inst, 0)
    assert oracle.exact_value(frozenset({0, 1, 2})) == 3
    assert oracle.exact_value(inst.all_items()) == 3


def test_budget_exact_value_by_enumeration():
    system = BudgetSystem(sizes=(F(3), F(3), F(3)), budget=F(6))
    oracle = ValuationOracle(system, (F(1), F(1), F(1)))
    assert oracle.exact_value(frozenset({0, 1, 2})) == 2


def test_budget_fptas_worked_example():
    system = BudgetSystem(sizes=(F(4), F(3), F(3)), budget=F(6))
    oracle = ValuationOracle(system, (F(5), F(3), F(3)), epsilon=F(1, 3))
    result = oracle.approx_value_subset(frozenset({0, 1, 2}))
    assert result.items == frozenset({1, 2})
    assert result.value == 6
    assert result.value >= F(2, 3) * 6


def test_interval_single_slot_forces_singleton():
    system = IntervalSystem(jobs=((1, 1, 1), (1, 1, 1), (1, 1, 1)))
    oracle = ValuationOracle(system, (F(1), F(1), F(1)), epsilon=F(1, 2))
    result = oracle.approx_value_subset(frozenset({0, 1, 2}))
    assert len(result.items) == 1 and result.value == 1


def test_reduce_keeps_value_and_is_independent():
    system = ExplicitSystem.normalize([{0, 1}, {1, 2}])
    oracle = CountingOracle(system, (F(1), F(1), F(1)))
    reduced = oracle.reduce_to_independent(frozenset({0, 1, 2}))
    assert reduced.value == 2
    assert reduced.items == frozenset({1, 2})  # ascending scan drops item 0
    assert oracle.is_independent(reduced.items)
    assert oracle.exact_calls <= 2 * 3 + 1


def test_reduce_on_gadget_drops_worthless_item():
    inst = gen_two_thirds_bound(2)
    oracle = oracle_for(inst, 0)
    reduced = oracle.reduce_to_independent(frozenset({0, 1, 2, 3}))
    assert reduced.items == frozenset({0, 1, 2})
    assert reduced.value == 3


def test_reduce_identity_on_independent_bundle():
    oracle = ValuationOracle(FreeSystem(), (F(2), F(5)))
    reduced = oracle.reduce_to_independent(frozenset({0, 1}))
    assert reduced.items == frozenset({0, 1})


def test_singleton_independence_per_variant():
    free = ValuationOracle(FreeSystem(), (F(1),))
    assert free.is_singleton_independent(0)

    explicit = ValuationOracle(ExplicitSystem.normalize([{0, 1}]),
                               (F(1), F(1), F(1)))
    assert not explicit.is_singleton_independent(2)

    budget = ValuationOracle(BudgetSystem(sizes=(F(5),), budget=F(4)), (F(1),))
    assert not budget.is_singleton_independent(0)

    lossy = ValuationOracle(BudgetSystem(sizes=(F(1),), budget=F(4)), (F(0),),
                            epsilon=F(1, 3))
    with pytest.raises(IndeterminateZeroValueSingleton):
        lossy.is_singleton_independent(0)


def test_pair_independence_examples():
    both_fit = ValuationOracle(IntervalSystem(jobs=((1, 1, 2), (1, 1, 2))),
                               (F(1), F(1)))
    assert both_fit.pair_independent(0, 1)

    clash = ValuationOracle(IntervalSystem(jobs=((1, 1, 1), (1, 1, 1))),
                            (F(1), F(1)))
    assert not clash.pair_independent(0, 1)

    conflict = ValuationOracle(ConflictSystem.normalize([(0, 1)]),
                               (F(1), F(1)))
    assert not conflict.pair_independent(0, 1)


def test_interval_oracle_rejects_sub_half_epsilon():
    system = IntervalSystem(jobs=((1, 1, 1),))
    with pytest.raises(EpsilonOutOfRange):
        ValuationOracle(system, (F(1),), epsilon=F(1, 4))


def test_fptas_contract_on_random_knapsacks():
    rng = random.Random(99)
    for trial in range(120):
        m = rng.randint(1, 12)
        system = BudgetSystem(
            sizes=tuple(F(rng.randint(0, 9), rng.choice((1, 2))) for _ in range(m)),
            budget=F(rng.randint(0, 18), rng.choice((1, 2))))
        values = tuple(F(rng.randint(0, 9), rng.choice((1, 3))) for _ in range(m))
        eps = rng.choice((F(1, 3), F(1, 4), F(1, 8)))
        oracle = ValuationOracle(system, values, epsilon=eps)
        bundle = frozenset(j for j in range(m) if rng.random() < 0.8)
        answer = oracle.approx_value_subset(bundle)
        assert answer.items <= bundle
        assert sum((system.sizes[j] for j in answer.items), F(0)) <= system.budget
        assert answer.value >= (1 - eps) * brute_value(system, values, bundle)


def test_interval_oracle_contract_on_random_instances():
    rng = random.Random(5)
    for trial in range(120):
        m = rng.randint(1, 8)
        jobs = []
        for _ in range(m):
            p, r = rng.randint(1, 3), rng.randint(1, 5)
            jobs.append((p, r, r + p - 1 + rng.randint(0, 4)))
        system = IntervalSystem(jobs=tuple(jobs))
        values = tuple(F(rng.randint(0, 9)) for _ in range(m))
        oracle = ValuationOracle(system, values, epsilon=F(1, 2))
        bundle = frozenset(j for j in range(m) if rng.random() < 0.9)
        answer = oracle.approx_value_subset(bundle)
        assert answer.items <= bundle
        assert brute_schedulable(jobs, answer.items)
        assert 2 * answer.value >= brute_value(system, values, bundle)


def test_conflict_exact_matches_brute_force():
    rng = random.Random(12)
    for trial in range(90):
        m = rng.randint(1, 10) if trial < 80 else rng.randint(11, 16)
        system = ConflictSystem.normalize(
            (a, b) for a in range(m) for b in range(a + 1, m)
            if rng.random() < 0.4)
        values = tuple(F(rng.randint(0, 9), rng.choice((1, 2))) for _ in range(m))
        oracle = ValuationOracle(system, values)
        bundle = frozenset(j for j in range(m) if rng.random() < 0.85)
        assert oracle.exact_value(bundle) == brute_value(system, values, bundle)


def test_adversarial_wrapper_sits_on_the_contract_boundary():
    rng = random.Random(31)
    for trial in range(60):
        m = rng.randint(1, 8)
        system = ExplicitSystem.normalize(
            frozenset(j for j in range(m) if rng.random() < 0.6)
            for _ in range(rng.randint(1, 4)))
        values = tuple(F(rng.randint(0, 9)) for _ in range(m))
        eps = rng.choice((F(1, 3), F(1, 4)))
        adversary = AdversarialOracle(system, values, epsilon=eps)
        bundle = frozenset(j for j in range(m) if rng.random() < 0.8)
        truth = brute_value(system, values, bundle)
        answer = adversary.approx_value_subset(bundle)
        assert answer.items <= bundle
        assert brute_member(system, answer.items)
        assert answer.value >= (1 - eps) * truth
        # No contract-respecting independent subset is worth less.
        import itertools as it
        for r in range(len(bundle) + 1):
            for comb in it.combinations(sorted(bundle), r):
                value = sum((values[j] for j in comb), F(0))
                if brute_member(system, comb) and value >= (1 - eps) * truth:
                    assert answer.value <= value


def test_schedule_witness_is_a_real_schedule():
    system = IntervalSystem(jobs=((2, 1, 4), (1, 2, 3), (1, 1, 5)))
    oracle = ValuationOracle(system, (F(1), F(1), F(1)))
    starts = oracle.schedule_witness(frozenset({0, 1, 2}))
    assert set(starts) == {0, 1, 2}
    spans = sorted((s, s + system.jobs[j][0] - 1, j) for j, s in starts.items())
    for (s, e, j) in spans:
        p, r, d = system.jobs[j]
        assert r <= s and e <= d
    assert all(a[1] < b[0] for a, b in zip(spans, spans[1:]))
