"""Constraint-specific front ends: budget, conflicting items, interval jobs.

Each adapter maps its constraint onto the matching valuation oracle, runs the
appropriate solver mode, restores the constraint-specific output contract
(feasibility flags, graph completion, schedule witnesses), and offers the
constraint-aware brute-force maximin share the guarantees are measured
against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    ZERO,
    Allocation,
    BudgetSystem,
    BruteForceGateExceeded,
    ConflictSystem,
    DegreeTooHigh,
    Instance,
    IntervalSystem,
    Items,
    UnsupportedSystem,
)
from .driver import SolveResult, solve_alpha, solve_entitled, solve_existence
from .mms_oracle import DEFAULT_MMS_GATE, maximin_partition
from .valuation import oracle_for

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class ConstraintReport:
    """Adapter output: the solve result plus constraint-specific evidence."""

    result: SolveResult
    allocation: Allocation
    feasible: tuple[bool, ...]
    completion: tuple[tuple[int, int], ...] = ()
    schedules: tuple[dict[int, int], ...] = ()

    @property
    def all_feasible(self) -> bool:
        return all(self.feasible)


def _budget_system_for(instance: Instance, agent: int) -> BudgetSystem:
    system = instance.system_for(agent)
    if not isinstance(system, BudgetSystem):
        raise UnsupportedSystem("expected budget systems for every agent")
    return system


def budget_feasible(instance: Instance, agent: int, items) -> bool:
    system = _budget_system_for(instance, agent)
    return sum((system.sizes[j] for j in items), ZERO) <= system.budget


def conflict_feasible(instance: Instance, items) -> bool:
    system = instance.system
    if not isinstance(system, ConflictSystem):
        raise UnsupportedSystem("expected a shared conflict graph")
    bundle = set(items)
    return not any(a in bundle and b in bundle for a, b in system.edges)


def interval_feasible(instance: Instance, agent: int, items) -> bool:
    return oracle_for(instance, agent).is_independent(frozenset(items))


# ---------------------------------------------------------------------------
# Budget constraints
# ---------------------------------------------------------------------------

def solve_budget_adapter(instance: Instance, *,
                         oracle_factory=None) -> ConstraintReport:
    """2/5-approximate allocation where every bundle fits its owner's budget.

    Budgets order the agents from most to least restrictive, so the entitled
    solver applies; its oracle-subset awards are affordable by construction.
    """
    if not all(isinstance(instance.system_for(i), BudgetSystem)
               for i in range(instance.n)):
        raise UnsupportedSystem("budget adapter needs budget systems")
    result = solve_entitled(instance, oracle_factory=oracle_factory)
    feasible = tuple(budget_feasible(instance, i, result.allocation.bundles[i])
                     for i in range(instance.n))
    assert all(feasible)
    return ConstraintReport(result=result, allocation=result.allocation,
                            feasible=feasible)


# ---------------------------------------------------------------------------
# Conflicting items
# ---------------------------------------------------------------------------

def _max_degree(system: ConflictSystem, m: int) -> int:
    degree = [0] * m
    for a, b in system.edges:
        degree[a] += 1
        degree[b] += 1
    return max(degree, default=0)


def solve_conflicts_adapter(instance: Instance, *,
                            gate: int = DEFAULT_MMS_GATE) -> ConstraintReport:
    """Complete allocation of conflict-graph items at the existence guarantee.

    Requires strictly more agents than the maximum degree, so the partial
    existence-mode allocation extends greedily: each leftover item goes to the
    lowest-index agent holding none of its neighbours.
    """
    system = instance.system
    if not isinstance(system, ConflictSystem):
        raise UnsupportedSystem("conflicts adapter needs a shared conflict graph")
    if instance.n == 0:
        raise DegreeTooHigh("completion needs at least one agent")
    delta = _max_degree(system, instance.m)
    if instance.n <= delta:
        raise DegreeTooHigh(
            f"{instance.n} agents but the conflict graph has degree {delta}")

    result = solve_existence(instance, gate=gate)
    bundles = [set(b) for b in result.allocation.bundles]
    neighbours: dict[int, set[int]] = {j: set() for j in range(instance.m)}
    for a, b in system.edges:
        neighbours[a].add(b)
        neighbours[b].add(a)

    taken = set().union(*bundles) if bundles else set()
    completion = []
    for item in sorted(set(range(instance.m)) - taken):
        receiver = next(i for i in range(instance.n)
                        if not bundles[i] & neighbours[item])
        assert not bundles[receiver] & neighbours[item]
        bundles[receiver].add(item)
        completion.append((receiver, item))

    allocation = Allocation(bundles=tuple(frozenset(b) for b in bundles),
                            complete=True)
    feasible = tuple(conflict_feasible(instance, b) for b in bundles)
    assert all(feasible)
    return ConstraintReport(result=result, allocation=allocation,
                            feasible=feasible, completion=tuple(completion))


# ---------------------------------------------------------------------------
# Interval scheduling
# ---------------------------------------------------------------------------

def solve_intervals_adapter(instance: Instance, *,
                            oracle_factory=None) -> ConstraintReport:
    """2/7-approximate allocation of interval jobs with schedule witnesses.

    Runs the lossy-oracle mode at error bound 1/2 (the ratio of the greedy
    local-ratio scheduler); every awarded bundle is schedulable and the
    witness start times are emitted so feasibility is checkable directly.
    """
    if not isinstance(instance.system, IntervalSystem):
        raise UnsupportedSystem("intervals adapter needs a shared interval system")
    result = solve_alpha(instance, HALF, oracle_factory=oracle_factory)
    schedules = []
    feasible = []
    for i in range(instance.n):
        bundle = result.allocation.bundles[i]
        witness = oracle_for(instance, i).schedule_witness(bundle)
        schedules.append(witness)
        feasible.append(_schedule_is_valid(instance.system, bundle, witness))
    assert all(feasible)
    return ConstraintReport(result=result, allocation=result.allocation,
                            feasible=tuple(feasible),
                            schedules=tuple(schedules))


def _schedule_is_valid(system: IntervalSystem, items: Items,
                       starts: dict[int, int]) -> bool:
    if set(starts) != set(items):
        return False
    busy: list[tuple[int, int]] = []
    for j, start in starts.items():
        p, r, d = system.jobs[j]
        if start < r or start + p - 1 > d:
            return False
        busy.append((start, start + p - 1))
    busy.sort()
    return all(prev_end < nxt_start for (_, prev_end), (nxt_start, _)
               in zip(busy, busy[1:]))


# ---------------------------------------------------------------------------
# Constraint-aware brute-force maximin shares
# ---------------------------------------------------------------------------

def constrained_mms(instance: Instance, agent: int, *,
                    gate: int = DEFAULT_MMS_GATE) -> Fraction:
    """Brute-force MMS where witness partitions use only feasible bundles.

    Budget and interval constraints allow leaving items out (their guarantees
    concern partial allocations); conflicting items demand complete
    partitions.  Bundle values are additive, since feasible bundles waste
    nothing.  Returns 0 when no feasible witness exists at all.
    """
    if instance.m > gate:
        raise BruteForceGateExceeded(
            f"{instance.m} items exceed the brute-force gate {gate}")
    system = instance.system_for(agent)
    weights = list(instance.values[agent])
    order = sorted(range(instance.m), key=lambda j: (-weights[j], j))

    def additive(items: Items) -> Fraction:
        return sum((weights[j] for j in items), ZERO)

    feasible_cache: dict[int, bool] = {}

    if isinstance(system, BudgetSystem):
        def feasible_mask(mask: int) -> bool:
            known = feasible_cache.get(mask)
            if known is None:
                total = ZERO
                j, rest = 0, mask
                while rest:
                    if rest & 1:
                        total += system.sizes[j]
                    rest >>= 1
                    j += 1
                known = total <= system.budget
                feasible_cache[mask] = known
            return known
        allow_discard = True
    elif isinstance(system, ConflictSystem):
        def feasible_mask(mask: int) -> bool:
            known = feasible_cache.get(mask)
            if known is None:
                known = not any(mask >> a & 1 and mask >> b & 1
                                for a, b in system.edges)
                feasible_cache[mask] = known
            return known
        allow_discard = False
    elif isinstance(system, IntervalSystem):
        probe = oracle_for(instance, agent, gate=instance.m)

        def feasible_mask(mask: int) -> bool:
            known = feasible_cache.get(mask)
            if known is None:
                items = frozenset(j for j in range(instance.m) if mask >> j & 1)
                known = probe.is_independent(items)
                feasible_cache[mask] = known
            return known
        allow_discard = True
    else:
        raise UnsupportedSystem(
            f"no constraint-aware brute force for {system.kind} systems")

    found = maximin_partition(order, instance.n, additive, weights,
                              feasible_fn=feasible_mask,
                              allow_discard=allow_discard)
    if found is None:
        return ZERO
    return found[0]
