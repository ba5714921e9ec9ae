"""Valuation oracles for each set-system variant.

An oracle answers, for one agent, exact value queries (gated for the NP-hard
variants) and approximate independent-subset queries with a declared error
bound.  Independent bundles have additive value, so most of the solving
pipeline only ever touches sums of item values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    ZERO,
    ONE,
    BudgetSystem,
    ConflictSystem,
    EpsilonOutOfRange,
    ExactnessGateExceeded,
    ExplicitSystem,
    FreeSystem,
    IndeterminateZeroValueSingleton,
    Instance,
    IntervalSystem,
    Items,
    SetSystem,
)

DEFAULT_GATES = {"budget": 25, "conflict": 30, "interval": 16}


@dataclass(frozen=True)
class IndependentBundle:
    """An independent bundle together with its (additive) exact value."""

    items: Items
    value: Fraction


class ValuationOracle:
    """Value queries for one agent against a hereditary set system.

    ``epsilon`` is the declared error bound of ``approx_value_subset``: the
    returned bundle is independent and worth at least (1 - epsilon) times the
    true value of the query.  With epsilon 0 the oracle behaves exactly,
    subject to the exactness gate on the NP-hard variants.
    """

    def __init__(self, system: SetSystem, values: tuple[Fraction, ...], *,
                 epsilon: Fraction = ZERO, gate: int | None = None):
        if not ZERO <= epsilon < ONE:
            raise EpsilonOutOfRange(f"error bound {epsilon} not in [0, 1)")
        if (isinstance(system, IntervalSystem)
                and ZERO < epsilon < Fraction(1, 2)):
            raise EpsilonOutOfRange(
                "interval oracles support error bound 0 (gated exact) or >= 1/2")
        self.system = system
        self.values = tuple(values)
        self.epsilon = epsilon
        self.gate = gate if gate is not None else DEFAULT_GATES.get(system.kind)
        self._value_cache: dict[Items, Fraction] = {}
        self._indep_cache: dict[Items, bool] = {}
        if isinstance(system, ConflictSystem):
            self._adj: dict[int, set[int]] = {}
            for a, b in system.edges:
                self._adj.setdefault(a, set()).add(b)
                self._adj.setdefault(b, set()).add(a)

    @property
    def is_exact(self) -> bool:
        return self.epsilon == 0

    # -- additive arithmetic ------------------------------------------------

    def additive_value(self, bundle) -> Fraction:
        return sum((self.values[j] for j in bundle), ZERO)

    # -- independence -------------------------------------------------------

    def is_independent(self, bundle) -> bool:
        items = frozenset(bundle)
        cached = self._indep_cache.get(items)
        if cached is not None:
            return cached
        result = self._is_independent(items)
        self._indep_cache[items] = result
        return result

    def _is_independent(self, items: Items) -> bool:
        system = self.system
        if not items or isinstance(system, FreeSystem):
            return True
        if isinstance(system, ExplicitSystem):
            return any(items <= s for s in system.maximal_sets)
        if isinstance(system, BudgetSystem):
            return sum((system.sizes[j] for j in items), ZERO) <= system.budget
        if isinstance(system, ConflictSystem):
            for a in items:
                neighbours = self._adj.get(a)
                if neighbours and any(b in neighbours and b > a for b in items):
                    return False
            return True
        if isinstance(system, IntervalSystem):
            if len(items) == 1:
                return True  # d >= r + p - 1 is validated at construction
            if len(items) == 2:
                j1, j2 = sorted(items)
                return self.pair_independent(j1, j2)
            self._check_gate(items)
            return _interval_min_completion(system, sorted(items))[-1] is not None
        raise TypeError(f"unknown system variant: {system!r}")

    def is_singleton_independent(self, j: int) -> bool:
        """Decide whether {j} is independent.

        Approximate oracles can only settle this for items of positive value,
        mirroring what a black-box subset query can reveal.
        """
        if not self.is_exact and self.values[j] == 0:
            raise IndeterminateZeroValueSingleton(
                f"item {j}: zero value, independence not observable at error "
                f"bound {self.epsilon}")
        return self.is_independent(frozenset((j,)))

    def pair_independent(self, j1: int, j2: int) -> bool:
        """Decide whether {j1, j2} is independent, exactly and in poly time."""
        if j1 == j2:
            return self.is_independent(frozenset((j1,)))
        system = self.system
        if isinstance(system, IntervalSystem):
            return (_pair_schedulable(system, j1, j2)
                    or _pair_schedulable(system, j2, j1))
        if isinstance(system, ConflictSystem):
            return j2 not in self._adj.get(j1, ())
        return self._is_independent(frozenset((j1, j2)))

    def singleton_value(self, j: int) -> Fraction:
        """Oracle value of {j}: the item value if {j} is independent, else 0."""
        if self.values[j] == 0:
            return ZERO
        return self.values[j] if self.is_independent(frozenset((j,))) else ZERO

    # -- exact values -------------------------------------------------------

    def _check_gate(self, items) -> None:
        if self.gate is not None and len(items) > self.gate:
            raise ExactnessGateExceeded(
                f"{self.system.kind} bundle of size {len(items)} exceeds the "
                f"exactness gate {self.gate}")

    def exact_value(self, bundle) -> Fraction:
        """Max additive value over independent subsets of the bundle."""
        items = frozenset(bundle)
        cached = self._value_cache.get(items)
        if cached is not None:
            return cached
        system = self.system
        if isinstance(system, FreeSystem):
            value = self.additive_value(items)
        elif isinstance(system, ExplicitSystem):
            value = ZERO
            for s in system.maximal_sets:
                value = max(value, self.additive_value(items & s))
        elif self._is_independent(items):
            value = self.additive_value(items)
        elif isinstance(system, BudgetSystem):
            self._check_gate(items)
            chosen = _knapsack_exact(sorted(items), self.values, system.sizes,
                                     system.budget)
            value = self.additive_value(chosen)
        elif isinstance(system, ConflictSystem):
            self._check_gate(items)
            chosen = _mwis_exact(sorted(items), self.values, self._adj)
            value = self.additive_value(chosen)
        elif isinstance(system, IntervalSystem):
            self._check_gate(items)
            chosen, _ = _interval_best_subset(system, self.values, sorted(items))
            value = self.additive_value(chosen)
        else:
            raise TypeError(f"unknown system variant: {system!r}")
        self._value_cache[items] = value
        return value

    def reduce_to_independent(self, bundle) -> IndependentBundle:
        """Shrink a bundle to an independent one of equal value.

        Scans items in ascending index order and drops each item whose removal
        keeps the value unchanged; with ties between equal-value independent
        subsets the result therefore depends on this order.  Uses at most
        len(bundle) + 1 exact value queries.
        """
        items = frozenset(bundle)
        value = self.exact_value(items)
        for j in sorted(items):
            without = items - {j}
            if self.exact_value(without) == value:
                items = without
        return IndependentBundle(items=items, value=value)

    # -- approximate subset queries ------------------------------------------

    def approx_value_subset(self, bundle) -> IndependentBundle:
        """Independent subset worth at least (1 - epsilon) of the true value."""
        items = frozenset(bundle)
        if self.is_independent(items):
            return IndependentBundle(items=items, value=self.additive_value(items))
        system = self.system
        if isinstance(system, BudgetSystem) and self.epsilon > 0:
            chosen = _knapsack_fptas(sorted(items), self.values, system.sizes,
                                     system.budget, self.epsilon)
            return IndependentBundle(items=frozenset(chosen),
                                     value=self.additive_value(chosen))
        if isinstance(system, IntervalSystem) and self.epsilon > 0:
            chosen, _ = _interval_local_ratio(system, self.values, sorted(items))
            return IndependentBundle(items=frozenset(chosen),
                                     value=self.additive_value(chosen))
        return self.reduce_to_independent(items)

    def schedule_witness(self, bundle) -> dict[int, int]:
        """Start times proving an interval bundle schedulable (gated)."""
        system = self.system
        if not isinstance(system, IntervalSystem):
            raise TypeError("schedule witnesses only exist for interval systems")
        items = sorted(bundle)
        if not items:
            return {}
        self._check_gate(items)
        completions = _interval_min_completion(system, items)
        if completions[-1] is None:
            raise ValueError(f"bundle {items} is not schedulable")
        return _interval_schedule_from_dp(system, items, completions)


class AdversarialOracle(ValuationOracle):
    """Testing wrapper that answers subset queries as badly as the bound allows.

    Returns the minimum-value independent subset whose value still reaches
    (1 - epsilon) times the true bundle value, so downstream consumers are
    exercised at the exact boundary of the oracle contract.
    """

    ENUMERATION_GATE = 16

    def __init__(self, system, values, *, epsilon, gate=None):
        super().__init__(system, values, epsilon=ZERO, gate=gate)
        if not ZERO <= epsilon < ONE:
            raise EpsilonOutOfRange(f"error bound {epsilon} not in [0, 1)")
        self.epsilon = epsilon
        self._worst_cache: dict[Items, IndependentBundle] = {}

    def approx_value_subset(self, bundle) -> IndependentBundle:
        items = frozenset(bundle)
        cached = self._worst_cache.get(items)
        if cached is not None:
            return cached
        if len(items) > self.ENUMERATION_GATE:
            raise ExactnessGateExceeded(
                f"adversarial enumeration over {len(items)} items exceeds the "
                f"gate {self.ENUMERATION_GATE}")
        bound = (ONE - self.epsilon) * self.exact_value(items)
        ordered = sorted(items)
        best: tuple[Fraction, tuple[int, ...]] | None = None
        for mask in range(1 << len(ordered)):
            subset = frozenset(ordered[t] for t in range(len(ordered))
                               if mask >> t & 1)
            value = self.additive_value(subset)
            if value < bound or not self.is_independent(subset):
                continue
            key = (value, tuple(sorted(subset)))
            if best is None or key < best:
                best = key
        assert best is not None  # the reduced optimum always qualifies
        result = IndependentBundle(items=frozenset(best[1]), value=best[0])
        self._worst_cache[items] = result
        return result


def oracle_for(instance: Instance, agent: int, *, epsilon: Fraction = ZERO,
               gate: int | None = None, adversarial: bool = False) -> ValuationOracle:
    """Build the oracle for one agent of an instance."""
    system = instance.system_for(agent)
    cls = AdversarialOracle if adversarial else ValuationOracle
    return cls(system, instance.values[agent], epsilon=epsilon, gate=gate)


# ---------------------------------------------------------------------------
# Exact knapsack: integer-size DP when cheap, branch and bound otherwise
# ---------------------------------------------------------------------------

_DP_CAPACITY_LIMIT = 10 ** 6


def _knapsack_exact(items, values, sizes, budget):
    usable = [j for j in items if sizes[j] <= budget]
    free = [j for j in usable if sizes[j] == 0]
    paid = [j for j in usable if sizes[j] > 0]
    if all(sizes[j].denominator == 1 for j in paid) and budget >= 0:
        cap = min(int(budget), sum(int(sizes[j]) for j in paid))
        if cap <= _DP_CAPACITY_LIMIT:
            return free + _knapsack_dp(paid, values, sizes, cap)
    return free + _knapsack_branch_bound(paid, values, sizes, budget)


def _knapsack_dp(items, values, sizes, capacity):
    best = [ZERO] * (capacity + 1)
    stages = []  # per item: bytearray marking capacities where it was taken
    for j in items:
        size = int(sizes[j])
        value = values[j]
        took = bytearray(capacity + 1)
        if 0 < size <= capacity and value > 0:
            for c in range(capacity, size - 1, -1):
                candidate = best[c - size] + value
                if candidate > best[c]:
                    best[c] = candidate
                    took[c] = 1
        stages.append((j, size, took))
    c = max(range(capacity + 1), key=lambda cap: (best[cap], -cap))
    chosen = []
    for j, size, took in reversed(stages):
        if took[c]:
            chosen.append(j)
            c -= size
    return sorted(chosen)


def _knapsack_branch_bound(items, values, sizes, budget):
    order = sorted(items, key=lambda j: (-(values[j] / sizes[j]), j))
    best_value = ZERO
    best_set: list[int] = []

    def bound(idx, value, room):
        for j in order[idx:]:
            if sizes[j] <= room:
                room -= sizes[j]
                value += values[j]
            else:
                return value + values[j] * (room / sizes[j])
        return value

    def explore(idx, value, room, chosen):
        nonlocal best_value, best_set
        if value > best_value:
            best_value = value
            best_set = list(chosen)
        if idx == len(order) or bound(idx, value, room) <= best_value:
            return
        j = order[idx]
        if sizes[j] <= room:
            chosen.append(j)
            explore(idx + 1, value + values[j], room - sizes[j], chosen)
            chosen.pop()
        explore(idx + 1, value, room, chosen)

    explore(0, ZERO, budget, [])
    return sorted(best_set)


# ---------------------------------------------------------------------------
# Knapsack FPTAS by value scaling
# ---------------------------------------------------------------------------

def _knapsack_fptas(items, values, sizes, budget, eps):
    """Feasible subset with value at least (1 - eps) times the optimum.

    Classic value scaling: item values are floored to multiples of
    eps * vmax / k, and a min-size DP over scaled totals picks the best
    reachable total.  The additive loss is at most eps * vmax <= eps * OPT.
    """
    usable = [j for j in items if sizes[j] <= budget and values[j] > 0]
    if not usable:
        return []
    vmax = max(values[j] for j in usable)
    unit = eps * vmax / len(usable)
    # dp: scaled total -> (min combined size, chosen items)
    dp: dict[int, tuple[Fraction, tuple[int, ...]]] = {0: (ZERO, ())}
    for j in usable:
        w = int(values[j] / unit)
        updates: dict[int, tuple[Fraction, tuple[int, ...]]] = {}
        for total, (size, chosen) in dp.items():
            grown = size + sizes[j]
            if grown > budget:
                continue
            candidate = (grown, chosen + (j,))
            incumbent = updates.get(total + w, dp.get(total + w))
            if incumbent is None or candidate[0] < incumbent[0]:
                updates[total + w] = candidate
        for total, candidate in updates.items():
            incumbent = dp.get(total)
            if incumbent is None or candidate[0] < incumbent[0]:
                dp[total] = candidate
    return sorted(dp[max(dp)][1])


# ---------------------------------------------------------------------------
# Exact maximum-weight independent set by branch and bound
# ---------------------------------------------------------------------------

def _mwis_exact(items, values, adjacency):
    vertices = [j for j in items if values[j] > 0]
    neighbours = {j: (adjacency.get(j, set()) & set(vertices))
                  for j in vertices}
    best_value = ZERO
    best_set: list[int] = []

    def explore(active, value, chosen):
        nonlocal best_value, best_set
        if value > best_value:
            best_value = value
            best_set = list(chosen)
        if not active:
            return
        if value + sum(values[j] for j in active) <= best_value:
            return
        # Branch on the highest-degree remaining vertex.
        pivot = max(active, key=lambda j: (len(neighbours[j] & active), -j))
        rest = active - {pivot}
        chosen.append(pivot)
        explore(rest - neighbours[pivot], value + values[pivot], chosen)
        chosen.pop()
        explore(rest, value, chosen)

    explore(frozenset(vertices), ZERO, [])
    return sorted(best_set)


# ---------------------------------------------------------------------------
# Interval jobs: subset DP for exact values, local ratio for approximation
# ---------------------------------------------------------------------------

def _job_fits(system, j, start):
    p, r, d = system.jobs[j]
    return start >= r and start + p - 1 <= d


def _pair_schedulable(system, first, second):
    p1, r1, d1 = system.jobs[first]
    p2, r2, _ = system.jobs[second]
    start2 = max(r2, r1 + p1)
    return _job_fits(system, first, r1) and _job_fits(system, second, start2)


def _interval_min_completion(system, items):
    """DP over subsets: the least last-occupied slot per schedulable subset.

    Scheduling the remaining job after an earliest-completion schedule of the
    rest is always optimal, so the recurrence over "last job" is exact.
    Returns a list indexed by bitmask over ``items``; None marks infeasible.
    """
    k = len(items)
    completions: list[int | None] = [None] * (1 << k)
    completions[0] = 0
    for mask in range(1, 1 << k):
        best = None
        for t in range(k):
            if not mask >> t & 1:
                continue
            prev = completions[mask ^ (1 << t)]
            if prev is None:
                continue
            p, r, d = system.jobs[items[t]]
            start = max(r, prev + 1)
            finish = start + p - 1
            if finish <= d and (best is None or finish < best):
                best = finish
        completions[mask] = best
    return completions


def _interval_schedule_from_dp(system, items, completions):
    starts: dict[int, int] = {}
    mask = (1 << len(items)) - 1
    while mask:
        target = completions[mask]
        for t in range(len(items)):
            if not mask >> t & 1:
                continue
            prev = completions[mask ^ (1 << t)]
            if prev is None:
                continue
            p, r, d = system.jobs[items[t]]
            start = max(r, prev + 1)
            if start + p - 1 == target and start + p - 1 <= d:
                starts[items[t]] = start
                mask ^= 1 << t
                break
        else:
            raise AssertionError("inconsistent interval DP table")
    return starts


def _interval_best_subset(system, values, items):
    completions = _interval_min_completion(system, items)
    best_mask = 0
    best_value = ZERO
    for mask in range(1 << len(items)):
        if completions[mask] is None:
            continue
        value = sum((values[items[t]] for t in range(len(items))
                     if mask >> t & 1), ZERO)
        if value > best_value:
            best_value = value
            best_mask = mask
    chosen = [items[t] for t in range(len(items)) if best_mask >> t & 1]
    return chosen, best_value


def _interval_local_ratio(system, values, items, *, candidate_cap=500_000):
    """Greedy local-ratio schedule with at least half the optimal weight.

    Expands every feasible placement of every job, repeatedly pushes the
    earliest-ending placement with positive residual weight while charging its
    weight to everything it conflicts with (same job or overlapping in time),
    then unwinds the stack keeping whatever still fits.
    """
    placements = []  # (end, start, job)
    for j in items:
        p, r, d = system.jobs[j]
        for start in range(r, d - p + 2):
            placements.append((start + p - 1, start, j))
    if len(placements) > candidate_cap:
        raise ExactnessGateExceeded(
            f"{len(placements)} interval placements exceed the cap {candidate_cap}")
    placements.sort()
    residual = {pl: values[pl[2]] for pl in placements}
    stack = []
    for pl in placements:
        if residual[pl] <= 0:
            continue
        end, start, job = pl
        stack.append(pl)
        charge = residual[pl]
        for other in placements:
            o_end, o_start, o_job = other
            if o_job == job or (o_start <= end and start <= o_end):
                residual[other] -= charge
    chosen: dict[int, int] = {}
    occupied: list[tuple[int, int]] = []
    for end, start, job in reversed(stack):
        if job in chosen:
            continue
        if any(start <= o_end and o_start <= end for o_start, o_end in occupied):
            continue
        chosen[job] = start
        occupied.append((start, end))
    return sorted(chosen), chosen
