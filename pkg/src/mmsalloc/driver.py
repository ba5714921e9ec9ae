"""Top-level solvers.

Four modes:

* ``solve_existence`` slices exact maximin-share witnesses (brute force, so
  desk scale only) and guarantees every agent n/(2n-1) of her MMS.
* ``solve_two_fifths`` is the polynomial mode: estimate each agent's MMS from
  singleton values, run the lone divider with the two-phase bundle maker, and
  shave the failing agent's estimate by n/(n+1) until a run succeeds.
  Guarantees 2/5 with oracle error at most 1/(n+1).
* ``solve_alpha`` generalises to lossier oracles with error bound epsilon,
  guaranteeing (1-eps)/(1+(3/2)(1-eps)); epsilon 0 is exactly the 2/5 mode.
* ``solve_entitled`` runs the oracle-mediated engine for nested per-agent
  families, guaranteeing 2/5 with oracle error at most 1/(n+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .bundles import (
    BundleRequest,
    bundles_from_mms_partition,
    make_bundles_alpha,
)
from .core import (
    ONE,
    ZERO,
    Allocation,
    BudgetSystem,
    EpsilonOutOfRange,
    Instance,
    IntervalSystem,
    Items,
    UnsupportedSystem,
)
from .divider import DividerOutcome, lone_divider, lone_divider_entitled
from .mms_oracle import DEFAULT_MMS_GATE, MmsRecord, compute_mms_exact
from .valuation import IndependentBundle, ValuationOracle, oracle_for

TWO_FIFTHS = Fraction(2, 5)


@dataclass(frozen=True)
class SolveResult:
    mode: str
    alpha: Fraction
    allocation: Allocation
    awarded: dict[int, IndependentBundle]
    active_agents: tuple[int, ...]
    thresholds: dict[int, Fraction]
    estimates: dict[int, Fraction]
    adjustments: dict[int, int]
    runs: tuple[DividerOutcome, ...]

    @property
    def trace(self):
        return self.runs[-1].trace if self.runs else ()


def alpha_for_error(epsilon: Fraction) -> Fraction:
    """Guaranteed ratio under oracles with error bound epsilon."""
    if not ZERO <= epsilon < ONE:
        raise EpsilonOutOfRange(f"error bound {epsilon} not in [0, 1)")
    return (ONE - epsilon) / (ONE + Fraction(3, 2) * (ONE - epsilon))


def _empty_result(instance: Instance, mode: str, alpha: Fraction) -> SolveResult:
    bundles = tuple(frozenset() for _ in range(instance.n))
    return SolveResult(mode=mode, alpha=alpha,
                       allocation=Allocation(bundles=bundles,
                                             complete=instance.m == 0),
                       awarded={}, active_agents=(), thresholds={},
                       estimates={}, adjustments={}, runs=())


def _assemble(instance, mode, alpha, awarded, active, thresholds, estimates,
              adjustments, runs) -> SolveResult:
    bundles = tuple(awarded[i].items if i in awarded else frozenset()
                    for i in range(instance.n))
    claimed = frozenset().union(*bundles) if bundles else frozenset()
    return SolveResult(
        mode=mode, alpha=alpha,
        allocation=Allocation(bundles=bundles,
                              complete=len(claimed) == instance.m),
        awarded=awarded, active_agents=tuple(active), thresholds=thresholds,
        estimates=estimates, adjustments=adjustments, runs=tuple(runs))


def _reject_asymmetric(instance: Instance, mode: str) -> None:
    if instance.is_asymmetric:
        raise UnsupportedSystem(
            f"{mode} carries no guarantee for unrelated per-agent families")


# ---------------------------------------------------------------------------
# Existence mode
# ---------------------------------------------------------------------------

def solve_existence(instance: Instance, *,
                    gate: int = DEFAULT_MMS_GATE) -> SolveResult:
    """Partial allocation giving every agent n/(2n-1) of her exact MMS.

    Dividers hand out surviving blocks of their own MMS witness partitions,
    reduced to independent form.  Requires exact MMS computation, so this is
    a desk-scale verifier rather than a polynomial algorithm.
    """
    _reject_asymmetric(instance, "existence mode")
    n = instance.n
    ratio = Fraction(n, 2 * n - 1) if n >= 1 else ONE
    if n == 0:
        return _empty_result(instance, "existence", ratio)

    oracles = {i: oracle_for(instance, i) for i in range(n)}
    records: dict[int, MmsRecord] = {
        i: compute_mms_exact(instance, i, gate=gate, oracle=oracles[i])
        for i in range(n)}
    thresholds = {i: ratio * records[i].mu for i in range(n)}

    def maker(agent: int, items: Items, count: int):
        return bundles_from_mms_partition(oracles[agent], records[agent],
                                          items, count, thresholds[agent])

    if instance.is_entitled:
        outcome = lone_divider(instance, thresholds, maker,
                               divider_rule="most_restrictive",
                               ordering=instance.system.ordering)
    else:
        outcome = lone_divider(instance, thresholds, maker)
    assert outcome.succeeded
    return _assemble(instance, "existence", ratio, outcome.allocation,
                     range(n), thresholds,
                     {i: records[i].mu for i in range(n)},
                     {i: 0 for i in range(n)}, [outcome])


# ---------------------------------------------------------------------------
# Preprocessing shared by the polynomial modes
# ---------------------------------------------------------------------------

def _singleton_values(instance: Instance, agent: int) -> list[Fraction]:
    probe = oracle_for(instance, agent)
    return [probe.singleton_value(j) for j in range(instance.m)]


def _active_agents(instance: Instance, singletons) -> list[int]:
    """Agents with a positive MMS: the n-th best singleton value is positive."""
    n, m = instance.n, instance.m
    active = []
    for i in range(n):
        if m >= n and sorted(singletons[i], reverse=True)[n - 1] > 0:
            active.append(i)
    return active


def _initial_estimates(instance, active, singletons) -> dict[int, Fraction]:
    """m times the k-th best singleton value, k the count of active agents."""
    k = len(active)
    return {i: instance.m * sorted(singletons[i], reverse=True)[k - 1]
            for i in active}


def _default_oracle(instance: Instance, agent: int,
                    epsilon: Fraction) -> ValuationOracle:
    system = instance.system_for(agent)
    if isinstance(system, BudgetSystem) and epsilon > 0:
        return oracle_for(instance, agent, epsilon=epsilon)
    if isinstance(system, IntervalSystem) and epsilon > 0:
        return oracle_for(instance, agent, epsilon=max(epsilon, Fraction(1, 2)))
    return oracle_for(instance, agent, epsilon=epsilon)


def _grant_everything(instance, mode, alpha, agent, oracle) -> SolveResult:
    """Single positive agent: she receives an oracle subset of all items."""
    granted = oracle.approx_value_subset(instance.all_items())
    return _assemble(instance, mode, alpha, {agent: granted}, [agent],
                     {}, {}, {agent: 0}, [])


# ---------------------------------------------------------------------------
# Estimate-adjustment loop
# ---------------------------------------------------------------------------

def _adjustment_loop(instance, mode, alpha, active, estimates,
                     make_request, run_divider, shrink_factor, count_bound):
    """Run the lone divider, shaving a failing agent's estimate each time.

    ``shrink_factor(k)`` maps the active-agent count to the multiplicative
    estimate adjustment; ``count_bound(k, m)`` to the proven cap on the
    number of adjustments per agent.
    """
    k = len(active)
    adjustments = {i: 0 for i in active}
    cap = count_bound(k, instance.m)
    runs: list[DividerOutcome] = []
    while True:
        thresholds = {i: alpha * estimates[i] for i in active}

        def maker(agent: int, items: Items, count: int):
            return make_bundles_alpha(make_request(agent, items, count,
                                                   estimates[agent]))

        outcome = run_divider(thresholds, maker)
        runs.append(outcome)
        if outcome.succeeded:
            return _assemble(instance, mode, alpha, outcome.allocation, active,
                             thresholds, dict(estimates), adjustments, runs)
        failed = outcome.failed_agent
        adjustments[failed] += 1
        if not adjustments[failed] < cap:
            raise AssertionError(
                f"agent {failed + 1} exceeded the adjustment bound {cap:.3f}")
        estimates[failed] *= shrink_factor(k)


def solve_two_fifths(instance: Instance, *, oracle_factory=None) -> SolveResult:
    """Polynomial 2/5-approximate solver for shared hereditary systems.

    Oracle error is capped at 1/(n+1): budget systems use the knapsack value
    scaling at exactly that error, interval systems are rejected (their
    polynomial oracle loses a factor 2; use solve_alpha at epsilon 1/2).
    """
    _reject_asymmetric(instance, "the 2/5 mode")
    if instance.is_entitled:
        return solve_entitled(instance, oracle_factory=oracle_factory)
    if instance.n == 0:
        return _empty_result(instance, "two_fifths", TWO_FIFTHS)

    singletons = [_singleton_values(instance, i) for i in range(instance.n)]
    active = _active_agents(instance, singletons)
    if not active:
        return _empty_result(instance, "two_fifths", TWO_FIFTHS)
    k = len(active)
    epsilon = Fraction(1, k + 1)
    if isinstance(instance.system, IntervalSystem) and k >= 2:
        raise EpsilonOutOfRange(
            "interval oracles have error bound 1/2 > 1/(n+1); "
            "use solve_alpha with epsilon 1/2")

    def build_oracle(agent: int) -> ValuationOracle:
        if oracle_factory is not None:
            return oracle_factory(instance, agent, epsilon)
        return _default_oracle(instance, agent, epsilon)

    oracles = {i: build_oracle(i) for i in active}
    if k == 1:
        return _grant_everything(instance, "two_fifths", TWO_FIFTHS,
                                 active[0], oracles[active[0]])

    estimates = _initial_estimates(instance, active, singletons)

    def make_request(agent, items, count, mu_star):
        return BundleRequest(oracle=oracles[agent], items=items, count=count,
                             mu_star=mu_star, alpha=TWO_FIFTHS)

    def run_divider(thresholds, maker):
        return lone_divider(instance, thresholds, maker, agents=active)

    return _adjustment_loop(
        instance, "two_fifths", TWO_FIFTHS, active, estimates,
        make_request, run_divider,
        shrink_factor=lambda count: Fraction(count, count + 1),
        count_bound=lambda count, m: Fraction(6, 5) * (count + 1) * math.log(m))


def solve_alpha(instance: Instance, epsilon: Fraction, *,
                delta: Fraction | None = None,
                oracle_factory=None) -> SolveResult:
    """Solver for inaccurate oracles with error bound epsilon.

    Guarantees every agent alpha = (1-eps)/(1+(3/2)(1-eps)) of her MMS; with
    epsilon above 1/3 the phase-two pair test switches to exact cardinality-2
    independence queries.  Epsilon 0 is the 2/5 mode, bundle for bundle.
    """
    if not ZERO <= epsilon < ONE:
        raise EpsilonOutOfRange(f"error bound {epsilon} not in [0, 1)")
    if epsilon == 0:
        result = solve_two_fifths(instance, oracle_factory=oracle_factory)
        return SolveResult(mode="alpha", alpha=result.alpha,
                           allocation=result.allocation,
                           awarded=result.awarded,
                           active_agents=result.active_agents,
                           thresholds=result.thresholds,
                           estimates=result.estimates,
                           adjustments=result.adjustments, runs=result.runs)
    _reject_asymmetric(instance, "the alpha mode")
    if instance.is_entitled:
        raise UnsupportedSystem(
            "per-agent families take solve_entitled, not the alpha mode")
    alpha = alpha_for_error(epsilon)
    if delta is None:
        delta = ONE / (ONE - epsilon)
    if epsilon > ONE - ONE / delta:
        raise EpsilonOutOfRange(
            f"delta {delta} too small for error bound {epsilon}")
    if instance.n == 0:
        return _empty_result(instance, "alpha", alpha)

    singletons = [_singleton_values(instance, i) for i in range(instance.n)]
    active = _active_agents(instance, singletons)
    if not active:
        return _empty_result(instance, "alpha", alpha)
    k = len(active)

    def build_oracle(agent: int) -> ValuationOracle:
        if oracle_factory is not None:
            return oracle_factory(instance, agent, epsilon)
        return _default_oracle(instance, agent, epsilon)

    oracles = {i: build_oracle(i) for i in active}
    if k == 1:
        return _grant_everything(instance, "alpha", alpha,
                                 active[0], oracles[active[0]])

    estimates = _initial_estimates(instance, active, singletons)
    exact_pairs = epsilon > Fraction(1, 3)

    def make_request(agent, items, count, mu_star):
        return BundleRequest(oracle=oracles[agent], items=items, count=count,
                             mu_star=mu_star, alpha=alpha,
                             exact_pairs=exact_pairs)

    def run_divider(thresholds, maker):
        return lone_divider(instance, thresholds, maker, agents=active)

    def shrink_factor(count: int) -> Fraction:
        overshoot = (3 - 3 * epsilon) / (5 * count - 3 * count * epsilon
                                         + 3 * epsilon + 3)
        return ONE / (ONE + overshoot)

    return _adjustment_loop(
        instance, "alpha", alpha, active, estimates, make_request,
        run_divider, shrink_factor,
        count_bound=lambda count, m: float(delta) * (5 * count + 3) * math.log(m))


def solve_entitled(instance: Instance, epsilon: Fraction | None = None, *,
                   divider_rule: str = "swap_detect",
                   oracle_factory=None) -> SolveResult:
    """Polynomial 2/5 solver for nested per-agent families.

    Runs the oracle-mediated engine: matched agents receive the independent
    subsets their own oracles reported, so the output also satisfies
    per-agent feasibility constraints.  ``divider_rule`` is "swap_detect"
    (the ordering is treated as unknown) or "most_restrictive".
    """
    _reject_asymmetric(instance, "the entitled mode")
    if instance.n == 0:
        return _empty_result(instance, "entitled", TWO_FIFTHS)

    singletons = [_singleton_values(instance, i) for i in range(instance.n)]
    active = _active_agents(instance, singletons)
    if not active:
        return _empty_result(instance, "entitled", TWO_FIFTHS)
    k = len(active)
    if epsilon is None:
        epsilon = Fraction(1, k + 1)
    if not ZERO <= epsilon <= Fraction(1, k + 1):
        raise EpsilonOutOfRange(
            f"entitled mode needs oracle error at most 1/(n+1) = 1/{k + 1}, "
            f"got {epsilon}")

    def build_oracle(agent: int) -> ValuationOracle:
        if oracle_factory is not None:
            return oracle_factory(instance, agent, epsilon)
        return _default_oracle(instance, agent, epsilon)

    oracles = {i: build_oracle(i) for i in active}
    if k == 1:
        return _grant_everything(instance, "entitled", TWO_FIFTHS,
                                 active[0], oracles[active[0]])

    estimates = _initial_estimates(instance, active, singletons)
    ordering = None
    if divider_rule == "most_restrictive":
        if instance.is_entitled:
            ordering = tuple(i for i in instance.system.ordering if i in set(active))
        else:
            ordering = tuple(active)

    def make_request(agent, items, count, mu_star):
        return BundleRequest(oracle=oracles[agent], items=items, count=count,
                             mu_star=mu_star, alpha=TWO_FIFTHS)

    def run_divider(thresholds, maker):
        return lone_divider_entitled(instance, thresholds, maker, oracles,
                                     epsilon, agents=active,
                                     divider_rule=("lowest_index"
                                                   if ordering is None
                                                   else "most_restrictive"),
                                     ordering=ordering)

    return _adjustment_loop(
        instance, "entitled", TWO_FIFTHS, active, estimates,
        make_request, run_divider,
        shrink_factor=lambda count: Fraction(count, count + 1),
        count_bound=lambda count, m: Fraction(6, 5) * (count + 1) * math.log(m))
