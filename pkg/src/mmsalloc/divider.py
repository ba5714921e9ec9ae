"""The lone-divider engine with pluggable bundle construction.

Each round one remaining agent (the divider) builds as many disjoint bundles
as there are remaining agents, each worth her own threshold; an envy-free
matching then hands bundles to agents who value them enough, and the round's
items leave the pool.  Envy-freeness keeps every allocated bundle cheap for
whoever remains.

The entitled variant works through approximate oracles: it can swap the
divider when a bundle betrays a more restrictive remaining agent, matches on
oracle-reported subset values, and awards those independent subsets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import ONE, Instance, Items
from .matching import envy_free_matching
from .valuation import IndependentBundle, ValuationOracle


@dataclass(frozen=True)
class RoundRecord:
    """Everything a round did, for assertions and --trace output."""

    index: int
    divider: int
    agents: tuple[int, ...]
    swaps: tuple[tuple[int, int], ...]
    bundles: tuple[Items, ...]
    edge_values: tuple[tuple[int, int, Fraction], ...]
    matching: tuple[tuple[int, int], ...]
    awarded: tuple[tuple[int, Items], ...]


@dataclass(frozen=True)
class DividerOutcome:
    allocation: dict[int, IndependentBundle] | None
    failed_agent: int | None
    trace: tuple[RoundRecord, ...]

    @property
    def succeeded(self) -> bool:
        return self.allocation is not None


def _pick_divider(remaining: list[int], rule: str,
                  ordering: tuple[int, ...] | None) -> int:
    if rule == "lowest_index":
        return remaining[0]
    if rule == "most_restrictive":
        if ordering is None:
            raise ValueError("most_restrictive divider rule needs an ordering")
        position = {agent: t for t, agent in enumerate(ordering)}
        return min(remaining, key=lambda a: position[a])
    raise ValueError(f"unknown divider rule {rule!r}")


def _run_matching(agents: list[int], bundles, edge_value, thresholds):
    """Envy-free matching over recorded edge values; returns matched pairs."""
    values = [(agent, idx, edge_value(agent, idx))
              for agent in agents for idx in range(len(bundles))]
    adjacency = [[idx for idx in range(len(bundles))
                  if edge_value(agent, idx) >= thresholds[agent]]
                 for agent in agents]
    matching = envy_free_matching(len(agents), len(bundles), adjacency)
    return values, [(agents[pos], idx) for pos, idx in matching]


def lone_divider(instance: Instance, thresholds: dict[int, Fraction], maker, *,
                 agents=None, divider_rule: str = "lowest_index",
                 ordering: tuple[int, ...] | None = None) -> DividerOutcome:
    """Run the engine with exact additive edge values.

    ``maker(agent, items, k)`` must return k disjoint bundles independent for
    ``agent`` and worth her threshold, or None on legitimate failure.  The
    additive edge predicate is only sound when every built bundle is
    independent for every remaining agent: shared systems always, entitled
    ones under the most-restrictive-first rule.
    """
    remaining = sorted(thresholds if agents is None else agents)
    items = instance.all_items()
    allocation: dict[int, IndependentBundle] = {}
    trace: list[RoundRecord] = []

    while remaining:
        divider = _pick_divider(remaining, divider_rule, ordering)
        bundles = maker(divider, items, len(remaining))
        if bundles is None:
            return DividerOutcome(allocation=None, failed_agent=divider,
                                  trace=tuple(trace))
        assert len(bundles) == len(remaining)
        assert all(b.value >= thresholds[divider] for b in bundles)

        def edge_value(agent, idx, _divider=divider, _bundles=bundles):
            if agent == _divider:
                return _bundles[idx].value
            return sum((instance.values[agent][j] for j in _bundles[idx].items),
                       Fraction(0))

        values, matched = _run_matching(remaining, bundles, edge_value,
                                        thresholds)
        assert matched and any(agent == divider for agent, _ in matched)

        awarded = []
        for agent, idx in matched:
            bundle = bundles[idx]
            assert edge_value(agent, idx) >= thresholds[agent]
            if agent == divider:
                allocation[agent] = bundle
            else:
                allocation[agent] = IndependentBundle(
                    items=bundle.items, value=edge_value(agent, idx))
            awarded.append((agent, bundle.items))

        trace.append(RoundRecord(
            index=len(trace), divider=divider, agents=tuple(remaining),
            swaps=(), bundles=tuple(b.items for b in bundles),
            edge_values=tuple(values), matching=tuple(matched),
            awarded=tuple(awarded)))
        matched_agents = {agent for agent, _ in matched}
        taken = frozenset().union(*(bundles[idx].items for _, idx in matched))
        remaining = [a for a in remaining if a not in matched_agents]
        items -= taken

    return DividerOutcome(allocation=allocation, failed_agent=None,
                          trace=tuple(trace))


def lone_divider_entitled(instance: Instance, thresholds: dict[int, Fraction],
                          maker, oracles: dict[int, ValuationOracle],
                          epsilon: Fraction, *, agents=None,
                          divider_rule: str = "lowest_index",
                          ordering: tuple[int, ...] | None = None) -> DividerOutcome:
    """Engine variant for per-agent families behind approximate oracles.

    After the divider builds her bundles, any remaining agent whose oracle
    reports a bundle below (1 - epsilon) times its item sum must hold a
    strictly smaller family, so she takes over as divider and the bundles are
    rebuilt from scratch.  Matching edges use oracle-reported subset values,
    and matched agents other than the divider receive exactly that reported
    independent subset, while the whole bundle leaves the item pool.
    """
    remaining = sorted(thresholds if agents is None else agents)
    items = instance.all_items()
    allocation: dict[int, IndependentBundle] = {}
    trace: list[RoundRecord] = []
    shrink = ONE - epsilon

    while remaining:
        divider = _pick_divider(remaining, divider_rule, ordering)
        swaps: list[tuple[int, int]] = []
        dividers_seen = {divider}
        while True:
            bundles = maker(divider, items, len(remaining))
            if bundles is None:
                return DividerOutcome(allocation=None, failed_agent=divider,
                                      trace=tuple(trace))
            assert len(bundles) == len(remaining)

            subset_of: dict[tuple[int, int], IndependentBundle] = {}
            trigger = None
            for agent in remaining:
                if agent == divider:
                    continue
                for idx, bundle in enumerate(bundles):
                    reported = oracles[agent].approx_value_subset(bundle.items)
                    subset_of[agent, idx] = reported
                    item_sum = sum((instance.values[agent][j]
                                    for j in bundle.items), Fraction(0))
                    if reported.value < shrink * item_sum:
                        trigger = agent
                        break
                if trigger is not None:
                    break
            if trigger is None:
                break
            # The bundle is independent for the current divider but not for
            # the triggering agent, so her family is strictly smaller.
            swaps.append((divider, trigger))
            assert trigger not in dividers_seen
            dividers_seen.add(trigger)
            divider = trigger

        def edge_value(agent, idx, _divider=divider, _bundles=bundles,
                       _subsets=subset_of):
            if agent == _divider:
                return _bundles[idx].value
            return _subsets[agent, idx].value

        values, matched = _run_matching(remaining, bundles, edge_value,
                                        thresholds)
        assert matched and any(agent == divider for agent, _ in matched)

        awarded = []
        for agent, idx in matched:
            if agent == divider:
                granted = bundles[idx]
            else:
                granted = subset_of[agent, idx]
            assert granted.value >= thresholds[agent]
            allocation[agent] = granted
            awarded.append((agent, granted.items))

        trace.append(RoundRecord(
            index=len(trace), divider=divider, agents=tuple(remaining),
            swaps=tuple(swaps), bundles=tuple(b.items for b in bundles),
            edge_values=tuple(values), matching=tuple(matched),
            awarded=tuple(awarded)))
        matched_agents = {agent for agent, _ in matched}
        taken = frozenset().union(*(bundles[idx].items for _, idx in matched))
        remaining = [a for a in remaining if a not in matched_agents]
        items -= taken

    return DividerOutcome(allocation=allocation, failed_agent=None,
                          trace=tuple(trace))


def trace_to_dicts(outcome: DividerOutcome, run: int = 1) -> list[dict]:
    """Serialise a trace as JSON-ready dicts (1-based agents and items)."""
    rows = []
    for record in outcome.trace:
        rows.append({
            "run": run,
            "round": record.index + 1,
            "divider": record.divider + 1,
            "agents": [a + 1 for a in record.agents],
            "swaps": [[a + 1, b + 1] for a, b in record.swaps],
            "bundles": [sorted(j + 1 for j in b) for b in record.bundles],
            "edges": [[a + 1, idx + 1, str(v)]
                      for a, idx, v in record.edge_values],
            "matching": [[a + 1, idx + 1] for a, idx in record.matching],
            "awarded": [[a + 1, sorted(j + 1 for j in items)]
                        for a, items in record.awarded],
        })
    return rows
