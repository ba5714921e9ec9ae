"""Domain types, exact arithmetic policy, and instance validation.

Every quantity that enters a threshold comparison is a `fractions.Fraction`;
no floats appear anywhere in the solving pipeline.  Items and agents are
0-based internally and 1-based in every file format and CLI surface.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Items = frozenset[int]

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------

class InstanceError(ValueError):
    """An instance violates a structural invariant."""


class NegativeValue(InstanceError):
    pass


class NonNestedEntitledFamilies(InstanceError):
    pass


class InvalidInterval(InstanceError):
    pass


class IndexOutOfRange(InstanceError):
    pass


class ExactnessGateExceeded(RuntimeError):
    """An exact NP-hard evaluation was requested above the configured gate."""


class BruteForceGateExceeded(RuntimeError):
    """A brute-force enumeration was requested above the configured gate."""


class IndeterminateZeroValueSingleton(RuntimeError):
    """Approximate oracles cannot decide independence of zero-valued singletons."""


class InsufficientBundles(RuntimeError):
    """A maker with a success guarantee produced fewer bundles than required."""


class DegreeTooHigh(ValueError):
    """Conflict completion needs strictly more agents than the max degree."""


class EpsilonOutOfRange(ValueError):
    pass


class NotDivisible(ValueError):
    pass


class NotTripleMultiple(ValueError):
    pass


class UnsupportedSystem(ValueError):
    """The requested operation has no guarantee for this system variant."""


# ---------------------------------------------------------------------------
# Exact rationals at the boundary
# ---------------------------------------------------------------------------

def parse_rational(value) -> Fraction:
    """Convert an int or a "p/q" / "p" / decimal string to an exact Fraction."""
    if isinstance(value, bool):
        raise InstanceError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # Interpret the float via its shortest decimal form, exactly.
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"not a rational: {value!r}") from exc
    raise InstanceError(f"not a rational: {value!r}")


def format_rational(q: Fraction) -> str:
    """Canonical string form: "p" for integers, "p/q" otherwise."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# Set system variants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FreeSystem:
    """Every subset is independent (plain additive valuations)."""

    kind = "free"


@dataclass(frozen=True)
class ExplicitSystem:
    """Hereditary family stored as an antichain of maximal independent sets.

    A set is independent iff it is contained in some listed maximal set, so
    downward closure holds by construction.
    """

    kind = "explicit"
    maximal_sets: tuple[Items, ...] = ()

    @staticmethod
    def normalize(sets) -> "ExplicitSystem":
        """Build from arbitrary sets, keeping only the maximal distinct ones."""
        distinct = {frozenset(s) for s in sets}
        maximal = [s for s in distinct
                   if not any(s < t for t in distinct)]
        maximal.sort(key=lambda s: (len(s), sorted(s)))
        return ExplicitSystem(maximal_sets=tuple(maximal))


@dataclass(frozen=True)
class BudgetSystem:
    """Items have sizes; a bundle is independent if its sizes fit the budget."""

    kind = "budget"
    sizes: tuple[Fraction, ...] = ()
    budget: Fraction = ZERO


@dataclass(frozen=True)
class ConflictSystem:
    """A bundle is independent if it induces no edge of the conflict graph."""

    kind = "conflict"
    edges: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def normalize(edges) -> "ConflictSystem":
        canon = sorted({(min(a, b), max(a, b)) for a, b in edges})
        return ConflictSystem(edges=tuple(canon))


@dataclass(frozen=True)
class IntervalSystem:
    """Jobs with processing time, release, and deadline on a single machine.

    A bundle is independent if its jobs can be scheduled without overlap,
    each inside its release/deadline window, over integer unit time periods.
    Each job is a (processing, release, deadline) triple.
    """

    kind = "interval"
    jobs: tuple[tuple[int, int, int], ...] = ()


SetSystem = Union[FreeSystem, ExplicitSystem, BudgetSystem, ConflictSystem,
                  IntervalSystem]


@dataclass(frozen=True)
class EntitledSpec:
    """Per-agent systems nested along an agent ordering.

    ``ordering`` lists agent indices from most to least restrictive, so the
    families grow along it.
    """

    systems: tuple[SetSystem, ...]
    ordering: tuple[int, ...]


@dataclass(frozen=True)
class AsymmetricSpec:
    """Per-agent systems with no relation between the families."""

    systems: tuple[SetSystem, ...]


SystemSpec = Union[SetSystem, EntitledSpec, AsymmetricSpec]


def system_contains_all(system: SetSystem, m: int) -> bool:
    """True when the full item set is independent."""
    if isinstance(system, FreeSystem):
        return True
    if isinstance(system, ExplicitSystem):
        full = frozenset(range(m))
        return m == 0 or any(full <= s for s in system.maximal_sets)
    return False


def system_subseteq(a: SetSystem, b: SetSystem, m: int) -> bool:
    """Decide whether every independent set of ``a`` is independent in ``b``.

    Only the combinations needed for entitled validation are supported;
    anything else raises NonNestedEntitledFamilies.
    """
    if a == b:
        return True
    if system_contains_all(b, m):
        return True
    if isinstance(a, ExplicitSystem) and isinstance(b, ExplicitSystem):
        return all(any(s <= t for t in b.maximal_sets) or not s
                   for s in a.maximal_sets)
    if (isinstance(a, BudgetSystem) and isinstance(b, BudgetSystem)
            and a.sizes == b.sizes):
        return a.budget <= b.budget
    raise NonNestedEntitledFamilies(
        f"cannot verify nesting between {a.kind} and {b.kind} systems")


# ---------------------------------------------------------------------------
# Instance and allocation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Instance:
    """A fair-allocation instance: agents, items, values, and a set system."""

    n: int
    m: int
    values: tuple[tuple[Fraction, ...], ...]
    system: SystemSpec

    def system_for(self, agent: int) -> SetSystem:
        if isinstance(self.system, (EntitledSpec, AsymmetricSpec)):
            return self.system.systems[agent]
        return self.system

    @property
    def is_shared(self) -> bool:
        return not isinstance(self.system, (EntitledSpec, AsymmetricSpec))

    @property
    def is_entitled(self) -> bool:
        return isinstance(self.system, EntitledSpec)

    @property
    def is_asymmetric(self) -> bool:
        return isinstance(self.system, AsymmetricSpec)

    def all_items(self) -> Items:
        return frozenset(range(self.m))


@dataclass(frozen=True)
class Allocation:
    """Ordered pairwise-disjoint bundles, one per agent, possibly partial."""

    bundles: tuple[Items, ...]
    complete: bool = False


def _check_item_indices(indices, m: int, what: str) -> None:
    for j in indices:
        if not isinstance(j, int) or isinstance(j, bool) or not 0 <= j < m:
            raise IndexOutOfRange(f"{what}: item index {j!r} not in [0, {m})")


def _validate_system(system: SetSystem, m: int) -> None:
    if isinstance(system, FreeSystem):
        return
    if isinstance(system, ExplicitSystem):
        for s in system.maximal_sets:
            _check_item_indices(s, m, "explicit family")
        for s in system.maximal_sets:
            if any(s < t for t in system.maximal_sets):
                raise InstanceError(
                    "explicit family is not an antichain of maximal sets")
        if len(set(system.maximal_sets)) != len(system.maximal_sets):
            raise InstanceError("explicit family contains duplicate sets")
        return
    if isinstance(system, BudgetSystem):
        if len(system.sizes) != m:
            raise InstanceError(
                f"budget system has {len(system.sizes)} sizes for {m} items")
        for s in system.sizes:
            if s < 0:
                raise NegativeValue(f"negative item size {s}")
        if system.budget < 0:
            raise NegativeValue(f"negative budget {system.budget}")
        return
    if isinstance(system, ConflictSystem):
        for a, b in system.edges:
            _check_item_indices((a, b), m, "conflict edge")
            if a == b:
                raise InstanceError(f"conflict self-loop on item {a}")
        return
    if isinstance(system, IntervalSystem):
        if len(system.jobs) != m:
            raise InstanceError(
                f"interval system has {len(system.jobs)} jobs for {m} items")
        for j, (p, r, d) in enumerate(system.jobs):
            if not all(isinstance(x, int) and not isinstance(x, bool)
                       for x in (p, r, d)):
                raise InvalidInterval(f"job {j}: non-integer parameters")
            if p < 1 or r < 1:
                raise InvalidInterval(f"job {j}: needs p >= 1 and r >= 1")
            if d < r + p - 1:
                raise InvalidInterval(
                    f"job {j}: deadline {d} < release {r} + processing {p} - 1")
        return
    raise InstanceError(f"unknown system variant: {system!r}")


def validate_instance(instance: Instance) -> Instance:
    """Check all structural invariants, returning the instance unchanged.

    Raises a subclass of InstanceError on the first violation found.
    """
    n, m = instance.n, instance.m
    if not isinstance(n, int) or n < 0:
        raise InstanceError(f"agent count {n!r} must be a non-negative int")
    if not isinstance(m, int) or m < 0:
        raise InstanceError(f"item count {m!r} must be a non-negative int")
    if len(instance.values) != n:
        raise InstanceError(
            f"value matrix has {len(instance.values)} rows for {n} agents")
    for i, row in enumerate(instance.values):
        if len(row) != m:
            raise InstanceError(
                f"agent {i + 1}: value row has {len(row)} entries for {m} items")
        for v in row:
            if not isinstance(v, Fraction):
                raise InstanceError(
                    f"agent {i + 1}: value {v!r} is not an exact rational")
            if v < 0:
                raise NegativeValue(f"agent {i + 1}: negative value {v}")

    spec = instance.system
    if isinstance(spec, AsymmetricSpec):
        if len(spec.systems) != n:
            raise InstanceError(
                f"asymmetric spec has {len(spec.systems)} systems for {n} agents")
        for sys_i in spec.systems:
            _validate_system(sys_i, m)
    elif isinstance(spec, EntitledSpec):
        if len(spec.systems) != n:
            raise InstanceError(
                f"entitled spec has {len(spec.systems)} systems for {n} agents")
        for sys_i in spec.systems:
            _validate_system(sys_i, m)
        if sorted(spec.ordering) != list(range(n)):
            raise IndexOutOfRange(
                f"entitled ordering {spec.ordering} is not a permutation of the agents")
        for prev, nxt in zip(spec.ordering, spec.ordering[1:]):
            if not system_subseteq(spec.systems[prev], spec.systems[nxt], m):
                raise NonNestedEntitledFamilies(
                    f"agent {prev + 1}'s family is not contained in agent {nxt + 1}'s")
    else:
        _validate_system(spec, m)
    return instance


def validate_allocation(instance: Instance, allocation: Allocation) -> Allocation:
    if len(allocation.bundles) != instance.n:
        raise InstanceError(
            f"allocation has {len(allocation.bundles)} bundles for {instance.n} agents")
    seen: set[int] = set()
    for bundle in allocation.bundles:
        _check_item_indices(bundle, instance.m, "allocation")
        overlap = seen.intersection(bundle)
        if overlap:
            raise InstanceError(f"bundles overlap on items {sorted(overlap)}")
        seen.update(bundle)
    if allocation.complete and len(seen) != instance.m:
        raise InstanceError("allocation marked complete but items are missing")
    return allocation


# ---------------------------------------------------------------------------
# JSON interchange (1-based agents and items)
# ---------------------------------------------------------------------------

def _system_to_payload(system: SetSystem) -> dict:
    if isinstance(system, FreeSystem):
        return {"kind": "free"}
    if isinstance(system, ExplicitSystem):
        return {"kind": "explicit",
                "maximal_sets": [[j + 1 for j in sorted(s)]
                                 for s in system.maximal_sets]}
    if isinstance(system, BudgetSystem):
        return {"kind": "budget",
                "sizes": [format_rational(s) for s in system.sizes],
                "budget": format_rational(system.budget)}
    if isinstance(system, ConflictSystem):
        return {"kind": "conflict",
                "edges": [[a + 1, b + 1] for a, b in system.edges]}
    if isinstance(system, IntervalSystem):
        return {"kind": "interval",
                "jobs": [{"p": p, "r": r, "d": d} for p, r, d in system.jobs]}
    raise InstanceError(f"unknown system variant: {system!r}")


def _system_from_payload(payload: dict, n: int) -> SetSystem | EntitledSpec:
    kind = payload.get("kind")
    if kind == "free":
        return FreeSystem()
    if kind == "explicit":
        sets = [frozenset(j - 1 for j in s) for s in payload["maximal_sets"]]
        return ExplicitSystem.normalize(sets)
    if kind == "budget":
        sizes = tuple(parse_rational(s) for s in payload["sizes"])
        if "budgets" in payload:
            budgets = [parse_rational(b) for b in payload["budgets"]]
            if len(budgets) != n:
                raise InstanceError(
                    f"budget system has {len(budgets)} budgets for {n} agents")
            systems = tuple(BudgetSystem(sizes=sizes, budget=b) for b in budgets)
            order = tuple(sorted(range(n), key=lambda i: (budgets[i], i)))
            return EntitledSpec(systems=systems, ordering=order)
        return BudgetSystem(sizes=sizes, budget=parse_rational(payload["budget"]))
    if kind == "conflict":
        return ConflictSystem.normalize(
            (a - 1, b - 1) for a, b in payload["edges"])
    if kind == "interval":
        jobs = tuple((job["p"], job["r"], job["d"]) for job in payload["jobs"])
        return IntervalSystem(jobs=jobs)
    raise InstanceError(f"unknown system kind: {kind!r}")


def instance_to_json(instance: Instance) -> str:
    doc: dict = {
        "n": instance.n,
        "m": instance.m,
        "values": [[format_rational(v) for v in row] for row in instance.values],
    }
    spec = instance.system
    if isinstance(spec, EntitledSpec):
        kinds = {s.kind for s in spec.systems}
        if kinds == {"budget"} and len({s.sizes for s in spec.systems}) == 1:
            doc["system"] = {
                "kind": "budget",
                "sizes": [format_rational(s) for s in spec.systems[0].sizes],
                "budgets": [format_rational(s.budget) for s in spec.systems],
            }
        else:
            doc["asymmetric"] = [_system_to_payload(s) for s in spec.systems]
        doc["entitled"] = [i + 1 for i in spec.ordering]
    elif isinstance(spec, AsymmetricSpec):
        doc["asymmetric"] = [_system_to_payload(s) for s in spec.systems]
    else:
        doc["system"] = _system_to_payload(spec)
    return json.dumps(doc, sort_keys=True, separators=(",", ": "), indent=1) + "\n"


def instance_from_json(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed instance JSON: {exc}") from exc
    try:
        n = doc["n"]
        m = doc["m"]
        values = tuple(tuple(parse_rational(v) for v in row)
                       for row in doc["values"])
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"malformed instance JSON: {exc}") from exc

    has_system = "system" in doc
    has_asym = "asymmetric" in doc
    has_order = "entitled" in doc
    if has_system and has_asym:
        raise InstanceError("instance declares both a shared and per-agent systems")

    spec: SystemSpec
    if has_asym:
        systems = tuple(_system_from_payload(p, n) for p in doc["asymmetric"])
        if any(isinstance(s, EntitledSpec) for s in systems):
            raise InstanceError("per-agent system payloads must be plain systems")
        if has_order:
            ordering = tuple(i - 1 for i in doc["entitled"])
            spec = EntitledSpec(systems=systems, ordering=ordering)
        else:
            spec = AsymmetricSpec(systems=systems)
    elif has_system:
        parsed = _system_from_payload(doc["system"], n)
        if has_order:
            if not isinstance(parsed, EntitledSpec):
                raise InstanceError(
                    "an entitled ordering needs per-agent systems "
                    "(per-agent budgets or an asymmetric block)")
            ordering = tuple(i - 1 for i in doc["entitled"])
            parsed = EntitledSpec(systems=parsed.systems, ordering=ordering)
        spec = parsed
    else:
        raise InstanceError("instance declares no set system")

    return validate_instance(Instance(n=n, m=m, values=values, system=spec))


def allocation_to_json(instance: Instance, allocation: Allocation,
                       extras: dict | None = None) -> str:
    doc: dict = {
        "n": instance.n,
        "m": instance.m,
        "bundles": [[j + 1 for j in sorted(b)] for b in allocation.bundles],
        "complete": allocation.complete,
    }
    if extras:
        doc.update(extras)
    return json.dumps(doc, sort_keys=True, separators=(",", ": "), indent=1) + "\n"


def allocation_from_json(instance: Instance, text: str) -> Allocation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed allocation JSON: {exc}") from exc
    bundles = tuple(frozenset(j - 1 for j in b) for b in doc["bundles"])
    allocation = Allocation(bundles=bundles, complete=bool(doc.get("complete")))
    return validate_allocation(instance, allocation)
