"""Variation algebra: representable subsets of value domains.

A variation stands for a subset of one value domain. Membership is decided
structurally; collections use type-A semantics: every element variation must
be satisfied by a distinct collection element, found via bipartite matching.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .errors import DomainMismatchError, EmptyVariationError
from .kb import (
    EPS,
    CollectionValue,
    ConceptValue,
    EnvironmentValue,
    Instance,
    InstanceValue,
    IntegerValue,
    Kind,
    KnowledgeBase,
    LocationValue,
    NumberValue,
    Pose,
    PoseValue,
    Value,
    values_equal,
)


@dataclass(frozen=True)
class EmptyVariation:
    pass


@dataclass(frozen=True)
class WholeVariation:
    pass


@dataclass(frozen=True)
class FixedVariation:
    value: Value


@dataclass(frozen=True)
class IntervalVariation:
    """Numeric interval with per-bound open/closed flags."""

    lower: float
    upper: float
    lower_closed: bool = True
    upper_closed: bool = True


@dataclass(frozen=True)
class UnionVariation:
    members: tuple["Variation", ...]


@dataclass(frozen=True)
class IntersectionVariation:
    members: tuple["Variation", ...]


@dataclass(frozen=True)
class ConceptVariation:
    base: str
    include_subconcepts: bool = True


@dataclass(frozen=True)
class InstancePropertiesVariation:
    """Constrains an instance's concept plus any subset of its properties.

    Properties not listed are unconstrained.
    """

    concept_variation: ConceptVariation
    property_variations: Mapping[str, "Variation"] = field(default_factory=dict)


@dataclass(frozen=True)
class CollectionSubsetVariation:
    """Type-A collection variation: each element variation needs its own element."""

    element_variations: tuple["Variation", ...]


@dataclass(frozen=True)
class EnvironmentVariation:
    entity_collection_variation: CollectionSubsetVariation


@dataclass(frozen=True)
class PoseBallVariation:
    """Poses within a distance of a center position and an angle of its rotation."""

    center: Pose
    max_distance: float
    max_angle: float


@dataclass(frozen=True)
class LocationBallVariation:
    reference: str
    ball: PoseBallVariation


Variation = Union[
    EmptyVariation,
    WholeVariation,
    FixedVariation,
    IntervalVariation,
    UnionVariation,
    IntersectionVariation,
    ConceptVariation,
    InstancePropertiesVariation,
    CollectionSubsetVariation,
    EnvironmentVariation,
    PoseBallVariation,
    LocationBallVariation,
]


@dataclass(frozen=True)
class MatchResult:
    """Outcome of type-A matching.

    assignment maps element-variation index to the instance id it claimed;
    it is injective and covers every index iff satisfied. failure_witness
    holds, per unmatched index, a comparison against every candidate.
    """

    satisfied: bool
    assignment: Mapping[int, str]
    failure_witness: Mapping[int, tuple] = field(default_factory=dict)


def _numeric(value: Value) -> float:
    if isinstance(value, (NumberValue, IntegerValue)):
        return float(value.value)
    raise DomainMismatchError(f"expected a numeric value, got {value.kind.value}")


def _pose_distance(a: Pose, b: Pose) -> float:
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a.position, b.position)))


def _pose_angle(a: Pose, b: Pose) -> float:
    dot = abs(sum(x * y for x, y in zip(a.orientation, b.orientation)))
    return 2.0 * math.acos(min(1.0, dot))


def _interval_contains(v: IntervalVariation, x: float) -> bool:
    if v.lower_closed:
        lower_ok = x >= v.lower - EPS
    else:
        lower_ok = x > v.lower
    if v.upper_closed:
        upper_ok = x <= v.upper + EPS
    else:
        upper_ok = x < v.upper
    return lower_ok and upper_ok


def contains(variation: Variation, value: Value, kb: KnowledgeBase) -> bool:
    """True iff value belongs to the subset the variation represents."""
    if isinstance(variation, EmptyVariation):
        return False
    if isinstance(variation, WholeVariation):
        return True
    if isinstance(variation, FixedVariation):
        if variation.value.kind is not value.kind:
            raise DomainMismatchError(
                f"fixed target is {variation.value.kind.value}, value is {value.kind.value}"
            )
        return values_equal(value, variation.value)
    if isinstance(variation, IntervalVariation):
        return _interval_contains(variation, _numeric(value))
    if isinstance(variation, UnionVariation):
        return any(contains(m, value, kb) for m in variation.members)
    if isinstance(variation, IntersectionVariation):
        return all(contains(m, value, kb) for m in variation.members)
    if isinstance(variation, ConceptVariation):
        if not isinstance(value, ConceptValue):
            raise DomainMismatchError(f"expected a Concept value, got {value.kind.value}")
        if variation.include_subconcepts:
            return kb.is_subconcept(value.concept, variation.base)
        return value.concept == variation.base
    if isinstance(variation, InstancePropertiesVariation):
        if not isinstance(value, InstanceValue):
            raise DomainMismatchError(f"expected an Instance value, got {value.kind.value}")
        inst = value.instance
        if not contains(variation.concept_variation, ConceptValue(inst.concept), kb):
            return False
        for name, pv in variation.property_variations.items():
            if name not in inst.values:
                return False
            if not contains(pv, inst.values[name], kb):
                return False
        return True
    if isinstance(variation, CollectionSubsetVariation):
        if not isinstance(value, CollectionValue):
            raise DomainMismatchError(f"expected a Collection value, got {value.kind.value}")
        instances = [
            e.instance for e in value.elements if isinstance(e, InstanceValue)
        ]
        if len(instances) != len(value.elements):
            raise DomainMismatchError("collection subset applies to instance collections")
        return collection_member(instances, variation, kb, witness=False).satisfied
    if isinstance(variation, EnvironmentVariation):
        if not isinstance(value, EnvironmentValue):
            raise DomainMismatchError(f"expected an Environment value, got {value.kind.value}")
        return collection_member(
            value.env.instances.values(),
            variation.entity_collection_variation,
            kb,
            witness=False,
        ).satisfied
    if isinstance(variation, PoseBallVariation):
        if not isinstance(value, PoseValue):
            raise DomainMismatchError(f"expected a Pose value, got {value.kind.value}")
        return (
            _pose_distance(value.pose, variation.center) <= variation.max_distance + EPS
            and _pose_angle(value.pose, variation.center) <= variation.max_angle + EPS
        )
    if isinstance(variation, LocationBallVariation):
        if not isinstance(value, LocationValue):
            raise DomainMismatchError(f"expected a Location value, got {value.kind.value}")
        return value.reference == variation.reference and contains(
            variation.ball, PoseValue(value.delta), kb
        )
    raise TypeError(f"unsupported variation type {type(variation).__name__}")


def candidates_for(
    variation: Variation, instances: Iterable[Instance], kb: KnowledgeBase
) -> list[Instance]:
    """Instances eligible for an element variation.

    For instance-properties variations only concept-compatible instances are
    candidates; any other variation considers the whole collection.
    """
    instances = list(instances)
    if isinstance(variation, InstancePropertiesVariation):
        return [
            inst
            for inst in instances
            if contains(variation.concept_variation, ConceptValue(inst.concept), kb)
        ]
    return instances


def collection_member(
    instances: Iterable[Instance],
    type_a: CollectionSubsetVariation,
    kb: KnowledgeBase,
    witness: bool = True,
) -> MatchResult:
    """Type-A membership via maximum bipartite matching (augmenting paths).

    Satisfied iff an injective assignment exists from element variations to
    instances, each assigned instance a member of its variation.
    """
    instances = list(instances)
    variations = type_a.element_variations
    edges: list[list[str]] = []
    for ev in variations:
        row = [
            inst.id
            for inst in candidates_for(ev, instances, kb)
            if contains(ev, InstanceValue(inst), kb)
        ]
        edges.append(row)

    owner: dict[str, int] = {}

    def augment(i: int, visited: set[str]) -> bool:
        for inst_id in edges[i]:
            if inst_id in visited:
                continue
            visited.add(inst_id)
            if inst_id not in owner or augment(owner[inst_id], visited):
                owner[inst_id] = i
                return True
        return False

    for i in range(len(variations)):
        augment(i, set())

    assignment = {i: inst_id for inst_id, i in owner.items()}
    satisfied = len(assignment) == len(variations)
    witnesses: dict[int, tuple] = {}
    if witness and not satisfied:
        from .comparison import compare_to_variation  # cycle: explanations use comparisons

        for i, ev in enumerate(variations):
            if i in assignment:
                continue
            witnesses[i] = tuple(
                (inst.id, compare_to_variation(InstanceValue(inst), ev, kb))
                for inst in candidates_for(ev, instances, kb)
            )
    return MatchResult(satisfied, dict(sorted(assignment.items())), witnesses)


# --- numeric normalization -------------------------------------------------

@dataclass(frozen=True)
class _Component:
    """One maximal interval piece of a normalized numeric variation."""

    lower: float
    upper: float
    lower_closed: bool
    upper_closed: bool

    def contains(self, x: float) -> bool:
        lower_ok = x >= self.lower - EPS if self.lower_closed else x > self.lower
        upper_ok = x <= self.upper + EPS if self.upper_closed else x < self.upper
        return lower_ok and upper_ok


def _merge_components(parts: list[_Component]) -> list[_Component]:
    parts = sorted(parts, key=lambda c: (c.lower, not c.lower_closed))
    out: list[_Component] = []
    for part in parts:
        if out:
            last = out[-1]
            touches = part.lower < last.upper or (
                part.lower == last.upper and (last.upper_closed or part.lower_closed)
            )
            if touches:
                if (part.upper, part.upper_closed) > (last.upper, last.upper_closed):
                    out[-1] = _Component(
                        last.lower, part.upper, last.lower_closed, part.upper_closed
                    )
                continue
        out.append(part)
    return out


def _intersect_two(a: _Component, b: _Component) -> _Component | None:
    if a.lower > b.lower or (a.lower == b.lower and not a.lower_closed):
        lower, lower_closed = a.lower, a.lower_closed
    else:
        lower, lower_closed = b.lower, b.lower_closed
    if a.lower == b.lower:
        lower_closed = a.lower_closed and b.lower_closed
    if a.upper < b.upper or (a.upper == b.upper and not a.upper_closed):
        upper, upper_closed = a.upper, a.upper_closed
    else:
        upper, upper_closed = b.upper, b.upper_closed
    if a.upper == b.upper:
        upper_closed = a.upper_closed and b.upper_closed
    if lower > upper:
        return None
    if lower == upper and not (lower_closed and upper_closed):
        return None
    return _Component(lower, upper, lower_closed, upper_closed)


def numeric_components(variation: Variation) -> list[_Component]:
    """Flatten a numeric variation into disjoint maximal interval components."""
    if isinstance(variation, EmptyVariation):
        return []
    if isinstance(variation, WholeVariation):
        return [_Component(-math.inf, math.inf, False, False)]
    if isinstance(variation, FixedVariation):
        x = _numeric(variation.value)
        return [_Component(x, x, True, True)]
    if isinstance(variation, IntervalVariation):
        if variation.lower > variation.upper:
            return []
        if variation.lower == variation.upper and not (
            variation.lower_closed and variation.upper_closed
        ):
            return []
        return [
            _Component(
                variation.lower,
                variation.upper,
                variation.lower_closed,
                variation.upper_closed,
            )
        ]
    if isinstance(variation, UnionVariation):
        parts: list[_Component] = []
        for m in variation.members:
            parts.extend(numeric_components(m))
        return _merge_components(parts)
    if isinstance(variation, IntersectionVariation):
        if not variation.members:
            return [_Component(-math.inf, math.inf, False, False)]
        acc = numeric_components(variation.members[0])
        for m in variation.members[1:]:
            other = numeric_components(m)
            acc = _merge_components(
                [
                    c
                    for a in acc
                    for b in other
                    if (c := _intersect_two(a, b)) is not None
                ]
            )
        return acc
    raise DomainMismatchError(
        f"{type(variation).__name__} is not a numeric variation"
    )


def nearest_targets(
    variation: Variation, current: float, integer: bool = False
) -> list[float]:
    """Closest attainable point of each component, nearest first.

    Closed bounds are usable as-is; open bounds are nudged inward (EPS for
    real domains, 1 for integers). Ties break toward the smaller value.
    """
    components = numeric_components(variation)
    if not components:
        raise EmptyVariationError("variation is empty after normalization")
    points: list[float] = []
    for comp in components:
        point = _nearest_point(comp, current, integer)
        if point is not None:
            points.append(point)
    if not points:
        raise EmptyVariationError("no attainable point in any component")
    # Distances within EPS of each other count as ties (9-decimal quantization).
    return sorted(set(points), key=lambda p: (round(abs(p - current), 9), p))


def _nearest_point(comp: _Component, current: float, integer: bool) -> float | None:
    if not integer:
        if comp.contains(current):
            return current
        if current < comp.lower:
            return comp.lower if comp.lower_closed else comp.lower + EPS
        return comp.upper if comp.upper_closed else comp.upper - EPS
    # Integer domain: clamp to the smallest/largest integers inside the component.
    lo = comp.lower
    hi = comp.upper
    lo_i = None if math.isinf(lo) else math.ceil(lo - EPS)
    if lo_i is not None and not comp.lower_closed and abs(lo_i - lo) <= EPS:
        lo_i += 1
    hi_i = None if math.isinf(hi) else math.floor(hi + EPS)
    if hi_i is not None and not comp.upper_closed and abs(hi_i - hi) <= EPS:
        hi_i -= 1
    if lo_i is not None and hi_i is not None and lo_i > hi_i:
        return None
    point = float(round(current))
    if lo_i is not None and point < lo_i:
        point = float(lo_i)
    if hi_i is not None and point > hi_i:
        point = float(hi_i)
    return point


# --- structural validation ---------------------------------------------------

@dataclass(frozen=True)
class Issue:
    path: str
    message: str


_NUMERIC_KINDS = (Kind.NUMBER, Kind.INTEGER)


def validate(
    variation: Variation, domain: Kind, kb: KnowledgeBase, path: str = "$"
) -> list[Issue]:
    """Structural and kind checks; an empty list means the variation is valid."""
    issues: list[Issue] = []

    def err(msg: str, at: str | None = None):
        issues.append(Issue(at or path, msg))

    if isinstance(variation, (EmptyVariation, WholeVariation)):
        return issues
    if isinstance(variation, FixedVariation):
        if variation.value.kind is not domain:
            err(f"fixed value is {variation.value.kind.value}, domain is {domain.value}")
        return issues
    if isinstance(variation, IntervalVariation):
        if domain not in _NUMERIC_KINDS:
            err(f"interval not allowed under {domain.value}")
        if variation.lower > variation.upper:
            err(f"lower {variation.lower} > upper {variation.upper}")
        elif variation.lower == variation.upper and not (
            variation.lower_closed and variation.upper_closed
        ):
            err("equal bounds require both ends closed")
        return issues
    if isinstance(variation, (UnionVariation, IntersectionVariation)):
        label = "union" if isinstance(variation, UnionVariation) else "intersection"
        for i, m in enumerate(variation.members):
            issues.extend(validate(m, domain, kb, f"{path}.{label}[{i}]"))
        return issues
    if isinstance(variation, ConceptVariation):
        if domain is not Kind.CONCEPT:
            err(f"concept variation not allowed under {domain.value}")
        if not kb.has_concept(variation.base):
            err(f"unknown concept {variation.base!r}")
        return issues
    if isinstance(variation, InstancePropertiesVariation):
        if domain is not Kind.INSTANCE:
            err(f"instance variation not allowed under {domain.value}")
        issues.extend(
            validate(variation.concept_variation, Kind.CONCEPT, kb, f"{path}.concept")
        )
        if kb.has_concept(variation.concept_variation.base):
            resolved = {
                p.name: p for p in kb.resolved_properties(variation.concept_variation.base)
            }
            for name, pv in variation.property_variations.items():
                at = f"{path}.properties.{name}"
                if name not in resolved:
                    err(f"unknown property {name!r}", at)
                    continue
                issues.extend(validate(pv, resolved[name].domain, kb, at))
        return issues
    if isinstance(variation, CollectionSubsetVariation):
        if domain is not Kind.COLLECTION:
            err(f"collection variation not allowed under {domain.value}")
        for i, ev in enumerate(variation.element_variations):
            issues.extend(validate(ev, Kind.INSTANCE, kb, f"{path}.elements[{i}]"))
        return issues
    if isinstance(variation, EnvironmentVariation):
        if domain is not Kind.ENVIRONMENT:
            err(f"environment variation not allowed under {domain.value}")
        issues.extend(
            validate(
                variation.entity_collection_variation,
                Kind.COLLECTION,
                kb,
                f"{path}.entities",
            )
        )
        return issues
    if isinstance(variation, PoseBallVariation):
        if domain is not Kind.POSE:
            err(f"pose ball not allowed under {domain.value}")
        if variation.max_distance < 0:
            err("max_distance must be non-negative")
        if not 0 <= variation.max_angle <= math.pi + EPS:
            err("max_angle must be within [0, pi]")
        return issues
    if isinstance(variation, LocationBallVariation):
        if domain is not Kind.LOCATION:
            err(f"location ball not allowed under {domain.value}")
        if not variation.reference:
            err("missing reference instance")
        issues.extend(validate(variation.ball, Kind.POSE, kb, f"{path}.ball"))
        return issues
    err(f"unsupported variation type {type(variation).__name__}")
    return issues
