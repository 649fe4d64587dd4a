"""Explained contrasts between values, and between values and variations.

A comparison records whether value and target agree and, when they do not,
why: recursive sub-data comparisons (a location splits into pose and
reference instance) and reasons carrying the failing predicate.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Union

from .errors import DomainMismatchError
from .kb import (
    EPS,
    BooleanValue,
    CollectionValue,
    ConceptValue,
    EnvironmentState,
    EnvironmentValue,
    InstanceRefValue,
    InstanceValue,
    IntegerValue,
    KnowledgeBase,
    LocationValue,
    NumberValue,
    PoseValue,
    Value,
    values_equal,
)
from .variation import (
    CollectionSubsetVariation,
    ConceptVariation,
    EmptyVariation,
    EnvironmentVariation,
    FixedVariation,
    InstancePropertiesVariation,
    IntersectionVariation,
    IntervalVariation,
    LocationBallVariation,
    MatchResult,
    PoseBallVariation,
    UnionVariation,
    Variation,
    _pose_angle,
    _pose_distance,
    candidates_for,
    collection_member,
    contains,
)


class ReasonKind(str, Enum):
    BOUND_VIOLATION = "BoundViolation"
    KIND_MISMATCH = "KindMismatch"
    CONCEPT_MISMATCH = "ConceptMismatch"
    MISSING_ELEMENT = "MissingElement"
    SIZE_MISMATCH = "SizeMismatch"


@dataclass(frozen=True)
class Predicate:
    """A named check over concrete operands, e.g. LessEqual(0.45, 0.32)."""

    op: str
    args: tuple


def evaluate_predicate(predicate: Predicate) -> bool:
    """Re-evaluate a recorded predicate on its stored operands."""
    op, args = predicate.op, predicate.args
    if op == "LessEqual":
        return args[0] <= args[1] + EPS
    if op == "Less":
        return args[0] < args[1]
    if op == "GreaterEqual":
        return args[0] >= args[1] - EPS
    if op == "Greater":
        return args[0] > args[1]
    if op == "Equal":
        if all(isinstance(a, (int, float)) and not isinstance(a, bool) for a in args):
            return abs(args[0] - args[1]) <= EPS
        return args[0] == args[1]
    if op == "NotEqual":
        return not evaluate_predicate(Predicate("Equal", args))
    if op == "KindEqual":
        return args[0] == args[1]
    raise ValueError(f"predicate {op!r} cannot be re-evaluated standalone")


@dataclass(frozen=True)
class Comparison:
    target: Union[Value, Variation]
    value: Value
    equal: bool
    sub_comparisons: tuple[tuple[str, "Comparison"], ...] = ()
    reasons: tuple["Reason", ...] = ()


@dataclass(frozen=True)
class Reason:
    """Why a value misses its target; detail is the failing boolean check."""

    kind: ReasonKind
    predicate: Predicate
    detail: Comparison


def _reason(kind: ReasonKind, op: str, *args) -> Reason:
    predicate = Predicate(op, tuple(args))
    detail = Comparison(
        target=BooleanValue(True), value=BooleanValue(False), equal=False,
        reasons=(),
    )
    return Reason(kind, predicate, detail)


@dataclass(frozen=True)
class PropertyDifference:
    """A property of one instance that misses its target variation."""

    instance: str
    concept: str
    property: str
    current: Value
    target: Variation
    comparison: Comparison


@dataclass(frozen=True)
class EnvironmentComparison:
    """Per element variation, per concept-compatible candidate: what blocks it."""

    match: MatchResult
    differences: Mapping[int, Mapping[str, tuple[PropertyDifference, ...]]]


def compare_values(value: Value, target: Value) -> Comparison:
    """Compare two values; on inequality recurse into their sub-data."""
    if value.kind is not target.kind:
        return Comparison(
            target, value, False,
            reasons=(_reason(
                ReasonKind.KIND_MISMATCH, "KindEqual",
                value.kind.value, target.kind.value,
            ),),
        )
    if values_equal(value, target):
        return Comparison(target, value, True)
    subs, reasons = _value_detail(value, target)
    return Comparison(target, value, False, subs, reasons)


def _value_detail(
    value: Value, target: Value
) -> tuple[tuple[tuple[str, Comparison], ...], tuple[Reason, ...]]:
    if isinstance(value, NumberValue) or isinstance(value, IntegerValue):
        return (), (_reason(
            ReasonKind.BOUND_VIOLATION, "Equal", value.value, target.value
        ),)
    if isinstance(value, BooleanValue):
        return (), (_reason(
            ReasonKind.BOUND_VIOLATION, "Equal", value.value, target.value
        ),)
    if isinstance(value, ConceptValue):
        return (), (_reason(
            ReasonKind.CONCEPT_MISMATCH, "Equal", value.concept, target.concept
        ),)
    if isinstance(value, InstanceRefValue):
        return (), (_reason(
            ReasonKind.BOUND_VIOLATION, "Equal", value.instance, target.instance
        ),)
    if isinstance(value, PoseValue):
        reasons = []
        for i, (a, b) in enumerate(zip(value.pose.position, target.pose.position)):
            if abs(a - b) > EPS:
                reasons.append(_reason(ReasonKind.BOUND_VIOLATION, "Equal", a, b))
        if reasons:
            return (), tuple(reasons)
        # positions agree, so the rotation must differ
        return (), (_reason(
            ReasonKind.BOUND_VIOLATION, "Equal",
            value.pose.orientation, target.pose.orientation,
        ),)
    if isinstance(value, LocationValue):
        subs = (
            ("Pose", compare_values(PoseValue(value.delta), PoseValue(target.delta))),
            ("Instance", compare_values(
                InstanceRefValue(value.reference), InstanceRefValue(target.reference)
            )),
        )
        return subs, ()
    if isinstance(value, CollectionValue):
        assert isinstance(target, CollectionValue)
        value_items = dict(value.keyed())
        target_items = dict(target.keyed())
        subs: list[tuple[str, Comparison]] = [
            ("size", compare_values(
                IntegerValue(len(value_items)), IntegerValue(len(target_items))
            )),
        ]
        reasons: list[Reason] = []
        if len(value_items) != len(target_items):
            reasons.append(_reason(
                ReasonKind.SIZE_MISMATCH, "Equal",
                len(value_items), len(target_items),
            ))
        for key in sorted(set(value_items) | set(target_items)):
            if key in value_items and key in target_items:
                subs.append((key, compare_values(value_items[key], target_items[key])))
            else:
                side = "target" if key in target_items else "value"
                reasons.append(_reason(
                    ReasonKind.MISSING_ELEMENT, "Contains", side, key
                ))
        return tuple(subs), tuple(reasons)
    if isinstance(value, InstanceValue):
        assert isinstance(target, InstanceValue)
        subs = [(
            "Concept",
            compare_values(
                ConceptValue(value.instance.concept),
                ConceptValue(target.instance.concept),
            ),
        )]
        common = sorted(set(value.instance.values) & set(target.instance.values))
        for name in common:
            subs.append((name, compare_values(
                value.instance.values[name], target.instance.values[name]
            )))
        reasons = tuple(
            _reason(ReasonKind.MISSING_ELEMENT, "Contains", "both", name)
            for name in sorted(
                set(value.instance.values) ^ set(target.instance.values)
            )
        )
        return tuple(subs), reasons
    if isinstance(value, EnvironmentValue):
        assert isinstance(target, EnvironmentValue)
        subs = (("Instances", compare_values(
            _env_collection(value.env), _env_collection(target.env)
        )),)
        return subs, ()
    raise TypeError(f"unsupported value type {type(value).__name__}")


def _env_collection(env: EnvironmentState) -> CollectionValue:
    ids = tuple(env.instances)
    return CollectionValue(
        tuple(InstanceValue(env.instances[i]) for i in ids), keys=ids
    )


def compare_to_variation(
    value: Value, variation: Variation, kb: KnowledgeBase
) -> Comparison:
    """Membership check with an explanation of any failing bound or predicate."""
    member = contains(variation, value, kb)
    if member:
        return Comparison(variation, value, True)
    subs, reasons = _variation_detail(value, variation, kb)
    return Comparison(variation, value, False, subs, reasons)


def _variation_detail(
    value: Value, variation: Variation, kb: KnowledgeBase
) -> tuple[tuple[tuple[str, Comparison], ...], tuple[Reason, ...]]:
    if isinstance(variation, EmptyVariation):
        return (), (_reason(ReasonKind.MISSING_ELEMENT, "Exists", "member"),)
    if isinstance(variation, FixedVariation):
        inner = compare_values(value, variation.value)
        reasons = inner.reasons or (_reason(
            ReasonKind.BOUND_VIOLATION, "Equal",
            _scalar(value), _scalar(variation.value),
        ),)
        return inner.sub_comparisons, reasons
    if isinstance(variation, IntervalVariation):
        x = float(_scalar(value))
        reasons = []
        if variation.lower_closed:
            if not x >= variation.lower - EPS:
                reasons.append(_reason(
                    ReasonKind.BOUND_VIOLATION, "LessEqual", variation.lower, x
                ))
        elif not x > variation.lower:
            reasons.append(_reason(
                ReasonKind.BOUND_VIOLATION, "Less", variation.lower, x
            ))
        if variation.upper_closed:
            if not x <= variation.upper + EPS:
                reasons.append(_reason(
                    ReasonKind.BOUND_VIOLATION, "LessEqual", x, variation.upper
                ))
        elif not x < variation.upper:
            reasons.append(_reason(
                ReasonKind.BOUND_VIOLATION, "Less", x, variation.upper
            ))
        return (), tuple(reasons)
    if isinstance(variation, UnionVariation):
        subs = tuple(
            (f"member[{i}]", compare_to_variation(value, m, kb))
            for i, m in enumerate(variation.members)
        )
        if not subs:
            return (), (_reason(ReasonKind.MISSING_ELEMENT, "Exists", "member"),)
        return subs, ()
    if isinstance(variation, IntersectionVariation):
        subs = tuple(
            (f"member[{i}]", compare_to_variation(value, m, kb))
            for i, m in enumerate(variation.members)
        )
        return subs, ()
    if isinstance(variation, ConceptVariation):
        assert isinstance(value, ConceptValue)
        return (), (_reason(
            ReasonKind.CONCEPT_MISMATCH, "ConceptIn",
            value.concept, variation.base, variation.include_subconcepts,
        ),)
    if isinstance(variation, InstancePropertiesVariation):
        assert isinstance(value, InstanceValue)
        inst = value.instance
        subs: list[tuple[str, Comparison]] = [(
            "Concept",
            compare_to_variation(
                ConceptValue(inst.concept), variation.concept_variation, kb
            ),
        )]
        reasons: list[Reason] = []
        for name, pv in variation.property_variations.items():
            if name not in inst.values:
                reasons.append(_reason(
                    ReasonKind.MISSING_ELEMENT, "Contains", inst.id, name
                ))
                continue
            subs.append((name, compare_to_variation(inst.values[name], pv, kb)))
        return tuple(subs), tuple(reasons)
    if isinstance(variation, (CollectionSubsetVariation, EnvironmentVariation)):
        if isinstance(variation, EnvironmentVariation):
            assert isinstance(value, EnvironmentValue)
            instances = list(value.env.instances.values())
            type_a = variation.entity_collection_variation
        else:
            assert isinstance(value, CollectionValue)
            instances = [e.instance for e in value.elements if isinstance(e, InstanceValue)]
            type_a = variation
        match = collection_member(instances, type_a, kb)
        reasons = tuple(
            _reason(ReasonKind.MISSING_ELEMENT, "Exists", f"element[{i}]")
            for i in range(len(type_a.element_variations))
            if i not in match.assignment
        )
        subs = tuple(
            (f"element[{i}]:{inst_id}", cmp)
            for i, witnesses in sorted(match.failure_witness.items())
            for inst_id, cmp in witnesses
        )
        return subs, reasons
    if isinstance(variation, PoseBallVariation):
        assert isinstance(value, PoseValue)
        reasons = []
        dist = _pose_distance(value.pose, variation.center)
        if dist > variation.max_distance + EPS:
            reasons.append(_reason(
                ReasonKind.BOUND_VIOLATION, "LessEqual", dist, variation.max_distance
            ))
        angle = _pose_angle(value.pose, variation.center)
        if angle > variation.max_angle + EPS:
            reasons.append(_reason(
                ReasonKind.BOUND_VIOLATION, "LessEqual", angle, variation.max_angle
            ))
        return (), tuple(reasons)
    if isinstance(variation, LocationBallVariation):
        assert isinstance(value, LocationValue)
        subs = (
            ("Instance", compare_values(
                InstanceRefValue(value.reference),
                InstanceRefValue(variation.reference),
            )),
            ("Pose", compare_to_variation(PoseValue(value.delta), variation.ball, kb)),
        )
        return subs, ()
    raise DomainMismatchError(
        f"cannot explain {type(variation).__name__} against {value.kind.value}"
    )


def _scalar(value: Value):
    if isinstance(value, (NumberValue, IntegerValue, BooleanValue)):
        return value.value
    if isinstance(value, ConceptValue):
        return value.concept
    if isinstance(value, InstanceRefValue):
        return value.instance
    return repr(value)


def compare_environment(
    env: EnvironmentState, env_variation: EnvironmentVariation
) -> EnvironmentComparison:
    """Run type-A matching and collect blocking property differences.

    For each element variation, every concept-compatible candidate gets the
    list of property differences keeping it out; an empty list means the
    candidate already satisfies the variation.
    """
    kb = env.kb
    type_a = env_variation.entity_collection_variation
    match = collection_member(env.instances.values(), type_a, kb)
    differences: dict[int, dict[str, tuple[PropertyDifference, ...]]] = {}
    for i, ev in enumerate(type_a.element_variations):
        if not isinstance(ev, InstancePropertiesVariation):
            # No property machinery for other variation kinds: the candidates
            # are exactly the instances that already satisfy the variation.
            differences[i] = {
                inst.id: ()
                for inst in env.instances.values()
                if contains(ev, InstanceValue(inst), kb)
            }
            continue
        per_candidate: dict[str, tuple[PropertyDifference, ...]] = {}
        for inst in candidates_for(ev, env.instances.values(), kb):
            diffs: list[PropertyDifference] = []
            for name, pv in ev.property_variations.items():
                cmp = compare_to_variation(inst.values[name], pv, kb)
                if not cmp.equal:
                    diffs.append(PropertyDifference(
                        instance=inst.id,
                        concept=inst.concept,
                        property=name,
                        current=inst.values[name],
                        target=pv,
                        comparison=cmp,
                    ))
            per_candidate[inst.id] = tuple(diffs)
        differences[i] = per_candidate
    return EnvironmentComparison(match, differences)
