"""Typed knowledge base: concepts with inheritance, instances, environment states.

The environment model is value-based: an EnvironmentState is an immutable
snapshot, and updates (set_value) return a new state. The knowledge base
itself is meant to be loaded once and then shared read-only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Union

from .errors import (
    CycleError,
    DomainMismatchError,
    DuplicatePropertyError,
    InvariantError,
    UnknownConceptError,
    UnknownInstanceError,
    UnknownParentError,
    UnknownPropertyError,
)

# Tolerance for numeric value equality.
EPS = 1e-9
# Slack for the container-level bound check. Slightly above EPS so that pours
# admitted at the precondition edge (<= capacity + EPS) still validate.
BOUNDS_EPS = 2e-9

CONTENT_LEVEL = "contentLevel"
CONTENT_VOLUME = "contentVolume"


class Kind(str, Enum):
    """Value-domain kinds a property or value can have."""

    NUMBER = "Number"
    INTEGER = "Integer"
    BOOLEAN = "Boolean"
    CONCEPT = "Concept"
    POSE = "Pose"
    LOCATION = "Location"
    INSTANCE_REF = "InstanceRef"
    COLLECTION = "Collection"
    INSTANCE = "Instance"
    ENVIRONMENT = "Environment"


#: Kinds allowed as property domains (Instance/Environment are value-only).
PROPERTY_KINDS = (
    Kind.NUMBER,
    Kind.INTEGER,
    Kind.BOOLEAN,
    Kind.CONCEPT,
    Kind.POSE,
    Kind.LOCATION,
    Kind.INSTANCE_REF,
    Kind.COLLECTION,
)


@dataclass(frozen=True)
class PropertyDef:
    name: str
    domain: Kind
    unit: str | None = None


@dataclass(frozen=True)
class Concept:
    id: str
    parents: tuple[str, ...] = ()
    own_properties: tuple[PropertyDef, ...] = ()


@dataclass(frozen=True)
class Pose:
    """Position in meters plus a unit quaternion (w, x, y, z)."""

    position: tuple[float, float, float]
    orientation: tuple[float, float, float, float] = (1.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        norm = math.sqrt(sum(c * c for c in self.orientation))
        if abs(norm - 1.0) > EPS:
            raise InvariantError(f"quaternion norm {norm!r} is not 1 within {EPS}")

    @staticmethod
    def identity() -> "Pose":
        return Pose((0.0, 0.0, 0.0))


@dataclass(frozen=True)
class NumberValue:
    value: float
    kind = Kind.NUMBER


@dataclass(frozen=True)
class IntegerValue:
    value: int
    kind = Kind.INTEGER


@dataclass(frozen=True)
class BooleanValue:
    value: bool
    kind = Kind.BOOLEAN


@dataclass(frozen=True)
class ConceptValue:
    concept: str
    kind = Kind.CONCEPT


@dataclass(frozen=True)
class PoseValue:
    pose: Pose
    kind = Kind.POSE


@dataclass(frozen=True)
class LocationValue:
    """A pose delta relative to a reference instance."""

    reference: str
    delta: Pose
    kind = Kind.LOCATION


@dataclass(frozen=True)
class InstanceRefValue:
    instance: str
    kind = Kind.INSTANCE_REF


@dataclass(frozen=True)
class CollectionValue:
    """Ordered collection; keys default to element indices."""

    elements: tuple["Value", ...]
    keys: tuple[str, ...] | None = None
    kind = Kind.COLLECTION

    def keyed(self) -> tuple[tuple[str, "Value"], ...]:
        keys = self.keys if self.keys is not None else tuple(
            str(i) for i in range(len(self.elements))
        )
        return tuple(zip(keys, self.elements))


@dataclass(frozen=True)
class InstanceValue:
    """A full instance state, as it appears inside an environment collection."""

    instance: "Instance"
    kind = Kind.INSTANCE


@dataclass(frozen=True)
class EnvironmentValue:
    env: "EnvironmentState"
    kind = Kind.ENVIRONMENT


Value = Union[
    NumberValue,
    IntegerValue,
    BooleanValue,
    ConceptValue,
    PoseValue,
    LocationValue,
    InstanceRefValue,
    CollectionValue,
    InstanceValue,
    EnvironmentValue,
]


@dataclass(frozen=True)
class Instance:
    id: str
    concept: str
    values: Mapping[str, Value] = field(default_factory=dict)


@dataclass(frozen=True)
class EnvironmentState:
    """Collection of instance states, keyed by id. Treat as immutable."""

    kb: "KnowledgeBase"
    instances: Mapping[str, Instance]

    def instance(self, instance_id: str) -> Instance:
        try:
            return self.instances[instance_id]
        except KeyError:
            raise UnknownInstanceError(instance_id) from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, EnvironmentState):
            return NotImplemented
        return self.instances == other.instances


def poses_equal(a: Pose, b: Pose) -> bool:
    if any(abs(x - y) > EPS for x, y in zip(a.position, b.position)):
        return False
    same = all(abs(x - y) <= EPS for x, y in zip(a.orientation, b.orientation))
    # q and -q encode the same rotation
    flipped = all(abs(x + y) <= EPS for x, y in zip(a.orientation, b.orientation))
    return same or flipped


def values_equal(a: Value, b: Value) -> bool:
    """Full-value equality with EPS tolerance on all numeric components."""
    if a.kind is not b.kind:
        return False
    if isinstance(a, NumberValue):
        return abs(a.value - b.value) <= EPS
    if isinstance(a, (IntegerValue, BooleanValue)):
        return a.value == b.value
    if isinstance(a, ConceptValue):
        return a.concept == b.concept
    if isinstance(a, PoseValue):
        return poses_equal(a.pose, b.pose)
    if isinstance(a, LocationValue):
        return a.reference == b.reference and poses_equal(a.delta, b.delta)
    if isinstance(a, InstanceRefValue):
        return a.instance == b.instance
    if isinstance(a, CollectionValue):
        ka, kbb = a.keyed(), b.keyed()
        if len(ka) != len(kbb):
            return False
        return all(
            x[0] == y[0] and values_equal(x[1], y[1]) for x, y in zip(ka, kbb)
        )
    if isinstance(a, InstanceValue):
        ia, ib = a.instance, b.instance
        if ia.concept != ib.concept or set(ia.values) != set(ib.values):
            return False
        return all(values_equal(ia.values[k], ib.values[k]) for k in ia.values)
    if isinstance(a, EnvironmentValue):
        ea, eb = a.env, b.env
        if set(ea.instances) != set(eb.instances):
            return False
        return all(
            values_equal(InstanceValue(ea.instances[k]), InstanceValue(eb.instances[k]))
            for k in ea.instances
        )
    raise TypeError(f"unsupported value type {type(a).__name__}")


class KnowledgeBase:
    """Concept registry with inheritance and property resolution."""

    def __init__(self):
        self._concepts: dict[str, Concept] = {}

    def define_concept(
        self,
        concept_id: str,
        parents: Iterable[str] = (),
        own_properties: Iterable[PropertyDef] = (),
    ) -> Concept:
        parents = tuple(parents)
        own_properties = tuple(own_properties)
        if concept_id in self._concepts:
            raise InvariantError(f"concept {concept_id!r} already defined")
        if concept_id in parents:
            raise CycleError(f"concept {concept_id!r} lists itself as a parent")
        for p in parents:
            if p not in self._concepts:
                raise UnknownParentError(p)
        for prop in own_properties:
            if prop.domain not in PROPERTY_KINDS:
                raise DomainMismatchError(
                    f"{concept_id}.{prop.name}: {prop.domain.value} is not a property domain"
                )
        concept = Concept(concept_id, parents, own_properties)
        self._concepts[concept_id] = concept
        try:
            if concept_id in self._ancestor_set(concept_id, skip_self=True):
                raise CycleError(f"defining {concept_id!r} creates a cycle")
            self.resolved_properties(concept_id)  # surfaces property collisions now
        except (CycleError, DuplicatePropertyError):
            del self._concepts[concept_id]
            raise
        return concept

    def concept(self, concept_id: str) -> Concept:
        try:
            return self._concepts[concept_id]
        except KeyError:
            raise UnknownConceptError(concept_id) from None

    def concepts(self) -> tuple[Concept, ...]:
        return tuple(self._concepts[c] for c in sorted(self._concepts))

    def has_concept(self, concept_id: str) -> bool:
        return concept_id in self._concepts

    def _ancestor_set(self, concept_id: str, skip_self: bool = False) -> set[str]:
        seen: set[str] = set()
        stack = list(self._concepts[concept_id].parents) if skip_self else [concept_id]
        while stack:
            current = stack.pop()
            if current in seen:
                continue
            seen.add(current)
            stack.extend(self._concepts[current].parents)
        return seen

    def ancestors(self, concept_id: str) -> tuple[str, ...]:
        """The concept itself followed by ancestors, depth-first, parents in order."""
        self.concept(concept_id)
        out: list[str] = []
        seen: set[str] = set()

        def visit(cid: str):
            if cid in seen:
                return
            seen.add(cid)
            out.append(cid)
            for parent in self._concepts[cid].parents:
                visit(parent)

        visit(concept_id)
        return tuple(out)

    def is_subconcept(self, a: str, b: str) -> bool:
        """True iff b is reachable from a via parent edges (reflexive)."""
        self.concept(a)
        self.concept(b)
        return b in self._ancestor_set(a)

    def resolved_properties(self, concept_id: str) -> tuple[PropertyDef, ...]:
        """All properties of a concept: ancestors depth-first, then own.

        A name collision between different defining concepts is an error; the
        same definition reached twice through a diamond is fine.
        """
        self.concept(concept_id)
        out: list[PropertyDef] = []
        owner: dict[str, str] = {}
        seen: set[str] = set()

        def visit(cid: str):
            if cid in seen:
                return
            seen.add(cid)
            for parent in self._concepts[cid].parents:
                visit(parent)
            for prop in self._concepts[cid].own_properties:
                if prop.name in owner:
                    raise DuplicatePropertyError(
                        f"property {prop.name!r} defined by both "
                        f"{owner[prop.name]!r} and {cid!r}"
                    )
                owner[prop.name] = cid
                out.append(prop)

        visit(concept_id)
        return tuple(out)

    def property_def(self, concept_id: str, name: str) -> PropertyDef:
        for prop in self.resolved_properties(concept_id):
            if prop.name == name:
                return prop
        raise UnknownPropertyError(f"{concept_id} has no property {name!r}")

    def environment(self, instances: Iterable[Instance]) -> EnvironmentState:
        """Build a validated environment state; instances are ordered by id."""
        by_id: dict[str, Instance] = {}
        for inst in instances:
            if inst.id in by_id:
                raise InvariantError(f"duplicate instance id {inst.id!r}")
            by_id[inst.id] = inst
        env = EnvironmentState(self, {k: by_id[k] for k in sorted(by_id)})
        for inst in env.instances.values():
            validate_instance(env, inst)
        return env


def value_kind_matches(value: Value, domain: Kind) -> bool:
    return value.kind is domain


def validate_instance(env: EnvironmentState, inst: Instance) -> None:
    """Check an instance against its concept: complete, well-kinded, in bounds."""
    kb = env.kb
    resolved = kb.resolved_properties(inst.concept)
    names = {p.name for p in resolved}
    for name in inst.values:
        if name not in names:
            raise UnknownPropertyError(f"{inst.id}: unknown property {name!r}")
    for prop in resolved:
        if prop.name not in inst.values:
            raise InvariantError(f"{inst.id}: missing value for {prop.name!r}")
        value = inst.values[prop.name]
        if not value_kind_matches(value, prop.domain):
            raise DomainMismatchError(
                f"{inst.id}.{prop.name}: expected {prop.domain.value}, "
                f"got {value.kind.value}"
            )
    _check_references(env, inst)
    _check_container_bounds(inst)


def _check_references(env: EnvironmentState, inst: Instance) -> None:
    for name, value in inst.values.items():
        for ref in _referenced_instances(value):
            if ref not in env.instances:
                raise UnknownInstanceError(
                    f"{inst.id}.{name}: reference {ref!r} does not resolve"
                )


def _referenced_instances(value: Value) -> list[str]:
    if isinstance(value, LocationValue):
        return [value.reference]
    if isinstance(value, InstanceRefValue):
        return [value.instance]
    if isinstance(value, CollectionValue):
        out: list[str] = []
        for element in value.elements:
            out.extend(_referenced_instances(element))
        return out
    return []


def _check_container_bounds(inst: Instance) -> None:
    level = inst.values.get(CONTENT_LEVEL)
    volume = inst.values.get(CONTENT_VOLUME)
    if not isinstance(level, NumberValue) or not isinstance(volume, NumberValue):
        return
    if level.value < -BOUNDS_EPS:
        raise InvariantError(f"{inst.id}: contentLevel {level.value} below 0")
    if level.value > volume.value + BOUNDS_EPS:
        raise InvariantError(
            f"{inst.id}: contentLevel {level.value} exceeds contentVolume {volume.value}"
        )


def get_value(env: EnvironmentState, instance_id: str, name: str) -> Value:
    inst = env.instance(instance_id)
    env.kb.property_def(inst.concept, name)
    return inst.values[name]


def set_value(
    env: EnvironmentState, instance_id: str, name: str, value: Value
) -> EnvironmentState:
    """Return a new environment with one property updated; env is unchanged."""
    inst = env.instance(instance_id)
    prop = env.kb.property_def(inst.concept, name)
    if not value_kind_matches(value, prop.domain):
        raise DomainMismatchError(
            f"{instance_id}.{name}: expected {prop.domain.value}, got {value.kind.value}"
        )
    new_values = dict(inst.values)
    new_values[name] = value
    new_inst = Instance(inst.id, inst.concept, new_values)
    new_env = EnvironmentState(
        env.kb, {**env.instances, instance_id: new_inst}
    )
    validate_instance(new_env, new_inst)
    return new_env


def content_level(env: EnvironmentState, instance_id: str) -> float:
    value = get_value(env, instance_id, CONTENT_LEVEL)
    assert isinstance(value, NumberValue)
    return value.value


def content_volume(env: EnvironmentState, instance_id: str) -> float:
    value = get_value(env, instance_id, CONTENT_VOLUME)
    assert isinstance(value, NumberValue)
    return value.value
