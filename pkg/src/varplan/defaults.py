"""Shipped ontology, skill registry and scene builders.

The registry is declared in the interchange format and loaded through the
same parser the file loader uses, so the shipped defaults double as format
fixtures.
"""
from __future__ import annotations

from .kb import (
    CollectionValue,
    ConceptValue,
    Instance,
    Kind,
    KnowledgeBase,
    LocationValue,
    NumberValue,
    Pose,
    PropertyDef,
    Value,
)
from .serde import registry_from_doc
from .skills import SkillRegistry


def default_ontology() -> KnowledgeBase:
    kb = KnowledgeBase()
    kb.define_concept("Color")
    for color in ("Blue", "Green", "Red", "White"):
        kb.define_concept(color, ["Color"])
    kb.define_concept("PhysicalEntity")
    kb.define_concept("Agent", ["PhysicalEntity"])
    kb.define_concept("Person", ["Agent"])
    kb.define_concept("Object", ["PhysicalEntity"], [
        PropertyDef("location", Kind.LOCATION),
        PropertyDef("mass", Kind.NUMBER, "kg"),
        PropertyDef("color", Kind.CONCEPT),
    ])
    kb.define_concept("Table", ["Object"])
    kb.define_concept("Tool", ["Object"], [
        PropertyDef("dirty", Kind.BOOLEAN),
    ])
    kb.define_concept("Spoon", ["Tool"])
    kb.define_concept("Container", ["Object"], [
        PropertyDef("contentLevel", Kind.NUMBER, "L"),
        PropertyDef("contentVolume", Kind.NUMBER, "L"),
        PropertyDef("containedInstances", Kind.COLLECTION),
    ])
    kb.define_concept("Jar", ["Container"])
    kb.define_concept("LiquidContainer", ["Container"])
    kb.define_concept("Bowl", ["LiquidContainer"])
    kb.define_concept("Cup", ["LiquidContainer"])
    kb.define_concept("MilkCarton", ["LiquidContainer"])
    kb.define_concept("Mug", ["LiquidContainer"])
    return kb


DEFAULT_REGISTRY_DOC = {
    "actions": [
        {
            "id": "TransferContents",
            "affected": [{"concept": "Container", "property": "contentLevel"}],
            "parameters": [{"name": "amount", "kind": "Number", "unit": "L"}],
        },
    ],
    "skills": [
        {
            "id": "Pour",
            "implements": ["TransferContents"],
            "parameters": [
                {"name": "source", "kind": "InstanceRef", "concept": "Container"},
                {"name": "dest", "kind": "InstanceRef", "concept": "Container"},
                {"name": "amount", "kind": "Number", "unit": "L"},
            ],
            "preconditions": [
                "source != dest",
                "amount > 1e-9",
                "source.contentLevel >= amount - 1e-9",
                "dest.contentLevel + amount <= dest.contentVolume + 1e-9",
            ],
            "effects": [
                "source.contentLevel -= amount",
                "dest.contentLevel += amount",
            ],
            "checks": [
                "delta(source.contentLevel) == -amount",
                "delta(dest.contentLevel) == amount",
            ],
            "duration": "10 * amount",
        },
        {
            # Transfers contents like Pour but additionally dirties the tool:
            # a skill may have more effects than the action it implements.
            "id": "Scoop",
            "implements": ["TransferContents"],
            "parameters": [
                {"name": "source", "kind": "InstanceRef", "concept": "Container"},
                {"name": "dest", "kind": "InstanceRef", "concept": "Container"},
                {"name": "tool", "kind": "InstanceRef", "concept": "Tool"},
                {"name": "amount", "kind": "Number", "unit": "L"},
            ],
            "preconditions": [
                "source != dest",
                "amount > 1e-9",
                "source.contentLevel >= amount - 1e-9",
                "dest.contentLevel + amount <= dest.contentVolume + 1e-9",
            ],
            "effects": [
                "source.contentLevel -= amount",
                "dest.contentLevel += amount",
                "tool.dirty = true",
            ],
            "checks": [
                "delta(source.contentLevel) == -amount",
                "delta(dest.contentLevel) == amount",
                "becomes(tool.dirty, true)",
            ],
            "duration": "15 * amount",
        },
    ],
}


def default_registry() -> SkillRegistry:
    return registry_from_doc(DEFAULT_REGISTRY_DOC)


# --- scene builders ------------------------------------------------------------

def make_table(table_id: str = "table") -> Instance:
    return Instance(table_id, "Table", {
        "location": LocationValue(table_id, Pose.identity()),
        "mass": NumberValue(8.0),
        "color": ConceptValue("White"),
    })


def make_object_values(
    reference: str = "table",
    position: tuple[float, float, float] = (0.0, 0.0, 0.75),
    mass: float = 0.3,
    color: str = "White",
) -> dict[str, Value]:
    return {
        "location": LocationValue(reference, Pose(position)),
        "mass": NumberValue(mass),
        "color": ConceptValue(color),
    }


def make_container(
    instance_id: str,
    concept: str,
    level: float,
    volume: float,
    position: tuple[float, float, float] = (0.0, 0.0, 0.75),
    reference: str = "table",
) -> Instance:
    values = make_object_values(reference, position)
    values.update({
        "contentLevel": NumberValue(level),
        "contentVolume": NumberValue(volume),
        "containedInstances": CollectionValue(()),
    })
    return Instance(instance_id, concept, values)


def bench_environment(kb: KnowledgeBase, levels: dict[str, float]):
    """Bowl B (0.5 L), milk carton M (1.0 L), cups C1/C2 (0.3 L each)."""
    return kb.environment([
        make_table(),
        make_container("B", "Bowl", levels["B"], 0.5, (0.40, 0.00, 0.75)),
        make_container("M", "MilkCarton", levels["M"], 1.0, (0.10, 0.30, 0.75)),
        make_container("C1", "Cup", levels["C1"], 0.3, (0.20, -0.25, 0.75)),
        make_container("C2", "Cup", levels["C2"], 0.3, (0.30, -0.25, 0.75)),
    ])


def milk_pour_snapshots(kb: KnowledgeBase):
    """Before/after of the milk-into-bowl demonstration.

    The bowl gains 0.3 L, the carton loses it, and the bowl is nudged
    sideways by a couple of centimeters along the way.
    """
    before = kb.environment([
        make_table(),
        Instance("person", "Person", {}),
        make_container("bowl", "Bowl", 0.0, 0.5, (0.40, 0.00, 0.75)),
        make_container("milk_carton", "MilkCarton", 0.5, 1.0, (0.10, 0.30, 0.75)),
    ])
    after = kb.environment([
        make_table(),
        Instance("person", "Person", {}),
        make_container("bowl", "Bowl", 0.3, 0.5, (0.42, 0.01, 0.75)),
        make_container("milk_carton", "MilkCarton", 0.2, 1.0, (0.10, 0.30, 0.75)),
    ])
    return before, after


#: The scripted wizard answers that define the goal of the milk-pour task:
#: only the bowl matters, only its content level, constrained to the closed
#: interval [0.28, 0.32], generalized to any liquid container.
MILK_POUR_ANSWERS = (
    True,       # bowl is relevant
    False,      # milk carton is not
    False,      # bowl.location (accidental nudge) is not relevant
    True,       # bowl.contentLevel is relevant
    "interval",
    "closed",
    0.28,
    0.32,
    "LiquidContainer",
    True,       # include subconcepts
)
