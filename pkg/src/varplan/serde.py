"""Interchange format: JSON documents for every artifact the system trades.

All writers go through canonical_dumps so that equal structures serialize to
identical bytes regardless of construction order.
"""
from __future__ import annotations

import json
from typing import Any

from . import expr
from .comparison import Comparison, EnvironmentComparison, PropertyDifference, Reason
from .errors import DocumentError
from .executor import ExecutionTrace, StepFailure, Verdict
from .kb import (
    CONTENT_LEVEL,
    BooleanValue,
    CollectionValue,
    ConceptValue,
    EnvironmentState,
    EnvironmentValue,
    Instance,
    InstanceRefValue,
    InstanceValue,
    IntegerValue,
    Kind,
    KnowledgeBase,
    LocationValue,
    NumberValue,
    Pose,
    PoseValue,
    PropertyDef,
    Value,
)
from .planner import (
    ExecutionPlan,
    PlanResult,
    SkillAlternative,
    SkillAlternativeSet,
)
from .session import DemonstrationDiff, Question, Session
from .skills import (
    ActionTemplate,
    ParamSpec,
    RecognitionResult,
    SkillInstance,
    SkillRegistry,
    SkillTemplate,
    apply_effects,
    instantiate,
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
    WholeVariation,
)


def canonical_dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _expect(doc: Any, key: str, path: str) -> Any:
    if not isinstance(doc, dict):
        raise DocumentError(path, f"expected an object, got {type(doc).__name__}")
    if key not in doc:
        raise DocumentError(path, f"missing field {key!r}")
    return doc[key]


# --- values -------------------------------------------------------------------

def pose_to_doc(pose: Pose) -> dict:
    return {"position": list(pose.position), "orientation": list(pose.orientation)}


def pose_from_doc(doc: Any, path: str = "$") -> Pose:
    position = _expect(doc, "position", path)
    orientation = doc.get("orientation", [1.0, 0.0, 0.0, 0.0])
    if len(position) != 3 or len(orientation) != 4:
        raise DocumentError(path, "pose needs a 3-vector position and 4-vector orientation")
    return Pose(tuple(float(x) for x in position), tuple(float(x) for x in orientation))


def value_to_doc(value: Value) -> dict:
    if isinstance(value, NumberValue):
        return {"type": "Number", "value": value.value}
    if isinstance(value, IntegerValue):
        return {"type": "Integer", "value": value.value}
    if isinstance(value, BooleanValue):
        return {"type": "Boolean", "value": value.value}
    if isinstance(value, ConceptValue):
        return {"type": "Concept", "id": value.concept}
    if isinstance(value, PoseValue):
        return {"type": "Pose", **pose_to_doc(value.pose)}
    if isinstance(value, LocationValue):
        return {"type": "Location", "reference": value.reference, "delta": pose_to_doc(value.delta)}
    if isinstance(value, InstanceRefValue):
        return {"type": "InstanceRef", "id": value.instance}
    if isinstance(value, CollectionValue):
        doc: dict = {"type": "Collection", "elements": [value_to_doc(e) for e in value.elements]}
        if value.keys is not None:
            doc["keys"] = list(value.keys)
        return doc
    if isinstance(value, InstanceValue):
        return {"type": "Instance", **instance_to_doc(value.instance)}
    if isinstance(value, EnvironmentValue):
        return {"type": "Environment", **env_to_doc(value.env)}
    raise DocumentError("$", f"unsupported value {type(value).__name__}")


def value_from_doc(doc: Any, path: str = "$") -> Value:
    vtype = _expect(doc, "type", path)
    if vtype == "Number":
        return NumberValue(float(_expect(doc, "value", path)))
    if vtype == "Integer":
        return IntegerValue(int(_expect(doc, "value", path)))
    if vtype == "Boolean":
        return BooleanValue(bool(_expect(doc, "value", path)))
    if vtype == "Concept":
        return ConceptValue(str(_expect(doc, "id", path)))
    if vtype == "Pose":
        return PoseValue(pose_from_doc(doc, path))
    if vtype == "Location":
        return LocationValue(
            str(_expect(doc, "reference", path)),
            pose_from_doc(_expect(doc, "delta", path), f"{path}.delta"),
        )
    if vtype == "InstanceRef":
        return InstanceRefValue(str(_expect(doc, "id", path)))
    if vtype == "Collection":
        elements = tuple(
            value_from_doc(e, f"{path}.elements[{i}]")
            for i, e in enumerate(_expect(doc, "elements", path))
        )
        keys = tuple(doc["keys"]) if "keys" in doc else None
        return CollectionValue(elements, keys)
    if vtype == "Instance":
        return InstanceValue(instance_from_doc(doc, path))
    raise DocumentError(path, f"unknown value type {vtype!r}")


# --- ontology and environments -------------------------------------------------

def ontology_to_doc(kb: KnowledgeBase) -> dict:
    return {
        "concepts": [
            {
                "id": c.id,
                "parents": list(c.parents),
                "properties": [
                    {"name": p.name, "domain": p.domain.value, **({"unit": p.unit} if p.unit else {})}
                    for p in c.own_properties
                ],
            }
            for c in kb.concepts()
        ]
    }


def ontology_from_doc(doc: Any) -> KnowledgeBase:
    kb = KnowledgeBase()
    pending = list(_expect(doc, "concepts", "$.concepts"))
    defined: set[str] = set()
    while pending:
        progressed = False
        remaining = []
        for entry in pending:
            path = f"$.concepts[{entry.get('id', '?')}]"
            parents = entry.get("parents", [])
            if all(p in defined for p in parents):
                props = []
                for p in entry.get("properties", []):
                    try:
                        domain = Kind(p["domain"])
                    except (KeyError, ValueError):
                        raise DocumentError(path, f"bad property domain in {p!r}") from None
                    props.append(PropertyDef(p["name"], domain, p.get("unit")))
                kb.define_concept(_expect(entry, "id", path), parents, props)
                defined.add(entry["id"])
                progressed = True
            else:
                remaining.append(entry)
        if not progressed:
            missing = sorted({p for e in remaining for p in e.get("parents", [])} - defined)
            raise DocumentError("$.concepts", f"unresolvable parents {missing}")
        pending = remaining
    return kb


def instance_to_doc(inst: Instance) -> dict:
    return {
        "id": inst.id,
        "concept": inst.concept,
        "values": {name: value_to_doc(v) for name, v in sorted(inst.values.items())},
    }


def instance_from_doc(doc: Any, path: str = "$") -> Instance:
    values = {
        name: value_from_doc(v, f"{path}.values.{name}")
        for name, v in _expect(doc, "values", path).items()
    }
    return Instance(_expect(doc, "id", path), _expect(doc, "concept", path), values)


def env_to_doc(env: EnvironmentState) -> dict:
    return {"instances": [instance_to_doc(i) for i in env.instances.values()]}


def env_from_doc(kb: KnowledgeBase, doc: Any) -> EnvironmentState:
    instances = [
        instance_from_doc(entry, f"$.instances[{i}]")
        for i, entry in enumerate(_expect(doc, "instances", "$"))
    ]
    return kb.environment(instances)


# --- variations ----------------------------------------------------------------

def variation_to_doc(v: Variation) -> dict:
    if isinstance(v, EmptyVariation):
        return {"type": "Empty"}
    if isinstance(v, WholeVariation):
        return {"type": "Whole"}
    if isinstance(v, FixedVariation):
        return {"type": "Fixed", "value": value_to_doc(v.value)}
    if isinstance(v, IntervalVariation):
        return {
            "type": "Interval",
            "lower": v.lower,
            "upper": v.upper,
            "lower_closed": v.lower_closed,
            "upper_closed": v.upper_closed,
        }
    if isinstance(v, UnionVariation):
        return {"type": "Union", "members": [variation_to_doc(m) for m in v.members]}
    if isinstance(v, IntersectionVariation):
        return {"type": "Intersection", "members": [variation_to_doc(m) for m in v.members]}
    if isinstance(v, ConceptVariation):
        return {
            "type": "ConceptVariation",
            "base": v.base,
            "include_subconcepts": v.include_subconcepts,
        }
    if isinstance(v, InstancePropertiesVariation):
        return {
            "type": "InstanceRangePropertiesVariation",
            "concept": variation_to_doc(v.concept_variation),
            "properties": {
                name: variation_to_doc(pv) for name, pv in sorted(v.property_variations.items())
            },
        }
    if isinstance(v, CollectionSubsetVariation):
        return {
            "type": "MapRangeInstanceSubset",
            "elements": [variation_to_doc(e) for e in v.element_variations],
        }
    if isinstance(v, EnvironmentVariation):
        return {
            "type": "EnvironmentDataRangeEntityVariation",
            "entities": variation_to_doc(v.entity_collection_variation),
        }
    if isinstance(v, PoseBallVariation):
        return {
            "type": "PoseBall",
            "center": pose_to_doc(v.center),
            "max_distance": v.max_distance,
            "max_angle": v.max_angle,
        }
    if isinstance(v, LocationBallVariation):
        return {
            "type": "LocationBall",
            "reference": v.reference,
            "ball": variation_to_doc(v.ball),
        }
    raise DocumentError("$", f"unsupported variation {type(v).__name__}")


def variation_from_doc(doc: Any, path: str = "$") -> Variation:
    vtype = _expect(doc, "type", path)
    if vtype == "Empty":
        return EmptyVariation()
    if vtype == "Whole":
        return WholeVariation()
    if vtype == "Fixed":
        return FixedVariation(value_from_doc(_expect(doc, "value", path), f"{path}.value"))
    if vtype == "Interval":
        return IntervalVariation(
            float(_expect(doc, "lower", path)),
            float(_expect(doc, "upper", path)),
            bool(doc.get("lower_closed", True)),
            bool(doc.get("upper_closed", True)),
        )
    if vtype in ("Union", "Intersection"):
        members = tuple(
            variation_from_doc(m, f"{path}.members[{i}]")
            for i, m in enumerate(_expect(doc, "members", path))
        )
        return UnionVariation(members) if vtype == "Union" else IntersectionVariation(members)
    if vtype == "ConceptVariation":
        return ConceptVariation(
            str(_expect(doc, "base", path)), bool(doc.get("include_subconcepts", True))
        )
    if vtype == "InstanceRangePropertiesVariation":
        concept = variation_from_doc(_expect(doc, "concept", path), f"{path}.concept")
        if not isinstance(concept, ConceptVariation):
            raise DocumentError(f"{path}.concept", "expected a ConceptVariation")
        properties = {
            name: variation_from_doc(pv, f"{path}.properties.{name}")
            for name, pv in _expect(doc, "properties", path).items()
        }
        return InstancePropertiesVariation(concept, properties)
    if vtype == "MapRangeInstanceSubset":
        return CollectionSubsetVariation(tuple(
            variation_from_doc(e, f"{path}.elements[{i}]")
            for i, e in enumerate(_expect(doc, "elements", path))
        ))
    if vtype == "EnvironmentDataRangeEntityVariation":
        entities = variation_from_doc(_expect(doc, "entities", path), f"{path}.entities")
        if not isinstance(entities, CollectionSubsetVariation):
            raise DocumentError(f"{path}.entities", "expected a MapRangeInstanceSubset")
        return EnvironmentVariation(entities)
    if vtype == "PoseBall":
        return PoseBallVariation(
            pose_from_doc(_expect(doc, "center", path), f"{path}.center"),
            float(_expect(doc, "max_distance", path)),
            float(_expect(doc, "max_angle", path)),
        )
    if vtype == "LocationBall":
        ball = variation_from_doc(_expect(doc, "ball", path), f"{path}.ball")
        if not isinstance(ball, PoseBallVariation):
            raise DocumentError(f"{path}.ball", "expected a PoseBall")
        return LocationBallVariation(str(_expect(doc, "reference", path)), ball)
    raise DocumentError(path, f"unknown variation type {vtype!r}")


# --- comparisons (one-way, for inspection) --------------------------------------

_VARIATION_TYPES = (
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
)


def _target_to_doc(target) -> dict:
    if isinstance(target, _VARIATION_TYPES):
        return variation_to_doc(target)
    return value_to_doc(target)


def _predicate_arg(arg):
    if isinstance(arg, tuple):
        return list(arg)
    return arg


def comparison_to_doc(cmp: Comparison) -> dict:
    return {
        "equal": cmp.equal,
        "target": _target_to_doc(cmp.target),
        "value": value_to_doc(cmp.value),
        "reasons": [reason_to_doc(r) for r in cmp.reasons],
        "sub_comparisons": [
            {"label": label, "comparison": comparison_to_doc(sub)}
            for label, sub in cmp.sub_comparisons
        ],
    }


def reason_to_doc(reason: Reason) -> dict:
    return {
        "kind": reason.kind.value,
        "predicate": {
            "op": reason.predicate.op,
            "args": [_predicate_arg(a) for a in reason.predicate.args],
        },
        "expected": True,
        "actual": False,
    }


def match_result_to_doc(match: MatchResult) -> dict:
    return {
        "satisfied": match.satisfied,
        "assignment": {str(i): inst for i, inst in match.assignment.items()},
        "failure_witness": {
            str(i): [
                {"candidate": inst_id, "comparison": comparison_to_doc(cmp)}
                for inst_id, cmp in witnesses
            ]
            for i, witnesses in match.failure_witness.items()
        },
    }


def property_difference_to_doc(diff: PropertyDifference) -> dict:
    return {
        "instance": diff.instance,
        "concept": diff.concept,
        "property": diff.property,
        "current": value_to_doc(diff.current),
        "target": variation_to_doc(diff.target),
        "comparison": comparison_to_doc(diff.comparison),
    }


def environment_comparison_to_doc(ec: EnvironmentComparison) -> dict:
    return {
        "match": match_result_to_doc(ec.match),
        "differences": {
            str(i): {
                inst: [property_difference_to_doc(d) for d in diffs]
                for inst, diffs in per_candidate.items()
            }
            for i, per_candidate in ec.differences.items()
        },
    }


def diff_to_doc(diff: DemonstrationDiff) -> dict:
    return {
        "changed": [
            {
                "instance": instance_id,
                "properties": [
                    {
                        "property": c.property,
                        "before": value_to_doc(c.before),
                        "after": value_to_doc(c.after),
                    }
                    for c in changes
                ],
            }
            for instance_id, changes in diff.changed
        ],
        "recognized_skills": recognition_to_doc(diff.recognized_skills),
    }


def recognition_to_doc(result: RecognitionResult) -> dict:
    return {
        "recognized": [
            {
                "interval": list(r.interval),
                "skill": skill_instance_to_doc(r.skill),
            }
            for r in result.recognized
        ],
        "residuals": [
            {
                "interval": list(r.interval),
                "difference": property_difference_to_doc(r.difference),
            }
            for r in result.residuals
        ],
    }


# --- skills and registry ---------------------------------------------------------

def skill_instance_to_doc(si: SkillInstance) -> dict:
    return {
        "template": si.template.id,
        "bindings": dict(sorted(si.bindings.items())),
        "duration": si.duration,
    }


def skill_instance_from_doc(registry: SkillRegistry, doc: Any, path: str = "$") -> SkillInstance:
    template = registry.skill(_expect(doc, "template", path))
    return instantiate(template, _expect(doc, "bindings", path))


def registry_to_doc(registry: SkillRegistry) -> dict:
    return {
        "actions": [
            {
                "id": a.id,
                "affected": [
                    {"concept": concept, "property": prop}
                    for concept, prop in a.affected_properties
                ],
                "parameters": [_param_to_doc(p) for p in a.parameters],
            }
            for a in registry.actions()
        ],
        "skills": [
            {
                "id": s.id,
                "implements": list(s.implements),
                "parameters": [_param_to_doc(p) for p in s.parameters],
                "preconditions": [expr.unparse(c) for c in s.preconditions],
                "effects": [expr.unparse(e) for e in s.effects],
                "checks": [expr.unparse(c) for c in s.checks],
                "duration": expr.unparse(s.duration),
            }
            for s in registry.skills()
        ],
    }


def _param_to_doc(p: ParamSpec) -> dict:
    doc = {"name": p.name, "kind": p.kind.value}
    if p.unit:
        doc["unit"] = p.unit
    if p.concept:
        doc["concept"] = p.concept
    return doc


def _param_from_doc(doc: Any, path: str) -> ParamSpec:
    try:
        kind = Kind(_expect(doc, "kind", path))
    except ValueError:
        raise DocumentError(path, f"bad parameter kind {doc.get('kind')!r}") from None
    return ParamSpec(_expect(doc, "name", path), kind, doc.get("unit"), doc.get("concept"))


def registry_from_doc(doc: Any) -> SkillRegistry:
    registry = SkillRegistry()
    for i, entry in enumerate(doc.get("actions", [])):
        path = f"$.actions[{i}]"
        registry.register_action(ActionTemplate(
            id=_expect(entry, "id", path),
            affected_properties=tuple(
                (a["concept"], a["property"]) for a in _expect(entry, "affected", path)
            ),
            parameters=tuple(
                _param_from_doc(p, f"{path}.parameters[{j}]")
                for j, p in enumerate(entry.get("parameters", []))
            ),
        ))
    for i, entry in enumerate(doc.get("skills", [])):
        path = f"$.skills[{i}]"
        registry.register_skill(SkillTemplate(
            id=_expect(entry, "id", path),
            implements=tuple(entry.get("implements", [])),
            parameters=tuple(
                _param_from_doc(p, f"{path}.parameters[{j}]")
                for j, p in enumerate(entry.get("parameters", []))
            ),
            preconditions=tuple(expr.parse_cmp(c) for c in entry.get("preconditions", [])),
            effects=tuple(expr.parse_effect(e) for e in entry.get("effects", [])),
            checks=tuple(expr.parse_check(c) for c in entry.get("checks", [])),
            duration=expr.parse_expr(entry.get("duration", "0")),
        ))
    return registry


# --- plans and traces -------------------------------------------------------------

def plan_to_doc(plan: ExecutionPlan) -> dict:
    return {
        "steps": [
            {
                "alternatives": [
                    {
                        "skill": skill_instance_to_doc(alt.skill),
                        "precondition_plan": (
                            plan_to_doc(alt.precondition_plan)
                            if alt.precondition_plan is not None
                            else None
                        ),
                    }
                    for alt in step.alternatives
                ]
            }
            for step in plan.steps
        ],
        "step_count": plan.step_count,
    }


def plan_from_doc(registry: SkillRegistry, doc: Any, path: str = "$") -> ExecutionPlan:
    steps = []
    for i, step in enumerate(_expect(doc, "steps", path)):
        alternatives = []
        for j, alt in enumerate(_expect(step, "alternatives", f"{path}.steps[{i}]")):
            at = f"{path}.steps[{i}].alternatives[{j}]"
            nested = alt.get("precondition_plan")
            alternatives.append(SkillAlternative(
                skill_instance_from_doc(registry, _expect(alt, "skill", at), at),
                plan_from_doc(registry, nested, f"{at}.precondition_plan") if nested else None,
            ))
        if not alternatives:
            raise DocumentError(f"{path}.steps[{i}]", "a step needs at least one alternative")
        steps.append(SkillAlternativeSet(tuple(alternatives)))
    return ExecutionPlan(tuple(steps))


def _cost_or_none(cost: float):
    return None if cost == float("inf") else cost


def plan_result_to_doc(result: PlanResult) -> dict:
    return {
        "satisfiable": result.satisfiable,
        "assignment": {str(i): inst for i, inst in sorted(result.assignment.items())},
        "total_cost": _cost_or_none(result.total_cost),
        "plan": plan_to_doc(result.plan),
        "matrix": {
            "rows": list(result.matrix.rows),
            "cols": list(result.matrix.cols),
            "cells": {
                f"{i}:{inst}": {
                    "status": cell.status,
                    "cost": _cost_or_none(cell.cost),
                }
                for (i, inst), cell in sorted(result.matrix.cells.items())
            },
        },
    }


def trace_to_doc(trace: ExecutionTrace, initial_env: EnvironmentState | None = None) -> dict:
    doc = {
        "entries": [
            {
                "skill": skill_instance_to_doc(e.skill),
                "pre_digest": e.pre_digest,
                "post_digest": e.post_digest,
                "duration": e.duration,
                "preconditions_passed": e.preconditions_passed,
            }
            for e in trace.entries
        ],
        "total_duration": trace.total_duration,
        "final_env": env_to_doc(trace.final_env),
        "verdict": _verdict_to_doc(trace.verdict),
        "failure": _failure_to_doc(trace.failure),
    }
    if initial_env is not None:
        doc["initial_levels"] = _levels(initial_env)
        current = initial_env
        for entry_doc, entry in zip(doc["entries"], trace.entries):
            current = apply_effects(entry.skill, current)
            entry_doc["levels"] = _levels(current)
    return doc


def _levels(env: EnvironmentState) -> dict[str, float]:
    out = {}
    for inst in env.instances.values():
        value = inst.values.get(CONTENT_LEVEL)
        if isinstance(value, NumberValue):
            out[inst.id] = value.value
    return out


def _verdict_to_doc(verdict: Verdict | None):
    if verdict is None:
        return None
    doc: dict = {"status": "Satisfied" if verdict.satisfied else "NotSatisfied"}
    if verdict.comparison is not None:
        doc["comparison"] = environment_comparison_to_doc(verdict.comparison)
    return doc


def _failure_to_doc(failure: StepFailure | None):
    if failure is None:
        return None
    return {
        "step_index": failure.step_index,
        "failures": [
            {
                "skill": skill_id,
                "failing": [comparison_to_doc(c) for c in comparisons],
            }
            for skill_id, comparisons in failure.failures
        ],
    }


# --- sessions ----------------------------------------------------------------------

def question_to_doc(q: Question) -> dict:
    return {
        "id": q.id,
        "kind": q.kind,
        "prompt": q.prompt,
        "options": [{"id": o.id, "label": o.label} for o in q.options],
        "default": answer_to_doc(q.default),
        "entity": q.entity,
        "property": q.property,
        "variation_kind": q.variation_kind,
        "parameter": q.parameter,
        "free_form": q.free_form,
    }


def answer_to_doc(value):
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return value_to_doc(value)


def answer_from_doc(raw, path: str = "$"):
    if raw is None or isinstance(raw, (bool, int, float, str)):
        return raw
    if isinstance(raw, dict) and "type" in raw:
        return value_from_doc(raw, path)
    raise DocumentError(path, f"cannot interpret answer {raw!r}")


def answers_from_doc(doc: Any) -> list[tuple[str | None, Any]]:
    entries = _expect(doc, "answers", "$")
    out = []
    for i, entry in enumerate(entries):
        path = f"$.answers[{i}]"
        if not isinstance(entry, dict) or "value" not in entry:
            raise DocumentError(path, "expected an object with a 'value' field")
        out.append((entry.get("question"), answer_from_doc(entry["value"], path)))
    return out


def transcript_to_doc(session: Session) -> dict:
    from .session import history, question_bound

    return {
        "id": session.id,
        "complete": session.complete,
        "question_count": session.question_count(),
        "bound": question_bound(session),
        "history": [
            {"question": question_to_doc(q), "answer": answer_to_doc(a)}
            for q, a in history(session)
        ],
        "pending": question_to_doc(session.pending) if session.pending else None,
        "result": variation_to_doc(session.result) if session.result is not None else None,
    }
