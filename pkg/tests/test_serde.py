from __future__ import annotations

import json

import pytest

import varplan as vp
from varplan import serde

from oracles import goal_environment, liquid_goal


def test_value_round_trip():
    values = [
        vp.NumberValue(0.3),
        vp.IntegerValue(4),
        vp.BooleanValue(True),
        vp.ConceptValue("Mug"),
        vp.PoseValue(vp.Pose((0.1, 0.2, 0.3))),
        vp.LocationValue("table", vp.Pose((0, 0, 0.75))),
        vp.InstanceRefValue("bowl"),
        vp.CollectionValue((vp.InstanceRefValue("a"), vp.InstanceRefValue("b"))),
    ]
    for value in values:
        doc = serde.value_to_doc(value)
        assert serde.value_from_doc(doc) == value


def test_variation_round_trip(kb):
    goal = goal_environment(liquid_goal(vp.UnionVariation((
        vp.IntervalVariation(0.28, 0.32),
        vp.IntervalVariation(0.6, 0.8, lower_closed=False),
    ))))
    doc = serde.variation_to_doc(goal)
    assert doc["type"] == "EnvironmentDataRangeEntityVariation"
    assert doc["entities"]["type"] == "MapRangeInstanceSubset"
    assert doc["entities"]["elements"][0]["type"] == "InstanceRangePropertiesVariation"
    assert serde.variation_from_doc(doc) == goal


def test_ontology_round_trip(kb):
    doc = serde.ontology_to_doc(kb)
    rebuilt = serde.ontology_from_doc(doc)
    assert serde.ontology_to_doc(rebuilt) == doc
    assert rebuilt.resolved_properties("Mug") == kb.resolved_properties("Mug")


def test_environment_round_trip(kb):
    env = vp.bench_environment(kb, {"B": 0.06, "M": 0.1, "C1": 0.1, "C2": 0.02})
    doc = serde.env_to_doc(env)
    rebuilt = serde.env_from_doc(kb, doc)
    assert rebuilt == env
    assert serde.env_to_doc(rebuilt) == doc


def test_registry_round_trip(registry):
    doc = serde.registry_to_doc(registry)
    rebuilt = serde.registry_from_doc(doc)
    assert serde.registry_to_doc(rebuilt) == doc
    pour = rebuilt.skill("Pour")
    assert [p.name for p in pour.parameters] == ["source", "dest", "amount"]
    si = rebuilt.instantiate("Pour", source="M", dest="B", amount=0.1)
    assert si.duration == pytest.approx(1.0)


def test_plan_round_trip(kb, registry):
    env = vp.bench_environment(kb, {"B": 0.06, "M": 0.1, "C1": 0.1, "C2": 0.02})
    goal = goal_environment(liquid_goal(vp.IntervalVariation(0.28, 0.32)))
    result = vp.plan(env, goal, registry)
    doc = serde.plan_result_to_doc(result)
    rebuilt = serde.plan_from_doc(registry, doc["plan"])
    assert rebuilt == result.plan
    assert doc["matrix"]["cells"]["0:B"]["status"] == "plan"


def test_trace_doc_levels_follow_pours(kb, registry):
    env = vp.bench_environment(kb, {"B": 0.06, "M": 0.1, "C1": 0.1, "C2": 0.02})
    goal = goal_environment(liquid_goal(vp.IntervalVariation(0.28, 0.32)))
    result = vp.plan(env, goal, registry)
    trace = vp.execute(result.plan, env, goal)
    doc = serde.trace_to_doc(trace, initial_env=env)
    assert doc["verdict"]["status"] == "Satisfied"
    assert doc["initial_levels"]["B"] == pytest.approx(0.06)
    final_doc_level = doc["entries"][-1]["levels"]["B"]
    assert final_doc_level == pytest.approx(
        vp.get_value(trace.final_env, "B", "contentLevel").value
    )
    assert doc["total_duration"] == pytest.approx(trace.total_duration)


def test_canonical_dumps_is_order_insensitive():
    a = serde.canonical_dumps({"b": 1, "a": [1, 2]})
    b = serde.canonical_dumps({"a": [1, 2], "b": 1})
    assert a == b
    assert a.endswith("\n")


def test_document_errors_carry_paths(kb):
    with pytest.raises(vp.DocumentError) as err:
        serde.variation_from_doc({"type": "Interval", "lower": 1})
    assert "upper" in str(err.value)
    with pytest.raises(vp.DocumentError) as err:
        serde.env_from_doc(kb, {"instances": [{"id": "x"}]})
    assert err.value.path == "$.instances[0]"
    with pytest.raises(vp.DocumentError):
        serde.value_from_doc({"type": "Quaternion"})
    with pytest.raises(vp.DocumentError):
        serde.ontology_from_doc({"concepts": [{"id": "A", "parents": ["Missing"]}]})


def test_plan_with_empty_alternative_set_rejected(registry):
    with pytest.raises(vp.DocumentError):
        serde.plan_from_doc(registry, {"steps": [{"alternatives": []}]})


def test_comparison_doc_shape(kb):
    cmp = vp.compare_to_variation(vp.NumberValue(0.45), vp.IntervalVariation(0.28, 0.32), kb)
    doc = serde.comparison_to_doc(cmp)
    assert doc["equal"] is False
    assert doc["target"]["type"] == "Interval"
    assert doc["reasons"][0]["kind"] == "BoundViolation"
    assert doc["reasons"][0]["predicate"]["op"] == "LessEqual"
    json.dumps(doc)  # fully JSON-serializable


def test_answers_script_round_trip(tmp_path):
    doc = {"answers": [
        {"question": "q1", "value": True},
        {"question": "q5", "value": "interval"},
        {"question": "q7", "value": 0.28},
        {"value": {"type": "Number", "value": 1.5}},
    ]}
    parsed = serde.answers_from_doc(doc)
    assert parsed[0] == ("q1", True)
    assert parsed[1] == ("q5", "interval")
    assert parsed[2] == ("q7", 0.28)
    assert parsed[3] == (None, vp.NumberValue(1.5))


def test_transcript_doc(kb, registry):
    before, after = vp.milk_pour_snapshots(kb)
    session, first = vp.start_session(before, after, registry)
    done, _ = vp.run_script(session, first, vp.MILK_POUR_ANSWERS)
    doc = serde.transcript_to_doc(done)
    assert doc["complete"] is True
    assert doc["question_count"] == 10
    assert len(doc["history"]) == 10
    assert doc["history"][0]["question"]["id"] == "q1"
    assert doc["result"]["type"] == "EnvironmentDataRangeEntityVariation"
