from __future__ import annotations

import pytest

import varplan as vp
from varplan.planner import SkillAlternative, SkillAlternativeSet

from oracles import goal_environment, liquid_goal


def test_three_pour_durations_and_total(kb, registry):
    env = vp.bench_environment(kb, {"B": 0.06, "M": 0.1, "C1": 0.1, "C2": 0.02})
    goal = goal_environment(liquid_goal(vp.UnionVariation((
        vp.IntervalVariation(0.28, 0.32), vp.IntervalVariation(0.60, 0.80),
    ))))
    result = vp.plan(env, goal, registry)
    trace = vp.execute(result.plan, env, goal)
    transferred = sum(e.skill.bindings["amount"] for e in trace.entries)
    assert transferred == pytest.approx(0.22, abs=1e-9)
    assert sorted(e.duration for e in trace.entries) == pytest.approx([0.2, 1.0, 1.0], abs=1e-9)
    assert trace.total_duration == pytest.approx(2.2, abs=1e-9)
    for entry in trace.entries:
        assert entry.duration == pytest.approx(10 * entry.skill.bindings["amount"], abs=1e-12)


def test_empty_plan_on_satisfied_goal(kb, registry):
    env = kb.environment([vp.make_table(), vp.make_container("bowl", "Bowl", 0.3, 0.5)])
    goal = goal_environment(liquid_goal(vp.IntervalVariation(0.28, 0.32)))
    trace = vp.execute(vp.ExecutionPlan(), env, goal)
    assert trace.verdict.satisfied
    assert trace.total_duration == 0.0
    assert trace.entries == ()


def test_interdependent_plan_flagged_not_satisfied(kb, registry):
    env = kb.environment([
        vp.make_table(),
        vp.make_container("left", "Cup", 0.15, 0.5),
        vp.make_container("right", "Cup", 0.15, 0.5),
    ])
    wanting = liquid_goal(vp.FixedVariation(vp.NumberValue(0.3)), concept="Cup")
    goal = goal_environment(wanting, wanting)
    result = vp.plan(env, goal, registry)
    trace = vp.execute(result.plan, env, goal)
    assert not trace.verdict.satisfied
    comparison = trace.verdict.comparison
    assert comparison is not None and not comparison.match.satisfied
    # the verdict carries explanations for the unmatched variation
    unmatched = [i for i in range(2) if i not in comparison.match.assignment]
    assert unmatched
    witnesses = comparison.match.failure_witness[unmatched[0]]
    assert witnesses and all(not cmp.equal for _, cmp in witnesses)


def test_reexecution_is_bit_deterministic(kb, registry):
    env = vp.bench_environment(kb, {"B": 0.06, "M": 0.1, "C1": 0.1, "C2": 0.02})
    goal = goal_environment(liquid_goal(vp.IntervalVariation(0.28, 0.32)))
    result = vp.plan(env, goal, registry)
    first = vp.execute(result.plan, env, goal)
    second = vp.execute(result.plan, env, goal)
    assert first == second


def test_conservation_and_bounds_at_every_entry(kb, registry):
    env = vp.bench_environment(kb, {"B": 0.06, "M": 0.1, "C1": 0.1, "C2": 0.02})
    goal = goal_environment(liquid_goal(vp.IntervalVariation(0.28, 0.32)))
    result = vp.plan(env, goal, registry)
    total = sum(
        inst.values["contentLevel"].value
        for inst in env.instances.values() if "contentLevel" in inst.values
    )
    current = env
    for step in result.plan.steps:
        skill = step.alternatives[0].skill
        current = vp.apply_effects(skill, current)
        running = 0.0
        for inst in current.instances.values():
            if "contentLevel" not in inst.values:
                continue
            level = inst.values["contentLevel"].value
            volume = inst.values["contentVolume"].value
            assert -1e-9 <= level <= volume + 1e-9
            running += level
        assert abs(running - total) <= 1e-9 * max(1, result.plan.step_count)


def test_mid_plan_precondition_failure_stops_execution(kb, registry):
    env = kb.environment([
        vp.make_table(),
        vp.make_container("a", "Cup", 0.1, 0.3),
        vp.make_container("b", "Cup", 0.0, 0.3),
    ])
    impossible = vp.ExecutionPlan((
        SkillAlternativeSet((SkillAlternative(
            registry.instantiate("Pour", source="a", dest="b", amount=0.1)
        ),)),
        SkillAlternativeSet((SkillAlternative(
            registry.instantiate("Pour", source="a", dest="b", amount=0.3)
        ),)),
    ))
    trace = vp.execute(impossible, env)
    assert len(trace.entries) == 1
    assert trace.failure is not None and trace.failure.step_index == 1
    assert trace.failure.failures[0][0] == "Pour"
    assert trace.verdict is None  # no goal provided


def test_alternatives_fall_through_to_executable_one(kb, registry):
    env = kb.environment([
        vp.make_table(),
        vp.make_container("a", "Cup", 0.1, 0.3),
        vp.make_container("b", "Cup", 0.0, 0.3),
    ])
    step = SkillAlternativeSet((
        SkillAlternative(registry.instantiate("Pour", source="a", dest="b", amount=0.25)),
        SkillAlternative(registry.instantiate("Pour", source="a", dest="b", amount=0.1)),
    ))
    trace = vp.execute(vp.ExecutionPlan((step,)), env)
    assert trace.failure is None
    assert trace.entries[0].skill.bindings["amount"] == 0.1


def test_nested_precondition_plan_runs_first(kb, registry):
    # b cannot give 0.2 yet; the nested plan first moves 0.15 from a to b.
    env = kb.environment([
        vp.make_table(),
        vp.make_container("a", "Cup", 0.15, 0.3),
        vp.make_container("b", "Cup", 0.1, 0.3),
        vp.make_container("c", "Cup", 0.0, 0.3),
    ])
    nested = vp.ExecutionPlan((SkillAlternativeSet((SkillAlternative(
        registry.instantiate("Pour", source="a", dest="b", amount=0.15)
    ),)),))
    outer = vp.ExecutionPlan((SkillAlternativeSet((SkillAlternative(
        registry.instantiate("Pour", source="b", dest="c", amount=0.2),
        precondition_plan=nested,
    ),)),))
    assert outer.step_count == 2
    trace = vp.execute(outer, env)
    assert trace.failure is None
    assert [e.skill.bindings["amount"] for e in trace.entries] == [0.15, 0.2]
    assert vp.get_value(trace.final_env, "c", "contentLevel").value == pytest.approx(0.2)


def test_digests_chain_between_entries(kb, registry):
    env = vp.bench_environment(kb, {"B": 0.06, "M": 0.1, "C1": 0.1, "C2": 0.02})
    goal = goal_environment(liquid_goal(vp.IntervalVariation(0.28, 0.32)))
    result = vp.plan(env, goal, registry)
    trace = vp.execute(result.plan, env, goal)
    for previous, following in zip(trace.entries, trace.entries[1:]):
        assert previous.post_digest == following.pre_digest
    assert trace.total_duration == pytest.approx(sum(e.duration for e in trace.entries))
