from __future__ import annotations

import pytest

import varplan as vp
from varplan import serde
from varplan.session import history

from oracles import goal_environment, liquid_goal


def test_first_question_lists_changed_entities(kb, registry, milk_snapshots):
    before, after = milk_snapshots
    session, question = vp.start_session(before, after, registry)
    # bowl and milk carton changed; the bowl (first by id) is asked about first
    changed = [entity for entity, _ in session.diff.changed]
    assert changed == ["bowl", "milk_carton"]
    assert question.kind == "SelectRelevantEntities"
    assert question.entity == "bowl"


def test_no_changes_detected(kb, registry, milk_snapshots):
    before, _ = milk_snapshots
    with pytest.raises(vp.NoChangesDetectedError):
        vp.start_session(before, before, registry)


def test_accidentally_moved_bowl_lists_both_properties(kb, registry, milk_snapshots):
    before, after = milk_snapshots
    session, _ = vp.start_session(before, after, registry)
    changed = dict(session.diff.changed)
    assert {c.property for c in changed["bowl"]} == {"contentLevel", "location"}
    assert {c.property for c in changed["milk_carton"]} == {"contentLevel"}


def test_diff_recognizes_the_pour(kb, registry, milk_snapshots):
    before, after = milk_snapshots
    session, _ = vp.start_session(before, after, registry)
    recognized = session.diff.recognized_skills.recognized
    assert len(recognized) == 1
    assert recognized[0].skill.bindings["source"] == "milk_carton"
    assert recognized[0].skill.bindings["dest"] == "bowl"
    assert recognized[0].skill.bindings["amount"] == pytest.approx(0.3)


def test_milk_pour_script_is_ten_questions(kb, registry, milk_snapshots):
    before, after = milk_snapshots
    session, first = vp.start_session(before, after, registry)
    done, variation = vp.run_script(session, first, vp.MILK_POUR_ANSWERS)
    assert done.question_count() == 10
    assert done.complete
    expected = goal_environment(liquid_goal(vp.IntervalVariation(0.28, 0.32)))
    assert variation == expected


def test_non_offered_option_rejected_session_unchanged(kb, registry, milk_snapshots):
    before, after = milk_snapshots
    session, question = vp.start_session(before, after, registry)
    with pytest.raises(vp.InvalidAnswerError):
        vp.answer(session, "maybe")
    assert session.pending == question
    assert session.answers == ()


def test_wrong_typed_parameter_rejected(kb, registry, milk_snapshots):
    before, after = milk_snapshots
    session, first = vp.start_session(before, after, registry)
    # navigate to the lower-bound question
    for value in (True, False, False, True, "interval", "closed"):
        session, _ = vp.answer(session, value)
    with pytest.raises(vp.InvalidAnswerError):
        vp.answer(session, "small")


def test_upper_bound_below_lower_rejected(kb, registry, milk_snapshots):
    before, after = milk_snapshots
    session, first = vp.start_session(before, after, registry)
    for value in (True, False, False, True, "interval", "closed", 0.30):
        session, _ = vp.answer(session, value)
    with pytest.raises(vp.InvalidAnswerError):
        vp.answer(session, 0.22)
    # equal bounds are fine only when the interval is fully closed
    done, variation = vp.run_script(
        session, session.pending, (0.30, "LiquidContainer", True)
    )
    element = variation.entity_collection_variation.element_variations[0]
    assert element.property_variations["contentLevel"] == vp.IntervalVariation(0.3, 0.3)


def test_equal_bounds_with_open_end_rejected(kb, registry, milk_snapshots):
    before, after = milk_snapshots
    session, _ = vp.start_session(before, after, registry)
    for value in (True, False, False, True, "interval", "open", 0.30):
        session, _ = vp.answer(session, value)
    with pytest.raises(vp.InvalidAnswerError):
        vp.answer(session, 0.30)


def test_ball_parameters_range_checked(kb, registry, milk_snapshots):
    before, after = milk_snapshots
    session, _ = vp.start_session(before, after, registry)
    # keep only the bowl's location change and pick the ball kind
    for value in (True, False, True, False, "ball"):
        session, _ = vp.answer(session, value)
    with pytest.raises(vp.InvalidAnswerError):
        vp.answer(session, -0.1)  # negative distance
    session, _ = vp.answer(session, 0.05)
    with pytest.raises(vp.InvalidAnswerError):
        vp.answer(session, 7.0)  # angle beyond pi
    done, variation = vp.run_script(session, session.pending, (0.3, "Bowl", True))
    element = variation.entity_collection_variation.element_variations[0]
    ball = element.property_variations["location"]
    assert isinstance(ball, vp.LocationBallVariation)
    assert ball.reference == "table"
    assert vp.contains(ball, after.instances["bowl"].values["location"], kb)


def test_fixed_concept_property_offers_concept_options(kb, registry):
    def scene(color):
        base = vp.make_container("bowl", "Bowl", 0.1, 0.5)
        values = {**base.values, "color": vp.ConceptValue(color)}
        return kb.environment([vp.make_table(), vp.Instance("bowl", "Bowl", values)])

    session, first = vp.start_session(scene("White"), scene("Red"), registry)
    current, outcome = session, first
    for value in (True, True, "fixed"):
        current, outcome = vp.answer(current, value)
    assert outcome.free_form == "value"
    assert "Red" in [o.id for o in outcome.options]
    done, variation = vp.run_script(current, outcome, ("Red", "Bowl", True))
    element = variation.entity_collection_variation.element_variations[0]
    assert element.property_variations["color"] == vp.FixedVariation(vp.ConceptValue("Red"))


def test_zero_relevant_entities_yields_whole_environment_variation(kb, registry, milk_snapshots):
    before, after = milk_snapshots
    session, first = vp.start_session(before, after, registry)
    done, variation = vp.run_script(session, first, (False, False))
    assert variation == goal_environment()
    # vacuous type-A membership: any environment satisfies it
    for env in (before, after):
        result = vp.collection_member(
            env.instances.values(), variation.entity_collection_variation, kb
        )
        assert result.satisfied


def test_question_bound_dominates_script_length(kb, registry, milk_snapshots):
    before, after = milk_snapshots
    session, first = vp.start_session(before, after, registry)
    bound = vp.question_bound(session)
    assert bound >= 10
    done, _ = vp.run_script(session, first, vp.MILK_POUR_ANSWERS)
    assert done.question_count() <= bound


def test_question_bound_empty_diff_is_zero(kb, registry, milk_snapshots):
    before, after = milk_snapshots
    session, _ = vp.start_session(before, after, registry)
    empty = vp.Session("empty", before, before, vp.DemonstrationDiff((), session.diff.recognized_skills))
    assert vp.question_bound(empty) == 0


def test_single_boolean_property_bound_is_exact(kb, registry):
    # One entity, one changed Boolean property: fixed is the largest variation
    # kind for that domain (one parameter), so the worst-case schedule is the
    # all-defaults schedule and the bound is exactly its length.
    def scene(dirty):
        return kb.environment([
            vp.make_table(),
            vp.Instance("spoon", "Spoon", {
                **vp.defaults.make_object_values(),
                "dirty": vp.BooleanValue(dirty),
            }),
        ])

    session, first = vp.start_session(scene(False), scene(True), registry)
    assert vp.question_bound(session) == 6
    done, variation = vp.run_script(
        session, first, (True, True, "fixed", True, "Spoon", True)
    )
    assert done.question_count() == 6
    element = variation.entity_collection_variation.element_variations[0]
    assert element.property_variations["dirty"] == vp.FixedVariation(vp.BooleanValue(True))


def test_identical_scripts_identical_documents(kb, registry, milk_snapshots):
    before, after = milk_snapshots
    outputs = []
    for _ in range(2):
        session, first = vp.start_session(before, after, registry)
        _, variation = vp.run_script(session, first, vp.MILK_POUR_ANSWERS)
        outputs.append(serde.canonical_dumps(serde.variation_to_doc(variation)))
    assert outputs[0] == outputs[1]


def all_defaults_script(session, first):
    answers = []
    current, outcome = session, first
    while isinstance(outcome, vp.Question):
        answers.append(outcome.default)
        current, outcome = vp.answer(current, outcome.default)
    return current, outcome, answers


def test_all_defaults_result_validates_and_contains_after_env(kb, registry, milk_snapshots):
    before, after = milk_snapshots
    session, first = vp.start_session(before, after, registry)
    done, variation, answers = all_defaults_script(session, first)
    assert vp.validate(variation, vp.Kind.ENVIRONMENT, kb) == []
    assert vp.contains(variation, vp.EnvironmentValue(after), kb)
    assert done.question_count() == len(answers) <= vp.question_bound(done)


def test_generalization_options_cover_ancestry(kb, registry, milk_snapshots):
    before, after = milk_snapshots
    session, first = vp.start_session(before, after, registry)
    current, outcome = session, first
    for value in (True, False, False, True, "interval", "closed", 0.28, 0.32):
        current, outcome = vp.answer(current, value)
    assert outcome.kind == "GeneralizeConcept"
    option_ids = [o.id for o in outcome.options]
    assert option_ids == ["Bowl", "LiquidContainer", "Container", "Object", "PhysicalEntity"]


def test_history_replays_questions_and_answers(kb, registry, milk_snapshots):
    before, after = milk_snapshots
    session, first = vp.start_session(before, after, registry)
    done, _ = vp.run_script(session, first, vp.MILK_POUR_ANSWERS)
    entries = history(done)
    assert len(entries) == 10
    assert entries[0][0].id == "q1"
    assert [a for _, a in entries] == list(vp.MILK_POUR_ANSWERS)


def test_answers_after_completion_rejected(kb, registry, milk_snapshots):
    before, after = milk_snapshots
    session, first = vp.start_session(before, after, registry)
    done, _ = vp.run_script(session, first, vp.MILK_POUR_ANSWERS)
    with pytest.raises(vp.InvalidAnswerError):
        vp.answer(done, True)
