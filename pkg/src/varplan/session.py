"""Interactive goal definition from a single before/after demonstration.

The session diffs the two snapshots, then walks a fixed question schedule:
one relevance question per changed entity, one per changed property of each
relevant entity, then per relevant property a variation-kind question and its
parameter questions, and finally two generalization questions per relevant
entity (target concept, include subconcepts). The answers assemble an
environment variation: one instance-properties variation per relevant entity
inside a type-A collection subset.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence, Union

from .comparison import compare_values
from .errors import InvalidAnswerError, NoChangesDetectedError, VarplanError
from .kb import (
    BooleanValue,
    ConceptValue,
    EnvironmentState,
    IntegerValue,
    Kind,
    LocationValue,
    NumberValue,
    PoseValue,
    Value,
)
from .skills import RecognitionResult, SkillRegistry, recognize_skills
from .variation import (
    CollectionSubsetVariation,
    ConceptVariation,
    EnvironmentVariation,
    FixedVariation,
    InstancePropertiesVariation,
    IntervalVariation,
    LocationBallVariation,
    PoseBallVariation,
    UnionVariation,
    Variation,
    WholeVariation,
    validate,
)

Answer = Union[bool, int, float, str, Value]


@dataclass(frozen=True)
class PropertyChange:
    property: str
    before: Value
    after: Value


@dataclass(frozen=True)
class DemonstrationDiff:
    """Entity-property changes between the two snapshots, plus recognized skills."""

    changed: tuple[tuple[str, tuple[PropertyChange, ...]], ...]
    recognized_skills: RecognitionResult


@dataclass(frozen=True)
class QuestionOption:
    id: str
    label: str


@dataclass(frozen=True)
class Question:
    id: str
    kind: str  # SelectRelevantEntities | SelectRelevantProperties | SelectVariationKind | ProvideParameters | GeneralizeConcept
    prompt: str
    options: tuple[QuestionOption, ...]
    default: Answer
    entity: str | None = None
    property: str | None = None
    variation_kind: str | None = None
    parameter: str | None = None
    free_form: str | None = None  # "number" | "value": accepts input beyond options


@dataclass(frozen=True)
class Session:
    id: str
    before: EnvironmentState
    after: EnvironmentState
    diff: DemonstrationDiff
    answers: tuple[Answer, ...] = ()
    pending: Question | None = None
    result: EnvironmentVariation | None = None

    @property
    def complete(self) -> bool:
        return self.result is not None

    @property
    def bound(self) -> int:
        return question_bound(self)

    def question_count(self) -> int:
        return len(self.answers)


# Variation kinds offered per value-domain kind, with their parameter schedule.
# Each parameter is (name, input type); input types: option | number | boolean | value.
_CLOSEDNESS = ("closed", "open", "closed_open", "open_closed")

_KIND_PARAMS: dict[str, tuple[tuple[str, str], ...]] = {
    "fixed": (("value", "value"),),
    "interval": (("closedness", "option"), ("lower", "number"), ("upper", "number")),
    "interval_union": (
        ("first_closedness", "option"),
        ("first_lower", "number"),
        ("first_upper", "number"),
        ("second_closedness", "option"),
        ("second_lower", "number"),
        ("second_upper", "number"),
    ),
    "ball": (("max_distance", "number"), ("max_angle", "number")),
    "whole": (),
}

_KINDS_BY_DOMAIN: dict[Kind, tuple[str, ...]] = {
    Kind.NUMBER: ("fixed", "interval", "interval_union", "whole"),
    Kind.INTEGER: ("fixed", "interval", "interval_union", "whole"),
    Kind.BOOLEAN: ("fixed", "whole"),
    Kind.CONCEPT: ("fixed", "whole"),
    Kind.POSE: ("fixed", "ball", "whole"),
    Kind.LOCATION: ("fixed", "ball", "whole"),
    Kind.INSTANCE_REF: ("fixed", "whole"),
    Kind.COLLECTION: ("fixed", "whole"),
}


def kinds_for_domain(domain: Kind) -> tuple[str, ...]:
    return _KINDS_BY_DOMAIN[domain]


def max_parameters(domain: Kind) -> int:
    return max(len(_KIND_PARAMS[k]) for k in _KINDS_BY_DOMAIN[domain])


def compute_diff(
    before: EnvironmentState,
    after: EnvironmentState,
    registry: SkillRegistry | None = None,
) -> DemonstrationDiff:
    """Changed properties per entity, ordered by id and resolved-property order."""
    if before.kb is not after.kb:
        raise VarplanError("before and after snapshots must share one ontology")
    changed: list[tuple[str, tuple[PropertyChange, ...]]] = []
    for instance_id in sorted(set(before.instances) & set(after.instances)):
        b = before.instances[instance_id]
        a = after.instances[instance_id]
        deltas = []
        for prop in before.kb.resolved_properties(b.concept):
            cmp = compare_values(b.values[prop.name], a.values[prop.name])
            if not cmp.equal:
                deltas.append(PropertyChange(prop.name, b.values[prop.name], a.values[prop.name]))
        if deltas:
            changed.append((instance_id, tuple(deltas)))
    recognition = RecognitionResult((), ())
    if registry is not None:
        recognition = recognize_skills([before, after], registry)
    return DemonstrationDiff(tuple(changed), recognition)


def start_session(
    before: EnvironmentState,
    after: EnvironmentState,
    registry: SkillRegistry | None = None,
    session_id: str = "session-1",
) -> tuple[Session, Question]:
    diff = compute_diff(before, after, registry)
    if not diff.changed:
        raise NoChangesDetectedError("before and after snapshots are identical")
    session = Session(session_id, before, after, diff)
    outcome = _advance(session)
    assert isinstance(outcome, Question)
    return replace(session, pending=outcome), outcome


def answer(session: Session, value: Answer) -> tuple[Session, Union[Question, EnvironmentVariation]]:
    """Apply one answer; returns the next question or the completed variation.

    An invalid answer raises and leaves the session unchanged.
    """
    if session.pending is None:
        raise InvalidAnswerError("session is already complete")
    _validate_answer(session, session.pending, value)
    advanced = replace(session, answers=session.answers + (value,))
    outcome = _advance(advanced)
    if isinstance(outcome, Question):
        return replace(advanced, pending=outcome), outcome
    issues = validate(outcome, Kind.ENVIRONMENT, session.before.kb)
    assert not issues, issues
    done = replace(advanced, pending=None, result=outcome)
    return done, outcome


def question_bound(session: Session) -> int:
    """Worst-case schedule length for this diff.

    Grows as entities x properties x parameters-per-variation-kind: one
    relevance question per changed entity, one per changed property, a kind
    question plus up to max_parameters(domain) per property, and two
    generalization questions per entity.
    """
    kb = session.before.kb
    total = 0
    for entity_id, changes in session.diff.changed:
        concept = session.before.instances[entity_id].concept
        total += 1  # entity relevance
        total += 2  # generalization: concept + include-subconcepts
        for change in changes:
            domain = kb.property_def(concept, change.property).domain
            total += 1  # property relevance
            total += 1 + max_parameters(domain)  # kind + its parameters
    return total


# --- schedule ---------------------------------------------------------------

class _Feed:
    """Replays recorded answers; raises _Need with the next question otherwise."""

    def __init__(self, session: Session):
        self.session = session
        self.index = 0

    def ask(self, build_question) -> Answer:
        if self.index < len(self.session.answers):
            value = self.session.answers[self.index]
            self.index += 1
            return value
        question = build_question(f"q{self.index + 1}")
        raise _Need(question)


class _Need(Exception):
    def __init__(self, question: Question):
        self.question = question


def _advance(session: Session) -> Union[Question, EnvironmentVariation]:
    try:
        return _run_schedule(session, _Feed(session))
    except _Need as need:
        return need.question


def _run_schedule(session: Session, feed: _Feed) -> EnvironmentVariation:
    kb = session.before.kb
    relevant_entities: list[str] = []
    for entity_id, _ in session.diff.changed:
        picked = feed.ask(lambda qid, e=entity_id: Question(
            id=qid,
            kind="SelectRelevantEntities",
            prompt=f"Is {e} relevant to the goal?",
            options=_YES_NO,
            default=True,
            entity=e,
        ))
        if picked is True or picked == "yes":
            relevant_entities.append(entity_id)

    elements: list[Variation] = []
    property_choices: dict[str, dict[str, Variation]] = {}
    for entity_id, changes in session.diff.changed:
        if entity_id not in relevant_entities:
            continue
        concept = session.before.instances[entity_id].concept
        relevant_props: list[PropertyChange] = []
        for change in changes:
            picked = feed.ask(lambda qid, e=entity_id, p=change.property: Question(
                id=qid,
                kind="SelectRelevantProperties",
                prompt=f"Is the change of {e}.{p} relevant to the goal?",
                options=_YES_NO,
                default=True,
                entity=e,
                property=p,
            ))
            if picked is True or picked == "yes":
                relevant_props.append(change)
        chosen: dict[str, Variation] = {}
        for change in relevant_props:
            domain = kb.property_def(concept, change.property).domain
            chosen[change.property] = _ask_property_variation(
                feed, session, entity_id, change, domain
            )
        property_choices[entity_id] = chosen

    for entity_id in relevant_entities:
        concept = session.before.instances[entity_id].concept
        ancestry = kb.ancestors(concept)
        target = feed.ask(lambda qid, e=entity_id, opts=ancestry: Question(
            id=qid,
            kind="GeneralizeConcept",
            prompt=f"Generalize {e} to which concept?",
            options=tuple(QuestionOption(c, c) for c in opts),
            default=opts[0],
            entity=e,
        ))
        include = feed.ask(lambda qid, e=entity_id: Question(
            id=qid,
            kind="GeneralizeConcept",
            prompt=f"Should subconcepts of the chosen concept also match for {e}?",
            options=_YES_NO,
            default=True,
            entity=e,
        ))
        elements.append(InstancePropertiesVariation(
            ConceptVariation(str(target), include is True or include == "yes"),
            property_choices[entity_id],
        ))

    return EnvironmentVariation(CollectionSubsetVariation(tuple(elements)))


_YES_NO = (QuestionOption("yes", "yes"), QuestionOption("no", "no"))


def _ask_property_variation(
    feed: _Feed, session: Session, entity_id: str, change: PropertyChange, domain: Kind
) -> Variation:
    kinds = kinds_for_domain(domain)
    default_kind = "interval" if domain in (Kind.NUMBER, Kind.INTEGER) else "fixed"
    kind = feed.ask(lambda qid: Question(
        id=qid,
        kind="SelectVariationKind",
        prompt=f"Which variation should constrain {entity_id}.{change.property}?",
        options=tuple(QuestionOption(k, k.replace("_", " ")) for k in kinds),
        default=default_kind,
        entity=entity_id,
        property=change.property,
    ))
    kind = str(kind)
    params: dict[str, Answer] = {}
    for name, input_type in _KIND_PARAMS[kind]:
        params[name] = feed.ask(lambda qid, n=name, t=input_type, k=kind: Question(
            id=qid,
            kind="ProvideParameters",
            prompt=f"Parameter {n} for the {k} variation of {entity_id}.{change.property}",
            options=_param_options(t, change, domain, session),
            default=_param_default(n, t, change, domain),
            entity=entity_id,
            property=change.property,
            variation_kind=k,
            parameter=n,
            free_form=t if t in ("number", "value") else None,
        ))
    return _assemble(kind, params, change, domain)


def _param_options(input_type: str, change: PropertyChange, domain: Kind, session: Session):
    if input_type == "option":
        return tuple(QuestionOption(c, c.replace("_", "-")) for c in _CLOSEDNESS)
    if input_type == "number":
        final = _final_number(change)
        spread = abs(final) * 0.1
        return (
            QuestionOption(_fmt(final - spread), f"{_fmt(final - spread)} (final -10%)"),
            QuestionOption(_fmt(final), f"{_fmt(final)} (final value)"),
            QuestionOption(_fmt(final + spread), f"{_fmt(final + spread)} (final +10%)"),
        )
    # free-form value: enumerable domains list their members, others suggest
    # the demonstrated final value
    if domain is Kind.CONCEPT:
        return tuple(
            QuestionOption(c.id, c.id) for c in session.before.kb.concepts()
        )
    if domain is Kind.INSTANCE_REF:
        return tuple(
            QuestionOption(i, i) for i in session.before.instances
        )
    if domain is Kind.BOOLEAN:
        return (QuestionOption("true", "true"), QuestionOption("false", "false"))
    return (QuestionOption("final", "demonstrated final value"),)


def _param_default(name: str, input_type: str, change: PropertyChange, domain: Kind) -> Answer:
    if input_type == "option":
        return "closed"
    if input_type == "value":
        return change.after
    final = _final_number(change)
    spread = abs(final) * 0.1
    if name.endswith("lower"):
        return final - spread
    if name.endswith("upper"):
        return final + spread
    if name == "max_distance":
        return 0.05
    if name == "max_angle":
        return 0.3
    return final


def _final_number(change: PropertyChange) -> float:
    if isinstance(change.after, (NumberValue, IntegerValue)):
        return float(change.after.value)
    return 0.0


def _fmt(x: float) -> str:
    return format(round(x, 9), "g")


def _closedness(token: str) -> tuple[bool, bool]:
    return {
        "closed": (True, True),
        "open": (False, False),
        "closed_open": (True, False),
        "open_closed": (False, True),
    }[str(token)]


def _assemble(kind: str, params: Mapping[str, Answer], change: PropertyChange, domain: Kind) -> Variation:
    if kind == "whole":
        return WholeVariation()
    if kind == "fixed":
        return FixedVariation(_as_value(params["value"], change, domain))
    if kind == "interval":
        lc, uc = _closedness(params["closedness"])
        return IntervalVariation(float(params["lower"]), float(params["upper"]), lc, uc)
    if kind == "interval_union":
        lc1, uc1 = _closedness(params["first_closedness"])
        lc2, uc2 = _closedness(params["second_closedness"])
        return UnionVariation((
            IntervalVariation(float(params["first_lower"]), float(params["first_upper"]), lc1, uc1),
            IntervalVariation(float(params["second_lower"]), float(params["second_upper"]), lc2, uc2),
        ))
    if kind == "ball":
        distance = float(params["max_distance"])
        angle = float(params["max_angle"])
        if domain is Kind.POSE:
            assert isinstance(change.after, PoseValue)
            return PoseBallVariation(change.after.pose, distance, angle)
        assert isinstance(change.after, LocationValue)
        return LocationBallVariation(
            change.after.reference,
            PoseBallVariation(change.after.delta, distance, angle),
        )
    raise InvalidAnswerError(f"unknown variation kind {kind!r}")


def _as_value(raw: Answer, change: PropertyChange, domain: Kind) -> Value:
    if raw == "final":
        return change.after
    if domain is Kind.BOOLEAN and raw in ("true", "false"):
        return BooleanValue(raw == "true")
    if domain is Kind.NUMBER and isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return NumberValue(float(raw))
    if domain is Kind.INTEGER and isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return IntegerValue(int(raw))
    if domain is Kind.BOOLEAN and isinstance(raw, bool):
        return BooleanValue(raw)
    if domain is Kind.CONCEPT and isinstance(raw, str):
        return ConceptValue(raw)
    if isinstance(raw, (NumberValue, IntegerValue, BooleanValue, ConceptValue,
                        PoseValue, LocationValue)):
        return raw
    if hasattr(raw, "kind"):
        return raw  # already a structured Value
    raise InvalidAnswerError(f"cannot interpret {raw!r} as a {domain.value} value")


def _validate_answer(session: Session, question: Question, value: Answer) -> None:
    option_ids = {o.id for o in question.options}
    if question.free_form == "number":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidAnswerError(f"{question.id}: expected a number, got {value!r}")
        _validate_parameter_range(session, question, float(value))
        return
    if question.free_form == "value":
        if isinstance(value, str) and value not in option_ids:
            raise InvalidAnswerError(f"{question.id}: {value!r} is not an offered option")
        return
    if isinstance(value, bool):
        if option_ids == {"yes", "no"}:
            return
        raise InvalidAnswerError(f"{question.id}: expected one of {sorted(option_ids)}")
    if isinstance(value, str):
        if value not in option_ids:
            raise InvalidAnswerError(f"{question.id}: {value!r} is not an offered option")
        return
    raise InvalidAnswerError(f"{question.id}: expected one of {sorted(option_ids)}")


def _validate_parameter_range(session: Session, question: Question, value: float) -> None:
    """Reject parameters that would assemble an invalid variation.

    Interval parameters arrive in order (closedness, lower, upper), so the
    bound and closedness an upper bound must respect are the most recent
    answers.
    """
    name = question.parameter or ""
    if name.endswith("upper"):
        lower = session.answers[-1]
        closedness = session.answers[-2]
        assert isinstance(lower, (int, float))
        if value < lower:
            raise InvalidAnswerError(
                f"{question.id}: upper bound {value} below lower bound {lower}"
            )
        if value == lower and closedness != "closed":
            raise InvalidAnswerError(
                f"{question.id}: equal bounds need a fully closed interval"
            )
    if name == "max_distance" and value < 0:
        raise InvalidAnswerError(f"{question.id}: distance must be non-negative")
    if name == "max_angle" and not 0 <= value <= math.pi:
        raise InvalidAnswerError(f"{question.id}: angle must be within [0, pi]")


def run_script(
    session: Session, first: Question, answers: Sequence[Answer]
) -> tuple[Session, EnvironmentVariation]:
    """Drive a session with a prerecorded answer list until completion."""
    current = session
    outcome: Union[Question, EnvironmentVariation] = first
    for item in answers:
        if not isinstance(outcome, Question):
            raise InvalidAnswerError("script continues past completion")
        current, outcome = answer(current, item)
    if isinstance(outcome, Question):
        raise InvalidAnswerError(f"script ended early; next question is {outcome.id}")
    return current, outcome


def history(session: Session) -> list[tuple[Question, Answer]]:
    """Replay the schedule to recover every question asked with its answer."""
    out: list[tuple[Question, Answer]] = []
    for length in range(len(session.answers)):
        partial = replace(session, answers=session.answers[:length], pending=None, result=None)
        outcome = _advance(partial)
        assert isinstance(outcome, Question)
        out.append((outcome, session.answers[length]))
    return out
