"""Action and skill registry: effects, preconditions, checks, recognition.

Actions describe what changes (effects on entity properties); skills describe
how an agent enacts an action, adding preconditions and observable checks.
Checks are predicates over property deltas between two snapshots, which makes
skills recognizable from an observed before/after pair.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from . import expr
from .comparison import (
    Comparison,
    Predicate,
    PropertyDifference,
    Reason,
    ReasonKind,
    compare_to_variation,
)
from .errors import (
    DomainMismatchError,
    PreconditionViolatedError,
    VarplanError,
)
from .kb import (
    BooleanValue,
    EnvironmentState,
    IntegerValue,
    Kind,
    KnowledgeBase,
    NumberValue,
    Value,
    set_value,
    values_equal,
)
from .variation import FixedVariation

#: Tolerance when matching observed deltas to skill check amounts, in liters.
RECOGNITION_EPS = 1e-6


@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: Kind
    unit: str | None = None
    concept: str | None = None  # for InstanceRef params: required concept


@dataclass(frozen=True)
class ActionTemplate:
    id: str
    affected_properties: tuple[tuple[str, str], ...]  # (concept, property)
    parameters: tuple[ParamSpec, ...] = ()


@dataclass(frozen=True)
class SkillTemplate:
    id: str
    implements: tuple[str, ...]
    parameters: tuple[ParamSpec, ...]
    preconditions: tuple[expr.Cmp, ...] = ()
    effects: tuple[expr.Assign, ...] = ()
    checks: tuple[Union[expr.Cmp, expr.Becomes], ...] = ()
    duration: expr.Expr = expr.Num(0.0)

    def param(self, name: str) -> ParamSpec:
        for p in self.parameters:
            if p.name == name:
                return p
        raise DomainMismatchError(f"{self.id}: unknown parameter {name!r}")

    def number_params(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.parameters if p.kind is Kind.NUMBER)

    def instance_params(self) -> tuple[ParamSpec, ...]:
        return tuple(p for p in self.parameters if p.kind is Kind.INSTANCE_REF)


@dataclass(frozen=True)
class SkillInstance:
    """A skill template with all parameters bound; duration is derived."""

    template: SkillTemplate
    bindings: Mapping[str, object]
    duration: float


class SkillRegistry:
    """Immutable-after-load store of action and skill templates."""

    def __init__(self):
        self._actions: dict[str, ActionTemplate] = {}
        self._skills: dict[str, SkillTemplate] = {}

    def register_action(self, action: ActionTemplate) -> None:
        self._actions[action.id] = action

    def register_skill(self, skill: SkillTemplate) -> None:
        effect_props = {e.prop.prop for e in skill.effects}
        for action_id in skill.implements:
            action = self.action(action_id)
            for _, prop in action.affected_properties:
                if prop not in effect_props:
                    raise VarplanError(
                        f"skill {skill.id!r} implements {action_id!r} but has no "
                        f"effect on {prop!r}"
                    )
        self._skills[skill.id] = skill

    def action(self, action_id: str) -> ActionTemplate:
        try:
            return self._actions[action_id]
        except KeyError:
            raise VarplanError(f"unknown action {action_id!r}") from None

    def skill(self, skill_id: str) -> SkillTemplate:
        try:
            return self._skills[skill_id]
        except KeyError:
            raise VarplanError(f"unknown skill {skill_id!r}") from None

    def actions(self) -> tuple[ActionTemplate, ...]:
        return tuple(self._actions[a] for a in sorted(self._actions))

    def skills(self) -> tuple[SkillTemplate, ...]:
        return tuple(self._skills[s] for s in sorted(self._skills))

    def actions_for_property(
        self, kb: KnowledgeBase, concept: str, prop: str
    ) -> list[ActionTemplate]:
        """Actions whose effects cover the property on this concept or an ancestor."""
        kb.property_def(concept, prop)
        out = []
        for action in self.actions():
            for action_concept, action_prop in action.affected_properties:
                if action_prop == prop and kb.is_subconcept(concept, action_concept):
                    out.append(action)
                    break
        return out

    def skills_implementing(self, action_id: str) -> list[SkillTemplate]:
        return [s for s in self.skills() if action_id in s.implements]

    def instantiate(self, skill_id: str, **bindings) -> SkillInstance:
        skill = self.skill(skill_id)
        return instantiate(skill, bindings)


def instantiate(skill: SkillTemplate, bindings: Mapping[str, object]) -> SkillInstance:
    """Bind parameters, validate their shape, derive the duration."""
    for p in skill.parameters:
        if p.name not in bindings:
            raise DomainMismatchError(f"{skill.id}: missing binding for {p.name!r}")
        value = bindings[p.name]
        if p.kind is Kind.INSTANCE_REF and not isinstance(value, str):
            raise DomainMismatchError(f"{skill.id}.{p.name}: expected an instance id")
        if p.kind is Kind.NUMBER and not isinstance(value, (int, float)):
            raise DomainMismatchError(f"{skill.id}.{p.name}: expected a number")
        if p.kind is Kind.BOOLEAN and not isinstance(value, bool):
            raise DomainMismatchError(f"{skill.id}.{p.name}: expected a boolean")
    extra = set(bindings) - {p.name for p in skill.parameters}
    if extra:
        raise DomainMismatchError(f"{skill.id}: unknown bindings {sorted(extra)}")
    duration = float(expr.eval_expr(skill.duration, dict(bindings), None))
    return SkillInstance(skill, dict(bindings), duration)


def _resolve_bindings(si: SkillInstance, env: EnvironmentState) -> None:
    for p in si.template.instance_params():
        instance_id = si.bindings[p.name]
        inst = env.instance(instance_id)  # raises UnknownInstanceError
        if p.concept is not None and not env.kb.is_subconcept(inst.concept, p.concept):
            raise DomainMismatchError(
                f"{si.template.id}.{p.name}: {instance_id!r} is a {inst.concept}, "
                f"expected {p.concept}"
            )


def check_preconditions(si: SkillInstance, env: EnvironmentState) -> list[Comparison]:
    """Evaluate all preconditions; the returned list holds only failing ones."""
    _resolve_bindings(si, env)
    bindings = dict(si.bindings)
    failing: list[Comparison] = []
    for cond in si.template.preconditions:
        ok, left, right = expr.eval_cmp(cond, bindings, env)
        if not ok:
            predicate = Predicate(expr.CMP_PREDICATE[cond.op], (left, right))
            detail = Comparison(BooleanValue(True), BooleanValue(False), False)
            failing.append(Comparison(
                target=BooleanValue(True),
                value=BooleanValue(False),
                equal=False,
                reasons=(Reason(ReasonKind.BOUND_VIOLATION, predicate, detail),),
            ))
    return failing


def apply_effects(si: SkillInstance, env: EnvironmentState) -> EnvironmentState:
    """Apply the skill's effects; preconditions must pass first."""
    failing = check_preconditions(si, env)
    if failing:
        raise PreconditionViolatedError(
            f"{si.template.id}: {len(failing)} precondition(s) failed"
        )
    bindings = dict(si.bindings)
    for effect in si.template.effects:
        instance_id = bindings[effect.prop.param]
        raw = expr.eval_expr(effect.value, bindings, env)
        if effect.op == "=":
            new = raw
        else:
            current = expr.eval_expr(effect.prop, bindings, env)
            new = current + raw if effect.op == "+=" else current - raw
        env = set_value(env, instance_id, effect.prop.prop, _wrap(env, instance_id, effect.prop.prop, new))
    return env


def _wrap(env: EnvironmentState, instance_id: str, prop: str, raw) -> Value:
    domain = env.kb.property_def(env.instance(instance_id).concept, prop).domain
    if domain is Kind.NUMBER:
        return NumberValue(float(raw))
    if domain is Kind.INTEGER:
        return IntegerValue(int(raw))
    if domain is Kind.BOOLEAN:
        return BooleanValue(bool(raw))
    if isinstance(raw, (NumberValue, IntegerValue, BooleanValue)):
        return raw
    return raw  # already a Value for structured domains


# --- recognition over snapshot pairs -----------------------------------------

@dataclass(frozen=True)
class RecognizedSkill:
    interval: tuple[int, int]
    skill: SkillInstance


@dataclass(frozen=True)
class ResidualChange:
    """A property change no skill check accounts for."""

    interval: tuple[int, int]
    difference: PropertyDifference


@dataclass(frozen=True)
class RecognitionResult:
    recognized: tuple[RecognizedSkill, ...]
    residuals: tuple[ResidualChange, ...]


@dataclass(frozen=True)
class _DeltaCheck:
    """delta(param.prop) == coefficient * amount_param + constant"""

    param: str
    prop: str
    coefficient: float
    constant: float
    amount_param: str | None


def _structured_checks(skill: SkillTemplate) -> tuple[list[_DeltaCheck], list[expr.Becomes]]:
    numeric: list[_DeltaCheck] = []
    becomes: list[expr.Becomes] = []
    amount_params = skill.number_params()
    for check in skill.checks:
        if isinstance(check, expr.Becomes):
            becomes.append(check)
            continue
        if not (check.op == "==" and isinstance(check.left, expr.Delta)):
            raise VarplanError(
                f"{skill.id}: unsupported check {expr.unparse(check)!r}"
            )
        prop = check.left.prop
        # The right side must be linear in at most one numeric parameter;
        # probing at 0 and 1 recovers constant and coefficient.
        used = [p for p in amount_params if _mentions(check.right, p)]
        if len(used) > 1:
            raise VarplanError(f"{skill.id}: check uses several numeric parameters")
        amount = used[0] if used else None
        base = {p: 0.0 for p in amount_params}
        constant = expr.eval_expr(check.right, base, None)
        if amount is not None:
            probe = dict(base)
            probe[amount] = 1.0
            coefficient = expr.eval_expr(check.right, probe, None) - constant
        else:
            coefficient = 0.0
        numeric.append(_DeltaCheck(prop.param, prop.prop, coefficient, constant, amount))
    return numeric, becomes


def _mentions(node, param: str) -> bool:
    if isinstance(node, expr.Param):
        return node.name == param
    if isinstance(node, expr.Neg):
        return _mentions(node.operand, param)
    if isinstance(node, expr.Bin):
        return _mentions(node.left, param) or _mentions(node.right, param)
    return False


@dataclass
class _PairDiff:
    numeric: dict[tuple[str, str], float]
    other: dict[tuple[str, str], tuple[Value, Value]]  # (before, after)


def _diff_pair(before: EnvironmentState, after: EnvironmentState) -> _PairDiff:
    numeric: dict[tuple[str, str], float] = {}
    other: dict[tuple[str, str], tuple[Value, Value]] = {}
    for instance_id in sorted(set(before.instances) & set(after.instances)):
        b, a = before.instances[instance_id], after.instances[instance_id]
        for prop in before.kb.resolved_properties(b.concept):
            vb, va = b.values[prop.name], a.values[prop.name]
            if values_equal(vb, va):
                continue
            if isinstance(vb, NumberValue) and isinstance(va, NumberValue):
                numeric[(instance_id, prop.name)] = va.value - vb.value
            else:
                other[(instance_id, prop.name)] = (vb, va)
    return _PairDiff(numeric, other)


def _try_bind(
    skill: SkillTemplate,
    numeric_checks: list[_DeltaCheck],
    becomes_checks: list[expr.Becomes],
    diff: _PairDiff,
    env: EnvironmentState,
) -> SkillInstance | None:
    instance_params = skill.instance_params()
    candidates: list[list[str]] = []
    for p in instance_params:
        ids = [
            i.id
            for i in env.instances.values()
            if p.concept is None or env.kb.is_subconcept(i.concept, p.concept)
        ]
        candidates.append(sorted(ids))

    def assign(index: int, chosen: dict[str, str]):
        if index == len(instance_params):
            si = _solve_amounts(skill, numeric_checks, becomes_checks, diff, env, chosen)
            return si
        for inst_id in candidates[index]:
            if inst_id in chosen.values():
                continue
            chosen[instance_params[index].name] = inst_id
            si = assign(index + 1, chosen)
            if si is not None:
                return si
            del chosen[instance_params[index].name]
        return None

    return assign(0, {})


def _solve_amounts(
    skill: SkillTemplate,
    numeric_checks: list[_DeltaCheck],
    becomes_checks: list[expr.Becomes],
    diff: _PairDiff,
    env: EnvironmentState,
    chosen: dict[str, str],
) -> SkillInstance | None:
    amounts: dict[str, float] = {}
    for check in numeric_checks:
        observed = diff.numeric.get((chosen[check.param], check.prop), 0.0)
        if check.amount_param is None:
            if abs(observed - check.constant) > RECOGNITION_EPS:
                return None
            continue
        solved = (observed - check.constant) / check.coefficient
        if solved <= RECOGNITION_EPS:
            return None
        prior = amounts.get(check.amount_param)
        if prior is not None and abs(prior - solved) > RECOGNITION_EPS:
            return None
        amounts[check.amount_param] = solved
    for check in becomes_checks:
        key = (chosen[check.prop.param], check.prop.prop)
        if key not in diff.other:
            return None
        _, after_value = diff.other[key]
        expected = expr.eval_expr(check.value, {**chosen, **amounts}, None)
        if isinstance(after_value, BooleanValue) and after_value.value != bool(expected):
            return None
    if set(amounts) != set(skill.number_params()):
        return None
    return instantiate(skill, {**chosen, **amounts})


def _consume(si: SkillInstance, numeric_checks, becomes_checks, diff: _PairDiff):
    for check in numeric_checks:
        key = (si.bindings[check.param], check.prop)
        amount = si.bindings[check.amount_param] if check.amount_param else 0.0
        remaining = diff.numeric.get(key, 0.0) - (check.coefficient * amount + check.constant)
        if abs(remaining) <= RECOGNITION_EPS:
            diff.numeric.pop(key, None)
        else:
            diff.numeric[key] = remaining
    for check in becomes_checks:
        diff.other.pop((si.bindings[check.prop.param], check.prop.prop), None)


def recognize_skills(
    snapshots: Sequence[EnvironmentState], registry: SkillRegistry
) -> RecognitionResult:
    """Recognize skill instances from consecutive snapshot deltas.

    For each pair, templates are matched greedily against the remaining
    deltas; deltas no check accounts for are reported as residual changes.
    """
    if len(snapshots) < 2:
        raise VarplanError("recognition needs at least two snapshots")
    recognized: list[RecognizedSkill] = []
    residuals: list[ResidualChange] = []
    for index in range(len(snapshots) - 1):
        before, after = snapshots[index], snapshots[index + 1]
        diff = _diff_pair(before, after)
        # Most-constrained template first, so a transfer that also flips a
        # tool's dirty flag reads as one Scoop rather than Pour plus residue.
        templates = sorted(registry.skills(), key=lambda s: (-len(s.checks), s.id))
        progress = True
        while progress:
            progress = False
            for skill in templates:
                if not skill.checks:
                    continue
                numeric_checks, becomes_checks = _structured_checks(skill)
                si = _try_bind(skill, numeric_checks, becomes_checks, diff, after)
                if si is not None:
                    _consume(si, numeric_checks, becomes_checks, diff)
                    recognized.append(RecognizedSkill((index, index + 1), si))
                    progress = True
                    break
        residuals.extend(_residuals(index, before, after, diff))
    return RecognitionResult(tuple(recognized), tuple(residuals))


def _residuals(
    index: int, before: EnvironmentState, after: EnvironmentState, diff: _PairDiff
) -> list[ResidualChange]:
    out: list[ResidualChange] = []
    leftovers: list[tuple[str, str]] = [
        key for key, delta in diff.numeric.items() if abs(delta) > RECOGNITION_EPS
    ]
    leftovers.extend(diff.other)
    for instance_id, prop in sorted(set(leftovers)):
        inst = before.instances[instance_id]
        target = FixedVariation(after.instances[instance_id].values[prop])
        cmp = compare_to_variation(inst.values[prop], target, before.kb)
        out.append(ResidualChange(
            (index, index + 1),
            PropertyDifference(
                instance=instance_id,
                concept=inst.concept,
                property=prop,
                current=inst.values[prop],
                target=target,
                comparison=cmp,
            ),
        ))
    return out
