"""State-level plan execution with goal verification and tracing."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from .comparison import Comparison, EnvironmentComparison, compare_environment
from .kb import EnvironmentState
from .planner import ExecutionPlan, SkillAlternative
from .skills import SkillInstance, apply_effects, check_preconditions
from .variation import EnvironmentVariation


@dataclass(frozen=True)
class TraceEntry:
    skill: SkillInstance
    pre_digest: str
    post_digest: str
    duration: float
    preconditions_passed: bool


@dataclass(frozen=True)
class StepFailure:
    """All alternatives of one step were rejected by their preconditions."""

    step_index: int
    failures: tuple[tuple[str, tuple[Comparison, ...]], ...]  # (skill id, failing)


@dataclass(frozen=True)
class Verdict:
    satisfied: bool
    comparison: EnvironmentComparison | None = None


@dataclass(frozen=True)
class ExecutionTrace:
    entries: tuple[TraceEntry, ...]
    final_env: EnvironmentState
    verdict: Verdict | None
    total_duration: float
    failure: StepFailure | None = None


def env_digest(env: EnvironmentState) -> str:
    """Short stable digest of an environment snapshot."""
    from .serde import env_to_doc  # late import: serde depends on kb only

    payload = json.dumps(env_to_doc(env), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def execute(
    plan: ExecutionPlan,
    env: EnvironmentState,
    goal: EnvironmentVariation | None = None,
) -> ExecutionTrace:
    """Run a plan: at each step the first executable alternative is taken.

    If an alternative carries a nested precondition plan it runs first. When
    no alternative of a step is executable, execution stops; the goal verdict
    (when a goal is given) is computed on whatever state was reached.
    """
    entries: list[TraceEntry] = []
    failure: StepFailure | None = None
    current = env
    for index, step in enumerate(plan.steps):
        rejected: list[tuple[str, tuple[Comparison, ...]]] = []
        taken = False
        for alternative in step.alternatives:
            outcome = _try_alternative(alternative, current)
            if outcome.env is not None:
                current = outcome.env
                entries.extend(outcome.entries)
                taken = True
                break
            rejected.append((alternative.skill.template.id, outcome.failing))
        if not taken:
            failure = StepFailure(index, tuple(rejected))
            break
    verdict = None
    if goal is not None:
        comparison = compare_environment(current, goal)
        verdict = Verdict(comparison.match.satisfied, None if comparison.match.satisfied else comparison)
        if failure is not None and verdict.satisfied:
            verdict = Verdict(False, comparison)
    total = sum(e.duration for e in entries)
    return ExecutionTrace(tuple(entries), current, verdict, total, failure)


@dataclass(frozen=True)
class _AlternativeOutcome:
    env: EnvironmentState | None
    entries: tuple[TraceEntry, ...] = ()
    failing: tuple[Comparison, ...] = ()


def _try_alternative(
    alternative: SkillAlternative, env: EnvironmentState
) -> _AlternativeOutcome:
    entries: list[TraceEntry] = []
    current = env
    if alternative.precondition_plan is not None:
        nested = execute(alternative.precondition_plan, current)
        if nested.failure is not None:
            return _AlternativeOutcome(None, failing=tuple(
                cmp for _, failing in nested.failure.failures for cmp in failing
            ))
        entries.extend(nested.entries)
        current = nested.final_env
    failing = check_preconditions(alternative.skill, current)
    if failing:
        return _AlternativeOutcome(None, failing=tuple(failing))
    pre = env_digest(current)
    current = apply_effects(alternative.skill, current)
    entries.append(TraceEntry(
        skill=alternative.skill,
        pre_digest=pre,
        post_digest=env_digest(current),
        duration=alternative.skill.duration,
        preconditions_passed=True,
    ))
    return _AlternativeOutcome(current, tuple(entries))
