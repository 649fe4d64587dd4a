"""Planning pipeline: differences -> actions -> skill plans -> selection.

The content-level solver fills or empties a container toward the nearest
attainable target of its goal variation by pouring between containers,
iterating donors/receivers sorted by capacity. The solution selector picks
one candidate instance per element variation by min-cost maximum matching,
scored by plan step count. Per-cell plans are computed independently of each
other; interdependent variations over shared liquid are therefore caught by
the executor's final membership check, not here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Union

from .comparison import EnvironmentComparison, PropertyDifference, compare_environment
from .errors import EmptyVariationError
from .kb import (
    CONTENT_LEVEL,
    EPS,
    EnvironmentState,
    KnowledgeBase,
    NumberValue,
    content_level,
    content_volume,
)
from .skills import SkillInstance, SkillRegistry, apply_effects, check_preconditions
from .variation import (
    EnvironmentVariation,
    Variation,
    contains,
    nearest_targets,
)

CONTAINER_CONCEPT = "Container"


@dataclass(frozen=True)
class SkillAlternative:
    skill: SkillInstance
    precondition_plan: Union["ExecutionPlan", None] = None


@dataclass(frozen=True)
class SkillAlternativeSet:
    alternatives: tuple[SkillAlternative, ...]


@dataclass(frozen=True)
class ExecutionPlan:
    """Ordered skill-alternative sets; an empty plan means already satisfied."""

    steps: tuple[SkillAlternativeSet, ...] = ()

    @property
    def step_count(self) -> int:
        total = 0
        for step in self.steps:
            total += 1
            nested = step.alternatives[0].precondition_plan
            if nested is not None:
                total += nested.step_count
        return total


@dataclass(frozen=True)
class NoSolution:
    """The action cannot be implemented in this environment (P = empty)."""

    reason: str = ""


@dataclass(frozen=True)
class Cell:
    status: str  # "plan" | "already_satisfied" | "no_solution"
    plan: ExecutionPlan | None = None

    @property
    def cost(self) -> float:
        if self.status == "no_solution":
            return math.inf
        if self.status == "already_satisfied":
            return 0
        return self.plan.step_count


@dataclass(frozen=True)
class SolutionMatrix:
    rows: tuple[int, ...]  # element-variation indices
    cols: tuple[str, ...]  # candidate instance ids
    cells: Mapping[tuple[int, str], Cell]


@dataclass(frozen=True)
class PlanResult:
    satisfiable: bool
    assignment: Mapping[int, str]
    plan: ExecutionPlan
    total_cost: float
    matrix: SolutionMatrix
    comparison: EnvironmentComparison


def _pour(registry: SkillRegistry, source: str, dest: str, amount: float) -> SkillInstance:
    return registry.instantiate("Pour", source=source, dest=dest, amount=amount)


def solve_content_level(
    entity_id: str,
    target: Variation,
    env: EnvironmentState,
    registry: SkillRegistry,
) -> Union[ExecutionPlan, NoSolution]:
    """Plan pours that bring entity.contentLevel inside the target variation.

    Targets are tried nearest-first. Per target: skip it if it exceeds the
    entity's capacity; otherwise iterate the other containers sorted by
    capacity (ascending when filling, descending when emptying, ties by id)
    and pour the reducible amount, simulating levels forward. The first
    target whose simulation ends inside the variation wins.
    """
    kb = env.kb
    current = content_level(env, entity_id)
    capacity = content_volume(env, entity_id)
    if contains(target, NumberValue(current), kb):
        return ExecutionPlan()
    try:
        targets = nearest_targets(target, current)
    except EmptyVariationError:
        return NoSolution("target variation is empty")

    others = sorted(
        (
            inst.id
            for inst in env.instances.values()
            if inst.id != entity_id and kb.is_subconcept(inst.concept, CONTAINER_CONCEPT)
        ),
    )

    for point in targets:
        if point > capacity + EPS:
            continue  # cannot hold more than its volume
        if point < -EPS:
            continue
        filling = current <= point
        direction = 1.0 if filling else -1.0  # capacity ascending/descending, ids ascending
        ordered = sorted(
            others,
            key=lambda i: (direction * content_volume(env, i), i),
        )
        sim = env
        steps: list[SkillAlternativeSet] = []
        level = current
        for other in ordered:
            if filling:
                amount = min(content_level(sim, other), point - level)
            else:
                amount = min(
                    level - point,
                    content_volume(sim, other) - content_level(sim, other),
                )
            if amount <= EPS:
                continue
            source, dest = (other, entity_id) if filling else (entity_id, other)
            pour = _pour(registry, source, dest, amount)
            if check_preconditions(pour, sim):
                continue  # not executable here; skip this candidate
            sim = apply_effects(pour, sim)
            steps.append(SkillAlternativeSet((SkillAlternative(pour),)))
            level = content_level(sim, entity_id)
            if contains(target, NumberValue(level), kb):
                return ExecutionPlan(tuple(steps))
        if contains(target, NumberValue(level), kb):
            return ExecutionPlan(tuple(steps))
    return NoSolution("no pour sequence reaches the target")


#: Property-specific solvers the matrix builder dispatches to.
PropertySolver = Callable[
    [str, Variation, EnvironmentState, SkillRegistry],
    Union[ExecutionPlan, NoSolution],
]

PROPERTY_SOLVERS: dict[str, PropertySolver] = {
    CONTENT_LEVEL: solve_content_level,
}


def build_matrix(
    env_comparison: EnvironmentComparison,
    env: EnvironmentState,
    registry: SkillRegistry,
) -> SolutionMatrix:
    """One cell per (element variation, concept-compatible candidate).

    A candidate with no blocking differences is already satisfied. Otherwise
    each difference is routed through the registered actions and the
    per-property solver; a property nobody can modify makes the cell
    unsolvable, and per-property plans concatenate into the cell plan.
    """
    kb = env.kb
    rows = tuple(sorted(env_comparison.differences))
    cols_set: set[str] = set()
    cells: dict[tuple[int, str], Cell] = {}
    for i in rows:
        for candidate_id, diffs in env_comparison.differences[i].items():
            cols_set.add(candidate_id)
            cells[(i, candidate_id)] = _solve_cell(diffs, env, registry, kb)
    return SolutionMatrix(rows, tuple(sorted(cols_set)), cells)


def _solve_cell(
    diffs: tuple[PropertyDifference, ...],
    env: EnvironmentState,
    registry: SkillRegistry,
    kb: KnowledgeBase,
) -> Cell:
    if not diffs:
        return Cell("already_satisfied", ExecutionPlan())
    steps: list[SkillAlternativeSet] = []
    for diff in diffs:
        actions = registry.actions_for_property(kb, diff.concept, diff.property)
        solver = PROPERTY_SOLVERS.get(diff.property)
        if not actions or solver is None:
            return Cell("no_solution")
        outcome = solver(diff.instance, diff.target, env, registry)
        if isinstance(outcome, NoSolution):
            return Cell("no_solution")
        steps.extend(outcome.steps)
    return Cell("plan", ExecutionPlan(tuple(steps)))


def select_solutions(matrix: SolutionMatrix) -> tuple[Mapping[int, str], float]:
    """Assign candidates to element variations.

    Maximum cardinality first, then minimum total cost; remaining ties go to
    the lexicographically smallest (variation index, instance id) assignment.
    Small matrices are solved exhaustively, larger ones with successive
    shortest augmenting paths (which keeps optimality but fixes ties by
    iteration order).
    """
    finite = {
        key: cell.cost for key, cell in matrix.cells.items() if cell.cost != math.inf
    }
    if len(matrix.rows) <= 6 and len(matrix.cols) <= 6:
        return _select_exhaustive(matrix.rows, finite)
    return _select_augmenting(matrix.rows, matrix.cols, finite)


def _select_exhaustive(
    rows: tuple[int, ...], finite: dict[tuple[int, str], float]
) -> tuple[dict[int, str], float]:
    best_key: tuple | None = None
    best_choice: tuple[tuple[int, str], ...] = ()

    def recurse(index: int, used: set[str], chosen: list[tuple[int, str]], cost: float):
        nonlocal best_key, best_choice
        if index == len(rows):
            key = (-len(chosen), cost, tuple(chosen))
            if best_key is None or key < best_key:
                best_key = key
                best_choice = tuple(chosen)
            return
        row = rows[index]
        for candidate in sorted(c for (r, c) in finite if r == row and c not in used):
            used.add(candidate)
            chosen.append((row, candidate))
            recurse(index + 1, used, chosen, cost + finite[(row, candidate)])
            chosen.pop()
            used.remove(candidate)
        recurse(index + 1, used, chosen, cost)  # leave this row unassigned

    recurse(0, set(), [], 0.0)
    assignment = dict(best_choice)
    return assignment, sum(finite[item] for item in best_choice)


def _select_augmenting(
    rows: tuple[int, ...],
    cols: tuple[str, ...],
    finite: dict[tuple[int, str], float],
) -> tuple[dict[int, str], float]:
    """Min-cost max-cardinality matching via successive shortest paths."""
    col_index = {c: j for j, c in enumerate(cols)}
    adjacency: list[list[tuple[int, float]]] = [[] for _ in rows]
    for (r, c), cost in finite.items():
        adjacency[rows.index(r)].append((col_index[c], cost))
    match_row: list[int | None] = [None] * len(rows)
    match_col: list[int | None] = [None] * len(cols)

    for _ in rows:
        # Bellman-Ford over the residual graph from all free rows.
        dist = [math.inf] * len(rows)
        back: list[tuple[int, int] | None] = [None] * len(rows)  # (prev_row, via_col)
        for i in range(len(rows)):
            if match_row[i] is None:
                dist[i] = 0.0
        for _ in range(len(rows)):
            improved = False
            for i in range(len(rows)):
                if dist[i] == math.inf:
                    continue
                for j, cost in adjacency[i]:
                    owner = match_col[j]
                    if owner is None or owner == i:
                        continue
                    relaxed = dist[i] + cost - finite[(rows[owner], cols[j])]
                    if relaxed < dist[owner] - 1e-12:
                        dist[owner] = relaxed
                        back[owner] = (i, j)
                        improved = True
            if not improved:
                break
        best_end: tuple[float, int, int] | None = None  # (cost, row, col)
        for i in range(len(rows)):
            if dist[i] == math.inf:
                continue
            for j, cost in adjacency[i]:
                if match_col[j] is None:
                    total = dist[i] + cost
                    if best_end is None or total < best_end[0] - 1e-12:
                        best_end = (total, i, j)
        if best_end is None:
            break
        _, i, j = best_end
        while True:
            match_row[i], match_col[j] = j, i
            if back[i] is None:
                break
            i, j = back[i]  # the displacing row now takes this row's old column
    assignment = {
        rows[i]: cols[j] for i, j in enumerate(match_row) if j is not None
    }
    total = sum(finite[(r, c)] for r, c in assignment.items())
    return assignment, total


def plan(
    env: EnvironmentState,
    env_variation: EnvironmentVariation,
    registry: SkillRegistry,
) -> PlanResult:
    """Full pipeline: compare, build the solution matrix, select, combine."""
    comparison = compare_environment(env, env_variation)
    matrix = build_matrix(comparison, env, registry)
    assignment, total_cost = select_solutions(matrix)
    variations = env_variation.entity_collection_variation.element_variations
    satisfiable = len(assignment) == len(variations)
    steps: list[SkillAlternativeSet] = []
    for i in sorted(assignment):
        cell = matrix.cells[(i, assignment[i])]
        if cell.plan is not None:
            steps.extend(cell.plan.steps)
    return PlanResult(
        satisfiable=satisfiable,
        assignment=assignment,
        plan=ExecutionPlan(tuple(steps)),
        total_cost=total_cost if satisfiable else math.inf,
        matrix=matrix,
        comparison=comparison,
    )
