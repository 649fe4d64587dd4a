"""Headless driver: diff demonstrations, define goals, plan, execute, bench."""
from __future__ import annotations

import json
import statistics
import sys
import time
from importlib import resources
from pathlib import Path

import click

from . import serde
from .defaults import bench_environment, default_ontology, default_registry
from .errors import DocumentError, InvalidAnswerError, VarplanError
from .executor import execute
from .kb import KnowledgeBase
from .planner import plan as plan_pipeline
from .session import Question, answer as apply_answer, question_bound, start_session
from .variation import (
    CollectionSubsetVariation,
    ConceptVariation,
    EnvironmentVariation,
    InstancePropertiesVariation,
)

EXIT_INPUT_ERROR = 1
EXIT_NOT_SATISFIED = 3


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise click.ClickException(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"{path}: invalid JSON ({exc})")


def _load_kb(ontology_path: str | None) -> KnowledgeBase:
    if ontology_path is None:
        return default_ontology()
    return serde.ontology_from_doc(_load_json(ontology_path))


def _write(doc, out: str | None, echo: bool = False):
    text = serde.canonical_dumps(doc)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    if echo or not out:
        click.echo(text, nl=False)


@click.group()
def main():
    """Goal variations: demonstration diffing, goal definition, planning, execution."""


@main.command()
@click.option("--ontology", type=click.Path(), default=None, help="Ontology file (defaults to the built-in one).")
@click.option("--before", required=True, type=click.Path(), help="Environment snapshot before the demonstration.")
@click.option("--after", required=True, type=click.Path(), help="Environment snapshot after the demonstration.")
@click.option("--out", type=click.Path(), default=None, help="Write the diff document here.")
def diff(ontology, before, after, out):
    """Show what changed between two snapshots and which skills explain it."""
    from .session import compute_diff

    kb = _load_kb(ontology)
    registry = default_registry()
    try:
        before_env = serde.env_from_doc(kb, _load_json(before))
        after_env = serde.env_from_doc(kb, _load_json(after))
        demo_diff = compute_diff(before_env, after_env, registry)
    except (DocumentError, VarplanError) as exc:
        raise click.ClickException(str(exc))
    for instance_id, changes in demo_diff.changed:
        for change in changes:
            click.echo(f"{instance_id}.{change.property} changed", err=True)
    for recognized in demo_diff.recognized_skills.recognized:
        bindings = dict(recognized.skill.bindings)
        click.echo(f"recognized {recognized.skill.template.id} {bindings}", err=True)
    _write(serde.diff_to_doc(demo_diff), out)


@main.command()
@click.option("--ontology", type=click.Path(), default=None)
@click.option("--before", required=True, type=click.Path())
@click.option("--after", required=True, type=click.Path())
@click.option("--answers", type=click.Path(), default=None, help="Answer script; prompts interactively when omitted.")
@click.option("--out", type=click.Path(), default=None, help="Write the variation document here.")
def define(ontology, before, after, answers, out):
    """Run a goal-definition session over a demonstration."""
    kb = _load_kb(ontology)
    registry = default_registry()
    try:
        before_env = serde.env_from_doc(kb, _load_json(before))
        after_env = serde.env_from_doc(kb, _load_json(after))
        session, question = start_session(before_env, after_env, registry)
    except (DocumentError, VarplanError) as exc:
        raise click.ClickException(str(exc))

    script = None
    if answers is not None:
        script = serde.answers_from_doc(_load_json(answers))

    index = 0
    outcome = question
    while isinstance(outcome, Question):
        if script is not None:
            if index >= len(script):
                raise click.ClickException(
                    f"answer script ended early; next question is {outcome.id}"
                )
            expected_id, value = script[index]
            if expected_id is not None and expected_id != outcome.id:
                raise click.ClickException(
                    f"answer script targets {expected_id!r} but the pending question is {outcome.id!r}"
                )
            index += 1
        else:
            value = _prompt(outcome)
        try:
            session, outcome = apply_answer(session, value)
        except InvalidAnswerError as exc:
            raise click.ClickException(str(exc))
    click.echo(
        f"completed after {session.question_count()} questions "
        f"(bound {question_bound(session)})",
        err=True,
    )
    _write(serde.variation_to_doc(outcome), out)


def _prompt(question: Question):
    options = ", ".join(o.id for o in question.options)
    if {o.id for o in question.options} == {"yes", "no"}:
        return click.confirm(question.prompt, default=bool(question.default))
    if question.free_form == "number":
        return click.prompt(f"{question.prompt} [{options}]", type=float, default=question.default)
    return click.prompt(f"{question.prompt} [{options}]", default=question.default)


@main.command("plan")
@click.option("--ontology", type=click.Path(), default=None)
@click.option("--env", "env_path", required=True, type=click.Path())
@click.option("--variation", "variation_path", required=True, type=click.Path())
@click.option("--out", type=click.Path(), default=None, help="Write the plan document here.")
def plan_cmd(ontology, env_path, variation_path, out):
    """Plan skill sequences that bring the environment into the variation."""
    kb = _load_kb(ontology)
    registry = default_registry()
    try:
        env = serde.env_from_doc(kb, _load_json(env_path))
        variation = serde.variation_from_doc(_load_json(variation_path))
        if not isinstance(variation, EnvironmentVariation):
            raise click.ClickException("the variation file must hold an environment variation")
        result = plan_pipeline(env, variation, registry)
    except (DocumentError, VarplanError) as exc:
        raise click.ClickException(str(exc))
    if result.satisfiable:
        click.echo(
            f"satisfiable: {result.plan.step_count} step(s), "
            f"assignment {dict(result.assignment)}",
            err=True,
        )
        for step in result.plan.steps:
            skill = step.alternatives[0].skill
            click.echo(f"  {skill.template.id} {dict(skill.bindings)}", err=True)
    else:
        click.echo("not satisfiable in this environment", err=True)
    _write(serde.plan_result_to_doc(result), out)


@main.command("exec")
@click.option("--ontology", type=click.Path(), default=None)
@click.option("--env", "env_path", required=True, type=click.Path())
@click.option("--plan", "plan_path", required=True, type=click.Path())
@click.option("--variation", "variation_path", type=click.Path(), default=None, help="Goal to verify after execution.")
@click.option("--out", type=click.Path(), default=None, help="Write the trace document here.")
def exec_cmd(ontology, env_path, plan_path, variation_path, out):
    """Execute a plan document against an environment and verify the goal."""
    kb = _load_kb(ontology)
    registry = default_registry()
    try:
        env = serde.env_from_doc(kb, _load_json(env_path))
        plan_doc = _load_json(plan_path)
        plan_obj = serde.plan_from_doc(registry, plan_doc.get("plan", plan_doc))
        goal = None
        if variation_path is not None:
            goal = serde.variation_from_doc(_load_json(variation_path))
    except (DocumentError, VarplanError) as exc:
        raise click.ClickException(str(exc))
    trace = execute(plan_obj, env, goal)
    _write(serde.trace_to_doc(trace, initial_env=env), out)
    if trace.verdict is not None:
        click.echo(
            "goal satisfied" if trace.verdict.satisfied else "goal NOT satisfied",
            err=True,
        )
        if not trace.verdict.satisfied:
            sys.exit(EXIT_NOT_SATISFIED)
    if trace.failure is not None:
        click.echo(f"execution stopped at step {trace.failure.step_index}", err=True)
        sys.exit(EXIT_NOT_SATISFIED)


def load_bench_grid(path: str | None = None) -> list[dict]:
    """Load and cross-check a benchmark grid config."""
    if path is None:
        doc = json.loads(
            resources.files("varplan").joinpath("data/bench_grid.json").read_text()
        )
    else:
        doc = _load_json(path)
    scenarios = doc.get("scenarios")
    if not isinstance(scenarios, list):
        raise DocumentError("$.scenarios", "expected a list of scenarios")
    for i, scenario in enumerate(scenarios):
        if scenario.get("target_relation") == "above_volume" and scenario.get("achievable"):
            raise DocumentError(
                f"$.scenarios[{i}]",
                "a target above the container volume cannot be achievable",
            )
    return scenarios


def bench_goal(scenario: dict) -> EnvironmentVariation:
    target = serde.variation_from_doc(scenario["target"], "$.target")
    return EnvironmentVariation(CollectionSubsetVariation((
        InstancePropertiesVariation(
            ConceptVariation("Bowl", True), {"contentLevel": target}
        ),
    )))


@main.command()
@click.option("--grid-config", type=click.Path(), default=None, help="Scenario grid (defaults to the built-in grid).")
@click.option("--runs", type=int, default=10, show_default=True, help="Timing runs per scenario.")
@click.option("--seed", type=int, default=0, show_default=True, help="Recorded in the output for provenance.")
@click.option("--out", type=click.Path(), default=None, help="Write the results table here.")
def bench(grid_config, runs, seed, out):
    """Plan every grid scenario; report satisfiability, steps and wall time."""
    kb = default_ontology()
    registry = default_registry()
    try:
        scenarios = load_bench_grid(grid_config)
    except DocumentError as exc:
        raise click.ClickException(str(exc))
    rows = []
    for scenario in scenarios:
        env = bench_environment(kb, scenario["levels"])
        goal = bench_goal(scenario)
        timings = []
        result = None
        for _ in range(max(1, runs)):
            started = time.perf_counter()
            result = plan_pipeline(env, goal, registry)
            timings.append(time.perf_counter() - started)
        rows.append({
            "id": scenario["id"],
            "variation_kind": scenario["variation_kind"],
            "target_relation": scenario["target_relation"],
            "expected_achievable": scenario["achievable"],
            "satisfiable": result.satisfiable,
            "steps": result.plan.step_count if result.satisfiable else None,
            "mean_seconds": statistics.mean(timings),  # hardware dependent
        })
        marker = "ok" if result.satisfiable == scenario["achievable"] else "MISMATCH"
        click.echo(
            f"{scenario['id']:36s} satisfiable={str(result.satisfiable):5s} "
            f"steps={result.plan.step_count if result.satisfiable else '-':>2} "
            f"avg={statistics.mean(timings) * 1000:.2f}ms {marker}",
            err=True,
        )
    _write({
        "seed": seed,
        "runs": runs,
        "timing_note": "mean_seconds values are hardware dependent",
        "results": rows,
    }, out)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--ui-dir", type=click.Path(), default=None, help="Static UI directory to serve at /ui.")
def serve(host, port, ui_dir):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    if ui_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = str(candidate) if candidate.is_dir() else None
    uvicorn.run(create_app(ui_dir=ui_dir), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
