from __future__ import annotations

import pytest

import varplan as vp


@pytest.fixture(scope="session")
def kb():
    return vp.default_ontology()


@pytest.fixture(scope="session")
def registry():
    return vp.default_registry()


@pytest.fixture()
def milk_snapshots(kb):
    return vp.milk_pour_snapshots(kb)


@pytest.fixture()
def three_cups_env(kb):
    return kb.environment(
        [vp.make_table()]
        + [vp.make_container(f"cup{i}", "Cup", 0.1, 0.3) for i in (1, 2, 3)]
    )


def goal_one_entity(concept: str, property_variation, prop: str = "contentLevel"):
    """Environment variation asking for one instance of the concept."""
    return vp.EnvironmentVariation(vp.CollectionSubsetVariation((
        vp.InstancePropertiesVariation(
            vp.ConceptVariation(concept, True), {prop: property_variation}
        ),
    )))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok in RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")
