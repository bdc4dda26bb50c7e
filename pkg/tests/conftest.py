"""Shared builders for compact scenario construction in tests."""

from __future__ import annotations

from pathlib import Path

import pytest

from taskweave import AgentSpec, BehaviorRow, Scenario, TaskSpec

REPO_ROOT = Path(__file__).resolve().parent.parent
SCENARIO_DIR = REPO_ROOT / "scenarios"

CANONICAL_SCENARIOS = [
    SCENARIO_DIR / "filing_risk_deep_dive.json",
    SCENARIO_DIR / "performance_review.json",
    SCENARIO_DIR / "compliance_audit.json",
]


def make_task(
    task_id: str,
    markers=(),
    ambiguity: float = 0.0,
    reference=(),
    deps=(),
    effort: int = 0,
    description: str = "",
) -> TaskSpec:
    return TaskSpec(
        id=task_id,
        description=description or f"task {task_id}",
        domain_markers=frozenset(markers),
        ambiguity=ambiguity,
        expected_effort=effort,
        reference_facts=frozenset(reference),
        depends_on=frozenset(deps),
    )


def make_row(
    facts=(),
    confidence: float = 0.8,
    latency: float = 1.0,
    content: str = "output",
    annotated=None,
    contingent=(),
) -> BehaviorRow:
    return BehaviorRow(
        content=content,
        emitted_facts=frozenset(facts),
        declared_confidence=confidence,
        latency=latency,
        annotated_scores=annotated,
        contingent_facts=tuple(contingent),
    )


def make_agent(
    agent_id: str,
    caps=(),
    capacity: int = 3,
    perf=None,
    rows=None,
) -> AgentSpec:
    return AgentSpec(
        id=agent_id,
        capabilities=frozenset(caps),
        capacity=capacity,
        historical_performance=dict(perf or {}),
        behavior=dict(rows or {}),
    )


def make_scenario(tasks, agents, **kwargs) -> Scenario:
    return Scenario(tasks=tuple(tasks), agents=tuple(agents), **kwargs)


@pytest.fixture
def canonical_paths():
    for path in CANONICAL_SCENARIOS:
        assert path.exists(), f"missing canonical scenario {path}"
    return CANONICAL_SCENARIOS
