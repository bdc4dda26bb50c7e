"""Scenario files: loading, validation, and round-trippable serialization.

A scenario is the complete deterministic description of a run: the task graph,
the agent pool with scripted behavior tables, contradiction pairs, gold
answers for compliance tasks, static-variant assignments, and config defaults.
Structure is checked against the bundled JSON schema, cross-references by hand
so every error carries a field path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema

from .agents import AgentProfile, BehaviorRow, ScriptedAgent
from .errors import CycleError, ScenarioParseError, ScenarioValidationError
from .graph import TaskGraph, TaskSpec, build_graph

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class AgentSpec:
    """Immutable agent descriptor: profile seed plus scripted behavior table."""

    id: str
    capabilities: frozenset[str] = frozenset()
    capacity: int = 1
    historical_performance: dict[str, float] = field(default_factory=dict)
    behavior: dict[tuple[str, int], BehaviorRow] = field(default_factory=dict)

    def build(self) -> ScriptedAgent:
        """Fresh runtime agent; profiles mutate during a run, specs never do."""
        profile = AgentProfile(
            id=self.id,
            capabilities=self.capabilities,
            capacity=self.capacity,
            historical_performance=dict(self.historical_performance),
        )
        return ScriptedAgent(profile, dict(self.behavior))


@dataclass(frozen=True)
class Scenario:
    name: str = ""
    description: str = ""
    tasks: tuple[TaskSpec, ...] = ()
    agents: tuple[AgentSpec, ...] = ()
    contradiction_pairs: tuple[tuple[str, str], ...] = ()
    gold_answers: dict[str, str] = field(default_factory=dict)
    static_assignments: dict[str, str] = field(default_factory=dict)
    defaults: dict = field(default_factory=dict)

    def build_graph(self) -> TaskGraph:
        return build_graph(self.tasks)

    def build_agents(self) -> dict[str, ScriptedAgent]:
        return {spec.id: spec.build() for spec in self.agents}

    def reference_facts(self) -> frozenset[str]:
        """Union of every task's reference facts: the run-level coverage target."""
        facts: set[str] = set()
        for task in self.tasks:
            facts |= task.reference_facts
        return frozenset(facts)

    def annotations(self) -> dict[tuple[str, str, int], tuple[float, float, float]]:
        """Annotated score triples keyed by (task_id, agent_id, attempt)."""
        out: dict[tuple[str, str, int], tuple[float, float, float]] = {}
        for agent in self.agents:
            for (task_id, attempt), row in agent.behavior.items():
                if row.annotated_scores is not None:
                    out[(task_id, agent.id, attempt)] = row.annotated_scores
        return out

    def to_dict(self) -> dict:
        """Canonical JSON-ready form; load(to_dict()) round-trips to an equal Scenario."""
        doc: dict = {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "description": self.description,
            "tasks": [
                {
                    "id": t.id,
                    "description": t.description,
                    "domain_markers": sorted(t.domain_markers),
                    "ambiguity": t.ambiguity,
                    "expected_effort": t.expected_effort,
                    "reference_facts": sorted(t.reference_facts),
                    "depends_on": sorted(t.depends_on),
                }
                for t in self.tasks
            ],
            "agents": [
                {
                    "id": a.id,
                    "capabilities": sorted(a.capabilities),
                    "capacity": a.capacity,
                    "historical_performance": {
                        k: a.historical_performance[k]
                        for k in sorted(a.historical_performance)
                    },
                    "behavior": [
                        _row_to_dict(task_id, attempt, row)
                        for (task_id, attempt), row in sorted(a.behavior.items())
                    ],
                }
                for a in self.agents
            ],
            "contradiction_pairs": [list(pair) for pair in self.contradiction_pairs],
            "gold_answers": {k: self.gold_answers[k] for k in sorted(self.gold_answers)},
            "static_assignments": {
                k: self.static_assignments[k] for k in sorted(self.static_assignments)
            },
            "defaults": self.defaults,
        }
        return doc


def _row_to_dict(task_id: str, attempt: int, row: BehaviorRow) -> dict:
    out: dict = {
        "task_id": task_id,
        "attempt": attempt,
        "content": row.content,
        "emitted_facts": sorted(row.emitted_facts),
        "declared_confidence": row.declared_confidence,
        "latency": row.latency,
    }
    if row.annotated_scores is not None:
        coherence, factuality, relevance = row.annotated_scores
        out["annotated_scores"] = {
            "coherence": coherence,
            "factuality": factuality,
            "relevance": relevance,
        }
    if row.contingent_facts:
        out["contingent_facts"] = [
            {"if_visible": trigger, "emit": fact} for trigger, fact in row.contingent_facts
        ]
    return out


def _schema() -> dict:
    text = resources.files("taskweave.schemas").joinpath("scenario.schema.json").read_text()
    return json.loads(text)


def load_scenario(path: str | Path) -> Scenario:
    """Load and fully validate a scenario file."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"{path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(doc)


def scenario_from_dict(doc: object) -> Scenario:
    """Validate a parsed scenario document and build the Scenario."""
    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: str(e.json_path))
    if errors:
        first = errors[0]
        raise ScenarioValidationError(first.json_path, first.message)
    assert isinstance(doc, dict)

    tasks = tuple(
        TaskSpec(
            id=t["id"],
            description=t.get("description", ""),
            domain_markers=frozenset(t.get("domain_markers", [])),
            ambiguity=float(t.get("ambiguity", 0.0)),
            expected_effort=int(t.get("expected_effort", 0)),
            reference_facts=frozenset(t.get("reference_facts", [])),
            depends_on=frozenset(t.get("depends_on", [])),
        )
        for t in doc["tasks"]
    )
    agents = tuple(_agent_from_dict(i, a) for i, a in enumerate(doc["agents"]))

    scenario = Scenario(
        name=doc.get("name", ""),
        description=doc.get("description", ""),
        tasks=tasks,
        agents=agents,
        contradiction_pairs=tuple(
            (pair[0], pair[1]) for pair in doc.get("contradiction_pairs", [])
        ),
        gold_answers=dict(doc.get("gold_answers", {})),
        static_assignments=dict(doc.get("static_assignments", {})),
        defaults=dict(doc.get("defaults", {})),
    )
    _check_cross_references(scenario)
    return scenario


def _agent_from_dict(index: int, raw: dict) -> AgentSpec:
    behavior: dict[tuple[str, int], BehaviorRow] = {}
    for row_index, row in enumerate(raw.get("behavior", [])):
        key = (row["task_id"], row["attempt"])
        if key in behavior:
            raise ScenarioValidationError(
                f"$.agents[{index}].behavior[{row_index}]",
                f"duplicate behavior row for task {key[0]!r} attempt {key[1]}",
            )
        annotated = row.get("annotated_scores")
        behavior[key] = BehaviorRow(
            content=row["content"],
            emitted_facts=frozenset(row.get("emitted_facts", [])),
            declared_confidence=float(row.get("declared_confidence", 0.5)),
            latency=float(row.get("latency", 1.0)),
            annotated_scores=(
                (annotated["coherence"], annotated["factuality"], annotated["relevance"])
                if annotated is not None
                else None
            ),
            contingent_facts=tuple(
                (c["if_visible"], c["emit"]) for c in row.get("contingent_facts", [])
            ),
        )
    return AgentSpec(
        id=raw["id"],
        capabilities=frozenset(raw.get("capabilities", [])),
        capacity=int(raw.get("capacity", 1)),
        historical_performance=dict(raw.get("historical_performance", {})),
        behavior=behavior,
    )


def _check_cross_references(scenario: Scenario) -> None:
    task_ids: set[str] = set()
    for i, task in enumerate(scenario.tasks):
        if task.id in task_ids:
            raise ScenarioValidationError(f"$.tasks[{i}].id", f"duplicate task id {task.id!r}")
        task_ids.add(task.id)
    for i, task in enumerate(scenario.tasks):
        for dep in sorted(task.depends_on):
            if dep not in task_ids:
                raise ScenarioValidationError(
                    f"$.tasks[{i}].depends_on", f"unknown task id {dep!r}"
                )

    agent_ids: set[str] = set()
    for i, agent in enumerate(scenario.agents):
        if agent.id in agent_ids:
            raise ScenarioValidationError(
                f"$.agents[{i}].id", f"duplicate agent id {agent.id!r}"
            )
        agent_ids.add(agent.id)
        for task_id, attempt in sorted(agent.behavior):
            if task_id not in task_ids:
                raise ScenarioValidationError(
                    f"$.agents[{i}].behavior",
                    f"behavior row references unknown task {task_id!r}",
                )

    for task_id, agent_id in sorted(scenario.static_assignments.items()):
        if task_id not in task_ids:
            raise ScenarioValidationError(
                "$.static_assignments", f"unknown task id {task_id!r}"
            )
        if agent_id not in agent_ids:
            raise ScenarioValidationError(
                "$.static_assignments", f"unknown agent id {agent_id!r}"
            )

    for task_id in sorted(scenario.gold_answers):
        if task_id not in task_ids:
            raise ScenarioValidationError("$.gold_answers", f"unknown task id {task_id!r}")

    try:
        scenario.build_graph()
    except CycleError as exc:
        raise ScenarioValidationError("$.tasks", str(exc)) from exc


def dump_scenario(scenario: Scenario, path: str | Path) -> None:
    """Write a scenario back to disk in canonical form."""
    Path(path).write_text(
        json.dumps(scenario.to_dict(), indent=2, sort_keys=False) + "\n",
        encoding="utf-8",
    )
