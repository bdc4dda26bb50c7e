"""Agent abstraction and the deterministic scripted implementation used in tests.

A scripted agent replays a behavior table keyed by (task id, attempt index), so a
run is a pure function of the scenario. Non-scripted agents plug in behind the
same Agent protocol; only the in-process scripted implementation ships here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Protocol

from .errors import NoScriptedBehaviorError
from .graph import SubTask

if TYPE_CHECKING:
    from .feedback import FeedbackMessage
    from .memory import MemoryView


@dataclass(frozen=True)
class CandidateOutput:
    """One agent's attempt at one task; (task_id, agent_id, attempt) is unique per run."""

    task_id: str
    agent_id: str
    attempt: int
    content: str
    emitted_facts: frozenset[str]
    declared_confidence: float
    produced_at: float

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.task_id, self.agent_id, self.attempt)


@dataclass(frozen=True)
class BehaviorRow:
    """Scripted response for one (task, attempt) pair.

    contingent_facts model memory-derived insight: each (trigger, fact) pair emits
    `fact` only when `trigger` is visible in the agent's memory view at execution
    time. With memory sharing disabled the view is empty and none of them fire.
    """

    content: str
    emitted_facts: frozenset[str] = frozenset()
    declared_confidence: float = 0.5
    latency: float = 1.0
    annotated_scores: tuple[float, float, float] | None = None
    contingent_facts: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if not 0.0 <= self.declared_confidence <= 1.0:
            raise ValueError("declared_confidence must be in [0, 1]")
        if self.latency < 0:
            raise ValueError("latency must be nonnegative")
        if self.annotated_scores is not None:
            for component in self.annotated_scores:
                if not 0.0 <= component <= 1.0:
                    raise ValueError("annotated score components must be in [0, 1]")


@dataclass
class AgentProfile:
    """Routing metadata for one agent: capabilities, capacity, load, history."""

    id: str
    capabilities: frozenset[str] = frozenset()
    capacity: int = 1
    load: int = 0
    historical_performance: dict[str, float] = field(default_factory=dict)
    feedback_log: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError("capacity must be a positive integer")
        for marker, value in self.historical_performance.items():
            self.historical_performance[marker] = min(1.0, max(0.0, value))

    @property
    def has_spare_capacity(self) -> bool:
        return self.load < self.capacity


class Agent(Protocol):
    """Execution contract every agent implementation satisfies."""

    profile: AgentProfile

    def execute(
        self, task: SubTask, memory_view: MemoryView, attempt: int, start: float
    ) -> CandidateOutput: ...

    def declared_confidence(self, task: SubTask) -> float: ...

    def latency(self, task: SubTask, attempt: int) -> float: ...


class ScriptedAgent:
    """Deterministic agent that replays a scenario behavior table."""

    def __init__(self, profile: AgentProfile, behavior: dict[tuple[str, int], BehaviorRow]):
        self.profile = profile
        self.behavior = behavior

    def execute(
        self, task: SubTask, memory_view: MemoryView, attempt: int, start: float
    ) -> CandidateOutput:
        """Produce the scripted output for (task.id, attempt).

        Raises NoScriptedBehaviorError on a missing row; an agent never fabricates
        output to mask a scenario gap.
        """
        row = self._row(task.id, attempt)
        facts = set(row.emitted_facts)
        if row.contingent_facts:
            visible = memory_view.committed_facts()
            for trigger, fact in row.contingent_facts:
                if trigger in visible:
                    facts.add(fact)
        return CandidateOutput(
            task_id=task.id,
            agent_id=self.profile.id,
            attempt=attempt,
            content=row.content,
            emitted_facts=frozenset(facts),
            declared_confidence=row.declared_confidence,
            produced_at=start + row.latency,
        )

    def declared_confidence(self, task: SubTask) -> float:
        """Confidence declared for a first attempt at the task; 0 without a row."""
        row = self.behavior.get((task.id, 0))
        return row.declared_confidence if row is not None else 0.0

    def latency(self, task: SubTask, attempt: int) -> float:
        return self._row(task.id, attempt).latency

    def _row(self, task_id: str, attempt: int) -> BehaviorRow:
        row = self.behavior.get((task_id, attempt))
        if row is None:
            raise NoScriptedBehaviorError(
                f"agent {self.profile.id!r} has no behavior for task {task_id!r}"
                f" attempt {attempt}"
            )
        return row


def adapt_strategy(
    profile: AgentProfile,
    feedback: FeedbackMessage,
    task_markers: frozenset[str],
    decrement: float = 0.1,
) -> AgentProfile:
    """Apply a feedback message to an agent's routing metadata.

    Every domain marker of the task the feedback refers to loses `decrement`
    historical performance (clamped at 0); the feedback id is appended to the
    agent's log. This mutates only routing metadata, never scripted outputs.
    """
    for marker in task_markers:
        current = profile.historical_performance.get(marker, 0.5)
        profile.historical_performance[marker] = max(0.0, current - decrement)
    profile.feedback_log.append(feedback.id)
    return profile
