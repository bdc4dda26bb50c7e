"""Main coordination loop: dispatch waves, competitive fan-out, commits, feedback.

Execution is wave-based on a virtual clock. Each wave dispatches every
assignable task, gathers all results, commits winners, then reviews. Within a
wave, executions on distinct agents overlap (the wave costs the longest
latency); the static variant instead serializes each agent's queue, which is
what makes an overloaded fixed-role pipeline slow.

Variants:
  static            pinned assignments, no bus feedback, no fan-outs; a
                    bus-less quality gate re-runs low-factuality commits
                    (same agent, next attempt) within the revision budget
  no_parallel       routing and feedback, every dispatch single
  no_feedback       review is never called
  no_memory_sharing agents execute against an empty memory view
"""

from __future__ import annotations

import dataclasses
import logging
import random
from dataclasses import dataclass, field
from typing import Mapping

from .agents import Agent, CandidateOutput, adapt_strategy
from .errors import DeadlockError, MissingCommitError, ScenarioValidationError
from .evaluator import DEFAULT_FACT_THRESHOLD, Evaluator
from .feedback import (
    DEFAULT_SEVERITY_THRESHOLD,
    ORCHESTRATOR_TARGET,
    FeedbackBus,
    requires_revision,
)
from .graph import SubTask, TaskGraph, TaskStatus
from .memory import EntryKey, SharedMemory
from .metrics import RunReport, build_report
from .routing import (
    DEFAULT_CAPACITY_WEIGHT,
    DEFAULT_K,
    DEFAULT_PERF_WEIGHT,
    DEFAULT_THETA,
    RouteMode,
    Router,
    RoutingDecision,
)
from .runlog import RunLog
from .scenario import Scenario
from .scoring import LexicalScorer, Scorer, ScoringWeights, ScriptedScorer

logger = logging.getLogger(__name__)

DEFAULT_REVISION_BUDGET = 3
DEFAULT_ADAPT_DECREMENT = 0.1


@dataclass(frozen=True)
class RunConfig:
    """Variant switchboard and tunables for one run."""

    seed: int = 0
    theta: float = DEFAULT_THETA
    k: int = DEFAULT_K
    weights: ScoringWeights = ScoringWeights()
    domain_weights: dict[str, ScoringWeights] = field(default_factory=dict)
    w1: float = DEFAULT_PERF_WEIGHT
    w2: float = DEFAULT_CAPACITY_WEIGHT
    severity_threshold: float = DEFAULT_SEVERITY_THRESHOLD
    revision_budget: int = DEFAULT_REVISION_BUDGET
    fact_threshold: float = DEFAULT_FACT_THRESHOLD
    adapt_decrement: float = DEFAULT_ADAPT_DECREMENT
    scorer: str = "lexical"
    scorer_fallback: str | None = None
    static: bool = False
    no_feedback: bool = False
    no_memory_sharing: bool = False
    no_parallel: bool = False

    def __post_init__(self) -> None:
        if self.revision_budget < 1:
            raise ValueError("revision_budget must be at least 1")

    def with_overrides(self, overrides: Mapping) -> RunConfig:
        """New config with every non-None override applied."""
        clean = dict()
        for key, value in overrides.items():
            if value is None:
                continue
            if key == "weights" and isinstance(value, Mapping):
                value = ScoringWeights(**value)
            if key == "domain_weights" and isinstance(value, Mapping):
                value = {
                    marker: ScoringWeights(**w) if isinstance(w, Mapping) else w
                    for marker, w in value.items()
                }
            clean[key] = value
        return dataclasses.replace(self, **clean)


@dataclass(frozen=True)
class DocumentSection:
    task_id: str
    content: str
    facts: frozenset[str]


@dataclass(frozen=True)
class FinalDocument:
    """Committed contents in deterministic topological order, plus fact unions."""

    sections: tuple[DocumentSection, ...]

    @property
    def text(self) -> str:
        return "\n\n".join(section.content for section in self.sections)

    @property
    def fact_union(self) -> frozenset[str]:
        facts: set[str] = set()
        for section in self.sections:
            facts |= section.facts
        return frozenset(facts)


def compile_final_output(memory: SharedMemory, graph: TaskGraph) -> FinalDocument:
    """Concatenate committed contents in topological order (ties by task id)."""
    order = graph.compiled_order()
    sections = []
    for task_id in order:
        entry = memory.committed_entry(task_id)
        if entry is None:
            raise MissingCommitError(f"task {task_id!r} has no committed entry in memory")
        sections.append(
            DocumentSection(
                task_id=task_id,
                content=entry.output.content,
                facts=entry.output.emitted_facts,
            )
        )
    return FinalDocument(tuple(sections))


@dataclass(frozen=True)
class RunResult:
    document: FinalDocument
    log: RunLog
    report: RunReport


@dataclass
class _Execution:
    task: SubTask
    agent: Agent
    attempt: int
    mode: RouteMode
    tiebreak: float
    output: CandidateOutput | None = None

    @property
    def key(self) -> EntryKey:
        assert self.output is not None
        return self.output.key


class Orchestrator:
    """Runs one scenario to completion under one configuration."""

    def __init__(
        self,
        scenario: Scenario,
        config: RunConfig | None = None,
        memory_audit_path: str | None = None,
    ) -> None:
        self.scenario = scenario
        self.config = config if config is not None else RunConfig()
        self.graph = scenario.build_graph()
        self.agents = scenario.build_agents()
        self.memory = SharedMemory(
            task_markers={t.id: t.domain_markers for t in scenario.tasks},
            audit_path=memory_audit_path,
        )
        self.bus = FeedbackBus(self.memory)
        self.router = Router(
            self.agents,
            theta=self.config.theta,
            k=self.config.k,
            perf_weight=self.config.w1,
            capacity_weight=self.config.w2,
        )
        self.evaluator = Evaluator(
            memory=self.memory,
            scorer=self._build_scorer(),
            weights=self.config.weights,
            domain_weights=self.config.domain_weights,
            fact_threshold=self.config.fact_threshold,
            contradiction_pairs=list(scenario.contradiction_pairs),
        )
        self.log = RunLog()
        self._rng = random.Random(self.config.seed)
        self._clock = 0.0
        self._waves = 0
        self._dispatches = 0
        self._attempts: dict[str, int] = {t.id: 0 for t in scenario.tasks}
        self._revisions: dict[str, int] = {t.id: 0 for t in scenario.tasks}
        self._pinned: dict[str, str] = {}
        if self.config.static:
            missing = sorted(
                t.id for t in scenario.tasks if t.id not in scenario.static_assignments
            )
            if missing:
                raise ScenarioValidationError(
                    "$.static_assignments",
                    f"static variant needs an assignment for every task; missing {missing}",
                )

    def run(self) -> RunResult:
        """Execute the full loop and return (document, log, report)."""
        while True:
            assignable = self.graph.ready_tasks()
            if not assignable:
                if self.graph.all_committed():
                    break
                raise DeadlockError(
                    "uncommitted tasks remain but none are assignable"
                )
            executed = self._run_wave(sorted(assignable))
            if executed == 0:
                raise DeadlockError(
                    "no agent has spare capacity for any assignable task"
                )
            self._waves += 1
            if self.config.static:
                self._static_quality_gate()
            elif not self.config.no_feedback:
                self._review_and_process_feedback()

        bound = len(self.graph.tasks) * (1 + self.config.revision_budget) * max(1, self.config.k)
        assert self._dispatches <= bound, (
            f"dispatch bound violated: {self._dispatches} > {bound}"
        )
        self.log.append(
            "terminate",
            self._clock,
            {"reason": "completed", "waves": self._waves, "dispatches": self._dispatches},
        )
        document = compile_final_output(self.memory, self.graph)
        for agent in self.agents.values():
            assert agent.profile.load == 0, f"agent {agent.profile.id} still loaded"
        report = build_report(self.log, self.scenario)
        return RunResult(document=document, log=self.log, report=report)

    # -- wave mechanics -----------------------------------------------------

    def _run_wave(self, assignable: list[str]) -> int:
        wave_start = self._clock
        planned: list[_Execution] = []
        for task_id in assignable:
            task = self.graph.task(task_id)
            decision = self._decide(task)
            if decision.mode is RouteMode.DEFER:
                continue
            self.graph.mark_in_progress(task_id)
            attempt = self._attempts[task_id]
            for agent_id in decision.assignees:
                agent = self.agents[agent_id]
                # Static queues serialize per agent, so pinned work waits instead
                # of running concurrently; load counts running tasks only.
                if not self.config.static:
                    agent.profile.load += 1
                planned.append(
                    _Execution(
                        task=task,
                        agent=agent,
                        attempt=attempt,
                        mode=decision.mode,
                        tiebreak=self._rng.random(),
                    )
                )
                self._dispatches += 1
                self.log.append(
                    "dispatch",
                    wave_start,
                    {
                        "task_id": task_id,
                        "agent_id": agent_id,
                        "attempt": attempt,
                        "mode": decision.mode.value,
                        "wave": self._waves,
                    },
                )
        if not planned:
            return 0

        view = (
            self.memory.empty_view()
            if self.config.no_memory_sharing
            else self.memory.view()
        )
        agent_cursor: dict[str, float] = {}
        for ex in planned:
            agent_id = ex.agent.profile.id
            if self.config.static:
                # Fixed-role agents work their wave queue one task at a time.
                start = wave_start + agent_cursor.get(agent_id, 0.0)
                latency = ex.agent.latency(ex.task, ex.attempt)
                agent_cursor[agent_id] = (start - wave_start) + latency
            else:
                start = wave_start
            ex.output = ex.agent.execute(ex.task, view, ex.attempt, start)

        wave_end = max(ex.output.produced_at for ex in planned)

        # Versions follow completion time; simultaneous completions are ordered
        # by the seeded tiebreak so replay of one seed is exact.
        for ex in sorted(planned, key=lambda e: (e.output.produced_at, e.tiebreak)):
            self.memory.store(ex.key, ex.output)
            entry = self.memory.entry(ex.key)
            self.log.append("store", ex.output.produced_at, entry.to_audit_dict())

        by_task: dict[str, list[_Execution]] = {}
        for ex in planned:
            by_task.setdefault(ex.task.id, []).append(ex)
        for task_id in sorted(by_task):
            group = by_task[task_id]
            task = self.graph.task(task_id)
            if len(group) > 1:
                winner_key = self.evaluator.select_best([ex.key for ex in group], self.graph)
            else:
                winner_key = group[0].key
            entry = self.memory.entry(winner_key)
            self.evaluator.score_entry(entry, task)
            self.memory.commit(task_id, winner_key)
            self.graph.mark_committed(task_id, winner_key)
            self.log.append(
                "commit",
                wave_end,
                {
                    "task_id": task_id,
                    "agent_id": entry.agent_id,
                    "attempt": entry.attempt,
                    "version": entry.version,
                    "score": entry.score.to_dict() if entry.score else None,
                },
            )

        if not self.config.static:
            for ex in planned:
                ex.agent.profile.load -= 1
        self._clock = wave_end
        return len(planned)

    def _decide(self, task: SubTask) -> RoutingDecision:
        if self.config.static:
            return RoutingDecision(
                task.id,
                RouteMode.SINGLE,
                (self.scenario.static_assignments[task.id],),
            )
        pinned = self._pinned.pop(task.id, None)
        if pinned is not None and self.agents[pinned].profile.has_spare_capacity:
            return RoutingDecision(task.id, RouteMode.SINGLE, (pinned,))
        return self.router.route(task, allow_parallel=not self.config.no_parallel)

    # -- feedback processing --------------------------------------------------

    def _review_and_process_feedback(self) -> None:
        messages = self.evaluator.review(self.graph)
        for msg in messages:
            self.bus.publish(msg)
            self.log.append("feedback", self._clock, msg.to_dict())

        drained = []
        for target in sorted(self.agents) + [ORCHESTRATOR_TARGET]:
            drained.extend(self.bus.drain(target))

        revised: set[str] = set()
        for msg in drained:
            if not requires_revision(msg, self.config.severity_threshold):
                continue
            task_id = msg.task_id
            if task_id in revised:
                continue
            if self._revisions[task_id] >= self.config.revision_budget:
                logger.info("budget_exhausted task=%s feedback=%s", task_id, msg.id)
                continue
            if self.graph.task(task_id).status is not TaskStatus.COMMITTED:
                continue
            self._revisions[task_id] += 1
            self._attempts[task_id] += 1
            stale = self.graph.mark_needs_revision(task_id)
            decision = self.router.reassign(self.graph, msg.target, task_id)
            assignee = decision.assignees[0]
            self._pinned[task_id] = assignee
            self.log.append(
                "reassign",
                self._clock,
                {
                    "task_id": task_id,
                    "agent_id": assignee,
                    "attempt": self._attempts[task_id],
                    "reason": "revision_request",
                    "stale": sorted(stale),
                },
            )
            adapt_strategy(
                self.agents[msg.target].profile,
                msg,
                self.graph.task(task_id).domain_markers,
                self.config.adapt_decrement,
            )
            revised.add(task_id)

    def _static_quality_gate(self) -> None:
        """Bus-less redo loop for the static variant.

        Fixed-role pipelines have no feedback channel, but they do redo work
        that fails a factuality bar; each redo re-runs the same pinned agent on
        the next attempt row, bounded by the revision budget.
        """
        for task_id in sorted(self.graph.tasks):
            task = self.graph.task(task_id)
            if task.status is not TaskStatus.COMMITTED:
                continue
            entry = self.memory.committed_entry(task_id)
            if entry is None or entry.score is None:
                continue
            if entry.score.factuality >= self.config.fact_threshold:
                continue
            if self._revisions[task_id] >= self.config.revision_budget:
                logger.info("budget_exhausted task=%s (quality gate)", task_id)
                continue
            self._revisions[task_id] += 1
            self._attempts[task_id] += 1
            stale = self.graph.mark_needs_revision(task_id)
            self.log.append(
                "reassign",
                self._clock,
                {
                    "task_id": task_id,
                    "agent_id": self.scenario.static_assignments[task_id],
                    "attempt": self._attempts[task_id],
                    "reason": "quality_gate",
                    "stale": sorted(stale),
                },
            )

    def _build_scorer(self) -> Scorer:
        if self.config.scorer == "lexical":
            return LexicalScorer()
        fallback = LexicalScorer() if self.config.scorer_fallback == "lexical" else None
        return ScriptedScorer(self.scenario.annotations(), fallback=fallback)


def orchestrate(scenario: Scenario, config: RunConfig | None = None) -> RunResult:
    """Run a scenario to completion; see Orchestrator for the loop semantics."""
    return Orchestrator(scenario, config).run()
