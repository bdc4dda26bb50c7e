"""Task decomposition as a directed acyclic dependency graph with per-task lifecycle.

The graph shape is frozen at construction; only task statuses mutate afterwards,
and only through the transition methods below. A single writer (the orchestrator)
is assumed for mutation; reads are safe from anywhere.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .errors import (
    CycleError,
    DuplicateIdError,
    InvalidTransitionError,
    MissingCommitError,
    UnknownDependencyError,
)


class TaskStatus(str, Enum):
    PENDING = "pending"
    READY = "ready"
    IN_PROGRESS = "in_progress"
    COMMITTED = "committed"
    NEEDS_REVISION = "needs_revision"


@dataclass(frozen=True)
class TaskSpec:
    """Immutable task descriptor as declared by a scenario."""

    id: str
    description: str = ""
    domain_markers: frozenset[str] = frozenset()
    ambiguity: float = 0.0
    expected_effort: int = 0
    reference_facts: frozenset[str] = frozenset()
    depends_on: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("task id must be non-empty")
        if not 0.0 <= self.ambiguity <= 1.0:
            raise ValueError(f"ambiguity must be in [0, 1], got {self.ambiguity}")
        if self.expected_effort < 0:
            raise ValueError("expected_effort must be nonnegative")


@dataclass
class SubTask:
    """One vertex of the task graph: a TaskSpec plus runtime state."""

    id: str
    description: str
    domain_markers: frozenset[str]
    ambiguity: float
    expected_effort: int
    reference_facts: frozenset[str]
    depends_on: frozenset[str]
    status: TaskStatus = TaskStatus.PENDING
    committed_ref: tuple[str, str, int] | None = None

    @classmethod
    def from_spec(cls, spec: TaskSpec) -> SubTask:
        return cls(
            id=spec.id,
            description=spec.description,
            domain_markers=spec.domain_markers,
            ambiguity=spec.ambiguity,
            expected_effort=spec.expected_effort,
            reference_facts=spec.reference_facts,
            depends_on=spec.depends_on,
        )


@dataclass
class TaskGraph:
    """Dependency DAG over SubTasks; edge (a, b) means b consumes a's output."""

    tasks: dict[str, SubTask] = field(default_factory=dict)
    edges: frozenset[tuple[str, str]] = frozenset()

    def __contains__(self, task_id: str) -> bool:
        return task_id in self.tasks

    def task(self, task_id: str) -> SubTask:
        return self.tasks[task_id]

    def dependents(self, task_id: str) -> tuple[str, ...]:
        """Direct downstream consumers of task_id, in id order."""
        return tuple(sorted(to for frm, to in self.edges if frm == task_id))

    def ready_tasks(self) -> set[str]:
        """Tasks assignable right now.

        A task is assignable when its status is ready or needs_revision and every
        dependency is committed.
        """
        out: set[str] = set()
        for task in self.tasks.values():
            if task.status not in (TaskStatus.READY, TaskStatus.NEEDS_REVISION):
                continue
            if all(self.tasks[dep].status is TaskStatus.COMMITTED for dep in task.depends_on):
                out.add(task.id)
        return out

    def all_committed(self) -> bool:
        return all(t.status is TaskStatus.COMMITTED for t in self.tasks.values())

    def mark_in_progress(self, task_id: str) -> None:
        """Transition an assignable task to in_progress (dispatch bookkeeping)."""
        task = self._require(task_id)
        if task.status not in (TaskStatus.READY, TaskStatus.NEEDS_REVISION):
            raise InvalidTransitionError(
                f"task {task_id!r} is {task.status.value}, expected ready or needs_revision"
            )
        task.status = TaskStatus.IN_PROGRESS

    def mark_committed(self, task_id: str, output_ref: tuple[str, str, int]) -> None:
        """Commit an in_progress task and promote any dependents that became assignable."""
        task = self._require(task_id)
        if task.status is not TaskStatus.IN_PROGRESS:
            raise InvalidTransitionError(
                f"task {task_id!r} is {task.status.value}, expected in_progress"
            )
        task.status = TaskStatus.COMMITTED
        task.committed_ref = output_ref
        for dep_id in self.dependents(task_id):
            dependent = self.tasks[dep_id]
            if dependent.status is TaskStatus.PENDING and all(
                self.tasks[d].status is TaskStatus.COMMITTED for d in dependent.depends_on
            ):
                dependent.status = TaskStatus.READY

    def mark_needs_revision(self, task_id: str) -> set[str]:
        """Reopen a committed task for revision.

        Returns the ids of direct dependents that are already committed. Those stay
        committed (no cascade) but are flagged stale so the evaluator re-reviews them
        against the revised output once it re-commits.
        """
        task = self._require(task_id)
        if task.status is not TaskStatus.COMMITTED:
            raise InvalidTransitionError(
                f"task {task_id!r} is {task.status.value}, expected committed"
            )
        task.status = TaskStatus.NEEDS_REVISION
        return {
            dep_id
            for dep_id in self.dependents(task_id)
            if self.tasks[dep_id].status is TaskStatus.COMMITTED
        }

    def topological_order(self) -> tuple[str, ...]:
        """Deterministic topological ordering; ties broken by task id."""
        indegree = {tid: len(task.depends_on) for tid, task in self.tasks.items()}
        ready = [tid for tid, deg in indegree.items() if deg == 0]
        heapq.heapify(ready)
        order: list[str] = []
        while ready:
            tid = heapq.heappop(ready)
            order.append(tid)
            for dep_id in self.dependents(tid):
                indegree[dep_id] -= 1
                if indegree[dep_id] == 0:
                    heapq.heappush(ready, dep_id)
        if len(order) != len(self.tasks):
            raise CycleError(_find_cycle(self.tasks))
        return tuple(order)

    def compiled_order(self) -> tuple[str, ...]:
        """Topological order, requiring every task to be committed."""
        for task in self.tasks.values():
            if task.status is not TaskStatus.COMMITTED:
                raise MissingCommitError(f"task {task.id!r} has no committed output")
        return self.topological_order()

    def _require(self, task_id: str) -> SubTask:
        try:
            return self.tasks[task_id]
        except KeyError:
            raise InvalidTransitionError(f"unknown task {task_id!r}") from None


def build_graph(specs: Iterable[TaskSpec]) -> TaskGraph:
    """Construct a validated TaskGraph from task descriptors.

    Tasks without dependencies start ready, all others pending. Raises
    DuplicateIdError, UnknownDependencyError, or CycleError (citing one cycle).
    """
    tasks: dict[str, SubTask] = {}
    for spec in specs:
        if spec.id in tasks:
            raise DuplicateIdError(f"duplicate task id {spec.id!r}")
        tasks[spec.id] = SubTask.from_spec(spec)

    edges: set[tuple[str, str]] = set()
    for task in tasks.values():
        for dep in task.depends_on:
            if dep not in tasks:
                raise UnknownDependencyError(
                    f"task {task.id!r} depends on unknown id {dep!r}"
                )
            edges.add((dep, task.id))

    cycle = _find_cycle(tasks)
    if cycle:
        raise CycleError(cycle)

    for task in tasks.values():
        if not task.depends_on:
            task.status = TaskStatus.READY
    return TaskGraph(tasks=tasks, edges=frozenset(edges))


def _find_cycle(tasks: dict[str, SubTask]) -> tuple[str, ...]:
    """Return one dependency cycle as a closed path, or () when acyclic."""
    consumers: dict[str, list[str]] = {tid: [] for tid in tasks}
    for task in tasks.values():
        for dep in task.depends_on:
            if dep in consumers:
                consumers[dep].append(task.id)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {tid: WHITE for tid in tasks}
    stack: list[str] = []

    def visit(tid: str) -> tuple[str, ...]:
        color[tid] = GRAY
        stack.append(tid)
        for nxt in sorted(consumers[tid]):
            if color[nxt] == GRAY:
                start = stack.index(nxt)
                return tuple(stack[start:]) + (nxt,)
            if color[nxt] == WHITE:
                found = visit(nxt)
                if found:
                    return found
        stack.pop()
        color[tid] = BLACK
        return ()

    for tid in sorted(tasks):
        if color[tid] == WHITE:
            found = visit(tid)
            if found:
                return found
    return ()
