"""Append-only blackboard of candidate and committed outputs.

Every stored output stays retrievable for the whole run (losing parallel
candidates included); at most one entry per task is committed at any instant.
An optional JSON-lines audit file receives one line per store and per commit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Protocol

from .agents import CandidateOutput
from .errors import DuplicateKeyError, UnknownEntryError
from .scoring import ScoreBreakdown

EntryKey = tuple[str, str, int]


@dataclass
class MemoryEntry:
    key: EntryKey
    output: CandidateOutput
    version: int
    committed: bool = False
    committed_seq: int | None = None
    score: ScoreBreakdown | None = None

    @property
    def task_id(self) -> str:
        return self.key[0]

    @property
    def agent_id(self) -> str:
        return self.key[1]

    @property
    def attempt(self) -> int:
        return self.key[2]

    def to_audit_dict(self) -> dict:
        """Serialize with the exact audit-log field names."""
        return {
            "task_id": self.task_id,
            "agent_id": self.agent_id,
            "attempt": self.attempt,
            "version": self.version,
            "committed": self.committed,
            "emitted_facts": sorted(self.output.emitted_facts),
            "declared_confidence": self.output.declared_confidence,
            "score": self.score.to_dict() if self.score is not None else None,
        }


class MemoryBackend(Protocol):
    """Storage seam; only the in-process backend ships."""

    def append(self, entry: MemoryEntry) -> None: ...

    def entries(self) -> Iterator[MemoryEntry]: ...


class InProcessBackend:
    def __init__(self) -> None:
        self._entries: list[MemoryEntry] = []

    def append(self, entry: MemoryEntry) -> None:
        self._entries.append(entry)

    def entries(self) -> Iterator[MemoryEntry]:
        return iter(self._entries)


class MemoryView:
    """Read handle agents receive at execute time."""

    def __init__(self, entries: list[MemoryEntry]):
        self._entries = entries

    def committed_facts(self) -> frozenset[str]:
        """Union of emitted facts across currently committed entries."""
        facts: set[str] = set()
        for entry in self._entries:
            if entry.committed:
                facts |= entry.output.emitted_facts
        return frozenset(facts)

    def committed_content(self, task_id: str) -> str | None:
        for entry in self._entries:
            if entry.committed and entry.task_id == task_id:
                return entry.output.content
        return None


class SharedMemory:
    """Versioned, append-only store of every candidate output.

    task_markers maps task id to its domain markers so committed entries can be
    queried by marker without holding the graph.
    """

    def __init__(
        self,
        task_markers: dict[str, frozenset[str]] | None = None,
        backend: MemoryBackend | None = None,
        audit_path: str | Path | None = None,
    ) -> None:
        self._backend = backend if backend is not None else InProcessBackend()
        self._by_key: dict[EntryKey, MemoryEntry] = {}
        self._by_task: dict[str, list[MemoryEntry]] = {}
        self._by_version: dict[int, MemoryEntry] = {}
        self._task_markers = dict(task_markers or {})
        self._next_version = 1
        self._next_commit_seq = 1
        self._audit_path = Path(audit_path) if audit_path is not None else None
        if self._audit_path is not None:
            self._audit_path.write_text("", encoding="utf-8")

    def store(self, key: EntryKey, output: CandidateOutput) -> int:
        """Store a candidate under a fresh version; keys are never overwritten."""
        if key in self._by_key:
            raise DuplicateKeyError(f"memory key {key!r} already stored")
        entry = MemoryEntry(key=key, output=output, version=self._next_version)
        self._next_version += 1
        self._backend.append(entry)
        self._by_key[key] = entry
        self._by_task.setdefault(key[0], []).append(entry)
        self._by_version[entry.version] = entry
        self._write_audit(entry)
        return entry.version

    def candidates(self, task_id: str) -> list[MemoryEntry]:
        """All entries for a task, committed or not, in version order."""
        return list(self._by_task.get(task_id, []))

    def commit(self, task_id: str, key: EntryKey) -> MemoryEntry:
        """Mark one entry as the task's committed output, demoting any previous winner."""
        entry = self._by_key.get(key)
        if entry is None or entry.task_id != task_id:
            raise UnknownEntryError(f"no entry {key!r} for task {task_id!r}")
        for other in self._by_task.get(task_id, []):
            if other.committed and other is not entry:
                other.committed = False
        entry.committed = True
        entry.committed_seq = self._next_commit_seq
        self._next_commit_seq += 1
        self._write_audit(entry)
        return entry

    def committed_entry(self, task_id: str) -> MemoryEntry | None:
        for entry in self._by_task.get(task_id, []):
            if entry.committed:
                return entry
        return None

    def committed_entries(self) -> list[MemoryEntry]:
        """Every currently committed entry, version order."""
        return [e for e in self._backend.entries() if e.committed]

    def query_by_marker(self, marker: str) -> list[MemoryEntry]:
        """Committed entries whose task carries the marker, version order."""
        return [
            entry
            for entry in self.committed_entries()
            if marker in self._task_markers.get(entry.task_id, frozenset())
        ]

    def entry(self, key: EntryKey) -> MemoryEntry:
        entry = self._by_key.get(key)
        if entry is None:
            raise UnknownEntryError(f"no entry {key!r}")
        return entry

    def has_version(self, version: int) -> bool:
        return version in self._by_version

    def view(self) -> MemoryView:
        return MemoryView(list(self._backend.entries()))

    def empty_view(self) -> MemoryView:
        return MemoryView([])

    def __len__(self) -> int:
        return len(self._by_key)

    def _write_audit(self, entry: MemoryEntry) -> None:
        if self._audit_path is None:
            return
        with self._audit_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry.to_audit_dict(), sort_keys=True) + "\n")
