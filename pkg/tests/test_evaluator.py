"""Evaluator selection and committed-state review."""

from __future__ import annotations

import random

import pytest

from taskweave import (
    CandidateOutput,
    EmptyCandidateSetError,
    Evaluator,
    FeedbackKind,
    LexicalScorer,
    ScoringWeights,
    ScriptedScorer,
    SharedMemory,
    build_graph,
)

from conftest import make_task


def build_world(task_specs, scorer, **evaluator_kwargs):
    graph = build_graph(task_specs)
    memory = SharedMemory(task_markers={t.id: t.domain_markers for t in task_specs})
    return graph, memory, Evaluator(memory=memory, scorer=scorer, **evaluator_kwargs)


def put(memory, task="t1", agent="a", attempt=0, facts=(), content="text", commit=False):
    output = CandidateOutput(
        task_id=task,
        agent_id=agent,
        attempt=attempt,
        content=content,
        emitted_facts=frozenset(facts),
        declared_confidence=0.5,
        produced_at=0.0,
    )
    memory.store(output.key, output)
    if commit:
        memory.commit(task, output.key)
    return output.key


def mark_committed_in_graph(graph, task_id, key):
    graph.mark_in_progress(task_id)
    graph.mark_committed(task_id, key)


def test_select_best_prefers_higher_composite():
    annotations = {
        ("t1", "c1", 0): (0.9, 0.5, 0.7),
        ("t1", "c2", 0): (0.6, 0.9, 0.8),
    }
    graph, memory, evaluator = build_world(
        [make_task("t1")], ScriptedScorer(annotations)
    )
    k1 = put(memory, agent="c1")
    k2 = put(memory, agent="c2")
    # independent oracle: 0.68 vs 0.78
    weights = ScoringWeights()
    s1 = weights.alpha * 0.9 + weights.beta * 0.5 + weights.gamma * 0.7
    s2 = weights.alpha * 0.6 + weights.beta * 0.9 + weights.gamma * 0.8
    assert (pytest.approx(s1), pytest.approx(s2)) == (0.68, 0.78)
    assert evaluator.select_best([k1, k2], graph) == k2


def test_select_best_tie_breaks_on_lower_agent_id():
    annotations = {
        ("t1", "a02", 0): (0.5, 0.5, 0.5),
        ("t1", "a01", 0): (0.5, 0.5, 0.5),
    }
    graph, memory, evaluator = build_world([make_task("t1")], ScriptedScorer(annotations))
    k_hi = put(memory, agent="a02")
    k_lo = put(memory, agent="a01")
    assert evaluator.select_best([k_hi, k_lo], graph) == k_lo


def test_select_best_single_candidate_wins():
    graph, memory, evaluator = build_world(
        [make_task("t1", reference={"f1"})], LexicalScorer()
    )
    key = put(memory, facts={"f1"})
    assert evaluator.select_best([key], graph) == key


def test_select_best_empty_set_rejected():
    graph, _, evaluator = build_world([make_task("t1")], LexicalScorer())
    with pytest.raises(EmptyCandidateSetError):
        evaluator.select_best([], graph)


def test_select_best_caches_breakdowns():
    calls = []

    class CountingScorer:
        def components(self, output, task):
            calls.append(output.key)
            return (1.0, 1.0, 1.0)

    graph, memory, evaluator = build_world([make_task("t1")], CountingScorer())
    keys = [put(memory, agent=f"a{i}") for i in range(3)]
    evaluator.select_best(keys, graph)
    evaluator.select_best(keys, graph)
    assert len(calls) == 3


def brute_force_argmax(entries):
    """Independent scan with the documented tie-break."""
    best = None
    for entry in entries:
        rank = (
            -entry.score.composite,
            entry.agent_id,
            entry.attempt,
            entry.version,
        )
        if best is None or rank < best[0]:
            best = (rank, entry.key)
    return best[1]


def test_select_best_agrees_with_brute_force_on_random_sets():
    rng = random.Random(99)
    for trial in range(200):
        n = rng.randint(1, 10)
        annotations = {}
        keys = []
        for i in range(n):
            agent = f"a{rng.randint(0, 3)}"
            attempt = rng.randint(0, 2)
            key = ("t1", agent, attempt)
            if key in annotations:
                continue
            grid = lambda: rng.randint(0, 20) / 20
            annotations[key] = (grid(), grid(), grid())
            keys.append(key)
        graph, memory, evaluator = build_world(
            [make_task("t1")], ScriptedScorer(annotations)
        )
        for task, agent, attempt in keys:
            put(memory, task=task, agent=agent, attempt=attempt)
        winner = evaluator.select_best(keys, graph)
        entries = [memory.entry(k) for k in keys]
        assert winner == brute_force_argmax(entries)


def test_argmax_invariant_under_uniform_component_scaling():
    rng = random.Random(5)
    for trial in range(100):
        n = rng.randint(2, 8)
        triples = {
            ("t1", f"a{i:02d}", 0): (
                rng.randint(0, 16) / 16,
                rng.randint(0, 16) / 16,
                rng.randint(0, 16) / 16,
            )
            for i in range(n)
        }
        c = rng.choice([1.0, 0.5, 0.25, 0.125, 0.0625])
        scaled = {k: (v[0] * c, v[1] * c, v[2] * c) for k, v in triples.items()}

        winners = []
        for annotations in (triples, scaled):
            graph, memory, evaluator = build_world(
                [make_task("t1")], ScriptedScorer(annotations)
            )
            keys = [put(memory, agent=agent) for (_, agent, _) in sorted(annotations)]
            winners.append(evaluator.select_best(keys, graph))
        assert winners[0] == winners[1]


def test_review_flags_low_factuality_with_complement_severity():
    annotations = {("t1", "a", 0): (1.0, 0.3, 1.0)}
    graph, memory, evaluator = build_world(
        [make_task("t1")], ScriptedScorer(annotations)
    )
    key = put(memory, commit=True)
    mark_committed_in_graph(graph, "t1", key)
    messages = evaluator.review(graph)
    assert len(messages) == 1
    msg = messages[0]
    assert msg.kind is FeedbackKind.REVISION_REQUEST
    assert msg.severity == pytest.approx(1.0 - 0.3)
    assert msg.target == "a"
    assert msg.referenced_version == 1


def test_review_empty_store_emits_nothing():
    graph, _, evaluator = build_world([make_task("t1")], LexicalScorer())
    assert evaluator.review(graph) == []


def test_review_ignores_factuality_at_threshold():
    annotations = {("t1", "a", 0): (1.0, 0.6, 1.0)}
    graph, memory, evaluator = build_world(
        [make_task("t1")], ScriptedScorer(annotations), fact_threshold=0.6
    )
    key = put(memory, commit=True)
    mark_committed_in_graph(graph, "t1", key)
    assert evaluator.review(graph) == []


def test_review_flags_contradiction_on_later_committed_entry():
    specs = [make_task("t1", reference={"debt_low"}), make_task("t2", reference={"debt_high"})]
    graph, memory, evaluator = build_world(
        specs,
        LexicalScorer(),
        contradiction_pairs=[("debt_low", "debt_high")],
    )
    k1 = put(memory, task="t1", facts={"debt_low"}, commit=True)
    mark_committed_in_graph(graph, "t1", k1)
    k2 = put(memory, task="t2", agent="b", facts={"debt_high"}, commit=True)
    mark_committed_in_graph(graph, "t2", k2)
    messages = evaluator.review(graph)
    assert len(messages) == 1
    msg = messages[0]
    assert msg.task_id == "t2"
    assert msg.severity == 1.0
    assert "debt" in msg.note


def test_review_ignores_pair_inside_a_single_entry():
    specs = [make_task("t1", reference={"debt_low", "debt_high"})]
    graph, memory, evaluator = build_world(
        specs,
        LexicalScorer(),
        contradiction_pairs=[("debt_low", "debt_high")],
    )
    key = put(memory, facts={"debt_low", "debt_high"}, commit=True)
    mark_committed_in_graph(graph, "t1", key)
    assert evaluator.review(graph) == []


def test_review_skips_tasks_already_under_revision():
    annotations = {("t1", "a", 0): (1.0, 0.1, 1.0)}
    graph, memory, evaluator = build_world(
        [make_task("t1")], ScriptedScorer(annotations)
    )
    key = put(memory, commit=True)
    mark_committed_in_graph(graph, "t1", key)
    graph.mark_needs_revision("t1")
    assert evaluator.review(graph) == []


def test_review_is_deterministic():
    annotations = {
        ("t1", "a", 0): (1.0, 0.2, 1.0),
        ("t2", "b", 0): (1.0, 0.1, 1.0),
    }
    specs = [make_task("t1"), make_task("t2")]
    graph, memory, evaluator = build_world(specs, ScriptedScorer(annotations))
    for task, agent in (("t1", "a"), ("t2", "b")):
        key = put(memory, task=task, agent=agent, commit=True)
        mark_committed_in_graph(graph, task, key)
    first = [(m.task_id, m.severity) for m in evaluator.review(graph)]
    second = [(m.task_id, m.severity) for m in evaluator.review(graph)]
    assert first == second == [("t1", 0.8), ("t2", 0.9)]


def test_domain_weight_table_overrides_defaults():
    annotations = {("t1", "a", 0): (1.0, 0.0, 0.0)}
    graph, memory, evaluator = build_world(
        [make_task("t1", markers={"legal"})],
        ScriptedScorer(annotations),
        domain_weights={"legal": ScoringWeights(1.0, 0.0, 0.0)},
    )
    key = put(memory)
    breakdown = evaluator.score_entry(memory.entry(key), graph.task("t1"))
    assert breakdown.composite == 1.0
