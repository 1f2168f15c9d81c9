"""Acceptance suite: one test per release criterion.

Each test prints an ``ACCEPTANCE PASS`` line on success (visible with
``pytest -s``); every expected value is either asserted exactly or checked
against an independent brute-force oracle computed in this module.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import time

import pytest

from conftest import (
    auto_auto_script,
    write_condition_config,
    write_script,
    write_workspace,
)
from nuggeteval import formats, pipeline
from nuggeteval.assigner import assign
from nuggeteval.config import StageConfig
from nuggeteval.errors import IllegalLabelError, LengthMismatchError
from nuggeteval.gateway.client import MockLLMClient, RetryPolicy, ScriptEntry
from nuggeteval.gateway.parsing import (
    parse_label_list,
    parse_string_list,
    serialize_string_list,
)
from nuggeteval.meta import (
    ScoreMatrix,
    all_pairs_correlation,
    confusion_matrix,
    kendall_tau_b,
    run_level_correlation,
)
from nuggeteval.model import (
    Answer,
    Assigner,
    AssignmentLabel,
    AssignmentRecord,
    Importance,
    Nugget,
    NuggetSet,
    Provenance,
    QrelsSource,
    Segment,
    Topic,
)
from nuggeteval.nuggetizer import create_nuggets, label_importance, select_top
from nuggeteval.scorer import score_strict

S, PS, NS = (
    AssignmentLabel.SUPPORT,
    AssignmentLabel.PARTIAL_SUPPORT,
    AssignmentLabel.NOT_SUPPORT,
)
V, O = Importance.VITAL, Importance.OKAY

FAST = StageConfig(retry=RetryPolicy(base_delay=0.0))


def report(line: str) -> None:
    print(f"ACCEPTANCE PASS: {line}")


def build_pair(topic_id, importances, labels, run_id="r1"):
    nugget_set = NuggetSet(
        topic_id=topic_id,
        nuggets=tuple(Nugget(f"fact {i}", imp) for i, imp in enumerate(importances)),
        provenance=Provenance.AUTO,
        qrels_source=QrelsSource.AUTOMATIC,
    )
    record = AssignmentRecord(run_id, topic_id, tuple(labels), Assigner.AUTO)
    return nugget_set, record


def test_scoring_micro_check():
    """Five displayed nuggets (4 vital + 1 okay; S, NS, PS, S, PS) score
    exactly 0.4 over all nuggets and 0.5 over vital ones."""
    nugget_set, record = build_pair("t1", [V, V, V, V, O], [S, NS, PS, S, PS])
    scores = score_strict(nugget_set, record)
    assert scores.a_strict == 0.4
    assert scores.v_strict == 0.5
    report("5-nugget micro-check: a_strict=0.4, v_strict=0.5 exactly")


def test_scoring_matches_brute_force_oracle():
    rng = random.Random(20240814)
    started = time.perf_counter()
    for _ in range(1000):
        n = rng.randrange(1, 21)
        importances = [rng.choice([V, O]) for _ in range(n)]
        labels = [rng.choice([S, PS, NS]) for _ in range(n)]
        nugget_set, record = build_pair("t1", importances, labels)
        scores = score_strict(nugget_set, record)

        supported = sum(1 for label in labels if label is S)
        vital_total = sum(1 for imp in importances if imp is V)
        vital_supported = sum(
            1 for imp, label in zip(importances, labels) if imp is V and label is S
        )
        assert scores.a_strict == supported / n
        if vital_total == 0:
            assert scores.v_strict is None
        else:
            assert scores.v_strict == vital_supported / vital_total
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0
    report(f"1000 random scoring pairs equal the brute-force counter in {elapsed:.2f}s")


def brute_force_tau_b(x, y):
    concordant = discordant = ties_x = ties_y = 0
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            dx, dy = x[i] - x[j], y[i] - y[j]
            if dx == 0 and dy == 0:
                continue
            if dx == 0:
                ties_x += 1
            elif dy == 0:
                ties_y += 1
            elif (dx > 0) == (dy > 0):
                concordant += 1
            else:
                discordant += 1
    denominator = math.sqrt(
        (concordant + discordant + ties_x) * (concordant + discordant + ties_y)
    )
    if denominator == 0:
        return None
    return (concordant - discordant) / denominator


def test_tau_b_matches_pair_counting_oracle():
    rng = random.Random(99)
    started = time.perf_counter()
    checked = 0
    for _ in range(1000):
        n = rng.randrange(2, 51)
        x = [rng.randrange(0, 8) / 7 for _ in range(n)]
        y = [rng.randrange(0, 8) / 7 for _ in range(n)]
        expected = brute_force_tau_b(x, y)
        actual = kendall_tau_b(x, y)
        if expected is None:
            assert actual is None
        else:
            assert abs(actual - expected) <= 1e-12
            checked += 1
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    report(
        f"1000 tau-b vector pairs within 1e-12 of O(n^2) counting "
        f"({checked} defined) in {elapsed:.2f}s"
    )


def test_granularity_divergence_fixture():
    """Run means can agree perfectly while pooled observations disagree."""
    a = ScoreMatrix("cond_a", "a_strict", {
        ("r1", "t1"): 0.9, ("r1", "t2"): 0.1,
        ("r2", "t1"): 0.6, ("r2", "t2"): 0.2,
    })
    b = ScoreMatrix("cond_b", "a_strict", {
        ("r1", "t1"): 0.1, ("r1", "t2"): 0.9,
        ("r2", "t1"): 0.2, ("r2", "t2"): 0.6,
    })
    run_tau = run_level_correlation(a, b)
    pooled_tau = all_pairs_correlation(a, b)

    means_a, means_b = a.run_means(), b.run_means()
    runs = sorted(means_a)
    oracle_run = brute_force_tau_b([means_a[r] for r in runs], [means_b[r] for r in runs])
    keys = sorted(a.entries)
    oracle_pooled = brute_force_tau_b(
        [a.entries[k] for k in keys], [b.entries[k] for k in keys]
    )
    assert run_tau == pytest.approx(oracle_run) == pytest.approx(1.0)
    assert pooled_tau == pytest.approx(oracle_pooled)
    assert pooled_tau < 1.0
    report(
        f"2x2 fixture: run-level tau={run_tau:.3f}, all-pairs tau={pooled_tau:.3f}"
    )


def test_determinism_of_condition_runs(tmp_path):
    workspace = write_workspace(tmp_path / "ws")
    manifests = []
    for label in ("first", "second"):
        mock = write_script(tmp_path / f"script_{label}.json", auto_auto_script())
        config = write_condition_config(
            tmp_path, workspace, "auto", "auto", "automatic",
            out_dir=tmp_path / f"out_{label}", mock_script=mock,
            baseline=True, name=f"config_{label}.yaml",
        )
        manifests.append(pipeline.run_condition(pipeline.load_config(config)))
    first, second = manifests
    assert first.hash_set == second.hash_set
    names = {path for path, _ in first.files}
    assert {"nuggets.jsonl", "assignments.jsonl", "topic_scores.jsonl",
            "run_scores.jsonl", "correlation_a_strict.json",
            "correlation_v_strict.json"} <= names
    report(f"two mock runs byte-identical across {len(first.files)} files")


def forever(response: str) -> MockLLMClient:
    return MockLLMClient([ScriptEntry(response=response, repeat=None)])


def test_batching_invariants():
    topic = Topic("t1", "query")

    for n_segments in (1, 10, 11, 25):
        client = forever('["a", "b", "c"]')
        create_nuggets(topic, [Segment(f"s{i}", f"text {i}") for i in range(n_segments)],
                       client, FAST)
        assert client.call_count == math.ceil(n_segments / 10)

    for n_nuggets in (1, 10, 11, 20):
        texts = [f"n{i}" for i in range(n_nuggets)]
        client = MockLLMClient([
            ScriptEntry(response=json.dumps(["vital"] * min(10, n_nuggets - start)))
            for start in range(0, n_nuggets, 10)
        ])
        label_importance(topic, texts, client, FAST)
        assert client.call_count == math.ceil(n_nuggets / 10)

        answer = Answer("r1", "t1", "answer text")
        nugget_set = NuggetSet(
            "t1", tuple(Nugget(t, V) for t in texts),
            Provenance.AUTO, QrelsSource.AUTOMATIC,
        )
        client = MockLLMClient([
            ScriptEntry(response=json.dumps(["support"] * min(10, n_nuggets - start)))
            for start in range(0, n_nuggets, 10)
        ])
        assign(topic, nugget_set, answer, client, FAST)
        assert client.call_count == math.ceil(n_nuggets / 10)

    # Caps: creation trims LLM overflow to 30; selection keeps at most 20.
    client = forever(json.dumps([f"n{i}" for i in range(40)]))
    created = create_nuggets(topic, [Segment("s1", "text")], client, FAST)
    assert len(created) == 30
    selected = select_top("t1", [(f"n{i}", V if i % 2 else O) for i in range(30)])
    assert len(selected.nuggets) == 20
    report("creation/importance/assignment calls = ceil(n/10); caps 30/20 hold")


PROSE = ["", "Sure! Here is the list:\n", "Answer follows. ", "(note) "]
TAILS = ["", "!", "\nHope that helps."]
CHARS = 'abcdef XYZ09_,.;:\'"\\ü中'


def test_parser_property_suite():
    rng = random.Random(7)
    for _ in range(1000):
        items = [
            "".join(rng.choice(CHARS) for _ in range(rng.randrange(0, 12)))
            for _ in range(rng.randrange(0, 10))
        ]
        wrapped = rng.choice(PROSE) + serialize_string_list(items) + rng.choice(TAILS)
        assert parse_string_list(wrapped) == items

    labels = ["support", "partial_support", "not_support"]
    allowed = set(labels)
    for _ in range(200):
        n = rng.randrange(1, 11)
        good = [rng.choice(labels) for _ in range(n)]
        wrong_len = n + rng.choice([-1, 1, 2, 5])
        if wrong_len >= 1:
            with pytest.raises(LengthMismatchError):
                parse_label_list(serialize_string_list(good), wrong_len, allowed)
        corrupted = list(good)
        corrupted[rng.randrange(n)] = "maybe"
        with pytest.raises(IllegalLabelError):
            parse_label_list(serialize_string_list(corrupted), n, allowed)
    report("1000 wrapped lists round-trip; every bad label list rejected")


def test_confusion_matrix_properties():
    rng = random.Random(123)
    label_pool = [S, PS, NS]

    def records(stream, assigner):
        return [
            AssignmentRecord(f"r{i // 5}", "t1", tuple(stream[i:i + 5]), assigner)
            for i in range(0, len(stream), 5)
        ]

    for _ in range(20):
        manual_stream = [rng.choice(label_pool) for _ in range(500)]
        auto_stream = [rng.choice(label_pool) for _ in range(500)]
        matrix = confusion_matrix(
            records(manual_stream, Assigner.MANUAL), records(auto_stream, Assigner.AUTO)
        )
        assert sum(sum(row) for row in matrix.counts) == 500
        assert sum(sum(row) for row in matrix.percentages) == pytest.approx(
            100.0, abs=1e-9
        )

    same = [rng.choice(label_pool) for _ in range(500)]
    matrix = confusion_matrix(
        records(same, Assigner.MANUAL), records(same, Assigner.AUTO)
    )
    assert matrix.diagonal_pct == pytest.approx(100.0, abs=1e-9)
    report("confusion percentages sum to 100 +- 1e-9; identical streams are diagonal")


CONDITIONS = [
    ("auto_edited", "manual", "manual"),
    ("manual", "manual", "manual"),
    ("auto", "auto", "automatic"),
    ("auto_edited", "auto", "manual"),
    ("manual", "auto", "manual"),
]


def test_condition_matrix_end_to_end(tmp_path):
    from conftest import EDITED_SETS, MANUAL_SETS, assign_only_script

    workspace = write_workspace(tmp_path / "ws")
    for i, (nugget_mode, assign_mode, qrels_source) in enumerate(CONDITIONS):
        mock = None
        if nugget_mode == "auto" and assign_mode == "auto":
            mock = write_script(tmp_path / f"script_{i}.json", auto_auto_script())
        elif assign_mode == "auto":
            sets = EDITED_SETS if nugget_mode == "auto_edited" else MANUAL_SETS
            mock = write_script(tmp_path / f"script_{i}.json", assign_only_script(sets))
        config = write_condition_config(
            tmp_path, workspace, nugget_mode, assign_mode, qrels_source,
            out_dir=tmp_path / f"out_{i}", mock_script=mock,
            name=f"config_{i}.yaml",
        )
        manifest = pipeline.run_condition(pipeline.load_config(config))
        assert manifest.condition == f"{nugget_mode}/{assign_mode}/{qrels_source}"
        out_dir = tmp_path / f"out_{i}"
        for rel_path, digest in manifest.files:
            blob = (out_dir / rel_path).read_bytes()
            assert hashlib.sha256(blob).hexdigest() == digest
        scores = formats.read_topic_scores(out_dir / "topic_scores.jsonl")
        assert len(scores) == 6  # 2 runs x 3 topics
    report("all five evaluation conditions ran end-to-end with valid manifests")
