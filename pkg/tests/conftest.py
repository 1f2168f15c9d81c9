"""Shared fixtures: a small synthetic workspace with three topics, two runs,
and scripted LLM playback for every condition."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
import yaml

from nuggeteval import formats
from nuggeteval.model import (
    Answer,
    Assigner,
    AssignmentLabel,
    AssignmentRecord,
    Importance,
    Nugget,
    NuggetSet,
    Provenance,
    QrelRecord,
    QrelsSource,
    Segment,
    Topic,
)

TOPICS = [
    Topic("t1", "alpha facts"),
    Topic("t2", "beta facts"),
    Topic("t3", "gamma facts"),
]

SEGMENTS = [
    Segment(f"s{i}", f"passage {i} text about things", title=f"title {i}")
    for i in range(1, 10)
]

# Per topic: three segments, one of which is below the relevance floor.
QRELS_AUTOMATIC = [
    QrelRecord("t1", "s1", 2, QrelsSource.AUTOMATIC),
    QrelRecord("t1", "s2", 1, QrelsSource.AUTOMATIC),
    QrelRecord("t1", "s3", 0, QrelsSource.AUTOMATIC),
    QrelRecord("t2", "s4", 1, QrelsSource.AUTOMATIC),
    QrelRecord("t2", "s5", 2, QrelsSource.AUTOMATIC),
    QrelRecord("t2", "s6", 0, QrelsSource.AUTOMATIC),
    QrelRecord("t3", "s7", 1, QrelsSource.AUTOMATIC),
    QrelRecord("t3", "s8", 0, QrelsSource.AUTOMATIC),
    QrelRecord("t3", "s9", 3, QrelsSource.AUTOMATIC),
]

QRELS_MANUAL = [
    QrelRecord(r.topic_id, r.segment_id, r.grade, QrelsSource.MANUAL)
    for r in QRELS_AUTOMATIC
]

RUNS = ["r1", "r2"]

ANSWERS = [
    Answer(run_id, t.topic_id, f"{run_id} answer text for {t.query}")
    for run_id in RUNS
    for t in TOPICS
]


def _labeled_set(topic_id: str, prefix: str, labels: list[Importance],
                 provenance: Provenance) -> NuggetSet:
    return NuggetSet(
        topic_id=topic_id,
        nuggets=tuple(
            Nugget(f"{prefix} {topic_id} nugget {i}", label)
            for i, label in enumerate(labels)
        ),
        provenance=provenance,
        qrels_source=QrelsSource.MANUAL,
    )


EDITED_SETS = [
    _labeled_set("t1", "edited", [Importance.VITAL, Importance.OKAY], Provenance.AUTO_EDITED),
    _labeled_set("t2", "edited", [Importance.VITAL, Importance.VITAL], Provenance.AUTO_EDITED),
    _labeled_set("t3", "edited", [Importance.OKAY, Importance.VITAL], Provenance.AUTO_EDITED),
]

MANUAL_SETS = [
    _labeled_set("t1", "manual", [Importance.VITAL, Importance.OKAY], Provenance.MANUAL),
    _labeled_set("t2", "manual", [Importance.OKAY, Importance.VITAL], Provenance.MANUAL),
    _labeled_set("t3", "manual", [Importance.VITAL, Importance.VITAL], Provenance.MANUAL),
]

_S = AssignmentLabel.SUPPORT
_PS = AssignmentLabel.PARTIAL_SUPPORT
_NS = AssignmentLabel.NOT_SUPPORT

MANUAL_ASSIGNMENT_PATTERN = {
    ("r1", "t1"): (_S, _NS),
    ("r1", "t2"): (_S, _S),
    ("r1", "t3"): (_NS, _PS),
    ("r2", "t1"): (_PS, _S),
    ("r2", "t2"): (_NS, _NS),
    ("r2", "t3"): (_S, _S),
}


def _manual_assignments() -> list[AssignmentRecord]:
    return [
        AssignmentRecord(run_id, topic_id, labels, Assigner.MANUAL)
        for (run_id, topic_id), labels in sorted(MANUAL_ASSIGNMENT_PATTERN.items())
    ]


def write_workspace(root: Path) -> dict[str, Path]:
    """Materialize every input file the pipeline fixtures need."""
    root.mkdir(parents=True, exist_ok=True)
    paths = {
        "topics": root / "topics.tsv",
        "segments": root / "segments.jsonl",
        "answers": root / "answers.jsonl",
        "qrels_manual": root / "qrels_manual.txt",
        "qrels_automatic": root / "qrels_automatic.txt",
        "edited_nuggets": root / "edited_nuggets.jsonl",
        "manual_nuggets": root / "manual_nuggets.jsonl",
        "manual_assignments_edited": root / "manual_assignments_edited.jsonl",
        "manual_assignments_manual": root / "manual_assignments_manual.jsonl",
        "baseline_scores": root / "baseline_scores.jsonl",
    }
    queries = {t.topic_id: t.query for t in TOPICS}
    formats.write_topics(paths["topics"], TOPICS)
    formats.write_segments(paths["segments"], SEGMENTS)
    formats.write_answers(paths["answers"], ANSWERS)
    formats.write_qrels(paths["qrels_manual"], QRELS_MANUAL)
    formats.write_qrels(paths["qrels_automatic"], QRELS_AUTOMATIC)
    formats.write_nugget_sets(paths["edited_nuggets"], EDITED_SETS, queries)
    formats.write_nugget_sets(paths["manual_nuggets"], MANUAL_SETS, queries)
    formats.write_assignments(paths["manual_assignments_edited"], _manual_assignments())
    formats.write_assignments(paths["manual_assignments_manual"], _manual_assignments())

    baseline = [
        {"run_id": run_id, "topic_id": t.topic_id,
         "a_strict": 0.1 * i + (0.3 if run_id == "r1" else 0.0),
         "v_strict": 0.05 * i + (0.4 if run_id == "r1" else 0.1),
         "n_nuggets": 3, "n_vital": 2}
        for run_id in RUNS
        for i, t in enumerate(TOPICS)
    ]
    paths["baseline_scores"].write_text(
        "".join(json.dumps(row, sort_keys=True) + "\n" for row in baseline)
    )
    return paths


# Scripted playback for the fully automatic condition. Topics are processed
# in file order, each needing one creation and one importance call; the six
# (run, topic) pairs then need one assignment call each.
def auto_auto_script(topics=None) -> list[dict]:
    topics = TOPICS if topics is None else topics
    script: list[dict] = []
    for topic in topics:
        tid = topic.topic_id
        script.append({
            "match": f"Search Query: {topic.query}",
            "response": json.dumps(
                [f"{tid} fact one", f"{tid} fact two", f"{tid} fact three"]
            ),
        })
        script.append({
            "match": "label each of the",
            "response": '["vital", "okay", "vital"]',
        })
    for run_id in RUNS:
        for topic in topics:
            script.append({
                "match": f"Passage: {run_id} answer text for {topic.query}",
                "response": '["support", "not_support", "partial_support"]',
            })
    return script


def assign_only_script(sets: list[NuggetSet]) -> list[dict]:
    by_topic = {ns.topic_id: ns for ns in sets}
    script = []
    for run_id in RUNS:
        for topic in TOPICS:
            n = len(by_topic[topic.topic_id].nuggets)
            script.append({
                "match": f"Passage: {run_id} answer text for {topic.query}",
                "response": json.dumps(["support"] * n),
            })
    return script


def write_script(path: Path, script: list[dict]) -> Path:
    path.write_text(json.dumps(script, indent=2))
    return path


def write_condition_config(
    root: Path,
    paths: dict[str, Path],
    nugget_mode: str,
    assign_mode: str,
    qrels_source: str,
    out_dir: Path,
    mock_script: Path | None = None,
    baseline: bool = False,
    name: str = "config.yaml",
) -> Path:
    manual_assignments = (
        paths["manual_assignments_edited"]
        if nugget_mode == "auto_edited"
        else paths["manual_assignments_manual"]
    )
    cfg = {
        "out_dir": str(out_dir),
        "condition": {
            "nugget_mode": nugget_mode,
            "assign_mode": assign_mode,
            "qrels_source": qrels_source,
        },
        "paths": {
            "topics": str(paths["topics"]),
            "answers": str(paths["answers"]),
            "segments": str(paths["segments"]),
            "qrels_manual": str(paths["qrels_manual"]),
            "qrels_automatic": str(paths["qrels_automatic"]),
            "edited_nuggets": str(paths["edited_nuggets"]),
            "manual_nuggets": str(paths["manual_nuggets"]),
            "manual_assignments": str(manual_assignments),
        },
        "resume": True,
    }
    if baseline:
        cfg["paths"]["baseline_scores"] = str(paths["baseline_scores"])
    if mock_script is not None:
        cfg["mock_script"] = str(mock_script)
    config_path = root / name
    config_path.write_text(yaml.safe_dump(cfg))
    return config_path


@pytest.fixture
def workspace(tmp_path):
    return write_workspace(tmp_path / "ws")
