"""File formats: ingestion and persistence.

Everything line-oriented and diffable. Qrels follow the conventional
whitespace-separated ``topic Q0 segment grade`` layout; other artifacts are
JSONL with one record per line, written in sorted key order so identical
inputs always produce identical bytes.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Iterable, Sequence

from nuggeteval.errors import IngestError
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
    RunScores,
    Segment,
    Topic,
    TopicScores,
)

log = logging.getLogger(__name__)

ANSWER_WORD_ADVISORY = 400


def json_line(obj: dict) -> str:
    """One JSONL line: stable key order, no trailing newline."""
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def _read_jsonl(path: Path) -> Iterable[tuple[int, dict]]:
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(f"invalid JSON: {exc}", str(path), line_no) from exc
        if not isinstance(obj, dict):
            raise IngestError("expected a JSON object", str(path), line_no)
        yield line_no, obj


def write_lines(path: Path, lines: Iterable[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
    tmp.replace(path)


def _field(obj: dict, name: str, path: Path, line_no: int) -> object:
    if name not in obj:
        raise IngestError(f"missing field {name!r}", str(path), line_no)
    return obj[name]


# ---------------------------------------------------------------------------
# Qrels
# ---------------------------------------------------------------------------


def read_qrels(path: str | Path, source: QrelsSource) -> list[QrelRecord]:
    """Parse ``topic_id Q0 segment_id grade`` lines, preserving order.

    Grades outside [0, 3] are clamped with a warning; duplicate
    (topic, segment) pairs are rejected.
    """
    path = Path(path)
    records: list[QrelRecord] = []
    seen: set[tuple[str, str]] = set()
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 4:
            raise IngestError(
                f"expected 4 whitespace-separated fields, got {len(fields)}",
                str(path),
                line_no,
            )
        topic_id, _, segment_id, grade_text = fields
        try:
            grade = int(grade_text)
        except ValueError:
            raise IngestError(f"grade {grade_text!r} is not an integer", str(path), line_no)
        if grade < 0 or grade > 3:
            clamped = min(max(grade, 0), 3)
            log.warning(
                "%s:%d: grade %d outside [0, 3], clamped to %d",
                path,
                line_no,
                grade,
                clamped,
            )
            grade = clamped
        key = (topic_id, segment_id)
        if key in seen:
            raise IngestError(f"duplicate (topic, segment) pair {key}", str(path), line_no)
        seen.add(key)
        records.append(QrelRecord(topic_id, segment_id, grade, source))
    return records


def write_qrels(path: str | Path, records: Sequence[QrelRecord]) -> None:
    write_lines(
        Path(path),
        (f"{r.topic_id} Q0 {r.segment_id} {r.grade}" for r in records),
    )


# ---------------------------------------------------------------------------
# Topics and segments
# ---------------------------------------------------------------------------


def read_topics(path: str | Path) -> list[Topic]:
    """Parse tab-separated ``topic_id<TAB>query`` lines."""
    path = Path(path)
    topics: list[Topic] = []
    seen: set[str] = set()
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t", 1)
        if len(parts) != 2 or not parts[1].strip():
            raise IngestError("expected 'topic_id<TAB>query'", str(path), line_no)
        topic_id, query = parts[0].strip(), parts[1].strip()
        if topic_id in seen:
            raise IngestError(f"duplicate topic_id {topic_id!r}", str(path), line_no)
        seen.add(topic_id)
        topics.append(Topic(topic_id, query))
    return topics


def write_topics(path: str | Path, topics: Sequence[Topic]) -> None:
    write_lines(Path(path), (f"{t.topic_id}\t{t.query}" for t in topics))


def read_segments(path: str | Path) -> list[Segment]:
    """Parse JSONL with ``segment_id``, ``text``, optional ``title``."""
    path = Path(path)
    segments: list[Segment] = []
    seen: set[str] = set()
    for line_no, obj in _read_jsonl(path):
        segment_id = str(_field(obj, "segment_id", path, line_no))
        if segment_id in seen:
            raise IngestError(f"duplicate segment_id {segment_id!r}", str(path), line_no)
        seen.add(segment_id)
        segments.append(
            Segment(
                segment_id=segment_id,
                text=str(_field(obj, "text", path, line_no)),
                title=obj.get("title"),
            )
        )
    return segments


def write_segments(path: str | Path, segments: Sequence[Segment]) -> None:
    lines = []
    for seg in segments:
        obj = {"segment_id": seg.segment_id, "text": seg.text}
        if seg.title is not None:
            obj["title"] = seg.title
        lines.append(json_line(obj))
    write_lines(Path(path), lines)


# ---------------------------------------------------------------------------
# Answers
# ---------------------------------------------------------------------------


def read_answers(path: str | Path) -> list[Answer]:
    """Parse answers JSONL; one record per (run, topic).

    The ``answer`` field is either a flat string or a structured list of
    sentence objects ``{"text": ...}`` which are joined with single spaces
    (citation fields, if any, are dropped).
    """
    path = Path(path)
    answers: list[Answer] = []
    seen: set[tuple[str, str]] = set()
    for line_no, obj in _read_jsonl(path):
        run_id = str(_field(obj, "run_id", path, line_no))
        topic_id = str(_field(obj, "topic_id", path, line_no))
        raw = _field(obj, "answer", path, line_no)
        if isinstance(raw, str):
            text = raw
        elif isinstance(raw, list):
            pieces = []
            for item in raw:
                if not isinstance(item, dict) or "text" not in item:
                    raise IngestError(
                        "structured answer entries need a 'text' field",
                        str(path),
                        line_no,
                    )
                pieces.append(str(item["text"]))
            text = " ".join(pieces)
        else:
            raise IngestError("'answer' must be a string or a list", str(path), line_no)
        if not text:
            raise IngestError("answer text is empty", str(path), line_no)
        key = (run_id, topic_id)
        if key in seen:
            raise IngestError(f"duplicate (run, topic) pair {key}", str(path), line_no)
        seen.add(key)
        answer = Answer(run_id, topic_id, text)
        if answer.word_count > ANSWER_WORD_ADVISORY:
            log.warning(
                "%s:%d: answer (%s, %s) has %d words, above the %d-word advisory",
                path,
                line_no,
                run_id,
                topic_id,
                answer.word_count,
                ANSWER_WORD_ADVISORY,
            )
        answers.append(answer)
    return answers


def write_answers(path: str | Path, answers: Sequence[Answer]) -> None:
    write_lines(
        Path(path),
        (
            json_line({"run_id": a.run_id, "topic_id": a.topic_id, "answer": a.text})
            for a in answers
        ),
    )


# ---------------------------------------------------------------------------
# Nugget sets
# ---------------------------------------------------------------------------


def nugget_set_to_obj(nugget_set: NuggetSet, query: str) -> dict:
    return {
        "topic_id": nugget_set.topic_id,
        "query": query,
        "nuggets": [
            {"text": n.text, "importance": n.importance.value}
            for n in nugget_set.nuggets
        ],
        "provenance": nugget_set.provenance.value,
        "qrels_source": nugget_set.qrels_source.value,
    }


def write_nugget_sets(
    path: str | Path, sets: Sequence[NuggetSet], queries: dict[str, str]
) -> None:
    """Write nugget sets sorted by topic_id, with each topic's query."""
    ordered = sorted(sets, key=lambda ns: ns.topic_id)
    write_lines(
        Path(path),
        (json_line(nugget_set_to_obj(ns, queries[ns.topic_id])) for ns in ordered),
    )


def read_nugget_sets(path: str | Path) -> tuple[list[NuggetSet], dict[str, str]]:
    """Read nugget sets plus the topic_id -> query map stored alongside."""
    path = Path(path)
    sets: list[NuggetSet] = []
    queries: dict[str, str] = {}
    seen: set[str] = set()
    for line_no, obj in _read_jsonl(path):
        topic_id = str(_field(obj, "topic_id", path, line_no))
        if topic_id in seen:
            raise IngestError(f"duplicate topic_id {topic_id!r}", str(path), line_no)
        seen.add(topic_id)
        raw_nuggets = _field(obj, "nuggets", path, line_no)
        if not isinstance(raw_nuggets, list):
            raise IngestError("'nuggets' must be a list", str(path), line_no)
        try:
            nuggets = tuple(
                Nugget(str(n["text"]), Importance(n.get("importance", "unlabeled")))
                for n in raw_nuggets
            )
            nugget_set = NuggetSet(
                topic_id=topic_id,
                nuggets=nuggets,
                provenance=Provenance(str(_field(obj, "provenance", path, line_no))),
                qrels_source=QrelsSource(str(_field(obj, "qrels_source", path, line_no))),
            )
        except (KeyError, ValueError) as exc:
            raise IngestError(f"bad nugget set: {exc}", str(path), line_no) from exc
        sets.append(nugget_set)
        queries[topic_id] = str(obj.get("query", ""))
    return sets, queries


# ---------------------------------------------------------------------------
# Assignment records
# ---------------------------------------------------------------------------


def write_assignments(path: str | Path, records: Sequence[AssignmentRecord]) -> None:
    ordered = sorted(records, key=lambda r: (r.run_id, r.topic_id))
    write_lines(
        Path(path),
        (
            json_line(
                {
                    "run_id": r.run_id,
                    "topic_id": r.topic_id,
                    "labels": [label.value for label in r.labels],
                    "assigner": r.assigner.value,
                }
            )
            for r in ordered
        ),
    )


def read_assignments(path: str | Path) -> list[AssignmentRecord]:
    path = Path(path)
    records: list[AssignmentRecord] = []
    seen: set[tuple[str, str]] = set()
    for line_no, obj in _read_jsonl(path):
        run_id = str(_field(obj, "run_id", path, line_no))
        topic_id = str(_field(obj, "topic_id", path, line_no))
        key = (run_id, topic_id)
        if key in seen:
            raise IngestError(f"duplicate (run, topic) pair {key}", str(path), line_no)
        seen.add(key)
        raw_labels = _field(obj, "labels", path, line_no)
        if not isinstance(raw_labels, list):
            raise IngestError("'labels' must be a list", str(path), line_no)
        try:
            labels = tuple(AssignmentLabel(str(v)) for v in raw_labels)
            assigner = Assigner(str(_field(obj, "assigner", path, line_no)))
        except ValueError as exc:
            raise IngestError(f"bad assignment record: {exc}", str(path), line_no) from exc
        records.append(AssignmentRecord(run_id, topic_id, labels, assigner))
    return records


# ---------------------------------------------------------------------------
# Scores
# ---------------------------------------------------------------------------


def write_topic_scores(path: str | Path, scores: Sequence[TopicScores]) -> None:
    ordered = sorted(scores, key=lambda s: (s.run_id, s.topic_id))
    write_lines(
        Path(path),
        (
            json_line(
                {
                    "run_id": s.run_id,
                    "topic_id": s.topic_id,
                    "a_strict": s.a_strict,
                    "v_strict": s.v_strict,
                    "n_nuggets": s.n_nuggets,
                    "n_vital": s.n_vital,
                }
            )
            for s in ordered
        ),
    )


def read_topic_scores(path: str | Path) -> list[TopicScores]:
    path = Path(path)
    scores = []
    for line_no, obj in _read_jsonl(path):
        try:
            scores.append(
                TopicScores(
                    run_id=str(_field(obj, "run_id", path, line_no)),
                    topic_id=str(_field(obj, "topic_id", path, line_no)),
                    a_strict=obj.get("a_strict"),
                    v_strict=obj.get("v_strict"),
                    n_nuggets=int(_field(obj, "n_nuggets", path, line_no)),
                    n_vital=int(_field(obj, "n_vital", path, line_no)),
                )
            )
        except ValueError as exc:
            raise IngestError(f"bad topic scores: {exc}", str(path), line_no) from exc
    return scores


def _fmt(value: float | None) -> str:
    return "NA" if value is None else f"{value:.4f}"


def write_topic_scores_table(path: str | Path, scores: Sequence[TopicScores]) -> None:
    ordered = sorted(scores, key=lambda s: (s.run_id, s.topic_id))
    header = "run_id\ttopic_id\ta_strict\tv_strict\tn_nuggets\tn_vital"
    rows = (
        f"{s.run_id}\t{s.topic_id}\t{_fmt(s.a_strict)}\t{_fmt(s.v_strict)}"
        f"\t{s.n_nuggets}\t{s.n_vital}"
        for s in ordered
    )
    write_lines(Path(path), [header, *rows])


def write_run_scores(path: str | Path, scores: Sequence[RunScores]) -> None:
    ordered = sorted(scores, key=lambda s: s.run_id)
    write_lines(
        Path(path),
        (
            json_line(
                {
                    "run_id": s.run_id,
                    "mean_a_strict": s.mean_a_strict,
                    "mean_v_strict": s.mean_v_strict,
                    "topics_counted_a": s.topics_counted_a,
                    "topics_counted_v": s.topics_counted_v,
                }
            )
            for s in ordered
        ),
    )


def write_run_scores_table(path: str | Path, scores: Sequence[RunScores]) -> None:
    ordered = sorted(scores, key=lambda s: s.run_id)
    header = "run_id\tmean_a_strict\tmean_v_strict\ttopics_counted_a\ttopics_counted_v"
    rows = (
        f"{s.run_id}\t{_fmt(s.mean_a_strict)}\t{_fmt(s.mean_v_strict)}"
        f"\t{s.topics_counted_a}\t{s.topics_counted_v}"
        for s in ordered
    )
    write_lines(Path(path), [header, *rows])
