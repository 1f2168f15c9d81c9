"""Condition orchestration: ingest, nugget acquisition, assignment, scoring,
reports, and a hashed manifest.

Every output collection is sorted before writing, so the produced bytes are a
pure function of inputs and configuration, independent of scheduling. A run
is resumable: completed units already on disk are loaded instead of re-asked
from the LLM.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import yaml

from nuggeteval import formats
from nuggeteval.assigner import assign_all
from nuggeteval.config import Caps, StageConfig
from nuggeteval.errors import ConfigError, CorrelationError
from nuggeteval.gateway.client import (
    DecodeParams,
    HttpChatClient,
    LLMClient,
    RetryPolicy,
    load_mock_script,
)
from nuggeteval.meta import (
    ScoreMatrix,
    all_pairs_correlation,
    per_topic_avg_correlation,
    run_level_correlation,
)
from nuggeteval.model import (
    DEFAULT_CONDITIONS,
    Assigner,
    EvalCondition,
    NuggetSet,
    Provenance,
    QrelsSource,
    Segment,
    Topic,
    filter_relevant,
    validate_nugget_set,
)
from nuggeteval.nuggetizer import create_nuggets, label_importance, select_top
from nuggeteval.scorer import descriptive_stats, score_run, score_strict

log = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class PipelinePaths:
    topics: Path
    answers: Path
    segments: Path | None = None
    qrels_manual: Path | None = None
    qrels_automatic: Path | None = None
    edited_nuggets: Path | None = None
    manual_nuggets: Path | None = None
    manual_assignments: Path | None = None
    baseline_scores: Path | None = None


@dataclass(frozen=True, slots=True)
class LLMSettings:
    base_url: str = ""
    model: str = ""
    api_key_env: str = "NUGGETEVAL_API_KEY"
    temperature: float = 0.0
    max_output_tokens: int = 2048
    seed: int | None = 42
    timeout: float = 60.0
    max_in_flight: int = 4

    @property
    def decode(self) -> DecodeParams:
        return DecodeParams(
            temperature=self.temperature,
            max_output_tokens=self.max_output_tokens,
            seed=self.seed,
        )


@dataclass(frozen=True, slots=True)
class PipelineConfig:
    out_dir: Path
    condition: EvalCondition
    paths: PipelinePaths
    caps: Caps = Caps()
    llm: LLMSettings = LLMSettings()
    retry: RetryPolicy = RetryPolicy()
    workers: int = 1
    resume: bool = True
    mock_script: Path | None = None
    allowed_conditions: tuple[EvalCondition, ...] = DEFAULT_CONDITIONS

    @property
    def stage_config(self) -> StageConfig:
        # Scripted playback is ordered, so a mock forces sequential execution.
        workers = 1 if self.mock_script is not None else self.workers
        return StageConfig(
            caps=self.caps, retry=self.retry, decode=self.llm.decode, workers=workers
        )


def _condition_from_obj(obj: Mapping) -> EvalCondition:
    try:
        return EvalCondition(
            nugget_mode=Provenance(obj["nugget_mode"]),
            assign_mode=Assigner(obj["assign_mode"]),
            qrels_source=QrelsSource(obj["qrels_source"]),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad condition spec {dict(obj)!r}: {exc}") from exc


def load_config(path: str | Path, **overrides) -> PipelineConfig:
    """Load a declarative YAML/JSON config; kwargs override top-level keys.

    Relative paths are resolved against the config file's directory.
    """
    path = Path(path)
    raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a mapping")
    raw.update({k: v for k, v in overrides.items() if v is not None})
    base = path.parent

    def resolve(value: str | None) -> Path | None:
        if value is None:
            return None
        p = Path(value)
        return p if p.is_absolute() else base / p

    try:
        paths_raw = raw.get("paths", {})
        paths = PipelinePaths(
            topics=resolve(paths_raw["topics"]),
            answers=resolve(paths_raw["answers"]),
            segments=resolve(paths_raw.get("segments")),
            qrels_manual=resolve(paths_raw.get("qrels_manual")),
            qrels_automatic=resolve(paths_raw.get("qrels_automatic")),
            edited_nuggets=resolve(paths_raw.get("edited_nuggets")),
            manual_nuggets=resolve(paths_raw.get("manual_nuggets")),
            manual_assignments=resolve(paths_raw.get("manual_assignments")),
            baseline_scores=resolve(paths_raw.get("baseline_scores")),
        )
        condition = _condition_from_obj(raw["condition"])
        allowed_raw = raw.get("allowed_conditions")
        allowed = (
            DEFAULT_CONDITIONS
            if allowed_raw is None
            else tuple(_condition_from_obj(c) for c in allowed_raw)
        )
        return PipelineConfig(
            out_dir=resolve(raw["out_dir"]),
            condition=condition,
            paths=paths,
            caps=Caps(**raw.get("caps", {})),
            llm=LLMSettings(**raw.get("llm", {})),
            retry=RetryPolicy(**raw.get("retry", {})),
            workers=int(raw.get("workers", 1)),
            resume=bool(raw.get("resume", True)),
            mock_script=resolve(raw.get("mock_script")),
            allowed_conditions=allowed,
        )
    except KeyError as exc:
        raise ConfigError(f"{path}: missing config key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def needs_llm(condition: EvalCondition) -> bool:
    return (
        condition.nugget_mode is Provenance.AUTO
        or condition.assign_mode is Assigner.AUTO
    )


def validate_config(cfg: PipelineConfig) -> None:
    """Reject conditions outside the permitted list and missing inputs."""
    if cfg.condition not in cfg.allowed_conditions:
        raise ConfigError(
            f"condition {cfg.condition.label!r} is not in the permitted list: "
            f"{[c.label for c in cfg.allowed_conditions]}"
        )
    required: list[tuple[str, Path | None]] = [
        ("topics", cfg.paths.topics),
        ("answers", cfg.paths.answers),
    ]
    if cfg.condition.nugget_mode is Provenance.AUTO:
        required.append(("segments", cfg.paths.segments))
        qrels_key = (
            "qrels_manual"
            if cfg.condition.qrels_source is QrelsSource.MANUAL
            else "qrels_automatic"
        )
        required.append((qrels_key, getattr(cfg.paths, qrels_key)))
    elif cfg.condition.nugget_mode is Provenance.AUTO_EDITED:
        required.append(("edited_nuggets", cfg.paths.edited_nuggets))
    else:
        required.append(("manual_nuggets", cfg.paths.manual_nuggets))
    if cfg.condition.assign_mode is Assigner.MANUAL:
        required.append(("manual_assignments", cfg.paths.manual_assignments))
    for name, p in required:
        if p is None:
            raise ConfigError(
                f"condition {cfg.condition.label!r} requires paths.{name}"
            )
        if not p.exists():
            raise ConfigError(f"paths.{name} does not exist: {p}")
    if needs_llm(cfg.condition) and cfg.mock_script is None:
        if not cfg.llm.base_url or not cfg.llm.model:
            raise ConfigError("live LLM required: set llm.base_url and llm.model")
        if not os.environ.get(cfg.llm.api_key_env):
            raise ConfigError(f"API key env var {cfg.llm.api_key_env} is not set")


def make_client(cfg: PipelineConfig) -> LLMClient | None:
    if not needs_llm(cfg.condition):
        return None
    if cfg.mock_script is not None:
        return load_mock_script(cfg.mock_script)
    return HttpChatClient(
        base_url=cfg.llm.base_url,
        model=cfg.llm.model,
        api_key=os.environ.get(cfg.llm.api_key_env),
        timeout=cfg.llm.timeout,
        max_in_flight=cfg.llm.max_in_flight,
    )


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------


def build_auto_nuggets(
    topics: Sequence[Topic],
    segments: Sequence[Segment],
    qrels,
    client: LLMClient,
    stage: StageConfig,
    qrels_source: QrelsSource,
    final_cap: int,
    existing: Mapping[str, NuggetSet] | None = None,
) -> list[NuggetSet]:
    """Create, label, and select nuggets for every topic not yet done."""
    existing = existing or {}
    segment_index = {s.segment_id: s for s in segments}
    sets: list[NuggetSet] = []
    for topic in topics:
        if topic.topic_id in existing:
            sets.append(existing[topic.topic_id])
            continue
        segment_ids = filter_relevant(qrels, topic.topic_id, stage.caps.min_grade)
        missing = [sid for sid in segment_ids if sid not in segment_index]
        if missing:
            raise ConfigError(
                f"topic {topic.topic_id}: qrels reference unknown segments {missing[:5]}"
            )
        relevant = [segment_index[sid] for sid in segment_ids]
        texts = create_nuggets(topic, relevant, client, stage)
        if not texts:
            sets.append(
                NuggetSet(topic.topic_id, (), Provenance.AUTO, qrels_source)
            )
            continue
        labels = label_importance(topic, texts, client, stage)
        sets.append(
            select_top(
                topic.topic_id,
                list(zip(texts, labels)),
                cap=final_cap,
                qrels_source=qrels_source,
            )
        )
    return sets


def _load_nugget_file(path: Path, expected: Provenance) -> tuple[list[NuggetSet], dict[str, str]]:
    sets, queries = formats.read_nugget_sets(path)
    for ns in sets:
        if ns.provenance is not expected:
            raise ConfigError(
                f"{path}: topic {ns.topic_id} has provenance "
                f"{ns.provenance.value!r}, expected {expected.value!r}"
            )
        violations = validate_nugget_set(ns)
        if violations:
            raise ConfigError(
                f"{path}: topic {ns.topic_id} fails validation: "
                + "; ".join(v.message for v in violations)
            )
    return sets, queries


@dataclass(frozen=True)
class Manifest:
    """Every produced file with its content hash; hashes are a pure function
    of inputs and configuration."""

    condition: str
    files: tuple[tuple[str, str], ...]  # (relative path, sha256)

    def to_obj(self) -> dict:
        return {
            "condition": self.condition,
            "files": [{"path": p, "sha256": h} for p, h in self.files],
        }

    @property
    def hash_set(self) -> frozenset[tuple[str, str]]:
        return frozenset(self.files)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _build_manifest(out_dir: Path, produced: Sequence[Path], condition: str) -> Manifest:
    entries = sorted(
        (str(p.relative_to(out_dir)), _sha256(p)) for p in produced
    )
    return Manifest(condition=condition, files=tuple(entries))


def run_condition(cfg: PipelineConfig) -> Manifest:
    """Execute one evaluation condition end to end.

    Stages: nugget acquisition (create / load edited / load manual), then
    assignment (auto / load manual), then scoring, stats, and optional
    correlation against a baseline score file. Writes a manifest last.
    """
    validate_config(cfg)
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    produced: list[Path] = []
    stage = cfg.stage_config

    topics = formats.read_topics(cfg.paths.topics)
    topics_by_id = {t.topic_id: t for t in topics}
    queries = {t.topic_id: t.query for t in topics}
    answers = formats.read_answers(cfg.paths.answers)
    client = make_client(cfg)

    # --- nugget acquisition ------------------------------------------------
    nuggets_path = out / "nuggets.jsonl"
    if cfg.condition.nugget_mode is Provenance.AUTO:
        existing: dict[str, NuggetSet] = {}
        if cfg.resume and nuggets_path.exists():
            done_sets, _ = formats.read_nugget_sets(nuggets_path)
            existing = {ns.topic_id: ns for ns in done_sets}
            log.info("resume: %d topics already nuggetized", len(existing))
        qrels = formats.read_qrels(
            cfg.paths.qrels_manual
            if cfg.condition.qrels_source is QrelsSource.MANUAL
            else cfg.paths.qrels_automatic,
            cfg.condition.qrels_source,
        )
        segments = formats.read_segments(cfg.paths.segments)
        nugget_sets = build_auto_nuggets(
            topics,
            segments,
            qrels,
            client,
            stage,
            cfg.condition.qrels_source,
            cfg.caps.final_cap,
            existing,
        )
    elif cfg.condition.nugget_mode is Provenance.AUTO_EDITED:
        nugget_sets, file_queries = _load_nugget_file(
            cfg.paths.edited_nuggets, Provenance.AUTO_EDITED
        )
        queries.update({k: v for k, v in file_queries.items() if v})
    else:
        nugget_sets, file_queries = _load_nugget_file(
            cfg.paths.manual_nuggets, Provenance.MANUAL
        )
        queries.update({k: v for k, v in file_queries.items() if v})

    formats.write_nugget_sets(nuggets_path, nugget_sets, queries)
    produced.append(nuggets_path)

    scorable = {ns.topic_id: ns for ns in nugget_sets if len(ns.nuggets) > 0}
    for ns in nugget_sets:
        if not ns.nuggets:
            log.warning("topic %s has an empty nugget set; excluded from scoring", ns.topic_id)

    known_answers = []
    for answer in answers:
        if answer.topic_id not in scorable:
            log.warning(
                "answer (%s, %s) has no scorable nugget set; skipped",
                answer.run_id,
                answer.topic_id,
            )
            continue
        known_answers.append(answer)

    # --- assignment ---------------------------------------------------------
    assignments_path = out / "assignments.jsonl"
    failures_path = out / "assignment_failures.jsonl"
    if cfg.condition.assign_mode is Assigner.AUTO:
        existing_records = []
        if cfg.resume and assignments_path.exists():
            existing_records = formats.read_assignments(assignments_path)
            log.info("resume: %d pairs already assigned", len(existing_records))
        batch = assign_all(
            topics_by_id, scorable, known_answers, client, stage, existing_records
        )
        records = list(batch.records)
        if batch.failures:
            formats.write_lines(
                failures_path,
                (
                    formats.json_line(
                        {"run_id": f.run_id, "topic_id": f.topic_id, "error": f.error}
                    )
                    for f in batch.failures
                ),
            )
            produced.append(failures_path)
    else:
        records = [
            r
            for r in formats.read_assignments(cfg.paths.manual_assignments)
            if r.topic_id in scorable
        ]
        for r in records:
            if r.assigner is not Assigner.MANUAL:
                raise ConfigError(
                    f"manual assignment file contains an auto record for "
                    f"({r.run_id}, {r.topic_id})"
                )
    formats.write_assignments(assignments_path, records)
    produced.append(assignments_path)

    # --- scoring -------------------------------------------------------------
    topic_scores = [score_strict(scorable[r.topic_id], r) for r in records]
    by_run: dict[str, list] = {}
    for score in topic_scores:
        by_run.setdefault(score.run_id, []).append(score)
    run_scores = [score_run(scores) for _, scores in sorted(by_run.items())]

    topic_scores_path = out / "topic_scores.jsonl"
    formats.write_topic_scores(topic_scores_path, topic_scores)
    formats.write_topic_scores_table(out / "topic_scores.tsv", topic_scores)
    run_scores_path = out / "run_scores.jsonl"
    formats.write_run_scores(run_scores_path, run_scores)
    formats.write_run_scores_table(out / "run_scores.tsv", run_scores)
    produced += [
        topic_scores_path,
        out / "topic_scores.tsv",
        run_scores_path,
        out / "run_scores.tsv",
    ]

    # --- descriptive stats ----------------------------------------------------
    if records:
        stats = descriptive_stats(
            [scorable[tid] for tid in sorted(scorable)], records, cfg.condition
        )
        stats_path = out / "stats.json"
        stats_path.write_text(
            json.dumps(dataclasses.asdict(stats), ensure_ascii=False, sort_keys=True, indent=2)
            + "\n",
            encoding="utf-8",
        )
        produced.append(stats_path)

    # --- correlation against a baseline ---------------------------------------
    if cfg.paths.baseline_scores is not None:
        baseline = formats.read_topic_scores(cfg.paths.baseline_scores)
        for metric in ("a_strict", "v_strict"):
            current = ScoreMatrix.from_topic_scores(
                topic_scores, metric, cfg.condition.label
            )
            base = ScoreMatrix.from_topic_scores(baseline, metric, "baseline")
            produced += _write_correlation_report(out, metric, current, base)

    manifest = _build_manifest(out, produced, cfg.condition.label)
    manifest_path = out / "manifest.json"
    manifest_path.write_text(
        json.dumps(manifest.to_obj(), ensure_ascii=False, sort_keys=True, indent=2)
        + "\n",
        encoding="utf-8",
    )
    return manifest


def _write_correlation_report(
    out: Path, metric: str, current: ScoreMatrix, base: ScoreMatrix
) -> list[Path]:
    report: dict = {
        "metric": metric,
        "condition_x": current.condition,
        "condition_y": base.condition,
    }
    try:
        report["run_level_tau"] = run_level_correlation(current, base)
        per_topic = per_topic_avg_correlation(current, base)
        report["per_topic_avg_tau"] = per_topic.avg_tau
        report["per_topic_used"] = per_topic.topics_used
        report["per_topic_skipped"] = per_topic.topics_skipped
        report["all_pairs_tau"] = all_pairs_correlation(current, base)
    except CorrelationError as exc:
        report["error"] = str(exc)

    report_path = out / f"correlation_{metric}.json"
    report_path.write_text(
        json.dumps(report, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )

    # Scatter data: run-level points plus every shared (run, topic) point,
    # so agreement plots can be drawn without recomputation.
    rows = ["level\trun_id\ttopic_id\tx\ty"]
    means_x, means_y = current.run_means(), base.run_means()
    for run_id in sorted(set(means_x) & set(means_y)):
        rows.append(f"run\t{run_id}\t-\t{means_x[run_id]!r}\t{means_y[run_id]!r}")
    for run_id, topic_id in sorted(set(current.entries) & set(base.entries)):
        x = current.entries[(run_id, topic_id)]
        y = base.entries[(run_id, topic_id)]
        rows.append(f"pair\t{run_id}\t{topic_id}\t{x!r}\t{y!r}")
    scatter_path = out / f"scatter_{metric}.tsv"
    formats.write_lines(scatter_path, rows)
    return [report_path, scatter_path]
