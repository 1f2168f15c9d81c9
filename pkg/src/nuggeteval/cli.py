"""Command-line surface for the evaluation pipeline.

Each subcommand is a thin binding over the library; `run` executes a whole
condition from a declarative config file, `serve` starts the annotation
service. `--mock <script>` swaps the live endpoint for scripted playback
everywhere an LLM is involved.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import sys
from pathlib import Path

import click

from nuggeteval import formats, pipeline
from nuggeteval.assigner import assign_all
from nuggeteval.config import Caps, StageConfig
from nuggeteval.errors import NuggetEvalError
from nuggeteval.gateway.client import HttpChatClient, load_mock_script
from nuggeteval.meta import (
    ScoreMatrix,
    all_pairs_correlation,
    confusion_matrix,
    per_topic_avg_correlation,
    run_level_correlation,
)
from nuggeteval.model import (
    Importance,
    Nugget,
    NuggetSet,
    Provenance,
    QrelsSource,
    filter_relevant,
)
from nuggeteval.nuggetizer import create_nuggets, label_importance, select_top
from nuggeteval.scorer import descriptive_stats, score_run, score_strict

log = logging.getLogger(__name__)


def _client(mock: str | None, base_url: str | None, model: str | None, api_key_env: str):
    import os

    if mock is not None:
        return load_mock_script(mock)
    if not base_url or not model:
        raise click.UsageError("provide --mock or both --base-url and --model")
    return HttpChatClient(
        base_url=base_url, model=model, api_key=os.environ.get(api_key_env)
    )


def llm_options(fn):
    fn = click.option("--mock", type=click.Path(exists=True), default=None,
                      help="Scripted mock replacing the live endpoint.")(fn)
    fn = click.option("--base-url", default=None, help="Chat endpoint base URL.")(fn)
    fn = click.option("--model", default=None, help="Model name.")(fn)
    fn = click.option("--api-key-env", default="NUGGETEVAL_API_KEY",
                      show_default=True, help="Env var holding the API key.")(fn)
    return fn


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
def main(verbose: bool) -> None:
    """Nugget-based recall evaluation for RAG answers."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _load_corpus(topics, segments, qrels, qrels_source):
    topic_list = formats.read_topics(topics)
    segment_index = {s.segment_id: s for s in formats.read_segments(segments)}
    qrel_records = formats.read_qrels(qrels, QrelsSource(qrels_source))
    return topic_list, segment_index, qrel_records


def _relevant(segment_index, qrel_records, topic_id, min_grade):
    ids = filter_relevant(qrel_records, topic_id, min_grade)
    return [segment_index[sid] for sid in ids if sid in segment_index]


@main.command()
@click.option("--topics", required=True, type=click.Path(exists=True))
@click.option("--segments", required=True, type=click.Path(exists=True))
@click.option("--qrels", required=True, type=click.Path(exists=True))
@click.option("--qrels-source", type=click.Choice(["manual", "automatic"]),
              default="automatic", show_default=True)
@click.option("--min-grade", default=1, show_default=True)
@click.option("--out", required=True, type=click.Path())
@llm_options
def nuggetize(topics, segments, qrels, qrels_source, min_grade, out,
              mock, base_url, model, api_key_env):
    """Create raw (unlabeled) nugget lists per topic."""
    client = _client(mock, base_url, model, api_key_env)
    topic_list, segment_index, qrel_records = _load_corpus(
        topics, segments, qrels, qrels_source
    )
    cfg = StageConfig(caps=Caps(min_grade=min_grade))
    sets, queries = [], {}
    for topic in topic_list:
        texts = create_nuggets(
            topic, _relevant(segment_index, qrel_records, topic.topic_id, min_grade),
            client, cfg,
        )
        sets.append(NuggetSet(
            topic.topic_id,
            tuple(Nugget(t, Importance.UNLABELED) for t in texts),
            Provenance.AUTO,
            QrelsSource(qrels_source),
        ))
        queries[topic.topic_id] = topic.query
    formats.write_nugget_sets(Path(out), sets, queries)
    click.echo(f"wrote {len(sets)} nugget lists to {out}")


@main.command()
@click.option("--nuggets", "nuggets_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@llm_options
def importance(nuggets_path, out, mock, base_url, model, api_key_env):
    """Label each nugget vital or okay."""
    from nuggeteval.model import Topic

    client = _client(mock, base_url, model, api_key_env)
    sets, queries = formats.read_nugget_sets(nuggets_path)
    cfg = StageConfig()
    labeled_sets = []
    for ns in sets:
        if not ns.nuggets:
            labeled_sets.append(ns)
            continue
        topic = Topic(ns.topic_id, queries.get(ns.topic_id) or "(missing query)")
        labels = label_importance(topic, [n.text for n in ns.nuggets], client, cfg)
        labeled_sets.append(NuggetSet(
            ns.topic_id,
            tuple(Nugget(n.text, lab) for n, lab in zip(ns.nuggets, labels)),
            ns.provenance,
            ns.qrels_source,
        ))
    formats.write_nugget_sets(Path(out), labeled_sets, queries)
    click.echo(f"labeled {len(labeled_sets)} nugget lists into {out}")


@main.command()
@click.option("--nuggets", "nuggets_path", required=True, type=click.Path(exists=True))
@click.option("--cap", default=20, show_default=True)
@click.option("--out", required=True, type=click.Path())
def select(nuggets_path, cap, out):
    """Keep the top nuggets: vital first, truncated to the cap."""
    sets, queries = formats.read_nugget_sets(nuggets_path)
    selected = [
        select_top(
            ns.topic_id,
            [(n.text, n.importance) for n in ns.nuggets],
            cap=cap,
            qrels_source=ns.qrels_source,
        )
        for ns in sets
    ]
    formats.write_nugget_sets(Path(out), selected, queries)
    click.echo(f"selected top nuggets for {len(selected)} topics into {out}")


@main.command()
@click.option("--topics", required=True, type=click.Path(exists=True))
@click.option("--segments", required=True, type=click.Path(exists=True))
@click.option("--qrels", required=True, type=click.Path(exists=True))
@click.option("--qrels-source", type=click.Choice(["manual", "automatic"]),
              default="manual", show_default=True)
@click.option("--min-grade", default=1, show_default=True)
@click.option("--out", required=True, type=click.Path())
@llm_options
def draft(topics, segments, qrels, qrels_source, min_grade, out,
          mock, base_url, model, api_key_env):
    """Over-generate unlabeled draft nuggets for assessor post-editing."""
    from nuggeteval.nuggetizer import draft_for_editing

    client = _client(mock, base_url, model, api_key_env)
    topic_list, segment_index, qrel_records = _load_corpus(
        topics, segments, qrels, qrels_source
    )
    cfg = StageConfig(caps=Caps(min_grade=min_grade))
    sets, queries = [], {}
    for topic in topic_list:
        sets.append(draft_for_editing(
            topic, _relevant(segment_index, qrel_records, topic.topic_id, min_grade),
            client, cfg, qrels_source=QrelsSource(qrels_source),
        ))
        queries[topic.topic_id] = topic.query
    formats.write_nugget_sets(Path(out), sets, queries)
    click.echo(f"wrote {len(sets)} draft lists to {out}")


@main.command()
@click.option("--topics", required=True, type=click.Path(exists=True))
@click.option("--nuggets", "nuggets_path", required=True, type=click.Path(exists=True))
@click.option("--answers", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--failures", type=click.Path(), default=None,
              help="Where to write per-pair failures (JSONL).")
@click.option("--resume/--no-resume", default=True, show_default=True)
@llm_options
def assign(topics, nuggets_path, answers, out, failures, resume,
           mock, base_url, model, api_key_env):
    """Label every (answer, nugget) pair support / partial / not."""
    client = _client(mock, base_url, model, api_key_env)
    topic_list = formats.read_topics(topics)
    sets, _ = formats.read_nugget_sets(nuggets_path)
    nugget_sets = {ns.topic_id: ns for ns in sets if ns.nuggets}
    answer_list = [
        a for a in formats.read_answers(answers) if a.topic_id in nugget_sets
    ]
    existing = []
    out_path = Path(out)
    if resume and out_path.exists():
        existing = formats.read_assignments(out_path)
    batch = assign_all(
        {t.topic_id: t for t in topic_list}, nugget_sets, answer_list,
        client, StageConfig(), existing,
    )
    formats.write_assignments(out_path, batch.records)
    click.echo(f"wrote {len(batch.records)} assignment records to {out}")
    if batch.failures:
        click.echo(f"{len(batch.failures)} pairs failed", err=True)
        if failures:
            formats.write_lines(
                Path(failures),
                (formats.json_line(
                    {"run_id": f.run_id, "topic_id": f.topic_id, "error": f.error}
                ) for f in batch.failures),
            )


@main.command()
@click.option("--nuggets", "nuggets_path", required=True, type=click.Path(exists=True))
@click.option("--assignments", required=True, type=click.Path(exists=True))
@click.option("--out-dir", required=True, type=click.Path())
def score(nuggets_path, assignments, out_dir):
    """Strict per-topic scores and run-level means."""
    sets, _ = formats.read_nugget_sets(nuggets_path)
    by_topic = {ns.topic_id: ns for ns in sets}
    records = formats.read_assignments(assignments)
    topic_scores = [score_strict(by_topic[r.topic_id], r) for r in records]
    by_run: dict[str, list] = {}
    for s in topic_scores:
        by_run.setdefault(s.run_id, []).append(s)
    run_scores = [score_run(group) for _, group in sorted(by_run.items())]
    out = Path(out_dir)
    formats.write_topic_scores(out / "topic_scores.jsonl", topic_scores)
    formats.write_topic_scores_table(out / "topic_scores.tsv", topic_scores)
    formats.write_run_scores(out / "run_scores.jsonl", run_scores)
    formats.write_run_scores_table(out / "run_scores.tsv", run_scores)
    click.echo(f"scored {len(topic_scores)} (run, topic) pairs into {out_dir}")


@main.command()
@click.option("--nuggets", "nuggets_path", required=True, type=click.Path(exists=True))
@click.option("--assignments", required=True, type=click.Path(exists=True))
@click.option("--condition", default="unnamed", show_default=True)
@click.option("--out", required=True, type=click.Path())
def stats(nuggets_path, assignments, condition, out):
    """Descriptive statistics for one condition."""
    sets, _ = formats.read_nugget_sets(nuggets_path)
    records = formats.read_assignments(assignments)
    result = descriptive_stats([ns for ns in sets if ns.nuggets], records, condition)
    Path(out).write_text(
        json.dumps(dataclasses.asdict(result), ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    click.echo(f"wrote stats to {out}")


@main.command()
@click.option("--scores-x", required=True, type=click.Path(exists=True),
              help="Topic-scores JSONL for condition X.")
@click.option("--scores-y", required=True, type=click.Path(exists=True),
              help="Topic-scores JSONL for condition Y.")
@click.option("--label-x", default="x", show_default=True)
@click.option("--label-y", default="y", show_default=True)
@click.option("--metric", type=click.Choice(["a_strict", "v_strict", "both"]),
              default="both", show_default=True)
@click.option("--out-dir", required=True, type=click.Path())
def correlate(scores_x, scores_y, label_x, label_y, metric, out_dir):
    """Rank correlations between two conditions at three granularities."""
    x = formats.read_topic_scores(scores_x)
    y = formats.read_topic_scores(scores_y)
    metrics = ["a_strict", "v_strict"] if metric == "both" else [metric]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for m in metrics:
        mx = ScoreMatrix.from_topic_scores(x, m, label_x)
        my = ScoreMatrix.from_topic_scores(y, m, label_y)
        per_topic = per_topic_avg_correlation(mx, my)
        report = {
            "metric": m,
            "condition_x": label_x,
            "condition_y": label_y,
            "run_level_tau": run_level_correlation(mx, my),
            "per_topic_avg_tau": per_topic.avg_tau,
            "per_topic_used": per_topic.topics_used,
            "per_topic_skipped": per_topic.topics_skipped,
            "all_pairs_tau": all_pairs_correlation(mx, my),
        }
        path = out / f"correlation_{m}.json"
        path.write_text(
            json.dumps(report, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )
        click.echo(
            f"{m}: run-level tau="
            f"{report['run_level_tau']} all-pairs tau={report['all_pairs_tau']}"
        )


@main.command()
@click.option("--manual", "manual_path", required=True, type=click.Path(exists=True))
@click.option("--auto", "auto_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def confusion(manual_path, auto_path, out):
    """3x3 agreement matrix between manual and automatic assignments."""
    manual = formats.read_assignments(manual_path)
    auto = formats.read_assignments(auto_path)
    matrix = confusion_matrix(manual, auto)
    obj = {
        "labels": ["support", "partial_support", "not_support"],
        "counts": [list(row) for row in matrix.counts],
        "percentages": [list(row) for row in matrix.percentages],
        "total": matrix.total,
        "diagonal_pct": matrix.diagonal_pct,
    }
    Path(out).write_text(
        json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    click.echo(f"confusion matrix over {matrix.total} pairs written to {out}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out-dir", default=None, type=click.Path(),
              help="Override the config's output directory.")
@click.option("--mock", default=None, type=click.Path(exists=True),
              help="Scripted mock replacing the live endpoint.")
@click.option("--resume/--no-resume", default=None)
def run(config_path, out_dir, mock, resume):
    """Execute a whole evaluation condition from a config file."""
    cfg = pipeline.load_config(
        config_path, out_dir=out_dir, mock_script=mock, resume=resume
    )
    try:
        manifest = pipeline.run_condition(cfg)
    except NuggetEvalError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"condition {manifest.condition}: {len(manifest.files)} files")
    for path, digest in manifest.files:
        click.echo(f"  {digest[:12]}  {path}")


@main.command()
@click.option("--workspace", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--ui-dir", default=None, type=click.Path(),
              help="Static frontend bundle to serve at /.")
def serve(workspace, host, port, ui_dir):
    """Start the assessor annotation service."""
    import uvicorn

    from nuggeteval.service import create_app

    app = create_app(workspace, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
