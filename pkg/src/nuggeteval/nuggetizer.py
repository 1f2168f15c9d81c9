"""Automatic nugget creation.

The nugget list for a topic is built iteratively: relevant segments are fed
to the LLM in batches, each call seeing the list produced so far and
returning an updated one. A second pass labels every nugget vital or okay,
and selection keeps the top of the importance ordering.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

from nuggeteval.config import StageConfig
from nuggeteval.errors import RequestTooLargeError
from nuggeteval.gateway.client import LLMClient, complete_parsed
from nuggeteval.gateway.parsing import (
    parse_label_list,
    parse_string_list,
    serialize_string_list,
)
from nuggeteval.gateway.templates import render_template
from nuggeteval.model import (
    Importance,
    Nugget,
    NuggetSet,
    Provenance,
    QrelsSource,
    Segment,
    Topic,
)

log = logging.getLogger(__name__)

IMPORTANCE_LABELS = {Importance.VITAL.value, Importance.OKAY.value}


@dataclass(frozen=True, slots=True)
class NuggetizationState:
    """Progress of the iterative list refinement for one topic.

    After every iteration the running list stays within the creation cap and
    ``iteration == ceil(segments_consumed / batch size)``.
    """

    topic_id: str
    nuggets_so_far: tuple[str, ...] = ()
    iteration: int = 0
    segments_consumed: int = 0

    def advanced(self, nuggets: Sequence[str], batch_len: int) -> "NuggetizationState":
        return NuggetizationState(
            topic_id=self.topic_id,
            nuggets_so_far=tuple(nuggets),
            iteration=self.iteration + 1,
            segments_consumed=self.segments_consumed + batch_len,
        )


def _batches(items: Sequence, size: int) -> list[Sequence]:
    return [items[i : i + size] for i in range(0, len(items), size)]


def _context_block(segments: Sequence[Segment]) -> str:
    return "\n".join(f"[{i}] {seg.text}" for i, seg in enumerate(segments, start=1))


def expected_call_count(n_items: int, batch_size: int) -> int:
    """LLM calls needed to cover ``n_items`` in batches of ``batch_size``."""
    return math.ceil(n_items / batch_size)


def _update_step(
    topic: Topic,
    nuggets_so_far: list[str],
    batch: Sequence[Segment],
    client: LLMClient,
    cfg: StageConfig,
    cap: int,
) -> list[str]:
    """One creation iteration; splits the batch when it exceeds the context."""
    request = render_template(
        "nuggetize",
        {
            "query": topic.query,
            "context": _context_block(batch),
            "initial_nuggets": serialize_string_list(nuggets_so_far),
            "initial_nugget_count": str(len(nuggets_so_far)),
        },
        decode=cfg.decode,
    )
    try:
        updated = complete_parsed(request, client, parse_string_list, cfg.retry)
    except RequestTooLargeError:
        if len(batch) == 1:
            raise
        mid = len(batch) // 2
        log.warning(
            "topic %s: request too large for %d segments, halving the batch",
            topic.topic_id,
            len(batch),
        )
        partial = _update_step(topic, nuggets_so_far, batch[:mid], client, cfg, cap)
        return _update_step(topic, partial, batch[mid:], client, cfg, cap)
    if len(updated) > cap:
        log.warning(
            "topic %s: LLM returned %d nuggets, truncating to the %d-cap",
            topic.topic_id,
            len(updated),
            cap,
        )
        updated = updated[:cap]
    return updated


def create_nuggets(
    topic: Topic,
    segments: Sequence[Segment],
    client: LLMClient,
    cfg: StageConfig = StageConfig(),
    cap: int | None = None,
) -> list[str]:
    """Iteratively build the nugget list for one topic.

    Segments are consumed in order, ``cfg.caps.segment_batch`` at a time;
    each iteration replaces the running list with the LLM's update. The
    returned list is ordered by decreasing importance as imposed by the
    prompt, and never exceeds the creation cap (overflow is trimmed from the
    tail, which the ordering makes least important).
    """
    cap = cfg.caps.creation_cap if cap is None else cap
    if not segments:
        log.warning("topic %s: no relevant segments, nugget list is empty", topic.topic_id)
        return []
    state = NuggetizationState(topic.topic_id)
    for batch in _batches(segments, cfg.caps.segment_batch):
        updated = _update_step(
            topic, list(state.nuggets_so_far), batch, client, cfg, cap
        )
        state = state.advanced(updated, len(batch))
        log.debug(
            "topic %s: iteration %d, %d/%d segments, %d nuggets",
            topic.topic_id,
            state.iteration,
            state.segments_consumed,
            len(segments),
            len(state.nuggets_so_far),
        )
    return list(state.nuggets_so_far)


def label_importance(
    topic: Topic,
    nuggets: Sequence[str],
    client: LLMClient,
    cfg: StageConfig = StageConfig(),
) -> list[Importance]:
    """Label every nugget vital or okay, in the input order.

    Nuggets go to the LLM in consecutive batches; each batch is labeled
    independently and must come back with exactly one label per nugget, else
    the topic fails with a typed error after the re-prompt budget.
    """
    if not nuggets:
        raise ValueError("cannot label an empty nugget list")
    labels: list[Importance] = []
    for batch in _batches(list(nuggets), cfg.caps.nugget_batch):
        request = render_template(
            "importance",
            {
                "query": topic.query,
                "nugget_count": str(len(batch)),
                "nuggets": serialize_string_list(batch),
            },
            decode=cfg.decode,
        )
        raw = complete_parsed(
            request,
            client,
            lambda text, n=len(batch): parse_label_list(text, n, IMPORTANCE_LABELS),
            cfg.retry,
        )
        labels.extend(Importance(value) for value in raw)
    return labels


def select_top(
    topic_id: str,
    labeled: Sequence[tuple[str, Importance]],
    cap: int = 20,
    qrels_source: QrelsSource = QrelsSource.AUTOMATIC,
) -> NuggetSet:
    """Keep the most important nuggets: vital before okay, then truncate.

    The sort is stable, so generation order (already importance-ranked by the
    creation prompt) breaks ties within each class.
    """
    ordered = sorted(
        labeled, key=lambda pair: 0 if pair[1] is Importance.VITAL else 1
    )
    kept = ordered[:cap]
    return NuggetSet(
        topic_id=topic_id,
        nuggets=tuple(Nugget(text, importance) for text, importance in kept),
        provenance=Provenance.AUTO,
        qrels_source=qrels_source,
    )


def draft_for_editing(
    topic: Topic,
    segments: Sequence[Segment],
    client: LLMClient,
    cfg: StageConfig = StageConfig(),
    qrels_source: QrelsSource = QrelsSource.MANUAL,
) -> NuggetSet:
    """Over-generate an unlabeled draft set for assessor post-editing.

    Runs creation with the 30-cap but skips importance labeling and
    selection; assessors add, eliminate, or combine nuggets downstream.
    """
    texts = create_nuggets(topic, segments, client, cfg, cap=cfg.caps.creation_cap)
    return NuggetSet(
        topic_id=topic.topic_id,
        nuggets=tuple(Nugget(text, Importance.UNLABELED) for text in texts),
        provenance=Provenance.AUTO,
        qrels_source=qrels_source,
    )
