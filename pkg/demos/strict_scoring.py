#!/usr/bin/env python3
"""Walk through strict scoring: from labeled nuggets and per-answer
assignments to topic scores and run means."""

from nuggeteval.model import (
    Assigner,
    AssignmentLabel,
    AssignmentRecord,
    Importance,
    Nugget,
    NuggetSet,
    Provenance,
    QrelsSource,
)
from nuggeteval.scorer import descriptive_stats, score_run, score_strict

S = AssignmentLabel.SUPPORT
PS = AssignmentLabel.PARTIAL_SUPPORT
NS = AssignmentLabel.NOT_SUPPORT

# A topic with five nuggets: four vital, one okay.
nuggets = NuggetSet(
    topic_id="demo-1",
    nuggets=(
        Nugget("rulers captured and sold slaves", Importance.VITAL),
        Nugget("rulers waged wars for captives", Importance.VITAL),
        Nugget("slaves were exchanged for firearms", Importance.VITAL),
        Nugget("ruler involvement was crucial to scale", Importance.VITAL),
        Nugget("trade increased internal slavery", Importance.OKAY),
    ),
    provenance=Provenance.AUTO,
    qrels_source=QrelsSource.AUTOMATIC,
)

# One answer's three-way judgments, aligned position by position.
record = AssignmentRecord("run-a", "demo-1", (S, NS, PS, S, PS), Assigner.AUTO)

scores = score_strict(nuggets, record)
print("nuggets:", scores.n_nuggets, "vital:", scores.n_vital)
print("all-nuggets strict score:", scores.a_strict)   # 2 of 5 supported -> 0.4
print("vital-only strict score:", scores.v_strict)    # 2 of 4 vital -> 0.5

# Partial support deliberately counts as zero: only full support scores.
all_partial = AssignmentRecord("run-a", "demo-1", (PS,) * 5, Assigner.AUTO)
print("\nall partial_support ->", score_strict(nuggets, all_partial).a_strict)

# A topic with no vital nuggets leaves the vital score undefined (None),
# never zero, so run means cannot silently absorb it.
okay_only = NuggetSet(
    "demo-2",
    (Nugget("minor side fact", Importance.OKAY),),
    Provenance.AUTO,
    QrelsSource.AUTOMATIC,
)
undefined = score_strict(okay_only, AssignmentRecord("run-a", "demo-2", (S,), Assigner.AUTO))
print("\ntopic with zero vital nuggets -> v_strict is", undefined.v_strict)

# The run score averages topics with defined values and reports how many
# topics each mean covers.
run = score_run([scores, undefined])
print("\nrun mean a_strict:", run.mean_a_strict, f"({run.topics_counted_a} topics)")
print("run mean v_strict:", run.mean_v_strict, f"({run.topics_counted_v} topics)")

stats = descriptive_stats([nuggets, okay_only], [record, all_partial], "demo")
print("\ncondition summary:")
print("  avg nuggets/topic:", stats.avg_nuggets_per_topic)
print("  avg nugget length:", round(stats.avg_nugget_length_words, 2), "words")
print(f"  importance split: {stats.pct_vital:.1f}% vital / {stats.pct_okay:.1f}% okay")
print(f"  assignment split: {stats.pct_support:.1f}% S / "
      f"{stats.pct_partial_support:.1f}% PS / {stats.pct_not_support:.1f}% NS")
