#!/usr/bin/env python3
"""Compare two scoring conditions at three granularities.

Run-level agreement can be perfect while per-topic agreement collapses;
this script builds exactly such a pair of score matrices and reports
tie-corrected rank correlations at each granularity.
"""

from nuggeteval.meta import (
    ScoreMatrix,
    all_pairs_correlation,
    kendall_tau_b,
    per_topic_avg_correlation,
    run_level_correlation,
)

# Condition A and condition B score the same two runs on the same two
# topics. Per-run means agree exactly; per-topic orderings are flipped.
condition_a = ScoreMatrix("condition-a", "a_strict", {
    ("run-1", "t1"): 0.9, ("run-1", "t2"): 0.1,
    ("run-2", "t1"): 0.6, ("run-2", "t2"): 0.2,
})
condition_b = ScoreMatrix("condition-b", "a_strict", {
    ("run-1", "t1"): 0.1, ("run-1", "t2"): 0.9,
    ("run-2", "t1"): 0.2, ("run-2", "t2"): 0.6,
})

print("run means, condition A:", condition_a.run_means())
print("run means, condition B:", condition_b.run_means())

print("\nrun-level tau:     ", run_level_correlation(condition_a, condition_b))
print("all-pairs tau:     ", all_pairs_correlation(condition_a, condition_b))
per_topic = per_topic_avg_correlation(condition_a, condition_b)
print("per-topic avg tau: ", per_topic.avg_tau,
      f"(used {per_topic.topics_used}, skipped {per_topic.topics_skipped})")

# The tau implementation is tie-corrected (the b variant): ties in either
# vector reduce the denominator instead of being counted as disagreement.
x = [0.4, 0.4, 0.7, 0.9]
y = [0.1, 0.2, 0.5, 0.8]
print("\ntau-b with ties in x:", kendall_tau_b(x, y))
print("tau-b, all tied in x:", kendall_tau_b([0.5] * 4, y), "(undefined -> None)")
