from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

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
    Topic,
    TopicScores,
    filter_relevant,
    validate_nugget_set,
    word_count,
)


def qrel(topic_id, segment_id, grade, source=QrelsSource.AUTOMATIC):
    return QrelRecord(topic_id, segment_id, grade, source)


class TestFilterRelevant:
    def test_threshold(self):
        qrels = [qrel("t1", "s1", 2), qrel("t1", "s2", 0), qrel("t1", "s3", 1)]
        assert filter_relevant(qrels, "t1", 1) == ["s1", "s3"]

    def test_nothing_qualifies(self):
        assert filter_relevant([qrel("t1", "s1", 0)], "t1", 1) == []

    def test_unknown_topic_is_empty_not_error(self):
        assert filter_relevant([qrel("t1", "s1", 2)], "missing", 1) == []

    def test_negative_min_grade_rejected(self):
        with pytest.raises(ValueError):
            filter_relevant([], "t1", -1)

    def test_matches_brute_force_scan_on_random_records(self):
        rng = random.Random(7)
        qrels = [
            qrel(f"t{rng.randrange(5)}", f"s{i}", rng.randrange(4))
            for i in range(1000)
        ]
        for topic_id in [f"t{i}" for i in range(5)]:
            expected = []
            for record in qrels:
                if record.topic_id == topic_id and record.grade >= 1:
                    expected.append(record.segment_id)
            assert filter_relevant(qrels, topic_id, 1) == expected

    def test_idempotent_and_order_preserving(self):
        rng = random.Random(3)
        qrels = [qrel("t1", f"s{i}", rng.randrange(4)) for i in range(50)]
        once = filter_relevant(qrels, "t1", 2)
        assert once == filter_relevant(qrels, "t1", 2)
        positions = {r.segment_id: i for i, r in enumerate(qrels)}
        assert once == sorted(once, key=positions.__getitem__)


def make_set(importances, provenance=Provenance.AUTO, texts=None):
    nuggets = tuple(
        Nugget(texts[i] if texts else f"fact {i}", imp)
        for i, imp in enumerate(importances)
    )
    return NuggetSet("t1", nuggets, provenance, QrelsSource.AUTOMATIC)


class TestValidateNuggetSet:
    def test_well_formed_finalized_auto(self):
        importances = [Importance.VITAL] * 12 + [Importance.OKAY] * 8
        assert validate_nugget_set(make_set(importances)) == []

    def test_finalized_cap_exceeded(self):
        importances = [Importance.VITAL] * 21
        codes = [v.code for v in validate_nugget_set(make_set(importances))]
        assert codes == ["cap_exceeded"]

    def test_order_violation(self):
        importances = [Importance.OKAY, Importance.VITAL]
        codes = [v.code for v in validate_nugget_set(make_set(importances))]
        assert codes == ["order_violation"]

    def test_draft_allows_thirty_but_not_more(self):
        assert validate_nugget_set(make_set([Importance.UNLABELED] * 30)) == []
        codes = [v.code for v in validate_nugget_set(make_set([Importance.UNLABELED] * 31))]
        assert "cap_exceeded" in codes

    def test_drafts_are_not_order_checked(self):
        assert validate_nugget_set(make_set([Importance.UNLABELED] * 5)) == []

    def test_manual_sets_are_not_order_checked(self):
        importances = [Importance.OKAY, Importance.VITAL]
        assert validate_nugget_set(make_set(importances, Provenance.MANUAL)) == []

    def test_duplicate_text_rejected(self):
        nugget_set = make_set(
            [Importance.VITAL, Importance.VITAL], texts=["same", "same"]
        )
        codes = [v.code for v in validate_nugget_set(nugget_set)]
        assert codes == ["duplicate_text"]

    def test_validation_never_raises(self):
        bad = make_set([Importance.OKAY] * 25 + [Importance.VITAL])
        violations = validate_nugget_set(bad)
        assert {v.code for v in violations} == {"cap_exceeded", "order_violation"}


ENUMS = [Importance, AssignmentLabel, Provenance, QrelsSource, Assigner]


@pytest.mark.parametrize("enum_cls", ENUMS)
def test_enum_values_round_trip(enum_cls):
    for member in enum_cls:
        assert enum_cls(member.value) is member
        assert enum_cls(str(member.value)) is member


class TestInvariants:
    def test_topic_requires_nonempty_fields(self):
        with pytest.raises(ValueError):
            Topic("", "query")
        with pytest.raises(ValueError):
            Topic("t1", "")

    def test_grade_bounds(self):
        with pytest.raises(ValueError):
            qrel("t1", "s1", 4)
        with pytest.raises(ValueError):
            qrel("t1", "s1", -1)

    def test_answer_requires_text(self):
        with pytest.raises(ValueError):
            Answer("r1", "t1", "")

    def test_topic_scores_consistency(self):
        with pytest.raises(ValueError):
            TopicScores("r1", "t1", a_strict=None, v_strict=None, n_nuggets=3, n_vital=0)
        with pytest.raises(ValueError):
            TopicScores("r1", "t1", a_strict=0.5, v_strict=0.5, n_nuggets=2, n_vital=0)
        TopicScores("r1", "t1", a_strict=0.5, v_strict=None, n_nuggets=2, n_vital=0)

    def test_assignment_record_is_positional(self):
        record = AssignmentRecord(
            "r1", "t1",
            (AssignmentLabel.SUPPORT, AssignmentLabel.NOT_SUPPORT),
            Assigner.AUTO,
        )
        assert record.labels[0] is AssignmentLabel.SUPPORT
        assert record.labels[1] is AssignmentLabel.NOT_SUPPORT

    def test_values_are_immutable(self):
        topic = Topic("t1", "q")
        with pytest.raises(AttributeError):
            topic.query = "other"


class TestWordCount:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("one", 1),
            ("two words", 2),
            ("  padded   with\tspaces \n", 3),
            ("hyphen-stays one", 2),
        ],
    )
    def test_examples(self, text, expected):
        assert word_count(text) == expected

    @given(st.lists(st.text(alphabet=st.characters(whitelist_categories=("Ll",)), min_size=1), min_size=0, max_size=20))
    def test_counts_joined_tokens(self, tokens):
        assert word_count(" ".join(tokens)) == len(tokens)
