import random

import pytest

from mipw.alignment import JudgmentMapping, LabelProvenance, TokenLabel, focus_prediction
from mipw.corpus import TrofiRecord, Usage, tokenize
from mipw.evaluation import (
    BinaryConfusion,
    InvalidRecordError,
    QualitativeRecord,
    aggregate_qualitative,
    consensus,
    derive_confusion_from_pr,
    nearest_confusion_report,
    percent,
    precision_recall,
    score_trofi,
    validate_record,
)
from mipw.output_parser import Judgment

# Published precision/recall rows for the three evaluated models (fractions).
TABLE1_ROWS = {
    "3.5-turbo": (0.5830, 0.9790, 0.6642, 0.0559),
    "4-turbo": (0.7480, 0.8690, 0.7741, 0.6053),
    "4o": (0.7340, 0.9366, 0.8369, 0.5424),
}
TROFI_TOTAL = 3736


def trofi_record(rid: str, gold: Usage) -> TrofiRecord:
    sentence = "The plan died quickly ."
    tokens = tuple(tokenize(sentence))
    return TrofiRecord(
        id=rid, target_word="die", sentence=sentence, tokens=tokens,
        focus_indices=(2,), gold=gold,
    )


class TestScoreTrofi:
    def test_two_records_both_correct(self):
        pairs = [
            (trofi_record("a", Usage.NONLITERAL), Usage.NONLITERAL),
            (trofi_record("b", Usage.LITERAL), Usage.LITERAL),
        ]
        cm = score_trofi(pairs)
        assert (cm.tp, cm.fp, cm.fn, cm.tn) == (1, 0, 0, 1)

    def test_against_naive_recount(self):
        rng = random.Random(123)
        pairs = []
        for i in range(10):
            gold = rng.choice(list(Usage))
            predicted = rng.choice(list(Usage))
            pairs.append((trofi_record(f"r{i}", gold), predicted))
        cm = score_trofi(pairs)
        # second, naive pass
        tp = sum(1 for r, p in pairs if r.gold is Usage.NONLITERAL and p is Usage.NONLITERAL)
        fn = sum(1 for r, p in pairs if r.gold is Usage.NONLITERAL and p is Usage.LITERAL)
        fp = sum(1 for r, p in pairs if r.gold is Usage.LITERAL and p is Usage.NONLITERAL)
        tn = sum(1 for r, p in pairs if r.gold is Usage.LITERAL and p is Usage.LITERAL)
        assert (cm.tp, cm.fp, cm.fn, cm.tn) == (tp, fp, fn, tn)
        assert cm.total == 10

    def test_duplicate_ids_rejected(self):
        pairs = [
            (trofi_record("dup", Usage.LITERAL), Usage.LITERAL),
            (trofi_record("dup", Usage.LITERAL), Usage.LITERAL),
        ]
        with pytest.raises(ValueError, match="duplicate"):
            score_trofi(pairs)

    def test_inverted_mapping_transposes_confusion(self):
        # predictions derived from judgments (no Missing labels), then scored
        # under both mappings: counts transpose class-wise
        rng = random.Random(7)
        records = []
        labels = []
        for i in range(12):
            gold = rng.choice(list(Usage))
            judgment = rng.choice([Judgment.YES, Judgment.NO])
            records.append(trofi_record(f"r{i}", gold))
            labels.append(
                [
                    TokenLabel(0, Judgment.NO, LabelProvenance.DIRECT),
                    TokenLabel(1, Judgment.NO, LabelProvenance.DIRECT),
                    TokenLabel(2, judgment, LabelProvenance.DIRECT),
                    TokenLabel(3, Judgment.NO, LabelProvenance.DIRECT),
                    TokenLabel(4, Judgment.NO, LabelProvenance.DIRECT),
                ]
            )
        def run(mapping):
            return score_trofi(
                [
                    (r, focus_prediction(labs, r.focus_indices, r.gold, mapping))
                    for r, labs in zip(records, labels)
                ]
            )
        default = run(JudgmentMapping.YES_NONLITERAL)
        inverted = run(JudgmentMapping.YES_LITERAL)
        assert (inverted.tp, inverted.fn) == (default.fn, default.tp)
        assert (inverted.fp, inverted.tn) == (default.tn, default.fp)


class TestPrecisionRecall:
    def test_perfect_two_record_matrix(self):
        metrics = precision_recall(BinaryConfusion(tp=1, fp=0, fn=0, tn=1))
        assert metrics.rendered() == {
            "precision_metaphorical": "100.00",
            "recall_metaphorical": "100.00",
            "precision_literal": "100.00",
            "recall_literal": "100.00",
        }

    def test_formula_oracle_on_random_matrices(self):
        rng = random.Random(99)
        for _ in range(100):
            cm = BinaryConfusion(
                tp=rng.randint(0, 500),
                fp=rng.randint(0, 500),
                fn=rng.randint(0, 500),
                tn=rng.randint(0, 500),
            )
            metrics = precision_recall(cm)
            checks = [
                (metrics.precision_metaphorical, cm.tp, cm.tp + cm.fp),
                (metrics.recall_metaphorical, cm.tp, cm.tp + cm.fn),
                (metrics.precision_literal, cm.tn, cm.tn + cm.fn),
                (metrics.recall_literal, cm.tn, cm.tn + cm.fp),
            ]
            for value, num, den in checks:
                if den == 0:
                    assert value is None
                else:
                    expected = num / den
                    if expected == 0:
                        assert value == 0
                    else:
                        assert abs(value - expected) / expected < 1e-12

    def test_two_decimal_percent_rendering(self):
        metrics = precision_recall(BinaryConfusion(tp=583, fp=417, fn=0, tn=0))
        assert metrics.rendered()["precision_metaphorical"] == "58.30"

    def test_undefined_renders_na(self):
        metrics = precision_recall(BinaryConfusion(tp=0, fp=0, fn=1, tn=1))
        assert metrics.rendered()["precision_metaphorical"] == "n/a"
        assert percent(None) == "n/a"

    def test_all_wrong_gives_zero_recalls(self):
        metrics = precision_recall(BinaryConfusion(tp=0, fp=3, fn=4, tn=0))
        assert metrics.recall_metaphorical == 0
        assert metrics.recall_literal == 0


class TestDeriveConfusion:
    def test_perfect_metrics_total_ten(self):
        matrices = derive_confusion_from_pr(1.0, 1.0, 1.0, 1.0, total=10, tolerance=0.0)
        assert matrices
        for cm in matrices:
            assert cm.fp == 0 and cm.fn == 0
            assert cm.tp + cm.tn == 10
        assert len(matrices) == 9  # tp from 1..9; all-one-class splits undefined

    def test_contradictory_inputs_empty(self):
        # r_m = 1 forces fn = 0, but p_l < 1 needs fn > 0
        assert derive_confusion_from_pr(0.9, 1.0, 0.5, 0.9, total=20, tolerance=0.0) == []

    def test_self_check_within_tolerance(self):
        tolerance = 0.5
        for p_m, r_m, p_l, r_l in TABLE1_ROWS.values():
            for cm in derive_confusion_from_pr(p_m, r_m, p_l, r_l, TROFI_TOTAL, tolerance)[:200]:
                metrics = precision_recall(cm)
                for value, target in [
                    (metrics.precision_metaphorical, p_m),
                    (metrics.recall_metaphorical, r_m),
                    (metrics.precision_literal, p_l),
                    (metrics.recall_literal, r_l),
                ]:
                    assert value is not None
                    assert abs(value - target) * 100 <= tolerance + 1e-9

    def test_published_row_reconstructs_near_expected_count(self):
        p_m, r_m, p_l, r_l = TABLE1_ROWS["3.5-turbo"]
        matrices = derive_confusion_from_pr(p_m, r_m, p_l, r_l, TROFI_TOTAL, 0.5)
        assert matrices
        positives = {cm.tp + cm.fn for cm in matrices}
        assert any(2100 <= p <= 2200 for p in positives)

    def test_residual_report_for_inconsistent_row(self):
        p_m, r_m, p_l, r_l = TABLE1_ROWS["4o"]
        assert derive_confusion_from_pr(p_m, r_m, p_l, r_l, TROFI_TOTAL, 0.5) == []
        report = nearest_confusion_report(p_m, r_m, p_l, r_l, TROFI_TOTAL)
        assert report["max_residual_pp"] > 0.5
        counts = report["confusion"]
        assert sum(counts.values()) == TROFI_TOTAL

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            derive_confusion_from_pr(0.5, 0.5, 0.5, 0.5, total=0, tolerance=0.5)
        with pytest.raises(ValueError):
            derive_confusion_from_pr(0.5, 0.5, 0.5, 0.5, total=10, tolerance=-1)


def qual(
    sid: str,
    annotator: str = "a1",
    lj: bool = True,
    basic: bool = False,
    additional: bool = False,
    add_met: bool | None = None,
    add_basic: bool | None = None,
    model: str = "m",
) -> QualitativeRecord:
    return QualitativeRecord(
        sentence_id=sid,
        model_id=model,
        annotator_id=annotator,
        lj_identified=lj,
        lj_basic_correct=basic,
        additional=additional,
        additional_metaphorical=add_met,
        additional_basic_correct=add_basic,
    )


class TestAggregate:
    def test_identified_fraction(self):
        records = [qual(f"s{i}", lj=i < 62) for i in range(100)]
        report = aggregate_qualitative(records)
        assert report.n == 100
        assert report.pct_lj_identified == pytest.approx(0.62)

    def test_additional_submetric_denominator(self):
        records = []
        for i in range(50):
            records.append(
                qual(f"s{i}", additional=True, add_met=i < 24, add_basic=i < 30)
            )
        for i in range(50, 60):
            records.append(qual(f"s{i}"))
        report = aggregate_qualitative(records)
        assert report.additional_denominator == 50
        assert report.pct_additional_metaphorical == pytest.approx(0.48)
        assert report.pct_additional_basic_correct == pytest.approx(0.60)
        assert report.pct_additional == pytest.approx(50 / 60)

    def test_invariant_violation_rejected(self):
        bad = qual("s1", lj=False, basic=True)
        assert validate_record(bad)
        with pytest.raises(InvalidRecordError, match="s1"):
            aggregate_qualitative([bad])

    def test_additional_fields_required_when_additional(self):
        bad = qual("s1", additional=True)
        fields = {f for f, _ in validate_record(bad)}
        assert fields == {"additional_metaphorical", "additional_basic_correct"}

    def test_additional_fields_forbidden_otherwise(self):
        bad = qual("s1", additional=False, add_met=True, add_basic=False)
        assert len(validate_record(bad)) == 2

    def test_zero_additional_renders_na(self):
        report = aggregate_qualitative([qual("s1"), qual("s2")])
        assert report.pct_additional_metaphorical is None
        assert report.rendered()["pct_additional_metaphorical"] == "n/a"


class TestConsensus:
    def test_unanimous_merge(self):
        a = qual("s1", annotator="alice")
        b = qual("s1", annotator="bob")
        merged, conflicts = consensus([a, b])
        assert conflicts == []
        assert len(merged) == 1
        assert merged[0].annotator_id == "alice+bob"

    def test_disagreement_becomes_conflict(self):
        a = qual("s1", annotator="alice", lj=True)
        b = qual("s1", annotator="bob", lj=False)
        merged, conflicts = consensus([a, b])
        assert merged == []
        assert len(conflicts) == 1
        assert {r.annotator_id for r in conflicts[0].records} == {"alice", "bob"}

    def test_single_annotator_passthrough(self):
        a = qual("s1", annotator="alice")
        merged, conflicts = consensus([a])
        assert conflicts == []
        assert merged[0].annotator_id == "alice"

    def test_groups_are_per_sentence_and_model(self):
        a = qual("s1", annotator="alice", model="m1", lj=True)
        b = qual("s1", annotator="bob", model="m2", lj=False)
        merged, conflicts = consensus([a, b])
        assert len(merged) == 2 and conflicts == []
