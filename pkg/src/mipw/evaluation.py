"""Scoring: confusion counts, per-class precision/recall, and aggregation of
the five-category qualitative judgments with consensus handling.

The positive class is non-literal/metaphorical throughout.  Undefined ratios
(0/0) are carried as None and rendered "n/a", never coerced to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .corpus import TrofiRecord, Usage


@dataclass(frozen=True)
class BinaryConfusion:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def percent(value: float | None) -> str:
    """Two-decimal percent rendering; undefined ratios render as n/a."""
    if value is None:
        return "n/a"
    return f"{value * 100:.2f}"


@dataclass(frozen=True)
class ClassMetrics:
    precision_metaphorical: float | None
    recall_metaphorical: float | None
    precision_literal: float | None
    recall_literal: float | None

    def rendered(self) -> dict[str, str]:
        return {
            "precision_metaphorical": percent(self.precision_metaphorical),
            "recall_metaphorical": percent(self.recall_metaphorical),
            "precision_literal": percent(self.precision_literal),
            "recall_literal": percent(self.recall_literal),
        }


def _ratio(num: int, den: int) -> float | None:
    return None if den == 0 else num / den


def score_trofi(records: Iterable[tuple[TrofiRecord, Usage]]) -> BinaryConfusion:
    """Tabulate focus-word predictions against gold, Nonliteral positive."""
    tp = fp = fn = tn = 0
    seen: set[str] = set()
    for record, predicted in records:
        if record.id in seen:
            raise ValueError(f"duplicate record id {record.id}")
        seen.add(record.id)
        if record.gold is Usage.NONLITERAL:
            if predicted is Usage.NONLITERAL:
                tp += 1
            else:
                fn += 1
        else:
            if predicted is Usage.NONLITERAL:
                fp += 1
            else:
                tn += 1
    return BinaryConfusion(tp=tp, fp=fp, fn=fn, tn=tn)


def precision_recall(cm: BinaryConfusion) -> ClassMetrics:
    return ClassMetrics(
        precision_metaphorical=_ratio(cm.tp, cm.tp + cm.fp),
        recall_metaphorical=_ratio(cm.tp, cm.tp + cm.fn),
        precision_literal=_ratio(cm.tn, cm.tn + cm.fn),
        recall_literal=_ratio(cm.tn, cm.tn + cm.fp),
    )


def _within(value: float | None, target: float, tolerance_pp: float) -> bool:
    return value is not None and abs(value * 100 - target * 100) <= tolerance_pp + 1e-9


def derive_confusion_from_pr(
    p_m: float,
    r_m: float,
    p_l: float,
    r_l: float,
    total: int,
    tolerance: float,
) -> list[BinaryConfusion]:
    """All integer confusion matrices reproducing the four metrics.

    Inputs are fractions; tolerance is in percentage points.  Searches over
    the (tp, fn) split of each class: the recall windows bound tp and tn
    directly, so only a thin band of candidates is enumerated per class
    total.  Returns every matrix whose recomputed metrics all land within
    tolerance, or an empty list when the four values are mutually
    inconsistent at this tolerance.
    """
    if total <= 0:
        raise ValueError("total must be positive")
    if tolerance < 0:
        raise ValueError("tolerance must be non-negative")
    tol = tolerance / 100.0
    results: list[BinaryConfusion] = []
    for pos in range(1, total):
        neg = total - pos
        tp_lo = max(0, _ceil(pos * (r_m - tol)))
        tp_hi = min(pos, _floor(pos * (r_m + tol)))
        tn_lo = max(0, _ceil(neg * (r_l - tol)))
        tn_hi = min(neg, _floor(neg * (r_l + tol)))
        if tp_lo > tp_hi or tn_lo > tn_hi:
            continue
        for tp in range(tp_lo, tp_hi + 1):
            fn = pos - tp
            for tn in range(tn_lo, tn_hi + 1):
                fp = neg - tn
                if not _within(_ratio(tp, tp + fp), p_m, tolerance):
                    continue
                if not _within(_ratio(tn, tn + fn), p_l, tolerance):
                    continue
                results.append(BinaryConfusion(tp=tp, fp=fp, fn=fn, tn=tn))
    return results


def _ceil(x: float) -> int:
    i = int(x)
    return i if i >= x else i + 1


def _floor(x: float) -> int:
    i = int(x)
    return i if i <= x else i - 1


def _max_deviation_pp(cm: BinaryConfusion, targets: tuple[float, float, float, float]) -> float:
    metrics = precision_recall(cm)
    worst = 0.0
    for value, target in zip(
        (
            metrics.precision_metaphorical,
            metrics.recall_metaphorical,
            metrics.precision_literal,
            metrics.recall_literal,
        ),
        targets,
    ):
        worst = max(worst, abs(value * 100 - target * 100) if value is not None else 100.0)
    return worst


def nearest_confusion_report(
    p_m: float, r_m: float, p_l: float, r_l: float, total: int, step: float = 0.05
) -> dict:
    """Best-effort reconstruction with residuals, for inconsistent inputs.

    Sweeps the tolerance upward in ``step`` percentage-point increments until
    some integer matrix reproduces all four metrics, then reports the matrix
    with the smallest worst-case deviation, so the inconsistency is
    quantified rather than hidden.
    """
    targets = (p_m, r_m, p_l, r_l)
    candidates: list[BinaryConfusion] = []
    tol = step
    while not candidates and tol <= 100.0:
        candidates = derive_confusion_from_pr(p_m, r_m, p_l, r_l, total, tol)
        if not candidates:
            tol += step
    cm = min(candidates, key=lambda c: (_max_deviation_pp(c, targets), c.tp, c.fp))
    worst = _max_deviation_pp(cm, targets)
    metrics = precision_recall(cm)
    return {
        "max_residual_pp": worst,
        "confusion": {"tp": cm.tp, "fp": cm.fp, "fn": cm.fn, "tn": cm.tn},
        "recomputed": metrics.rendered(),
        "targets": {
            "precision_metaphorical": percent(p_m),
            "recall_metaphorical": percent(r_m),
            "precision_literal": percent(p_l),
            "recall_literal": percent(r_l),
        },
    }


@dataclass(frozen=True)
class QualitativeRecord:
    """One annotator's five binary judgments for one model output."""

    sentence_id: str
    model_id: str
    annotator_id: str
    lj_identified: bool
    lj_basic_correct: bool
    additional: bool
    additional_metaphorical: bool | None = None
    additional_basic_correct: bool | None = None
    note: str | None = None

    def category_values(self) -> tuple:
        return (
            self.lj_identified,
            self.lj_basic_correct,
            self.additional,
            self.additional_metaphorical,
            self.additional_basic_correct,
        )

    def to_dict(self) -> dict:
        return {
            "sentence_id": self.sentence_id,
            "model_id": self.model_id,
            "annotator_id": self.annotator_id,
            "lj_identified": self.lj_identified,
            "lj_basic_correct": self.lj_basic_correct,
            "additional": self.additional,
            "additional_metaphorical": self.additional_metaphorical,
            "additional_basic_correct": self.additional_basic_correct,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QualitativeRecord":
        return cls(
            sentence_id=d["sentence_id"],
            model_id=d["model_id"],
            annotator_id=d["annotator_id"],
            lj_identified=bool(d["lj_identified"]),
            lj_basic_correct=bool(d["lj_basic_correct"]),
            additional=bool(d["additional"]),
            additional_metaphorical=d.get("additional_metaphorical"),
            additional_basic_correct=d.get("additional_basic_correct"),
            note=d.get("note"),
        )


def validate_record(record: QualitativeRecord) -> list[tuple[str, str]]:
    """Field-level invariant violations as (field, message) pairs."""
    problems: list[tuple[str, str]] = []
    if record.lj_basic_correct and not record.lj_identified:
        problems.append(
            ("lj_basic_correct", "basic meanings can only be correct when all metaphors are identified")
        )
    if record.additional:
        if record.additional_metaphorical is None:
            problems.append(("additional_metaphorical", "required when additional annotations exist"))
        if record.additional_basic_correct is None:
            problems.append(("additional_basic_correct", "required when additional annotations exist"))
    else:
        if record.additional_metaphorical is not None:
            problems.append(("additional_metaphorical", "must be absent without additional annotations"))
        if record.additional_basic_correct is not None:
            problems.append(("additional_basic_correct", "must be absent without additional annotations"))
    if not record.sentence_id:
        problems.append(("sentence_id", "must be non-empty"))
    if not record.annotator_id:
        problems.append(("annotator_id", "must be non-empty"))
    return problems


class InvalidRecordError(ValueError):
    def __init__(self, record_id: str, problems: list[tuple[str, str]]):
        self.record_id = record_id
        self.problems = problems
        detail = "; ".join(f"{f}: {m}" for f, m in problems)
        super().__init__(f"invalid qualitative record {record_id}: {detail}")


@dataclass(frozen=True)
class AggregateReport:
    n: int
    pct_lj_identified: float | None
    pct_lj_basic_correct: float | None
    pct_additional: float | None
    pct_additional_metaphorical: float | None
    pct_additional_basic_correct: float | None
    additional_denominator: int

    def rendered(self) -> dict[str, str]:
        return {
            "n": str(self.n),
            "additional_denominator": str(self.additional_denominator),
            "pct_lj_identified": percent(self.pct_lj_identified),
            "pct_lj_basic_correct": percent(self.pct_lj_basic_correct),
            "pct_additional": percent(self.pct_additional),
            "pct_additional_metaphorical": percent(self.pct_additional_metaphorical),
            "pct_additional_basic_correct": percent(self.pct_additional_basic_correct),
        }


def aggregate_qualitative(records: list[QualitativeRecord]) -> AggregateReport:
    """Category percentages; the additional_* sub-metrics are computed over
    records that carry additional annotations, and that denominator is
    reported alongside so the choice stays auditable."""
    for record in records:
        problems = validate_record(record)
        if problems:
            raise InvalidRecordError(f"{record.sentence_id}/{record.annotator_id}", problems)
    n = len(records)
    with_additional = [r for r in records if r.additional]
    k = len(with_additional)
    return AggregateReport(
        n=n,
        pct_lj_identified=_ratio(sum(r.lj_identified for r in records), n),
        pct_lj_basic_correct=_ratio(sum(r.lj_basic_correct for r in records), n),
        pct_additional=_ratio(k, n),
        pct_additional_metaphorical=_ratio(
            sum(bool(r.additional_metaphorical) for r in with_additional), k
        ),
        pct_additional_basic_correct=_ratio(
            sum(bool(r.additional_basic_correct) for r in with_additional), k
        ),
        additional_denominator=k,
    )


@dataclass(frozen=True)
class ConsensusConflict:
    sentence_id: str
    model_id: str
    records: tuple[QualitativeRecord, ...]


def consensus(
    records: list[QualitativeRecord],
) -> tuple[list[QualitativeRecord], list[ConsensusConflict]]:
    """Merge unanimous per-(sentence, model) groups; surface disagreements.

    Disagreeing groups are emitted as conflicts carrying every annotator's
    record and are excluded from the merged list until resolved by
    discussion, not by vote.
    """
    groups: dict[tuple[str, str], list[QualitativeRecord]] = {}
    for record in records:
        groups.setdefault((record.sentence_id, record.model_id), []).append(record)
    merged: list[QualitativeRecord] = []
    conflicts: list[ConsensusConflict] = []
    for (sentence_id, model_id), group in sorted(groups.items()):
        values = {g.category_values() for g in group}
        if len(values) == 1:
            annotators = "+".join(sorted({g.annotator_id for g in group}))
            first = group[0]
            merged.append(
                QualitativeRecord(
                    sentence_id=sentence_id,
                    model_id=model_id,
                    annotator_id=annotators,
                    lj_identified=first.lj_identified,
                    lj_basic_correct=first.lj_basic_correct,
                    additional=first.additional,
                    additional_metaphorical=first.additional_metaphorical,
                    additional_basic_correct=first.additional_basic_correct,
                    note=first.note,
                )
            )
        else:
            conflicts.append(ConsensusConflict(sentence_id, model_id, tuple(group)))
    return merged, conflicts
