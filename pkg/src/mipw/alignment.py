"""Monotone alignment of annotation units onto source tokens.

Models reorder punctuation, drop words, merge runs into phrases, and restyle
quotes; a minimum-cost monotone alignment recovers which source token each
unit annotates, after which judgments are projected token-by-token.  Phrase
units may cover a contiguous run of source tokens; their judgment propagates
to every covered token.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from enum import Enum

from .corpus import Token, Usage
from .output_parser import Judgment, UnitAnnotation, UnitKind

MATCH_COST = 0
SUBSTITUTE_COST = 1
DELETE_COST = 2
INSERT_COST = 2
SUBSTITUTE_SIMILARITY = 0.5

_TRANSLATE: dict[int, str] = {}
for _c in "“”„‟":
    _TRANSLATE[ord(_c)] = '"'
for _c in "‘’‚‛":
    _TRANSLATE[ord(_c)] = "'"
for _c in "–—‐‑":
    _TRANSLATE[ord(_c)] = "-"

_STRIP_CHARS = string.punctuation + " \t"


def normalize_surface(s: str) -> str:
    """Case-fold, map curly quotes/dashes to ASCII, strip edge punctuation.

    Pure punctuation survives as itself so that "." and "!" stay distinct.
    """
    s = s.translate(_TRANSLATE).casefold()
    core = s.strip(_STRIP_CHARS)
    return core if core else s


def _phrase_key(s: str) -> str:
    """Spacing- and hyphen-insensitive key for phrase comparisons."""
    return re.sub(r"[\s\-]+", "", normalize_surface(s))


def _levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[-1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def edit_similarity(a: str, b: str) -> float:
    if not a and not b:
        return 1.0
    return 1.0 - _levenshtein(a, b) / max(len(a), len(b))


@dataclass(frozen=True)
class MatchOp:
    source_start: int
    source_end: int  # exclusive; covers more than one token only for phrase units
    unit_index: int


@dataclass(frozen=True)
class SubstituteOp:
    source_index: int
    unit_index: int


@dataclass(frozen=True)
class DeleteSourceOp:
    source_index: int


@dataclass(frozen=True)
class InsertUnitOp:
    unit_index: int


AlignmentOp = MatchOp | SubstituteOp | DeleteSourceOp | InsertUnitOp


@dataclass(frozen=True)
class AlignmentMap:
    ops: tuple[AlignmentOp, ...]
    cost: int

    def to_json_obj(self) -> dict:
        ops = []
        for op in self.ops:
            if isinstance(op, MatchOp):
                ops.append(
                    {"op": "match", "source": [op.source_start, op.source_end], "unit": op.unit_index}
                )
            elif isinstance(op, SubstituteOp):
                ops.append({"op": "substitute", "source": op.source_index, "unit": op.unit_index})
            elif isinstance(op, DeleteSourceOp):
                ops.append({"op": "delete_source", "source": op.source_index})
            else:
                ops.append({"op": "insert_unit", "unit": op.unit_index})
        return {"cost": self.cost, "ops": ops}


# Tie-break preference on equal cost: match > substitute > delete > insert.
_RANK_MATCH, _RANK_SUB, _RANK_DEL, _RANK_INS = 0, 1, 2, 3


def align(
    tokens: list[Token] | tuple[Token, ...],
    units: list[UnitAnnotation] | tuple[UnitAnnotation, ...],
) -> AlignmentMap:
    """Minimum-cost monotone alignment of units onto tokens (deterministic)."""
    n, m = len(tokens), len(units)
    tok_norm = [normalize_surface(t.surface) for t in tokens]
    unit_norm = [normalize_surface(u.surface) for u in units]
    tok_key = [_phrase_key(t.surface) for t in tokens]

    INF = float("inf")
    cost = [[INF] * (m + 1) for _ in range(n + 1)]
    # back[i][j] = (op, prev_i, prev_j)
    back: list[list[tuple | None]] = [[None] * (m + 1) for _ in range(n + 1)]
    cost[0][0] = 0

    for i in range(n + 1):
        for j in range(m + 1):
            if i == 0 and j == 0:
                continue
            best_cost = INF
            best_rank = 99
            best_span = 0
            best = None
            if i > 0 and cost[i - 1][j] + DELETE_COST < INF:
                c = cost[i - 1][j] + DELETE_COST
                if (c, _RANK_DEL) < (best_cost, best_rank):
                    best_cost, best_rank, best_span = c, _RANK_DEL, 1
                    best = (DeleteSourceOp(i - 1), i - 1, j)
            if j > 0 and cost[i][j - 1] + INSERT_COST < INF:
                c = cost[i][j - 1] + INSERT_COST
                if (c, _RANK_INS) < (best_cost, best_rank):
                    best_cost, best_rank, best_span = c, _RANK_INS, 1
                    best = (InsertUnitOp(j - 1), i, j - 1)
            if i > 0 and j > 0:
                u = units[j - 1]
                if u.kind is UnitKind.WORD:
                    if tok_norm[i - 1] == unit_norm[j - 1]:
                        c = cost[i - 1][j - 1] + MATCH_COST
                        if (c, _RANK_MATCH) < (best_cost, best_rank):
                            best_cost, best_rank, best_span = c, _RANK_MATCH, 1
                            best = (MatchOp(i - 1, i, j - 1), i - 1, j - 1)
                    elif edit_similarity(tok_norm[i - 1], unit_norm[j - 1]) >= SUBSTITUTE_SIMILARITY:
                        c = cost[i - 1][j - 1] + SUBSTITUTE_COST
                        if (c, _RANK_SUB) < (best_cost, best_rank):
                            best_cost, best_rank, best_span = c, _RANK_SUB, 1
                            best = (SubstituteOp(i - 1, j - 1), i - 1, j - 1)
                else:
                    pk = _phrase_key(u.surface)
                    if pk:
                        acc = ""
                        for k in range(1, i + 1):
                            acc = tok_key[i - k] + acc
                            if len(acc) > len(pk):
                                break
                            if acc == pk and cost[i - k][j - 1] < INF:
                                c = cost[i - k][j - 1] + MATCH_COST
                                # Prefer the widest covering run on ties.
                                if (c, _RANK_MATCH, -k) < (best_cost, best_rank, -best_span):
                                    best_cost, best_rank, best_span = c, _RANK_MATCH, k
                                    best = (MatchOp(i - k, i, j - 1), i - k, j - 1)
            cost[i][j] = best_cost
            back[i][j] = best

    ops: list[AlignmentOp] = []
    i, j = n, m
    while (i, j) != (0, 0):
        entry = back[i][j]
        assert entry is not None
        op, i, j = entry
        ops.append(op)
    ops.reverse()
    return AlignmentMap(tuple(ops), int(cost[n][m]))


class LabelProvenance(Enum):
    DIRECT = "direct"
    PHRASE_PROPAGATED = "phrase_propagated"
    MISSING = "missing"


@dataclass(frozen=True)
class TokenLabel:
    token_index: int
    judgment: Judgment
    provenance: LabelProvenance

    def __post_init__(self) -> None:
        if self.provenance is LabelProvenance.MISSING and self.judgment is not Judgment.UNMARKED:
            raise ValueError("missing provenance implies an unmarked judgment")


def project_labels(
    tokens: list[Token] | tuple[Token, ...],
    units: list[UnitAnnotation] | tuple[UnitAnnotation, ...],
    amap: AlignmentMap,
) -> list[TokenLabel]:
    """One label per source token; unlinked or unmarked tokens become Missing."""
    labels: dict[int, TokenLabel] = {}

    def put(ix: int, label: TokenLabel) -> None:
        if ix in labels or not 0 <= ix < len(tokens):
            raise ValueError(f"alignment map touches token {ix} more than once or out of range")
        labels[ix] = label

    for op in amap.ops:
        if isinstance(op, MatchOp):
            u = units[op.unit_index]
            wide = u.kind is UnitKind.PHRASE or (op.source_end - op.source_start) > 1
            for ix in range(op.source_start, op.source_end):
                if u.judgment is Judgment.UNMARKED:
                    put(ix, TokenLabel(ix, Judgment.UNMARKED, LabelProvenance.MISSING))
                else:
                    prov = LabelProvenance.PHRASE_PROPAGATED if wide else LabelProvenance.DIRECT
                    put(ix, TokenLabel(ix, u.judgment, prov))
        elif isinstance(op, SubstituteOp):
            u = units[op.unit_index]
            if u.judgment is Judgment.UNMARKED:
                put(op.source_index, TokenLabel(op.source_index, Judgment.UNMARKED, LabelProvenance.MISSING))
            else:
                put(op.source_index, TokenLabel(op.source_index, u.judgment, LabelProvenance.DIRECT))
        elif isinstance(op, DeleteSourceOp):
            put(op.source_index, TokenLabel(op.source_index, Judgment.UNMARKED, LabelProvenance.MISSING))
    if len(labels) != len(tokens):
        raise ValueError("alignment map does not cover every source token")
    return [labels[i] for i in range(len(tokens))]


class JudgmentMapping(Enum):
    """How a YES/NO more-basic-meaning answer maps onto usage classes.

    The default reads YES (a more basic meaning exists, contrasting with the
    context) as a non-literal prediction; the inverted mapping is available
    so both readings of the scoring rule can be reproduced.
    """

    YES_NONLITERAL = "yes-nonliteral"
    YES_LITERAL = "yes-literal"

    def predict(self, judgment: Judgment) -> Usage:
        if judgment is Judgment.UNMARKED:
            raise ValueError("unmarked judgments have no mapped class")
        yes_class = Usage.NONLITERAL if self is JudgmentMapping.YES_NONLITERAL else Usage.LITERAL
        return yes_class if judgment is Judgment.YES else yes_class.opposite()


def focus_prediction(
    labels: list[TokenLabel],
    focus_indices: list[int] | tuple[int, ...],
    gold: Usage,
    mapping: JudgmentMapping = JudgmentMapping.YES_NONLITERAL,
) -> Usage:
    """Predicted usage for the word of interest.

    A Missing label is scored as if the incorrect label was given, i.e. the
    prediction opposite to gold.  Multiple occurrences resolve by majority,
    ties by the first occurrence.
    """
    if not focus_indices:
        raise ValueError("focus_indices must be non-empty")
    votes: list[Usage] = []
    for ix in focus_indices:
        label = labels[ix]
        if label.judgment is Judgment.UNMARKED:
            votes.append(gold.opposite())
        else:
            votes.append(mapping.predict(label.judgment))
    nonliteral = votes.count(Usage.NONLITERAL)
    literal = votes.count(Usage.LITERAL)
    if nonliteral != literal:
        return Usage.NONLITERAL if nonliteral > literal else Usage.LITERAL
    return votes[0]
