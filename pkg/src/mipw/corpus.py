"""Corpus model and loaders for the TroFi and MWLB metaphor datasets.

TroFi comes as the public distribution text format: ``***target***``
sections, ``*literal cluster*`` / ``*nonliteral cluster*`` headings, and one
tagged sentence per line.  MWLB is a tab-separated file with explicit
token-index metaphor spans.  Both are normalized into immutable records over
a shared tokenization.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

logger = logging.getLogger(__name__)


class CorpusFormatError(ValueError):
    """An input file does not conform to the expected dataset format."""


class Usage(Enum):
    LITERAL = "literal"
    NONLITERAL = "nonliteral"

    def opposite(self) -> "Usage":
        return Usage.NONLITERAL if self is Usage.LITERAL else Usage.LITERAL


# The gold label of a TroFi focus word and the class predicted for it share
# the same two-valued domain.
GoldUsage = Usage
PredictedUsage = Usage


@dataclass(frozen=True)
class Token:
    surface: str
    index: int
    char_span: tuple[int, int]


# Word tokens keep internal apostrophes and hyphens ("Let's", "short-term");
# every other non-space character becomes its own single-character token.
_TOKEN_RE = re.compile(r"\w+(?:['’-]\w+)*|\S")


def tokenize(text: str) -> list[Token]:
    """Split text into word and punctuation tokens with exact char spans."""
    return [
        Token(m.group(), i, (m.start(), m.end()))
        for i, m in enumerate(_TOKEN_RE.finditer(text))
    ]


@dataclass(frozen=True)
class TrofiRecord:
    id: str
    target_word: str
    sentence: str
    tokens: tuple[Token, ...]
    focus_indices: tuple[int, ...]
    gold: Usage

    def __post_init__(self) -> None:
        if not self.focus_indices:
            raise ValueError(f"{self.id}: focus_indices must be non-empty")
        for ix in self.focus_indices:
            if not 0 <= ix < len(self.tokens):
                raise ValueError(f"{self.id}: focus index {ix} out of range")


@dataclass(frozen=True)
class MetaphorSpan:
    """Contiguous token range carrying an L&J metaphor; both ends inclusive."""

    token_range: tuple[int, int]
    key_indices: tuple[int, ...]

    def __post_init__(self) -> None:
        lo, hi = self.token_range
        if lo > hi or lo < 0:
            raise ValueError(f"invalid token range {self.token_range}")
        if not self.key_indices:
            raise ValueError("key_indices must be non-empty")
        for k in self.key_indices:
            if not lo <= k <= hi:
                raise ValueError(f"key index {k} outside range {self.token_range}")


@dataclass(frozen=True)
class MwlbRecord:
    id: str
    sentence: str
    tokens: tuple[Token, ...]
    lj_metaphors: tuple[MetaphorSpan, ...]
    conceptual_metaphor: str | None = None

    def __post_init__(self) -> None:
        if not self.lj_metaphors:
            raise ValueError(f"{self.id}: at least one metaphor span required")
        for span in self.lj_metaphors:
            if span.token_range[1] >= len(self.tokens):
                raise ValueError(
                    f"{self.id}: span {span.token_range} exceeds sentence bounds"
                )


def _inflected_forms(lemma: str) -> set[str]:
    """Surface forms accepted as inflections of a target lemma.

    Stem-prefix matching with an inflectional-suffix whitelist: plain prefix
    matching would let short lemmas swallow unrelated words (``die`` matching
    ``did``), so the accepted remainders are enumerated instead.
    """
    t = lemma.lower()
    forms = {t, t + "s", t + "es", t + "ed", t + "d", t + "ing"}
    if len(t) > 2:
        if t.endswith("e"):
            forms |= {t[:-1] + "ing", t[:-1] + "ed"}
        if t.endswith("y"):
            forms |= {t[:-1] + "ies", t[:-1] + "ied"}
        if t.endswith("ie"):
            forms.add(t[:-2] + "ying")
        if t[-1] not in "aeiouy":
            forms |= {t + t[-1] + "ed", t + t[-1] + "ing"}
    return forms


def focus_token_indices(target: str, tokens: list[Token] | tuple[Token, ...]) -> list[int]:
    forms = _inflected_forms(target)
    return [t.index for t in tokens if t.surface.lower() in forms]


_TARGET_RE = re.compile(r"^\*\*\*(?P<word>.+?)\*\*\*\s*$")
_CLUSTER_RE = re.compile(r"^\*[^*].*\*\s*$")
_LINE_RE = re.compile(r"^(?P<id>\S+)\s+(?P<tag>[A-Z])\s+(?P<sentence>.+)$")
_TAGS = {"L": Usage.LITERAL, "N": Usage.NONLITERAL}


def load_trofi(path: str | Path) -> list[TrofiRecord]:
    """Load human-labeled TroFi sentences.

    Lines tagged ``U`` carry only the clustering system's label and are
    excluded; a summary warning reports how many were dropped.  Sentences in
    which no inflection of the target word can be found are skipped with a
    warning rather than failing the whole load.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CorpusFormatError(f"cannot read {path}: {exc}") from exc

    records: list[TrofiRecord] = []
    target: str | None = None
    excluded = 0
    skipped = 0
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip()
        if not line:
            continue
        m = _TARGET_RE.match(line)
        if m:
            target = m.group("word").strip()
            continue
        if _CLUSTER_RE.match(line):
            # Cluster headings record where the clustering system placed the
            # sentence; the per-line tag is the human label and wins.
            continue
        m = _LINE_RE.match(line)
        if m is None:
            raise CorpusFormatError(f"{path}:{lineno}: unparseable record: {line!r}")
        if target is None:
            raise CorpusFormatError(f"{path}:{lineno}: sentence before any ***target*** section")
        tag = m.group("tag")
        if tag == "U":
            excluded += 1
            continue
        if tag not in _TAGS:
            raise CorpusFormatError(f"{path}:{lineno}: unknown label tag {tag!r}")
        sentence = m.group("sentence").strip()
        tokens = tokenize(sentence)
        focus = focus_token_indices(target, tokens)
        if not focus:
            skipped += 1
            logger.warning(
                "%s:%d: target word %r absent from sentence; record skipped",
                path, lineno, target,
            )
            continue
        records.append(
            TrofiRecord(
                id=f"{target}:{m.group('id')}",
                target_word=target,
                sentence=sentence,
                tokens=tuple(tokens),
                focus_indices=tuple(focus),
                gold=_TAGS[tag],
            )
        )
    if excluded:
        logger.warning("%s: excluded %d cluster-only-labeled sentence(s)", path, excluded)
    if skipped:
        logger.warning("%s: skipped %d sentence(s) without the target word", path, skipped)
    return records


MWLB_COLUMNS = ("id", "sentence", "spans", "conceptual_metaphor")
_SPAN_GROUP_RE = re.compile(r"^(\d+)-(\d+):(\d+(?:,\d+)*)$")


def _parse_spans(spec: str, row: str) -> list[MetaphorSpan]:
    spans = []
    for group in spec.split(";"):
        group = group.strip()
        if not group:
            continue
        m = _SPAN_GROUP_RE.match(group)
        if m is None:
            raise CorpusFormatError(f"row {row}: bad span group {group!r}")
        lo, hi = int(m.group(1)), int(m.group(2))
        keys = tuple(int(k) for k in m.group(3).split(","))
        try:
            spans.append(MetaphorSpan((lo, hi), keys))
        except ValueError as exc:
            raise CorpusFormatError(f"row {row}: {exc}") from exc
    return spans


def load_mwlb(path: str | Path) -> list[MwlbRecord]:
    """Load the MWLB TSV: ``id<TAB>sentence<TAB>spans<TAB>conceptual_metaphor``.

    Leading ``#`` lines are format/version comments.  Span indices are
    validated against this module's tokenization of the sentence.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CorpusFormatError(f"cannot read {path}: {exc}") from exc

    body = [(n, ln) for n, ln in enumerate(lines, 1) if ln.strip() and not ln.startswith("#")]
    if not body:
        raise CorpusFormatError(f"{path}: empty file")
    header_no, header = body[0]
    if tuple(h.strip() for h in header.split("\t")) != MWLB_COLUMNS:
        raise CorpusFormatError(
            f"{path}:{header_no}: expected header {'<TAB>'.join(MWLB_COLUMNS)}"
        )

    records = []
    for lineno, line in body[1:]:
        parts = line.split("\t")
        if len(parts) < 4:
            raise CorpusFormatError(f"{path}:{lineno}: missing required columns")
        rec_id, sentence, spans_spec, conceptual = (p.strip() for p in parts[:4])
        tokens = tokenize(sentence)
        spans = _parse_spans(spans_spec, rec_id or str(lineno))
        if not spans:
            raise CorpusFormatError(f"{path}:{lineno}: row {rec_id!r} has no spans")
        for span in spans:
            if span.token_range[1] >= len(tokens):
                raise CorpusFormatError(
                    f"{path}:{lineno}: row {rec_id!r} span {span.token_range} "
                    f"past sentence end ({len(tokens)} tokens)"
                )
        records.append(
            MwlbRecord(
                id=rec_id,
                sentence=sentence,
                tokens=tuple(tokens),
                lj_metaphors=tuple(spans),
                conceptual_metaphor=conceptual or None,
            )
        )
    return records


def dump_mwlb(records: list[MwlbRecord], path: str | Path) -> None:
    """Write records back out in the versioned MWLB TSV format."""
    out = ["# mwlb-tsv v1", "\t".join(MWLB_COLUMNS)]
    for r in records:
        spans = ";".join(
            f"{lo}-{hi}:{','.join(str(k) for k in s.key_indices)}"
            for s in r.lj_metaphors
            for lo, hi in [s.token_range]
        )
        out.append("\t".join([r.id, r.sentence, spans, r.conceptual_metaphor or ""]))
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


@dataclass
class ValidationReport:
    duplicate_ids: list[str] = field(default_factory=list)
    empty_sentences: list[str] = field(default_factory=list)
    token_mismatches: list[dict] = field(default_factory=list)

    def ok(self) -> bool:
        return not (self.duplicate_ids or self.empty_sentences or self.token_mismatches)

    def to_text(self) -> str:
        if self.ok():
            return "corpus validation: clean\n"
        lines = ["corpus validation: issues found"]
        for dup in self.duplicate_ids:
            lines.append(f"  duplicate id: {dup}")
        for rid in self.empty_sentences:
            lines.append(f"  empty sentence: {rid}")
        for mm in self.token_mismatches:
            lines.append(
                f"  token mismatch in {mm['id']}: stored {mm['stored']} != "
                f"retokenized {mm['recomputed']}"
            )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {
                "duplicate_ids": self.duplicate_ids,
                "empty_sentences": self.empty_sentences,
                "token_mismatches": self.token_mismatches,
                "ok": self.ok(),
            },
            indent=2,
            sort_keys=True,
        )


def validate(records) -> ValidationReport:
    """Report duplicate ids, empty sentences, and stale tokenizations."""
    report = ValidationReport()
    seen: set[str] = set()
    for rec in records:
        if rec.id in seen:
            report.duplicate_ids.append(rec.id)
        seen.add(rec.id)
        if not rec.sentence.strip():
            report.empty_sentences.append(rec.id)
        recomputed = tuple(tokenize(rec.sentence))
        if recomputed != tuple(rec.tokens):
            report.token_mismatches.append(
                {
                    "id": rec.id,
                    "stored": [t.surface for t in rec.tokens],
                    "recomputed": [t.surface for t in recomputed],
                }
            )
    return report
