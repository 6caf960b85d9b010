"""Parser for word-by-word annotated model responses.

The canonical response grammar is the input sentence echoed with one
parenthetical per annotated unit::

    word (POS, more basic meaning: GLOSS)
    word (POS, no more basic meaning)
    "multi word phrase" (POS, more basic meaning: GLOSS)

POS may be omitted (no comma).  Glosses run to the matching close
parenthesis; nesting is allowed.  Anything else is handled by lenient
recovery: list markers are stripped per line, bare uppercase YES/NO or
``word: yes`` list lines stand in for the full parenthetical, hyphen-joined
runs matching several source tokens are treated as phrase groups, and an
unterminated parenthetical at end of input is salvaged as a truncation.
parse() is total: malformed input degrades into diagnostics, never an
exception.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum

from .corpus import Token


class Judgment(Enum):
    YES = "yes"
    NO = "no"
    UNMARKED = "unmarked"


class UnitKind(Enum):
    WORD = "word"
    PHRASE = "phrase"


@dataclass(frozen=True)
class UnitAnnotation:
    surface: str
    kind: UnitKind = UnitKind.WORD
    pos: str | None = None
    judgment: Judgment = Judgment.UNMARKED
    gloss: str | None = None

    def __post_init__(self) -> None:
        if self.gloss is not None and self.judgment is not Judgment.YES:
            raise ValueError("gloss is only meaningful for a YES judgment")
        if self.kind is UnitKind.PHRASE and not re.search(r"\s", self.surface):
            raise ValueError("phrase surfaces must contain whitespace")


class DiagnosticKind(Enum):
    TRUNCATED = "truncated"
    # Covers both an absent parenthetical and one carrying no usable judgment.
    MISSING_PARENTHETICAL = "missing_parenthetical"
    UNBALANCED_DELIMITERS = "unbalanced_delimiters"
    LIST_FORMAT_DRIFT = "list_format_drift"
    DROPPED_WORDS = "dropped_words"


@dataclass(frozen=True)
class ParseDiagnostic:
    kind: DiagnosticKind
    location: int  # character offset into the input, 0 <= location <= len(text)
    message: str


@dataclass(frozen=True)
class ParsedOutput:
    units: tuple[UnitAnnotation, ...]
    diagnostics: tuple[ParseDiagnostic, ...]
    coverage: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "units": [
                    {
                        "surface": u.surface,
                        "kind": u.kind.value,
                        "pos": u.pos,
                        "judgment": u.judgment.value,
                        "gloss": u.gloss,
                    }
                    for u in self.units
                ],
                "diagnostics": [
                    {"kind": d.kind.value, "location": d.location, "message": d.message}
                    for d in self.diagnostics
                ],
                "coverage": self.coverage,
            },
            indent=2,
            sort_keys=True,
            ensure_ascii=False,
        )


_LIST_MARKER_RE = re.compile(r"(?:[-*•+]|\d{1,3}[.)])[ \t]+")
_MEANING_RE = re.compile(r"(no[ \t]+)?more[ \t]+basic[ \t]+meaning", re.IGNORECASE)
_NEGATION_TAIL_RE = re.compile(
    r"\b(?:no|not|n't|never|without|lacks?|doesn'?t|does\s+not)\b[^,;]*$", re.IGNORECASE
)
_YESNO_CONTENT_RE = re.compile(
    r"^(?:(?P<pos>[^,()]{1,40}?)\s*,\s*)?(?P<word>yes|no)\s*[.!]?$", re.IGNORECASE
)
_BARE_YESNO_RE = re.compile(r"(YES|NO)\b[.,;!]?")
_ANYCASE_YESNO_RE = re.compile(r"(yes|no)\b[.,;!]?", re.IGNORECASE)
_INLINE_GLOSS_RE = re.compile(
    r"[ \t]*[,;]?[ \t]*more\s+basic\s+meaning\s*[:\-]\s*(?P<gloss>[^\n]+)", re.IGNORECASE
)
_POS_LIKE_RE = re.compile(r"^[A-Za-z][A-Za-z .\-/]{0,40}$")
_WORDLIKE_RE = re.compile(r"\w", re.UNICODE)
_QUOTE_CLOSERS = {'"': '"', "“": "”“", "”": "”“"}
_WORD_STOP = set(" \t\r\n()")


def _classify_parenthetical(content: str) -> tuple[str | None, Judgment, str | None, bool]:
    """Interpret parenthetical content as (pos, judgment, gloss, recognized)."""
    c = content.strip()
    m = _MEANING_RE.search(c)
    if m:
        pre = c[: m.start()].rstrip()
        negated = bool(m.group(1))
        if not negated and pre:
            nm = _NEGATION_TAIL_RE.search(pre)
            if nm:
                negated = True
                pre = pre[: nm.start()]
        pos = pre.rstrip(" \t,;").split(",")[0].strip() or None
        if pos is not None and not _POS_LIKE_RE.match(pos):
            pos = None
        if negated:
            return pos, Judgment.NO, None, True
        after = c[m.end():].strip()
        gloss = re.sub(r"^(?::|-|–|—|is\b)\s*", "", after).strip() or None
        return pos, Judgment.YES, gloss, True
    m = _YESNO_CONTENT_RE.match(c)
    if m:
        judgment = Judgment.YES if m.group("word").lower() == "yes" else Judgment.NO
        return m.group("pos"), judgment, None, True
    pos = c if _POS_LIKE_RE.match(c) else None
    return pos, Judgment.UNMARKED, None, False


def _scan_parenthetical(text: str, start: int) -> tuple[str, int | None]:
    """Return (content, end) for the paren at start; end=None when unterminated."""
    depth = 0
    for i in range(start, len(text)):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return text[start + 1 : i], i + 1
    return text[start + 1 :], None


def _norm_part(s: str) -> str:
    return s.casefold().strip(".,;:!?\"'()[]“”‘’")


def _hyphen_phrase(surface: str, expected: list[str] | None) -> str | None:
    """Space-joined phrase when a hyphen run spells out several source tokens.

    Requires the source tokens as evidence: ordinary hyphenated compounds
    ("short-term") are single tokens and must stay words.
    """
    if expected is None or "-" not in surface.strip("-"):
        return None
    parts = surface.strip(".,;:!?\"'").split("-")
    if len(parts) < 2 or any(not _WORDLIKE_RE.search(p) for p in parts):
        return None
    norm_parts = [_norm_part(p) for p in parts]
    for lo in range(len(expected) - len(parts) + 1):
        if expected[lo : lo + len(parts)] == norm_parts:
            return " ".join(parts)
    return None


@dataclass
class _Scanner:
    text: str
    expected_norms: list[str] | None
    units: list[UnitAnnotation] = field(default_factory=list)
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)
    drift_events: list[int] = field(default_factory=list)
    truncated: bool = False

    def run(self) -> None:
        text = self.text
        n = len(text)
        p = 0
        line_start = True
        while p < n:
            ch = text[p]
            if ch == "\n":
                p += 1
                line_start = True
                continue
            if ch in " \t\r":
                p += 1
                continue
            if line_start:
                m = _LIST_MARKER_RE.match(text, p)
                if m:
                    self.drift_events.append(p)
                    p = m.end()
                    line_start = False
                    continue
            line_start = False
            if ch == ")":
                self.diagnostics.append(
                    ParseDiagnostic(
                        DiagnosticKind.UNBALANCED_DELIMITERS, p, "stray close parenthesis"
                    )
                )
                p += 1
                continue
            if ch == "(":
                p = self._orphan_parenthetical(p)
                continue
            if ch in _QUOTE_CLOSERS:
                consumed = self._quoted_group(p)
                if consumed is not None:
                    p = consumed
                    continue
            p = self._word(p)

    # -- scanning helpers -------------------------------------------------

    def _quoted_group(self, p: int) -> int | None:
        """Quoted group followed by a parenthetical; None means not a group."""
        text = self.text
        closers = _QUOTE_CLOSERS[text[p]]
        end = None
        blocker = None
        limit = min(len(text), p + 96)
        for i in range(p + 1, limit):
            ch = text[i]
            if ch in closers:
                end = i
                break
            if ch in "()\n":
                blocker = ch
                break
        if end is None:
            if blocker is None and limit == len(text):
                # Input ends inside the quote: salvage the remainder as one
                # group so truncation never multiplies units.
                content = text[p + 1 :].strip()
                if content:
                    self.truncated = True
                    self.diagnostics.append(
                        ParseDiagnostic(
                            DiagnosticKind.UNBALANCED_DELIMITERS,
                            p,
                            "unterminated quoted group at end of input",
                        )
                    )
                    kind = UnitKind.PHRASE if re.search(r"\s", content) else UnitKind.WORD
                    self.units.append(UnitAnnotation(surface=content, kind=kind))
                    return len(text)
            return None
        content = text[p + 1 : end].strip()
        if not content:
            return None
        q = end + 1
        while q < len(text) and text[q] in " \t":
            q += 1
        if q >= len(text):
            # Quote closed but input ends before any parenthetical.
            self.truncated = True
            self.diagnostics.append(
                ParseDiagnostic(
                    DiagnosticKind.TRUNCATED, p, "input ends after quoted group"
                )
            )
            kind = UnitKind.PHRASE if re.search(r"\s", content) else UnitKind.WORD
            self.units.append(UnitAnnotation(surface=content, kind=kind))
            return len(text)
        if text[q] != "(":
            return None
        paren, after = _scan_parenthetical(text, q)
        if after is None:
            self._truncated_unit(content, q, quoted=True)
            return len(text)
        self._attach(content, paren, q, quoted=True)
        return after

    def _word(self, p: int) -> int:
        text = self.text
        q = p
        while q < len(text) and text[q] not in _WORD_STOP:
            q += 1
        surface = text[p:q]
        r = q
        while r < len(text) and text[r] in " \t":
            r += 1
        if r < len(text) and text[r] == "(":
            paren, after = _scan_parenthetical(text, r)
            if after is None:
                self._truncated_unit(surface, r, quoted=False)
                return len(text)
            self._attach(surface, paren, r, quoted=False)
            return after
        return self._bare_word(surface, p, q, r)

    def _bare_word(self, surface: str, p: int, q: int, r: int) -> int:
        """A word with no parenthetical: list-style YES/NO lookahead, else unmarked."""
        text = self.text
        colon_form = surface.endswith(":") and len(surface) > 1
        lookahead = _ANYCASE_YESNO_RE if colon_form else _BARE_YESNO_RE
        m = lookahead.match(text, r) if r < len(text) else None
        if m:
            word_surface = surface[:-1] if colon_form else surface
            judgment = Judgment.YES if m.group(1).upper() == "YES" else Judgment.NO
            gloss = None
            rest = m.end()
            gm = _INLINE_GLOSS_RE.match(text, rest)
            if gm and judgment is Judgment.YES:
                gloss = gm.group("gloss").strip() or None
                rest = gm.end()
            self.drift_events.append(p)
            self._emit(word_surface, None, judgment, gloss, quoted=False)
            return rest
        self.units.append(UnitAnnotation(surface=surface))
        self.diagnostics.append(
            ParseDiagnostic(
                DiagnosticKind.MISSING_PARENTHETICAL,
                p,
                f"no parenthetical for {surface!r}",
            )
        )
        return q

    def _orphan_parenthetical(self, p: int) -> int:
        """A parenthetical with no preceding group; upgrade a bare unit if possible."""
        paren, after = _scan_parenthetical(self.text, p)
        if after is None:
            self.truncated = True
            self.diagnostics.append(
                ParseDiagnostic(
                    DiagnosticKind.TRUNCATED, p, "unterminated parenthetical at end of input"
                )
            )
            return len(self.text)
        pos, judgment, gloss, recognized = _classify_parenthetical(paren)
        if (
            recognized
            and self.units
            and self.units[-1].judgment is Judgment.UNMARKED
            and self.diagnostics
            and self.diagnostics[-1].kind is DiagnosticKind.MISSING_PARENTHETICAL
        ):
            prev = self.units.pop()
            self.diagnostics.pop()
            self.units.append(
                UnitAnnotation(
                    surface=prev.surface,
                    kind=prev.kind,
                    pos=pos,
                    judgment=judgment,
                    gloss=gloss if judgment is Judgment.YES else None,
                )
            )
        else:
            self.diagnostics.append(
                ParseDiagnostic(
                    DiagnosticKind.LIST_FORMAT_DRIFT, p, "unattached parenthetical skipped"
                )
            )
        return after

    def _truncated_unit(self, surface: str, paren_at: int, quoted: bool) -> None:
        self.truncated = True
        self.diagnostics.append(
            ParseDiagnostic(
                DiagnosticKind.TRUNCATED, paren_at, "unterminated parenthetical at end of input"
            )
        )
        partial = self.text[paren_at + 1 :]
        pos, judgment, gloss, recognized = _classify_parenthetical(partial)
        if recognized:
            self._emit(surface, pos, judgment, gloss, quoted)
        elif quoted and re.search(r"\s", surface):
            self.units.append(UnitAnnotation(surface=surface, kind=UnitKind.PHRASE))
        else:
            self.units.append(UnitAnnotation(surface=surface))

    def _attach(self, surface: str, paren: str, paren_at: int, quoted: bool) -> None:
        pos, judgment, gloss, recognized = _classify_parenthetical(paren)
        if not recognized:
            self.diagnostics.append(
                ParseDiagnostic(
                    DiagnosticKind.MISSING_PARENTHETICAL,
                    paren_at,
                    f"parenthetical carries no judgment: {paren.strip()!r}",
                )
            )
        self._emit(surface, pos, judgment, gloss, quoted)

    def _emit(
        self,
        surface: str,
        pos: str | None,
        judgment: Judgment,
        gloss: str | None,
        quoted: bool,
    ) -> None:
        kind = UnitKind.WORD
        if quoted:
            if re.search(r"\s", surface):
                kind = UnitKind.PHRASE
        else:
            phrase = _hyphen_phrase(surface, self.expected_norms)
            if phrase is not None:
                surface = phrase
                kind = UnitKind.PHRASE
        if judgment is not Judgment.YES:
            gloss = None
        self.units.append(
            UnitAnnotation(surface=surface, kind=kind, pos=pos, judgment=judgment, gloss=gloss)
        )


def parse(text: str, expected_tokens: list[Token] | tuple[Token, ...] | None = None) -> ParsedOutput:
    """Parse an annotated response; total over arbitrary Unicode input."""
    expected_norms = (
        [_norm_part(t.surface) or t.surface.casefold() for t in expected_tokens]
        if expected_tokens is not None
        else None
    )
    scanner = _Scanner(text=text, expected_norms=expected_norms)
    scanner.run()
    diagnostics = list(scanner.diagnostics)
    if scanner.drift_events:
        diagnostics.append(
            ParseDiagnostic(
                DiagnosticKind.LIST_FORMAT_DRIFT,
                scanner.drift_events[0],
                f"list-style formatting recovered at {len(scanner.drift_events)} point(s)",
            )
        )
    coverage = 1.0
    if expected_tokens is not None and len(expected_tokens) > 0:
        # A phrase unit stands in for as many source tokens as it has words.
        def weight(u: UnitAnnotation) -> int:
            return len(u.surface.split()) if u.kind is UnitKind.PHRASE else 1

        annotated = sum(weight(u) for u in scanner.units if u.judgment is not Judgment.UNMARKED)
        coverage = min(1.0, annotated / len(expected_tokens))
        echoed = sum(weight(u) for u in scanner.units)
        if echoed < len(expected_tokens) and not scanner.truncated:
            diagnostics.append(
                ParseDiagnostic(
                    DiagnosticKind.DROPPED_WORDS,
                    len(text),
                    f"{echoed} echoed word(s) for {len(expected_tokens)} source tokens",
                )
            )
    diagnostics.sort(key=lambda d: d.location)
    return ParsedOutput(tuple(scanner.units), tuple(diagnostics), coverage)


_SURFACE_FORBIDDEN = re.compile(r'["“”()\n]')


def render(units: list[UnitAnnotation] | tuple[UnitAnnotation, ...]) -> str:
    """Emit the canonical grammar; parse(render(u)).units == u for valid units."""
    if not units:
        raise ValueError("cannot render an empty unit list")
    chunks = []
    for u in units:
        if u.judgment is Judgment.UNMARKED:
            raise ValueError("unmarked judgments are not expressible in the canonical grammar")
        if (
            not u.surface
            or u.surface != u.surface.strip()
            or len(u.surface) > 80
            or _SURFACE_FORBIDDEN.search(u.surface)
        ):
            raise ValueError(f"surface not renderable: {u.surface!r}")
        if u.kind is UnitKind.WORD and re.search(r"\s", u.surface):
            raise ValueError("word surfaces must not contain whitespace")
        if u.pos is not None and (not _POS_LIKE_RE.match(u.pos) or _MEANING_RE.search(u.pos)):
            raise ValueError(f"part-of-speech tag not renderable: {u.pos!r}")
        if u.gloss is not None:
            if (
                u.gloss != u.gloss.strip()
                or not u.gloss
                or "\n" in u.gloss
                or u.gloss.count("(") != u.gloss.count(")")
            ):
                raise ValueError(f"gloss not renderable: {u.gloss!r}")
        group = f'"{u.surface}"' if u.kind is UnitKind.PHRASE else u.surface
        prefix = f"{u.pos}, " if u.pos is not None else ""
        if u.judgment is Judgment.NO:
            body = f"{prefix}no more basic meaning"
        elif u.gloss is None:
            body = f"{prefix}more basic meaning"
        else:
            body = f"{prefix}more basic meaning: {u.gloss}"
        chunks.append(f"{group} ({body})")
    return " ".join(chunks)
