import random

import pytest

from mipw.corpus import tokenize
from mipw.output_parser import (
    DiagnosticKind,
    Judgment,
    ParseDiagnostic,
    UnitAnnotation,
    UnitKind,
    parse,
    render,
)
from mipw.prompting import default_template

WORDS = [
    "market", "argument", "attack", "life", "journey", "Vietnam", "brainchild",
    "in", "the", "of", "under", "grasp", "field", "vision", "time", "money",
]
POS_TAGS = ["noun", "verb", "adjective", "adverb", "preposition", "article", "proper noun"]
GLOSS_WORDS = [
    "a", "physical", "object", "moving", "through", "space", "container",
    "body", "fluid", "(literally)", "path, road", "older sense",
]


def random_unit(rng: random.Random) -> UnitAnnotation:
    phrase = rng.random() < 0.2
    if phrase:
        surface = " ".join(rng.sample(WORDS, rng.randint(2, 4)))
        kind = UnitKind.PHRASE
    else:
        surface = rng.choice(WORDS)
        if rng.random() < 0.3:
            surface += rng.choice([".", ",", "!", "?"])
        kind = UnitKind.WORD
    pos = rng.choice(POS_TAGS) if rng.random() < 0.8 else None
    if rng.random() < 0.5:
        judgment = Judgment.YES
        gloss = (
            " ".join(rng.choices(GLOSS_WORDS, k=rng.randint(1, 6)))
            if rng.random() < 0.85
            else None
        )
    else:
        judgment = Judgment.NO
        gloss = None
    return UnitAnnotation(surface=surface, kind=kind, pos=pos, judgment=judgment, gloss=gloss)


def random_unit_list(rng: random.Random, max_len: int = 12) -> list[UnitAnnotation]:
    return [random_unit(rng) for _ in range(rng.randint(1, max_len))]


class TestCanonicalParsing:
    def test_single_yes_unit(self):
        parsed = parse("Vietnam (noun, more basic meaning: the country in Southeast Asia)")
        assert parsed.units == (
            UnitAnnotation(
                surface="Vietnam",
                kind=UnitKind.WORD,
                pos="noun",
                judgment=Judgment.YES,
                gloss="the country in Southeast Asia",
            ),
        )
        assert parsed.diagnostics == ()
        assert parsed.coverage == 1.0

    def test_all_no_sentence(self):
        sentence = "The dog slept on the porch."
        tokens = tokenize(sentence)
        response = " ".join(f"{t.surface} (tag, no more basic meaning)" for t in tokens)
        parsed = parse(response, tokens)
        assert all(u.judgment is Judgment.NO for u in parsed.units)
        assert parsed.coverage == 1.0
        assert parsed.diagnostics == ()

    def test_pos_optional(self):
        parsed = parse("word (no more basic meaning)")
        unit = parsed.units[0]
        assert unit.pos is None and unit.judgment is Judgment.NO
        assert parsed.diagnostics == ()

    def test_yes_without_gloss(self):
        parsed = parse("word (verb, more basic meaning)")
        unit = parsed.units[0]
        assert unit.judgment is Judgment.YES and unit.gloss is None
        assert parsed.diagnostics == ()

    def test_nested_parens_in_gloss(self):
        parsed = parse("word (noun, more basic meaning: a thing (of sorts) nearby)")
        assert parsed.units[0].gloss == "a thing (of sorts) nearby"
        assert parsed.diagnostics == ()

    def test_quoted_phrase(self):
        parsed = parse('"get the most out of" (idiom, more basic meaning: extract contents)')
        unit = parsed.units[0]
        assert unit.kind is UnitKind.PHRASE
        assert unit.surface == "get the most out of"

    def test_quoted_single_word(self):
        parsed = parse('"Heidegger" (proper noun, more basic meaning: the philosopher)')
        unit = parsed.units[0]
        assert unit.kind is UnitKind.WORD and unit.surface == "Heidegger"

    def test_few_shot_examples_parse_cleanly(self):
        # the shipped prompt examples double as canonical-grammar fixtures
        for sentence, annotated in default_template().examples:
            tokens = tokenize(sentence)
            parsed = parse(annotated, tokens)
            assert parsed.diagnostics == ()
            assert parsed.coverage == 1.0
            assert len(parsed.units) == len(tokens)


class TestTruncation:
    SENTENCE = "The old man walked slowly across the quiet town square"

    def test_truncated_after_seven_of_ten(self):
        tokens = tokenize(self.SENTENCE)
        assert len(tokens) == 10
        units = [
            UnitAnnotation(t.surface, UnitKind.WORD, "tag", Judgment.NO)
            for t in tokens[:7]
        ]
        full = render(units)
        cut = full[:-1]  # drop the final close paren
        parsed = parse(cut, tokens)
        assert len(parsed.units) == 7
        assert parsed.coverage == pytest.approx(0.7)
        kinds = {d.kind for d in parsed.diagnostics}
        assert kinds == {DiagnosticKind.TRUNCATED}

    def test_truncated_mid_gloss_salvages_yes(self):
        parsed = parse("word (noun, more basic meaning: a physical obj")
        unit = parsed.units[0]
        assert unit.judgment is Judgment.YES
        assert unit.gloss == "a physical obj"
        assert parsed.diagnostics[0].kind is DiagnosticKind.TRUNCATED

    def test_truncated_before_judgment_is_unmarked(self):
        parsed = parse("word (nou")
        assert parsed.units[0].judgment is Judgment.UNMARKED
        assert parsed.diagnostics[0].kind is DiagnosticKind.TRUNCATED


class TestRecovery:
    def test_list_markers_stripped(self):
        text = "1. word (noun, no more basic meaning)\n2. other (verb, no more basic meaning)"
        parsed = parse(text)
        assert [u.surface for u in parsed.units] == ["word", "other"]
        assert {d.kind for d in parsed.diagnostics} == {DiagnosticKind.LIST_FORMAT_DRIFT}

    def test_bare_uppercase_yes_no(self):
        parsed = parse("grasp YES the NO")
        assert [(u.surface, u.judgment) for u in parsed.units] == [
            ("grasp", Judgment.YES),
            ("the", Judgment.NO),
        ]

    def test_lowercase_yes_not_taken_bare(self):
        # lowercase yes/no could be sentence words; only list-style colon lines accept them
        parsed = parse("there is no escape")
        assert all(u.judgment is Judgment.UNMARKED for u in parsed.units)
        assert [u.surface for u in parsed.units] == ["there", "is", "no", "escape"]

    def test_colon_list_line(self):
        parsed = parse("grasp: yes, more basic meaning: to seize with the hand\nthe: no")
        assert parsed.units[0].surface == "grasp"
        assert parsed.units[0].judgment is Judgment.YES
        assert parsed.units[0].gloss == "to seize with the hand"
        assert parsed.units[1].judgment is Judgment.NO

    def test_parenthesized_yes(self):
        parsed = parse("word (YES) other (no)")
        assert [u.judgment for u in parsed.units] == [Judgment.YES, Judgment.NO]

    def test_unannotated_words_unmarked_with_diagnostics(self):
        parsed = parse("hello world")
        assert [u.judgment for u in parsed.units] == [Judgment.UNMARKED, Judgment.UNMARKED]
        assert [d.kind for d in parsed.diagnostics] == [
            DiagnosticKind.MISSING_PARENTHETICAL,
            DiagnosticKind.MISSING_PARENTHETICAL,
        ]

    def test_unrecognized_parenthetical(self):
        parsed = parse("word (noun)")
        unit = parsed.units[0]
        assert unit.judgment is Judgment.UNMARKED
        assert unit.pos == "noun"
        assert parsed.diagnostics[0].kind is DiagnosticKind.MISSING_PARENTHETICAL

    def test_stray_close_paren(self):
        parsed = parse(") word (noun, no more basic meaning)")
        assert parsed.units[0].surface == "word"
        assert parsed.diagnostics[0].kind is DiagnosticKind.UNBALANCED_DELIMITERS

    def test_paren_on_next_line_upgrades_bare_word(self):
        parsed = parse("word\n(noun, no more basic meaning)")
        assert parsed.units == (
            UnitAnnotation("word", UnitKind.WORD, "noun", Judgment.NO),
        )

    def test_negated_variant(self):
        parsed = parse("word (noun, does not have a more basic meaning)")
        assert parsed.units[0].judgment is Judgment.NO

    def test_dropped_words_diagnostic(self):
        tokens = tokenize("one two three four five")
        parsed = parse("one (a, no more basic meaning) two (a, no more basic meaning)", tokens)
        kinds = [d.kind for d in parsed.diagnostics]
        assert DiagnosticKind.DROPPED_WORDS in kinds
        assert parsed.coverage == pytest.approx(0.4)


class TestPhraseDetection:
    def test_hyphen_run_matching_source_tokens(self):
        tokens = tokenize("Get the most out of life.")
        parsed = parse(
            "Get-the-most-out-of (idiom, more basic meaning: extract) life (noun, no more basic meaning)",
            tokens,
        )
        assert parsed.units[0].kind is UnitKind.PHRASE
        assert parsed.units[0].surface == "Get the most out of"

    def test_hyphen_compound_stays_word(self):
        tokens = tokenize("A short-term gain.")
        parsed = parse("short-term (adjective, no more basic meaning)", tokens)
        assert parsed.units[0].kind is UnitKind.WORD
        assert parsed.units[0].surface == "short-term"

    def test_hyphen_without_source_tokens_stays_word(self):
        parsed = parse("Get-the-most (idiom, more basic meaning: extract)")
        assert parsed.units[0].kind is UnitKind.WORD

    def test_quoted_multiword_is_phrase(self):
        parsed = parse('"weak point" (noun phrase, no more basic meaning)')
        assert parsed.units[0].kind is UnitKind.PHRASE

    def test_phrase_counts_toward_coverage_by_word(self):
        tokens = tokenize("Get the most out of life .")
        parsed = parse(
            '"Get the most out of" (idiom, more basic meaning: extract) '
            "life (noun, no more basic meaning) . (punctuation, no more basic meaning)",
            tokens,
        )
        assert parsed.coverage == 1.0
        assert parsed.diagnostics == ()


class TestRoundTrip:
    def test_grammar_definition_no(self):
        unit = UnitAnnotation("word", UnitKind.WORD, "pos", Judgment.NO)
        assert render([unit]) == "word (pos, no more basic meaning)"

    def test_grammar_definition_yes(self):
        unit = UnitAnnotation("word", UnitKind.WORD, "pos", Judgment.YES, "gloss")
        assert render([unit]) == "word (pos, more basic meaning: gloss)"

    def test_random_round_trips(self):
        rng = random.Random(20240613)
        for _ in range(300):
            units = random_unit_list(rng)
            parsed = parse(render(units), None)
            assert list(parsed.units) == units
            assert parsed.diagnostics == ()

    def test_render_rejects_unmarked(self):
        with pytest.raises(ValueError):
            render([UnitAnnotation("word")])

    def test_render_rejects_bad_pos(self):
        with pytest.raises(ValueError):
            render([UnitAnnotation("word", UnitKind.WORD, "a(b", Judgment.NO)])

    def test_render_rejects_unbalanced_gloss(self):
        with pytest.raises(ValueError):
            render([UnitAnnotation("word", UnitKind.WORD, "pos", Judgment.YES, "a (b")])

    def test_render_rejects_empty(self):
        with pytest.raises(ValueError):
            render([])


class TestTotality:
    def test_fuzz_sample(self):
        rng = random.Random(99)
        alphabet = 'abc ()"“”\n\t,:.-YESNOé世\U0001f600*1'
        for _ in range(2000):
            text = "".join(rng.choices(alphabet, k=rng.randint(0, 80)))
            parsed = parse(text)
            assert parsed.coverage == 1.0
            for diag in parsed.diagnostics:
                assert 0 <= diag.location <= len(text)

    def test_monotone_degradation(self):
        rng = random.Random(4242)
        for _ in range(40):
            units = random_unit_list(rng, max_len=6)
            full = render(units)
            baseline = len(parse(full).units)
            for cut in range(len(full)):
                assert len(parse(full[:cut]).units) <= baseline


class TestInvariants:
    def test_gloss_requires_yes(self):
        with pytest.raises(ValueError):
            UnitAnnotation("word", UnitKind.WORD, None, Judgment.NO, "gloss")

    def test_phrase_requires_whitespace(self):
        with pytest.raises(ValueError):
            UnitAnnotation("word", UnitKind.PHRASE, None, Judgment.NO)

    def test_json_dump_shape(self):
        import json

        parsed = parse("word (noun, no more basic meaning)")
        data = json.loads(parsed.to_json())
        assert data["units"][0]["surface"] == "word"
        assert data["coverage"] == 1.0
