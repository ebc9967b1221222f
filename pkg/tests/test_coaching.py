"""Reading selection, learner detection, feedback, correction synthesis."""

import pytest

from gramcoach import chart, coaching
from gramcoach.chart import parse
from gramcoach.coaching import (
    GRAMMATICAL,
    LEARNER,
    NO_PARSE,
    coach_sentence,
    detect_learner,
    select_reading,
    suggest_correction,
)
from gramcoach.errors import InputError


class TestSelectReading:
    def test_prefers_fewer_learner_uses(self, g_learner):
        result = parse("mis abuelos son personas famosos".split(), g_learner)
        sizes = sorted(len(r.learner_uses) for r in result.readings)
        assert sizes[0] == 1 and sizes[-1] == 2
        assert len(select_reading(result).learner_uses) == 1

    def test_absent_for_zero_readings(self, g_strict):
        result = parse("mis abuelos son personas famosos".split(), g_strict)
        assert select_reading(result) is None

    def test_deterministic_tie_break(self, g_learner):
        result = parse("mis abuelos son personas famosos".split(), g_learner)
        best = select_reading(result)
        # the faithful-noun reading wins the canonical-string tie-break,
        # so the relaxation lands on the adjective
        assert best.learner_uses == {"adj-mp-relax"}


class TestDetectLearner:
    def test_example_one(self, g_learner):
        result = parse("mis abuelos son personas famosos".split(), g_learner)
        uses = detect_learner(select_reading(result), g_learner)
        assert uses == [("adj-mp-relax", (4, 5))]

    def test_strict_reading_empty(self, g_strict):
        result = parse("mis abuelos son personas famosas".split(), g_strict)
        assert detect_learner(select_reading(result), g_strict) == []

    def test_doubled_error_two_uses(self, g_learner):
        result = parse("las abuelos son personas famosos".split(), g_learner)
        uses = detect_learner(select_reading(result), g_learner)
        assert uses == [("n-mp-relax", (1, 2)), ("adj-mp-relax", (4, 5))]


class TestSuggestCorrection:
    def test_example_one_corrected(self, g_learner, g_strict):
        result = parse("mis abuelos son personas famosos".split(), g_learner)
        best = select_reading(result)
        corrected, _ = suggest_correction(
            best, g_strict, g_learner, "mis abuelos son personas famosos".split()
        )
        assert corrected == "mis abuelos son personas famosas"

    def test_grammatical_reading_is_precondition_violation(self, g_strict, g_learner):
        result = parse("mis abuelos son personas famosas".split(), g_strict)
        with pytest.raises(InputError):
            suggest_correction(
                select_reading(result), g_strict, g_learner,
                "mis abuelos son personas famosas".split(),
            )

    def test_missing_paradigm_member_absent_with_diagnostic(self, g_learner, g_strict):
        tokens = "los personas duermen".split()
        result = parse(tokens, g_learner)
        best = select_reading(result)
        corrected, diagnostics = suggest_correction(best, g_strict, g_learner, tokens)
        assert corrected is None
        assert any("persona" in d for d in diagnostics)


class TestCoachSentence:
    def test_grammatical(self, g_learner, g_strict):
        verdict = coach_sentence("mis abuelos son personas famosas", g_learner, g_strict)
        assert verdict.kind == GRAMMATICAL
        assert verdict.feedback == []
        assert verdict.reading is not None

    def test_learner_with_feedback_and_correction(self, g_learner, g_strict):
        verdict = coach_sentence("mis abuelos son personas famosos", g_learner, g_strict)
        assert verdict.kind == LEARNER
        assert len(verdict.feedback) == 1
        item = verdict.feedback[0]
        assert item.category == "gender-agreement"
        assert item.token_span == (4, 5)
        assert item.surface == "famosos"
        assert item.expected == "famosas"
        assert "personas" in item.message
        assert verdict.corrected == "mis abuelos son personas famosas"

    def test_word_salad_no_parse(self, g_learner, g_strict):
        verdict = coach_sentence("abuelos personas son famosas mis", g_learner, g_strict)
        assert verdict.kind == NO_PARSE

    def test_empty_sentence_input_error(self, g_learner, g_strict):
        with pytest.raises(InputError):
            coach_sentence("  ", g_learner, g_strict)

    def test_tokenization_applied(self, g_learner, g_strict):
        verdict = coach_sentence("  Mis abuelos son personas FAMOSOS. ", g_learner, g_strict)
        assert verdict.kind == LEARNER
        assert verdict.feedback[0].surface == "famosos"

    def test_predicative_adjective_error(self, g_learner, g_strict):
        verdict = coach_sentence("la gata es famoso", g_learner, g_strict)
        assert verdict.kind == LEARNER
        item = verdict.feedback[0]
        assert item.surface == "famoso"
        assert item.expected == "famosa"
        assert "gata" in item.message  # the agreement partner, not the copula
        assert verdict.corrected == "la gata es famosa"

    def test_number_errors_are_not_relaxed(self, g_learner, g_strict):
        # number mismatch never parses: relaxation covers gender only
        verdict = coach_sentence("mi gato duermen", g_learner, g_strict)
        assert verdict.kind == NO_PARSE


MAL_RULE_GRAMMAR = """
luk := *top*.
+ := luk.
- := luk.
agr := *top*.
one := agr.
two := agr.
w := *top* & [ LEARNER luk, RELS *list*, AGR agr, STEM string ].
s := *top* & [ LEARNER luk, RELS *list* ].
worda := w & STEM "worda" & PRED "_a" & LEMMA "worda" & PARADIGM "wa" & TAG "NCMS000".
wordb := w & STEM "wordb" & PRED "_b" & LEMMA "wordb" & PARADIGM "wb" & TAG "NCFS000".
mark-one := lex-rule & TAG "NCMS000" & [ AGR one, LEARNER - ].
mark-two := lex-rule & TAG "NCFS000" & [ AGR two, LEARNER - ].
pair := phrase-rule & HEAD 1 &
  [ MOTHER s, DTR1 w & [ AGR #a ], DTR2 w & [ AGR #a ] ].
pair-sloppy := learner-phrase-rule & HEAD 1 & FEEDBACK "mismatch" &
  [ MOTHER s & [ LEARNER + ], DTR1 w, DTR2 w ].
template mismatch := advisory & CATEGORY "pair-agreement" &
  MESSAGE "the parts of '{surface}' do not agree.".
root := s.
"""


class TestPhrasalMalRule:
    def test_constituent_span_feedback_no_correction(self):
        from gramcoach.grammar import load_grammar

        learner = load_grammar(MAL_RULE_GRAMMAR, "learner")
        strict = load_grammar(MAL_RULE_GRAMMAR, "strict")
        agreeing = coaching.coach_tokens(["worda", "worda"], learner, strict)
        assert agreeing.kind == GRAMMATICAL
        verdict = coaching.coach_tokens(["worda", "wordb"], learner, strict)
        assert verdict.kind == LEARNER
        (item,) = verdict.feedback
        assert item.rule == "pair-sloppy"
        assert item.token_span == (0, 2)  # the constituent, not a leaf
        assert item.surface == "worda wordb"
        assert item.category == "pair-agreement"
        assert item.severity == "advisory"
        assert item.expected is None
        assert verdict.corrected is None


class TestInvariants:
    def test_learner_suite_roundtrip(self, g_learner, g_strict, learner_suite):
        # every corrected sentence must come back grammatical
        for item in learner_suite:
            verdict = coach_sentence(item.sentence, g_learner, g_strict)
            assert verdict.kind == LEARNER, item.identifier
            assert verdict.feedback, item.identifier
            assert verdict.corrected, item.identifier
            again = coach_sentence(verdict.corrected, g_learner, g_strict)
            assert again.kind == GRAMMATICAL, item.identifier

    def test_grammatical_suite_monotone(self, g_learner, g_strict, grammatical_suite):
        for item in grammatical_suite:
            verdict = coach_sentence(item.sentence, g_learner, g_strict)
            assert verdict.kind == GRAMMATICAL, item.identifier

    def test_feedback_span_accuracy(self, g_learner, g_strict, learner_suite):
        # each span points at a leaf whose chain used the cited rule
        for item in learner_suite:
            verdict = coach_sentence(item.sentence, g_learner, g_strict)
            leaves = {
                i: chain
                for i, _entry, chain in chart.deriv_leaves(verdict.reading.derivation)
            }
            for feedback in verdict.feedback:
                i, j = feedback.token_span
                assert j == i + 1
                assert feedback.rule in leaves[i]
                assert verdict.tokens[i] == feedback.surface

    def test_verdict_invariants(self, g_learner, g_strict, desk_suite):
        for item in desk_suite:
            verdict = coach_sentence(item.sentence, g_learner, g_strict)
            if verdict.kind == GRAMMATICAL:
                assert verdict.feedback == []
            elif verdict.kind == LEARNER:
                assert verdict.reading is not None
                assert verdict.reading.learner_uses
                assert verdict.feedback
            else:
                assert verdict.reading is None
