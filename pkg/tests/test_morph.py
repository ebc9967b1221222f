"""Tokenizer, tag table, and tag-triggered lexical rule application."""

import pytest

from gramcoach.errors import InputError
from gramcoach.grammar import load_grammar
from gramcoach.morph import analyze_token, lexical_edges, parse_tag, token_edges, tokenize


class TestTokenize:
    def test_splits_strips_lowercases(self):
        toks = tokenize("Mis abuelos son personas famosos.")
        assert [t.text for t in toks] == ["mis", "abuelos", "son", "personas", "famosos"]
        assert toks[0].raw == "Mis"

    def test_character_offsets(self):
        sentence = "  Mis  abuelos. "
        toks = tokenize(sentence)
        assert sentence[toks[0].start:toks[0].end] == "Mis"
        assert sentence[toks[1].start:toks[1].end] == "abuelos"

    def test_punctuation_only_chunks_dropped(self):
        assert [t.text for t in tokenize("¿ duerme ?")] == ["duerme"]

    def test_empty_sentence(self):
        assert tokenize("   ") == []


class TestParseTag:
    @pytest.mark.parametrize(
        "tag,pos,gender,number",
        [
            ("NCFP000", "noun", "fem", "pl"),
            ("NCMS000", "noun", "masc", "sg"),
            ("AQ0MP0", "adj", "masc", "pl"),
            ("AQ0CS0", "adj", None, "sg"),
            ("DA0FS0", "det", "fem", "sg"),
            ("DP0CP0", "det", None, "pl"),
            ("VSIP3P0", "verb", None, "pl"),
            ("VMIP3S0", "verb", None, "sg"),
        ],
    )
    def test_decodes(self, tag, pos, gender, number):
        info = parse_tag(tag)
        assert (info.pos, info.gender, info.number) == (pos, gender, number)

    def test_rejects_junk(self):
        with pytest.raises(InputError):
            parse_tag("XXYY")


class TestAnalyze:
    def test_personas(self, g_learner):
        assert [(a.lemma, a.tag) for a in analyze_token("personas", g_learner)] == [
            ("persona", "NCFP000")
        ]

    def test_famosos(self, g_learner):
        assert [(a.lemma, a.tag) for a in analyze_token("famosos", g_learner)] == [
            ("famoso", "AQ0MP0")
        ]

    def test_out_of_vocabulary_is_empty(self, g_learner):
        assert analyze_token("xyzzy", g_learner) == []

    def test_gender_ambiguous_noun_has_two_analyses(self, g_learner):
        tags = {a.tag for a in analyze_token("artista", g_learner)}
        assert tags == {"NCMS000", "NCFS000"}

    def test_source_field(self, g_learner):
        assert analyze_token("gato", g_learner)[0].source == "lexicon"

    def test_empty_token_rejected(self, g_learner):
        with pytest.raises(InputError):
            analyze_token("", g_learner)


class TestLexicalEdges:
    def test_famoso_strict_single_faithful(self, g_strict):
        analysis = analyze_token("famoso", g_strict)[0]
        signs = lexical_edges(analysis, g_strict)
        assert len(signs) == 1
        (sign,) = signs
        assert sign.fs.type_at(("PNG", "GEN")) == "masc"
        assert sign.fs.type_at(("LEARNER",)) == "-"

    def test_famoso_learner_adds_opposite_gender(self, g_learner):
        analysis = analyze_token("famoso", g_learner)[0]
        signs = lexical_edges(analysis, g_learner)
        assert len(signs) == 2
        by_gender = {s.fs.type_at(("PNG", "GEN")): s for s in signs}
        assert by_gender["masc"].fs.type_at(("LEARNER",)) == "-"
        assert by_gender["fem"].fs.type_at(("LEARNER",)) == "+"
        assert by_gender["fem"].chain == ("adj-ms-relax",)

    def test_persona_learner_two_structures(self, g_learner):
        analysis = analyze_token("persona", g_learner)[0]
        signs = lexical_edges(analysis, g_learner)
        genders = sorted(
            (s.fs.type_at(("PNG", "GEN")), s.fs.type_at(("LEARNER",))) for s in signs
        )
        assert genders == [("fem", "-"), ("masc", "+")]

    def test_strict_mode_never_learner_plus(self, g_strict):
        for surface in g_strict.lexicon:
            for sign in token_edges(surface, g_strict):
                assert sign.fs.type_at(("LEARNER",)) == "-"
                assert sign.learner_rules(g_strict) == frozenset()

    def test_learner_edges_extend_strict(self, g_strict, g_learner):
        # every learner-mode structure either matches a strict one or
        # records at least one learner rule in its chain
        for surface in g_strict.lexicon:
            strict_forms = {s.fs.canonical() for s in token_edges(surface, g_strict)}
            for sign in token_edges(surface, g_learner):
                if sign.fs.canonical() not in strict_forms:
                    assert sign.learner_rules(g_learner), (surface, sign.chain)

    def test_chain_bound_respected(self, g_learner):
        for surface in g_learner.lexicon:
            for sign in token_edges(surface, g_learner):
                assert len(sign.chain) <= g_learner.max_chain

    def test_signature_distinguishes_relaxations(self, g_learner):
        sigs = {s.signature for s in token_edges("famosos", g_learner)}
        assert sigs == {"adj-lex:adj-mp-infl", "adj-lex:adj-mp-relax"}


CHAINED = """
luk := *top*.
+ := luk.
- := luk.
f1 := *top*.
f1v := f1.
f2 := *top*.
f2v := f2.
w := *top* & [ LEARNER luk, RELS *list*, A f1, B f2, STEM string ].
word := w & STEM "word" & PRED "_w" & LEMMA "w" & PARADIGM "w" & TAG "NCMS000".
stepa := lex-rule & TAG "NCMS000" & [ A f1v ].
stepb := lex-rule & TAG "NCMS000" & [ B f2v, LEARNER - ].
root := w.
"""


class TestRuleChains:
    def test_declaration_order_chains(self):
        g = load_grammar(CHAINED, "strict")
        analysis = analyze_token("word", g)[0]
        signs = lexical_edges(analysis, g)
        # only LEARNER-resolved results are kept: [stepb] and [stepa, stepb];
        # bare entry and [stepa] alone never resolve the marker, and
        # [stepb, stepa] is not a declaration-order subsequence
        chains = sorted(s.chain for s in signs)
        assert chains == [("stepa", "stepb"), ("stepb",)]

    def test_max_chain_cuts_depth(self):
        g = load_grammar(CHAINED, "strict", max_chain=1)
        analysis = analyze_token("word", g)[0]
        chains = sorted(s.chain for s in lexical_edges(analysis, g))
        assert chains == [("stepb",)]
