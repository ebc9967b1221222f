"""MRS-lite extraction and dependency conversion."""

import pytest

from gramcoach import chart, morph, semantics
from gramcoach.chart import parse
from gramcoach.errors import InvariantError
from gramcoach.semantics import extract_from_fs, to_dependencies


def reading_for(sentence, grammar):
    result = parse(sentence.split(), grammar)
    assert result.readings, sentence
    return result.readings[0]


class TestExtract:
    def test_modified_noun_phrase_links_arg1(self, g_strict):
        # N' over "personas famosas": two predications, the adjective's
        # ARG1 bound to the noun's intrinsic variable
        noun = morph.token_edges("personas", g_strict)[0]
        adj = morph.token_edges("famosas", g_strict)[0]
        rule = g_strict.phrasal_rule("head-adj")
        left = chart.Edge((0, 1), noun.fs, None, (), noun, frozenset(), 0)
        right = chart.Edge((1, 2), adj.fs, None, (), adj, frozenset(), 0)
        edge = chart.apply_rule(rule, (left, right), g_strict)
        mrs = extract_from_fs(edge.fs, g_strict)
        assert [p.predicate for p in mrs.rels] == ["_persona_n", "_famoso_a"]
        persona, famoso = mrs.rels
        assert famoso.args["ARG1"] == persona.intrinsic_var

    def test_single_noun_edge_one_predication(self, g_strict):
        sign = morph.token_edges("personas", g_strict)[0]
        mrs = extract_from_fs(sign.fs, g_strict)
        assert len(mrs.rels) == 1
        assert mrs.rels[0].predicate == "_persona_n"
        assert mrs.rels[0].png == {"PERNUM": "3pl", "GEN": "fem"}

    def test_corrected_example_full_mrs(self, g_strict):
        reading = reading_for("mis abuelos son personas famosas", g_strict)
        mrs = reading.semantics
        assert [p.predicate for p in mrs.rels] == [
            "_mi_q", "_abuelo_n", "_ser_v", "_persona_n", "_famoso_a",
        ]
        mi, abuelo, ser, persona, famoso = mrs.rels
        assert mi.args["ARG1"] == abuelo.intrinsic_var
        assert ser.args["ARG1"] == abuelo.intrinsic_var
        assert ser.args["ARG2"] == persona.intrinsic_var
        assert famoso.args["ARG1"] == persona.intrinsic_var
        assert mrs.index == ser.intrinsic_var

    def test_event_variables_named_e(self, g_strict):
        reading = reading_for("el gato duerme", g_strict)
        duerme = reading.semantics.rels[-1]
        assert duerme.intrinsic_var.startswith("e")
        gato = reading.semantics.rels[1]
        assert gato.intrinsic_var.startswith("x")

    def test_malformed_rels_is_internal_error(self, g_strict):
        from gramcoach.grammar import parse_fs

        bad = parse_fs(
            "[ RELS *cons* & [ FIRST rel, REST *list* ] ]", g_strict.hierarchy
        )
        with pytest.raises(InvariantError, match="RELS"):
            extract_from_fs(bad, g_strict)


class TestDependencies:
    def test_empty_mrs_empty_graph(self):
        graph = to_dependencies(semantics.MrsLite((), None))
        assert graph.nodes == () and graph.arcs == ()

    def test_two_predication_phrase(self, g_strict):
        noun = morph.token_edges("personas", g_strict)[0]
        adj = morph.token_edges("famosas", g_strict)[0]
        rule = g_strict.phrasal_rule("head-adj")
        edge = chart.apply_rule(
            rule,
            (
                chart.Edge((0, 1), noun.fs, None, (), noun, frozenset(), 0),
                chart.Edge((1, 2), adj.fs, None, (), adj, frozenset(), 0),
            ),
            g_strict,
        )
        graph = to_dependencies(extract_from_fs(edge.fs, g_strict))
        assert graph.arcs == (("_famoso_a", "ARG1", "_persona_n"),)

    def test_corrected_example_arcs(self, g_strict):
        reading = reading_for("mis abuelos son personas famosas", g_strict)
        graph = to_dependencies(reading.semantics)
        assert set(graph.arcs) == {
            ("_ser_v", "ARG1", "_abuelo_n"),
            ("_ser_v", "ARG2", "_persona_n"),
            ("_famoso_a", "ARG1", "_persona_n"),
            ("_mi_q", "ARG1", "_abuelo_n"),
        }

    def test_render_format(self, g_strict):
        reading = reading_for("el gato duerme", g_strict)
        text = to_dependencies(reading.semantics).render()
        lines = text.splitlines()
        assert lines[0].startswith("# index: e")
        assert "_dormir_v -ARG1-> _gato_n" in lines

    def test_duplicate_predicates_disambiguated(self):
        mrs = semantics.MrsLite(
            (
                semantics.Predication("_gato_n", "x1"),
                semantics.Predication("_gato_n", "x2", {"ARG1": "x1"}),
            ),
            None,
        )
        graph = to_dependencies(mrs)
        assert graph.nodes == ("_gato_n", "_gato_n#2")
        assert graph.arcs == (("_gato_n#2", "ARG1", "_gato_n"),)


class TestFaithfulness:
    def test_rels_length_equals_leaf_count(self, g_strict, g_learner, desk_suite):
        for grammar in (g_strict, g_learner):
            for item in desk_suite:
                tokens = item.sentence.split()
                for reading in parse(tokens, grammar).readings:
                    assert len(reading.semantics.rels) == len(tokens)

    def test_reentrancy_faithfulness(self, g_strict, g_learner, desk_suite):
        # same variable iff same node, checked straight off the structure
        for grammar in (g_strict, g_learner):
            for item in desk_suite:
                for reading in parse(item.sentence.split(), grammar).readings:
                    fs = reading.root_edge.fs
                    rels_nodes = fs.list_elements(fs.node_at(("RELS",)))
                    node_by_var = {}
                    for pred, rel_node in zip(reading.semantics.rels, rels_nodes):
                        out = fs.arcs[rel_node]
                        slots = [("ARG0", pred.intrinsic_var)] + sorted(
                            pred.args.items()
                        )
                        for role, var in slots:
                            node = out[role]
                            assert node_by_var.setdefault(var, node) == node
                    # distinct variables name distinct nodes
                    nodes = list(node_by_var.values())
                    assert len(nodes) == len(set(nodes))

    def test_to_dependencies_reconstructs_bound_links(self, g_strict, desk_suite):
        for item in desk_suite[:20]:
            for reading in parse(item.sentence.split(), g_strict).readings:
                mrs = reading.semantics
                graph = to_dependencies(mrs)
                labels = dict(zip(graph.nodes, mrs.rels))
                expected = set()
                intrinsics = {p.intrinsic_var: lbl for lbl, p in zip(graph.nodes, mrs.rels)}
                for label, pred in labels.items():
                    for role, var in pred.args.items():
                        if var in intrinsics:
                            expected.add((label, role, intrinsics[var]))
                assert set(graph.arcs) == expected
