"""The coaching layer: pick the best reading, locate learner-rule usage,
render feedback and synthesize a corrected sentence.

Coaching is two-pass: a sentence covered by the strict grammar is
grammatical, full stop; only then is the learner grammar consulted, so
"grammatical" never depends on ranking heuristics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import chart, morph
from .errors import InputError, InvariantError

GRAMMATICAL = "grammatical"
LEARNER = "learner"
NO_PARSE = "no_parse"


@dataclass(frozen=True)
class FeedbackItem:
    category: str
    token_span: tuple
    surface: str
    expected: str | None
    message: str
    rule: str
    severity: str = "error"


@dataclass
class Verdict:
    kind: str
    reading: object = None
    feedback: list = field(default_factory=list)
    corrected: str | None = None
    diagnostics: list = field(default_factory=list)
    tokens: tuple = ()
    token_objs: tuple = ()
    strict_result: object = None
    learner_result: object = None


def learner_applications(reading):
    """Number of learner-rule applications in the derivation.  One rule
    firing at two leaves counts twice, unlike len(learner_uses)."""
    count = 0

    def walk(deriv):
        nonlocal count
        if deriv[0] == "lex":
            count += sum(1 for r in deriv[4] if r in reading.learner_uses)
            return
        if deriv[0] in reading.learner_uses:
            count += 1
        for child in deriv[3]:
            walk(child)

    walk(reading.derivation)
    return count


def select_reading(result):
    """Fewest learner-rule applications, then smallest derivation, then
    canonical derivation string; None when there are no readings."""
    if not result.readings:
        return None
    return min(
        result.readings,
        key=lambda r: (
            learner_applications(r),
            chart.deriv_node_count(r.derivation),
            r.deriv_string,
        ),
    )


def detect_learner(reading, grammar):
    """Learner rules used in the derivation, each with the span of the
    leaf (lexical relaxation) or constituent (phrasal mal-rule) it
    applied to."""
    uses = []

    def walk(deriv):
        if deriv[0] == "lex":
            _, i, j, _entry, chain = deriv
            for rule_id in chain:
                if grammar.lexical_rule(rule_id).learner:
                    uses.append((rule_id, (i, j)))
            return
        rule_id, i, j, children = deriv
        if grammar.phrasal_rule(rule_id).learner:
            uses.append((rule_id, (i, j)))
        for child in children:
            walk(child)

    walk(reading.derivation)
    root_fs = reading.root_edge.fs
    marker = root_fs.type_at(("LEARNER",)) if root_fs.has_path(("LEARNER",)) else None
    if bool(uses) != (marker == "+"):
        raise InvariantError(
            f"LEARNER marker {marker!r} inconsistent with derivation uses {uses}"
        )
    if frozenset(r for r, _ in uses) != reading.learner_uses:
        raise InvariantError("derivation learner rules disagree with edge record")
    return uses


def _leaf_records(reading):
    """Leaf (entry_id, chain) by token position."""
    return {i: (entry, chain) for i, entry, chain in chart.deriv_leaves(reading.derivation)}


def _png_node(fs, rels_elements, i):
    out = fs.arcs.get(rels_elements[i], {})
    return out.get("PNG")


def _agreement_partner(reading, grammar, leaf_index, tokens):
    """The leaf whose PNG node the offending leaf's agreement was forced
    to share, read off the root structure's RELS (predications carry the
    agreement node).  Nouns are preferred as the named partner."""
    fs = reading.root_edge.fs
    try:
        rels = fs.list_elements(fs.node_at(("RELS",)))
    except InputError:
        return None
    if leaf_index >= len(rels):
        return None
    target = _png_node(fs, rels, leaf_index)
    if target is None:
        return None
    partners = [
        j
        for j in range(len(rels))
        if j != leaf_index and _png_node(fs, rels, j) == target
    ]
    if not partners:
        return None
    leaves = _leaf_records(reading)
    hierarchy = grammar.hierarchy

    def is_noun(j):
        entry_id = leaves.get(j, (None,))[0]
        if entry_id is None:
            return False
        lex_type = grammar.entries[entry_id].lex_type
        return hierarchy.subtype(lex_type, "nbar") if "nbar" in hierarchy else False

    nouns = [j for j in partners if is_noun(j)]
    pick = nouns[0] if nouns else partners[0]
    return tokens[pick]


def _expected_form(grammar, entry, unified_gender):
    """Paradigm member with the same number and the context's gender."""
    info = morph.parse_tag(entry.tag)
    if unified_gender not in ("fem", "masc"):
        return None
    for sibling in grammar.paradigm(entry.paradigm_key):
        sib = morph.parse_tag(sibling.tag)
        if sib.pos == info.pos and sib.number == info.number and sib.gender == unified_gender:
            return sibling.surface
    return None


def feedback_for(reading, grammar, tokens):
    """One FeedbackItem per learner-rule use, rendered from the grammar's
    templates.  Lexical relaxations name a paradigm replacement; phrasal
    mal-rules report the constituent without one."""
    items = []
    diagnostics = []
    fs = reading.root_edge.fs
    try:
        rels = fs.list_elements(fs.node_at(("RELS",)))
    except InputError:
        rels = []
    leaves = _leaf_records(reading)
    for rule_id, span in detect_learner(reading, grammar):
        try:
            rule = grammar.lexical_rule(rule_id)
            lexical = True
        except InputError:
            rule = grammar.phrasal_rule(rule_id)
            lexical = False
        template = grammar.feedback_templates.get(rule.feedback_key or "")
        i, j = span
        surface = " ".join(tokens[i:j])
        expected = None
        head = surface
        if lexical:
            entry_id, _chain = leaves[i]
            entry = grammar.entries[entry_id]
            gender = None
            if i < len(rels):
                png = _png_node(fs, rels, i)
                if png is not None:
                    gout = fs.arcs.get(png, {})
                    if "GEN" in gout:
                        gender = fs.types[gout["GEN"]]
            expected = _expected_form(grammar, entry, gender)
            if expected is None:
                diagnostics.append(
                    f"paradigm {entry.paradigm_key} has no "
                    f"{gender or 'target-gender'} form matching {surface!r}"
                )
            head = _agreement_partner(reading, grammar, i, tokens) or surface
        if template is None:
            category = "learner-rule"
            message = f"{surface!r} matched learner rule {rule_id}"
            severity = "error"
        else:
            category = template.category
            message = template.message.format(
                surface=surface, expected=expected or "?", head=head
            )
            severity = template.severity
        items.append(
            FeedbackItem(category, span, surface, expected, message, rule_id, severity)
        )
    return items, diagnostics


def suggest_correction(reading, grammar_strict, grammar_full, tokens, opts=None):
    """Swap each offending surface for its paradigm mate and keep the
    result only if the strict grammar covers it."""
    if not reading.learner_uses:
        raise InputError("reading has no learner-rule uses to correct")
    items, diagnostics = feedback_for(reading, grammar_full, tokens)
    corrected = list(tokens)
    for item in items:
        if item.expected is None:
            return None, diagnostics
        corrected[item.token_span[0]] = item.expected
    result = chart.parse(corrected, grammar_strict, opts)
    if not result.readings:
        diagnostics.append("corrected form is not covered by the strict grammar")
        return None, diagnostics
    return " ".join(corrected), diagnostics


def coach_tokens(tokens, grammar_learner, grammar_strict, opts=None):
    strict_result = chart.parse(tokens, grammar_strict, opts)
    if strict_result.readings:
        return Verdict(
            kind=GRAMMATICAL,
            reading=select_reading(strict_result),
            tokens=tuple(tokens),
            strict_result=strict_result,
        )
    learner_result = chart.parse(tokens, grammar_learner, opts)
    if not learner_result.readings:
        return Verdict(
            kind=NO_PARSE,
            tokens=tuple(tokens),
            strict_result=strict_result,
            learner_result=learner_result,
        )
    reading = select_reading(learner_result)
    items, diagnostics = feedback_for(reading, grammar_learner, tokens)
    corrected, more = suggest_correction(
        reading, grammar_strict, grammar_learner, tokens, opts
    )
    return Verdict(
        kind=LEARNER,
        reading=reading,
        feedback=items,
        corrected=corrected,
        diagnostics=diagnostics + [d for d in more if d not in diagnostics],
        tokens=tuple(tokens),
        strict_result=strict_result,
        learner_result=learner_result,
    )


def coach_sentence(sentence, grammar_learner, grammar_strict, opts=None):
    """Parse strictly first; fall back to the learner grammar; report."""
    token_objs = morph.tokenize(sentence)
    if not token_objs:
        raise InputError("sentence contains no tokens")
    verdict = coach_tokens(
        [t.text for t in token_objs], grammar_learner, grammar_strict, opts
    )
    verdict.token_objs = token_objs
    return verdict
