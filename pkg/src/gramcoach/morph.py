"""Morphological analysis: table-driven stand-in for an external analyzer.

Tokens map to (lemma, tag) analyses straight from the lexicon, then
tag-triggered lexical rules refine the entry structure.  In learner mode
the gender relaxation rules add a second structure per noun/adjective
with the opposite gender and LEARNER +.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import grammar as gr
from . import tfs
from .errors import InputError

_STRIP = "\"'.,;:!?¡¿()«»…"

_TAG_SHAPE = re.compile(
    r"^(?:NC(?P<ng>[MFC])(?P<nn>[SP])000"
    r"|AQ0(?P<ag>[MFC])(?P<an>[SP])0"
    r"|D[API]0(?P<dg>[MFC])(?P<dn>[SP])0"
    r"|V[SM]IP3(?P<vn>[SP])0)$"
)

_GENDER = {"M": "masc", "F": "fem", "C": None}
_NUMBER = {"S": "sg", "P": "pl"}


@dataclass(frozen=True)
class TagInfo:
    pos: str  # noun | adj | det | verb
    gender: str | None
    number: str


def parse_tag(tag):
    m = _TAG_SHAPE.match(tag)
    if m is None:
        raise InputError(f"tag {tag} not in the toy tagset")
    if m.group("ng"):
        return TagInfo("noun", _GENDER[m.group("ng")], _NUMBER[m.group("nn")])
    if m.group("ag"):
        return TagInfo("adj", _GENDER[m.group("ag")], _NUMBER[m.group("an")])
    if m.group("dg"):
        return TagInfo("det", _GENDER[m.group("dg")], _NUMBER[m.group("dn")])
    return TagInfo("verb", None, _NUMBER[m.group("vn")])


@dataclass(frozen=True)
class MorphAnalysis:
    token: str
    lemma: str
    tag: str
    source: str = "lexicon"


@dataclass(frozen=True)
class Token:
    text: str  # lowercased lookup form
    raw: str
    start: int  # character offsets into the raw sentence
    end: int


def tokenize(sentence):
    """Whitespace split, strip edge punctuation, lowercase.  Unknown
    tokens keep their raw form alongside for display."""
    tokens = []
    offset = 0
    for chunk in sentence.split(" "):
        if chunk:
            core = chunk.strip(_STRIP)
            if core:
                start = offset + chunk.index(core)
                tokens.append(Token(core.lower(), core, start, start + len(core)))
        offset += len(chunk) + 1
    return tokens


def analyze_token(token, grammar):
    """All lexicon-backed analyses of a (lowercased) token; the empty
    list signals out-of-vocabulary."""
    if not token:
        raise InputError("empty token")
    seen = set()
    analyses = []
    for entry in grammar.lexicon.get(token, ()):
        key = (entry.lemma, entry.tag)
        if key not in seen:
            seen.add(key)
            analyses.append(MorphAnalysis(token, entry.lemma, entry.tag))
    return analyses


@dataclass(frozen=True)
class LexSign:
    """One lexical feature structure: entry plus applied rule chain."""

    entry: gr.LexicalEntry
    chain: tuple  # lexical rule identifiers, in application order
    fs: tfs.FeatureStructure

    @property
    def signature(self):
        chain = "+".join(self.chain) if self.chain else "-"
        return f"{self.entry.lex_type}:{chain}"

    def learner_rules(self, grammar):
        return frozenset(
            r for r in self.chain if grammar.lexical_rule(r).learner
        )


def _complete(fs):
    # a lexical sign is usable once its learner marker is resolved
    try:
        t = fs.type_at((gr.LEARNER_FEATURE,))
    except InputError:
        return False
    return t in (gr.LEARNER_PLUS, gr.LEARNER_MINUS)


def lexical_edges(analysis, grammar):
    """Lexical structures for one analysis: every matching entry crossed
    with every applicable rule chain (declaration-order subsequences,
    bounded by the grammar's max_chain), keeping complete results."""
    entries = [
        e
        for e in grammar.lexicon.get(analysis.token, ())
        if e.lemma == analysis.lemma and e.tag == analysis.tag
    ]
    triggered = [
        (i, rule)
        for i, rule in enumerate(grammar.lexical_rules)
        if rule.trigger_tag == analysis.tag
    ]
    signs = []
    seen = set()
    for entry in entries:
        base = gr.entry_fs(grammar, entry)
        stack = [(base, (), 0)]
        while stack:
            fs, chain, nxt = stack.pop()
            if _complete(fs):
                key = (entry.identifier, fs.canonical())
                if key not in seen:
                    seen.add(key)
                    signs.append(LexSign(entry, chain, fs))
            if len(chain) >= grammar.max_chain:
                continue
            # rule chains are declaration-order subsequences; pushing in
            # reverse makes the stack pop them in declaration order
            for idx in range(len(triggered) - 1, nxt - 1, -1):
                rule = triggered[idx][1]
                try:
                    refined = tfs.unify(fs, rule.schema, grammar.hierarchy)
                except tfs.UnificationFailure:
                    continue
                stack.append((refined, chain + (rule.identifier,), idx + 1))
    signs.sort(key=lambda s: (s.entry.identifier, s.chain))
    return signs


def token_edges(token, grammar):
    """All lexical signs for a token across its analyses."""
    signs = []
    for analysis in analyze_token(token, grammar):
        signs.extend(lexical_edges(analysis, grammar))
    return signs
