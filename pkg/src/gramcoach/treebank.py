"""Mini-treebank: sentences paired with gold derivations, stored as
`id TAB sentence TAB derivation` lines.  Derivations use the parser's
canonical string form, so a treebank can be rebuilt by parsing and
verified against the stored gold."""

from __future__ import annotations

from dataclasses import dataclass

from . import chart, coaching, morph
from .errors import InputError


@dataclass(frozen=True)
class TreebankItem:
    identifier: str
    sentence: str
    tokens: tuple
    derivation: tuple

    def leaves(self):
        return [
            (entry_id, chain)
            for _, entry_id, chain in chart.deriv_leaves(self.derivation)
        ]

    def rules(self):
        found = []

        def walk(deriv):
            if deriv[0] == "lex":
                return
            found.append(deriv[0])
            for child in deriv[3]:
                walk(child)

        walk(self.derivation)
        return found

    def deriv_string(self):
        return chart.deriv_string(self.derivation)


def load_treebank(text):
    items = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise InputError(
                f"treebank line {lineno}: expected id\\tsentence\\tderivation"
            )
        identifier, sentence, deriv_text = (p.strip() for p in parts)
        if identifier in seen:
            raise InputError(f"treebank line {lineno}: duplicate id {identifier}")
        seen.add(identifier)
        tokens = tuple(t.text for t in morph.tokenize(sentence))
        derivation = chart.parse_deriv_string(deriv_text)
        items.append(TreebankItem(identifier, sentence, tokens, derivation))
    if not items:
        raise InputError("treebank is empty")
    return items


def render_treebank(items):
    lines = [
        f"{item.identifier}\t{item.sentence}\t{item.deriv_string()}"
        for item in items
    ]
    return "\n".join(lines) + "\n"


def build_treebank(sentences, grammar, opts=None):
    """Parse each (id, sentence) pair and keep the selected reading as
    gold; sentences the grammar does not cover are an error."""
    items = []
    for identifier, sentence in sentences:
        tokens = [t.text for t in morph.tokenize(sentence)]
        result = chart.parse(tokens, grammar, opts)
        reading = coaching.select_reading(result)
        if reading is None:
            raise InputError(f"treebank sentence {identifier!r} is not covered")
        items.append(
            TreebankItem(identifier, sentence, tuple(tokens), reading.derivation)
        )
    return items
