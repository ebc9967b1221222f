"""Count-based supertagger: ranks each token's lexical signatures
(lexical type plus rule chain) so the parser can drop unlikely lexical
edges before building the chart.

Laplace-smoothed unigram counts are combined with a greedy left-to-right
context bigram; no lattice search.  The ranked-signatures interface is
the plug point for a stronger model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import morph
from .errors import InputError

MODEL_HEADER = "gramcoach-supertag-model/1"
BOS = "<s>"
DEFAULT_ALPHA = 0.1


@dataclass
class SupertagModel:
    smoothing_alpha: float = DEFAULT_ALPHA
    unigram: dict = field(default_factory=dict)  # (surface, sig) -> count
    bigram: dict = field(default_factory=dict)  # (prev sig, sig) -> count
    vocabulary: set = field(default_factory=set)
    signatures: set = field(default_factory=set)

    def token_total(self, surface):
        return sum(c for (s, _), c in self.unigram.items() if s == surface)

    def prev_total(self, prev):
        return sum(c for (p, _), c in self.bigram.items() if p == prev)


def leaf_signature(grammar, entry_id, chain):
    entry = grammar.entries.get(entry_id)
    if entry is None:
        raise InputError(f"treebank references unknown entry {entry_id}")
    chain_text = "+".join(chain) if chain else "-"
    return f"{entry.lex_type}:{chain_text}"


def train(treebank, grammar):
    """Count gold leaf signatures and their left-to-right transitions.
    Every derivation must validate against the grammar."""
    model = SupertagModel()
    for item in treebank:
        leaves = item.leaves()
        if len(leaves) != len(item.tokens):
            raise InputError(
                f"treebank item {item.identifier}: derivation leaves do not "
                f"tile the tokens"
            )
        for rule_id in item.rules():
            grammar.phrasal_rule(rule_id)  # raises on unknown
        prev = BOS
        for token, (entry_id, chain) in zip(item.tokens, leaves):
            for rule_id in chain:
                grammar.lexical_rule(rule_id)  # raises on unknown
            sig = leaf_signature(grammar, entry_id, chain)
            model.unigram[(token, sig)] = model.unigram.get((token, sig), 0) + 1
            model.bigram[(prev, sig)] = model.bigram.get((prev, sig), 0) + 1
            model.vocabulary.add(token)
            model.signatures.add(sig)
            prev = sig
    return model


def licensed_signatures(token, grammar):
    """Signatures the token's lexical edges could carry, with the edges."""
    by_sig = {}
    for sign in morph.token_edges(token, grammar):
        by_sig.setdefault(sign.signature, []).append(sign)
    return by_sig


def predict(tokens, model, grammar):
    """Per-token ranked (signature, probability) lists.  Out-of-vocabulary
    tokens get the uniform ranking over their licensed signatures."""
    tokens = [t if isinstance(t, str) else t.text for t in tokens]
    alpha = model.smoothing_alpha
    rankings = []
    prev = BOS
    for token in tokens:
        candidates = sorted(licensed_signatures(token, grammar))
        if not candidates:
            rankings.append([])
            prev = BOS
            continue
        n = len(candidates)
        if token not in model.vocabulary:
            ranked = [(sig, 1.0 / n) for sig in candidates]
        else:
            token_total = model.token_total(token)
            prev_total = model.prev_total(prev)
            scores = {}
            for sig in candidates:
                p_uni = (model.unigram.get((token, sig), 0) + alpha) / (
                    token_total + alpha * n
                )
                p_ctx = (model.bigram.get((prev, sig), 0) + alpha) / (
                    prev_total + alpha * n
                )
                scores[sig] = p_uni * p_ctx
            total = sum(scores.values())
            ranked = sorted(
                ((sig, scores[sig] / total) for sig in candidates),
                key=lambda pair: (-pair[1], pair[0]),
            )
        rankings.append(ranked)
        prev = ranked[0][0]
    return rankings


def oracle_rankings(tokens, gold_signatures, grammar):
    """Rankings with each token's gold signature forced to rank one;
    the coverage upper bound for filter experiments."""
    tokens = [t if isinstance(t, str) else t.text for t in tokens]
    rankings = []
    for token, gold in zip(tokens, gold_signatures):
        candidates = sorted(licensed_signatures(token, grammar))
        ranked = [(sig, 1.0) if sig == gold else (sig, 0.0) for sig in candidates]
        ranked.sort(key=lambda pair: (-pair[1], pair[0]))
        rankings.append(ranked)
    return rankings


def filter_edges(per_token_signs, rankings, k):
    """Keep each token's lexical signs whose signature ranks in its
    top-k; a cut that would empty a token's set keeps the edges of the
    best-ranked licensed signature instead."""
    if k < 1:
        raise InputError("supertag cut k must be at least 1")
    filtered = []
    pruned = 0
    for i, signs in enumerate(per_token_signs):
        ranking = rankings[i] if i < len(rankings) else []
        if not ranking or not signs:
            filtered.append(signs)
            continue
        top = {sig for sig, _ in ranking[:k]}
        keep = [s for s in signs if s.signature in top]
        if not keep:
            licensed = {s.signature for s in signs}
            best = next((sig for sig, _ in ranking if sig in licensed), None)
            keep = [s for s in signs if s.signature == best] if best else list(signs)
        pruned += len(signs) - len(keep)
        filtered.append(keep)
    return filtered, pruned


# -- model file format ---------------------------------------------------


def save_model(model):
    lines = [f"{MODEL_HEADER}\talpha={model.smoothing_alpha}"]
    for sig in sorted(model.signatures):
        lines.append(f"S\t{sig}")
    for (surface, sig), count in sorted(model.unigram.items()):
        lines.append(f"U\t{surface}\t{sig}\t{count}")
    for (prev, sig), count in sorted(model.bigram.items()):
        lines.append(f"B\t{prev}\t{sig}\t{count}")
    return "\n".join(lines) + "\n"


def load_model(text):
    lines = text.splitlines()
    if not lines or not lines[0].startswith(MODEL_HEADER):
        raise InputError(f"not a {MODEL_HEADER} file")
    header = lines[0].split("\t")
    alpha = DEFAULT_ALPHA
    for part in header[1:]:
        if part.startswith("alpha="):
            alpha = float(part[len("alpha="):])
    model = SupertagModel(smoothing_alpha=alpha)
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        kind = parts[0]
        if kind == "S" and len(parts) == 2:
            model.signatures.add(parts[1])
        elif kind == "U" and len(parts) == 4:
            model.unigram[(parts[1], parts[2])] = int(parts[3])
            model.vocabulary.add(parts[1])
        elif kind == "B" and len(parts) == 4:
            model.bigram[(parts[1], parts[2])] = int(parts[3])
        else:
            raise InputError(f"model line {lineno}: malformed record")
    return model
