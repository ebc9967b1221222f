"""Bottom-up all-paths chart parser with unification at every rule
application.

Two optional filters cut the search space without (rule filter) or with
(supertag filter) a coverage trade-off:

  * a static rule-compatibility table that skips daughter unifications
    which provably cannot succeed, computed once per grammar;
  * a supertagger that keeps only each token's top-k lexical signatures.

No ambiguity packing; readings are enumerated deterministically, ordered
by their canonical derivation string, and capped.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import morph, semantics, tfs
from .errors import InputError

DEFAULT_READING_CAP = 64
DEFAULT_MAX_LEN = 30


@dataclass
class ParseOptions:
    rule_filter: bool = True
    supertag_model: object = None
    supertag_k: int | None = None
    supertag_rankings: object = None  # precomputed rankings override
    reading_cap: int = DEFAULT_READING_CAP
    max_len: int = DEFAULT_MAX_LEN


@dataclass
class ParseStats:
    edges_built: int = 0
    unification_attempts: int = 0
    unification_failures: int = 0
    filter_prunes_rule: int = 0
    filter_prunes_supertag: int = 0
    wall_time: float = 0.0
    lexical_gaps: list = field(default_factory=list)

    def as_dict(self):
        return {
            "edges_built": self.edges_built,
            "unification_attempts": self.unification_attempts,
            "unification_failures": self.unification_failures,
            "filter_prunes_rule": self.filter_prunes_rule,
            "filter_prunes_supertag": self.filter_prunes_supertag,
            "lexical_gaps": list(self.lexical_gaps),
            "wall_time": self.wall_time,
        }


@dataclass(frozen=True)
class Edge:
    span: tuple
    fs: tfs.FeatureStructure
    rule: str | None  # phrasal rule id; None for lexical edges
    children: tuple
    lex: morph.LexSign | None
    learner_uses: frozenset
    unary_depth: int = 0

    def derivation(self):
        if self.rule is None:
            return ("lex", self.span[0], self.span[1],
                    self.lex.entry.identifier, self.lex.chain)
        return (self.rule, self.span[0], self.span[1],
                tuple(c.derivation() for c in self.children))

    def producer_key(self):
        return self.rule if self.rule is not None else self.lex.entry.lex_type


def deriv_string(deriv):
    if deriv[0] == "lex":
        _, i, j, entry, chain = deriv
        return f"(lex {i} {j} {entry} {'+'.join(chain) or '-'})"
    rule, i, j, children = deriv
    inner = " ".join(deriv_string(c) for c in children)
    return f"({rule} {i} {j} {inner})"


def deriv_leaves(deriv):
    """Leaf records (start, entry_id, chain) in surface order."""
    if deriv[0] == "lex":
        return [(deriv[1], deriv[3], deriv[4])]
    leaves = []
    for child in deriv[3]:
        leaves.extend(deriv_leaves(child))
    return leaves


def deriv_node_count(deriv):
    if deriv[0] == "lex":
        return 1
    return 1 + sum(deriv_node_count(c) for c in deriv[3])


def parse_deriv_string(text):
    """Inverse of deriv_string, for treebank files."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def node():
        nonlocal pos
        if tokens[pos] != "(":
            raise InputError(f"bad derivation near {tokens[pos]!r}")
        pos += 1
        head = tokens[pos]
        pos += 1
        i, j = int(tokens[pos]), int(tokens[pos + 1])
        pos += 2
        if head == "lex":
            entry = tokens[pos]
            chain_text = tokens[pos + 1]
            pos += 2
            chain = () if chain_text == "-" else tuple(chain_text.split("+"))
            result = ("lex", i, j, entry, chain)
        else:
            children = []
            while tokens[pos] != ")":
                children.append(node())
            result = (head, i, j, tuple(children))
        if tokens[pos] != ")":
            raise InputError("unbalanced derivation string")
        pos += 1
        return result

    result = node()
    if pos != len(tokens):
        raise InputError("trailing tokens in derivation string")
    return result


@dataclass(frozen=True)
class Reading:
    root_edge: Edge
    derivation: tuple
    deriv_string: str
    semantics: object  # MrsLite
    learner_uses: frozenset


@dataclass
class ParseResult:
    tokens: tuple
    readings: tuple
    stats: ParseStats


# -- rule filter ---------------------------------------------------------


class RuleFilter:
    """Static (rule, daughter position, producer) compatibility table.

    An entry is False only when the candidate's most general structure
    (its mother schema, or the expanded lexical type) provably cannot
    unify into the rule's daughter slot, so pruning never loses readings."""

    def __init__(self, table):
        self.table = table

    def allows(self, rule_id, position, producer_key):
        return self.table.get((rule_id, position, producer_key), True)


def build_rule_filter(grammar):
    candidates = [
        (rule.identifier, rule.mother_schema) for rule in grammar.phrasal_rules
    ]
    candidates += [(t, grammar.effective(t)) for t in grammar.lex_types()]
    table = {}
    for rule in grammar.phrasal_rules:
        for position in range(1, rule.arity + 1):
            slot = rule.daughter_schema(position)
            for key, repr_fs in candidates:
                table[(rule.identifier, position, key)] = tfs.unifiable(
                    slot, repr_fs, grammar.hierarchy
                )
    return RuleFilter(table)


def all_true_filter():
    return RuleFilter({})


# -- rule application ----------------------------------------------------


def apply_rule(rule, daughters, grammar, stats=None):
    """Unify daughter edges into the rule schema and build the mother
    edge.  Raises UnificationFailure on clash (normal control flow)."""
    if len(daughters) != rule.arity:
        raise InputError(f"rule {rule.identifier} expects {rule.arity} daughters")
    for left, right in zip(daughters, daughters[1:]):
        if left.span[1] != right.span[0]:
            raise InputError("daughter spans must be adjacent and in order")
    fs = rule.schema
    for i, daughter in enumerate(daughters, start=1):
        if stats is not None:
            stats.unification_attempts += 1
        try:
            fs = tfs.unify_at(fs, (f"DTR{i}",), daughter.fs, grammar.hierarchy)
        except tfs.UnificationFailure:
            if stats is not None:
                stats.unification_failures += 1
            raise
    uses = frozenset().union(*(d.learner_uses for d in daughters))
    if rule.learner:
        uses |= {rule.identifier}
    mother = _extract_mother(fs, daughters, uses, grammar)
    span = (daughters[0].span[0], daughters[-1].span[1])
    depth = daughters[0].unary_depth + 1 if rule.arity == 1 else 0
    return Edge(span, mother, rule.identifier, tuple(daughters), None, uses, depth)


RELS = "RELS"
LEARNER = "LEARNER"
LEARNER_PLUS = "+"
LEARNER_MINUS = "-"


def _extract_mother(fs, daughters, uses, grammar):
    """Composition conventions the schemas do not express: the mother's
    RELS is the daughters' concatenation and its learner marker is + iff
    any learner rule participated."""
    types = dict(fs.types)
    arcs = {n: dict(out) for n, out in fs.arcs.items()}
    mother = fs.node_at(("MOTHER",))
    next_id = len(types)

    rels_lists = []
    for i in range(1, len(daughters) + 1):
        path = (f"DTR{i}", RELS)
        if fs.has_path(path):
            try:
                rels_lists.append(fs.list_elements(fs.node_at(path)))
            except InputError:
                pass  # underspecified RELS contributes nothing
    if rels_lists:
        elements = [e for lst in rels_lists for e in lst]
        spine = list(range(next_id, next_id + len(elements) + 1))
        for k, elem in enumerate(elements):
            types[spine[k]] = tfs.CONS
            arcs[spine[k]] = {tfs.FIRST: elem, tfs.REST: spine[k + 1]}
        types[spine[-1]] = tfs.NULL
        arcs.setdefault(mother, {})[RELS] = spine[0]
        next_id = spine[-1] + 1

    marker = LEARNER_PLUS if uses else LEARNER_MINUS
    learner_node = arcs.get(mother, {}).get(LEARNER)
    if learner_node is None:
        learner_node = next_id
        types[learner_node] = marker
        arcs.setdefault(mother, {})[LEARNER] = learner_node
    else:
        low = grammar.hierarchy.glb(types[learner_node], marker)
        if low is None:
            raise tfs.UnificationFailure((LEARNER,), types[learner_node], marker)
        types[learner_node] = low
    return tfs.FeatureStructure.build(types, arcs, mother)


# -- parsing -------------------------------------------------------------


def lexical_chart(tokens, grammar, opts, stats):
    """Per-token lexical signs, after the optional supertag cut."""
    per_token = []
    for token in tokens:
        per_token.append(morph.token_edges(token, grammar))
    rankings = opts.supertag_rankings
    if rankings is None and opts.supertag_model is not None and opts.supertag_k:
        from . import supertag

        rankings = supertag.predict(tokens, opts.supertag_model, grammar)
    if rankings is not None and opts.supertag_k:
        from . import supertag

        per_token, pruned = supertag.filter_edges(per_token, rankings, opts.supertag_k)
        stats.filter_prunes_supertag += pruned
    return per_token


def parse(tokens, grammar, opts=None):
    """All-paths parse.  Readings satisfy the grammar's root condition
    over the full span; identical inputs yield identical results."""
    opts = opts or ParseOptions()
    tokens = [t if isinstance(t, str) else t.text for t in tokens]
    if not tokens:
        raise InputError("empty token sequence")
    if len(tokens) > opts.max_len:
        raise InputError(f"sentence longer than {opts.max_len} tokens")
    stats = ParseStats()
    started = time.perf_counter()

    per_token = lexical_chart(tokens, grammar, opts, stats)
    stats.lexical_gaps = [i for i, signs in enumerate(per_token) if not signs]
    n = len(tokens)
    chart = {}
    if not stats.lexical_gaps:
        rule_filter = build_rule_filter(grammar) if opts.rule_filter else all_true_filter()
        unary = [r for r in grammar.phrasal_rules if r.arity == 1]
        binary = [r for r in grammar.phrasal_rules if r.arity == 2]

        for i, signs in enumerate(per_token):
            cell = []
            for sign in signs:
                cell.append(
                    Edge((i, i + 1), sign.fs, None, (), sign,
                         sign.learner_rules(grammar), 0)
                )
                stats.edges_built += 1
            chart[(i, i + 1)] = cell
            _unary_closure(cell, unary, grammar, rule_filter, stats)

        for width in range(2, n + 1):
            for start in range(0, n - width + 1):
                span = (start, start + width)
                cell = chart.setdefault(span, [])
                for mid in range(start + 1, start + width):
                    for rule in binary:
                        for left in chart.get((start, mid), ()):
                            if not rule_filter.allows(rule.identifier, 1, left.producer_key()):
                                stats.filter_prunes_rule += 1
                                continue
                            for right in chart.get((mid, start + width), ()):
                                if not rule_filter.allows(rule.identifier, 2, right.producer_key()):
                                    stats.filter_prunes_rule += 1
                                    continue
                                try:
                                    edge = apply_rule(rule, (left, right), grammar, stats)
                                except tfs.UnificationFailure:
                                    continue
                                cell.append(edge)
                                stats.edges_built += 1
                _unary_closure(cell, unary, grammar, rule_filter, stats)

    readings = []
    for edge in chart.get((0, n), ()):
        stats.unification_attempts += 1
        try:
            tfs.unify(edge.fs, grammar.root_fs, grammar.hierarchy)
        except tfs.UnificationFailure:
            stats.unification_failures += 1
            continue
        deriv = edge.derivation()
        readings.append(
            Reading(
                root_edge=edge,
                derivation=deriv,
                deriv_string=deriv_string(deriv),
                semantics=semantics.extract_from_fs(edge.fs, grammar),
                learner_uses=edge.learner_uses,
            )
        )
    readings.sort(key=lambda r: r.deriv_string)
    readings = readings[: opts.reading_cap]
    stats.wall_time = time.perf_counter() - started
    return ParseResult(tuple(tokens), tuple(readings), stats)


def _unary_closure(cell, unary_rules, grammar, rule_filter, stats):
    if not unary_rules:
        return
    queue = list(cell)
    while queue:
        edge = queue.pop(0)
        if edge.unary_depth >= grammar.max_chain:
            continue
        for rule in unary_rules:
            if not rule_filter.allows(rule.identifier, 1, edge.producer_key()):
                stats.filter_prunes_rule += 1
                continue
            try:
                new = apply_rule(rule, (edge,), grammar, stats)
            except tfs.UnificationFailure:
                continue
            cell.append(new)
            stats.edges_built += 1
            queue.append(new)
