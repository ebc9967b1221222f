"""Grammar description format and loader.

The format is line-oriented and TDL-like.  Statements end with `.` at
bracket depth zero; `;` starts a comment.

    gender := *top*.
    fem := gender.
    png := *top* & [ PERNUM pernum, GEN gender ].
    famosas := adj-lex & STEM "famosas" & PRED "_famoso_a"
               & LEMMA "famoso" & PARADIGM "famoso" & TAG "AQ0FP0".
    adj-fp-relax := learner-lex-rule & TAG "AQ0FP0"
               & FEEDBACK "gender-agreement"
               & [ PNG [ PERNUM 3pl, GEN masc ], LEARNER + ].
    head-adj := phrase-rule & HEAD 1 &
        [ MOTHER nbar & [ PNG #p, INDEX #x ],
          DTR1 nbar & [ PNG #p, INDEX #x ],
          DTR2 adj & [ MOD < [ PNG #p, INDEX #x ] > ] ].
    template gender-agreement := error & CATEGORY "gender-agreement"
               & MESSAGE "...".
    root := s.

Inside an AVM, `PATH value` pairs are comma-separated; a value is a
`&`-conjunction of type names, #tags, quoted strings, nested AVMs and
`< ... >` lists (FIRST/REST sugar, *null*-terminated).
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

from . import tfs
from .errors import GrammarLoadError, InputError
from .tfs import CONS, NULL, TOP, FeatureStructure, TypeHierarchy, UnificationFailure

LEX_RULE_KINDS = {"lex-rule": False, "learner-lex-rule": True}
PHRASE_RULE_KINDS = {"phrase-rule": False, "learner-phrase-rule": True}
STRING_CLAUSES = {
    "STEM", "PRED", "LEMMA", "PARADIGM", "TAG", "FEEDBACK", "CATEGORY", "MESSAGE",
}
SEVERITIES = ("advisory", "error")
PLACEHOLDERS = {"surface", "expected", "head"}

LEARNER_FEATURE = "LEARNER"
LEARNER_PLUS = "+"
LEARNER_MINUS = "-"


# -- data model ---------------------------------------------------------


@dataclass(frozen=True)
class LexicalEntry:
    identifier: str
    lemma: str
    surface: str
    lex_type: str
    predicate: str
    paradigm_key: str
    tag: str


@dataclass(frozen=True)
class LexicalRule:
    """Tag-triggered refinement rule: the schema is unified into the
    lexical structure (input and output coincide)."""

    identifier: str
    trigger_tag: str
    schema: FeatureStructure
    learner: bool
    feedback_key: str | None

    @property
    def input_schema(self):
        return self.schema

    @property
    def output_schema(self):
        return self.schema


@dataclass(frozen=True)
class PhrasalRule:
    identifier: str
    arity: int
    schema: FeatureStructure  # root carries MOTHER and DTR1[, DTR2]
    head_index: int  # 1-based daughter position
    learner: bool
    feedback_key: str | None

    @property
    def mother_schema(self):
        return self.schema.at(("MOTHER",))

    def daughter_schema(self, i):
        return self.schema.at((f"DTR{i}",))

    @property
    def daughter_schemas(self):
        return [self.daughter_schema(i) for i in range(1, self.arity + 1)]


@dataclass(frozen=True)
class FeedbackTemplate:
    name: str
    category: str
    message: str
    severity: str


@dataclass
class Grammar:
    hierarchy: TypeHierarchy
    constraints: dict  # type -> local constraint FS (or absent)
    expanded: dict  # type -> effective constraint FS
    lexicon: dict  # surface -> tuple of LexicalEntry
    entries: dict  # identifier -> LexicalEntry
    lexical_rules: tuple
    phrasal_rules: tuple
    root_fs: FeatureStructure
    feedback_templates: dict
    version_label: str
    mode: str
    max_chain: int = 3
    _decl: dict = field(default_factory=dict, repr=False)

    def effective(self, type_name):
        if tfs.is_string_literal(type_name):
            return FeatureStructure.atom(type_name)
        try:
            return self.expanded[type_name]
        except KeyError:
            raise InputError(f"unknown type {type_name}") from None

    def lexical_rule(self, identifier):
        for rule in self.lexical_rules:
            if rule.identifier == identifier:
                return rule
        raise InputError(f"unknown lexical rule {identifier}")

    def phrasal_rule(self, identifier):
        for rule in self.phrasal_rules:
            if rule.identifier == identifier:
                return rule
        raise InputError(f"unknown phrasal rule {identifier}")

    def paradigm(self, key):
        return [e for e in self.entries.values() if e.paradigm_key == key]

    def lex_types(self):
        return sorted({e.lex_type for e in self.entries.values()})


# -- tokenizer ----------------------------------------------------------


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>;[^\n]*)
      | (?P<string>"[^"\n]*")
      | (?P<assign>:=)
      | (?P<punct>[\[\]<>,&.])
      | (?P<tag>\#[A-Za-z0-9_-]+)
      | (?P<name>[A-Za-z0-9*+_'-]+)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(source):
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise GrammarLoadError("syntax", f"unexpected character {source[pos]!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    return tokens


def _split_statements(tokens):
    statements = []
    current = []
    depth = 0
    for tok in tokens:
        if tok.kind == "punct":
            if tok.text in "[<":
                depth += 1
            elif tok.text in "]>":
                depth -= 1
            elif tok.text == "." and depth == 0:
                if current:
                    statements.append(current)
                    current = []
                continue
        current.append(tok)
    if current:
        t = current[0]
        raise GrammarLoadError("syntax", "statement missing terminating '.'", t.line, t.col)
    return statements


# -- statement AST ------------------------------------------------------


@dataclass
class _Statement:
    keyword: str | None  # "template" or None
    name: str
    parents: list
    avm: object | None  # parsed AVM tree (list of (path, value))
    clauses: dict  # STEM/PRED/... -> str, HEAD -> int
    line: int


class _StatementParser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def _error(self, detail):
        tok = self.tokens[min(self.i, len(self.tokens) - 1)]
        raise GrammarLoadError("syntax", detail, tok.line, tok.col)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, kind=None, text=None):
        tok = self.peek()
        if tok is None:
            self._error("unexpected end of statement")
        if kind and tok.kind != kind:
            self._error(f"expected {kind}, found {tok.text!r}")
        if text and tok.text != text:
            self._error(f"expected {text!r}, found {tok.text!r}")
        self.i += 1
        return tok

    def parse(self):
        keyword = None
        first = self.take("name")
        if first.text == "template":
            keyword = "template"
            first = self.take("name")
        self.take("assign")
        parents, avm, clauses = [], None, {}
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok.kind == "punct" and tok.text == "[":
                if avm is not None:
                    self._error("only one constraint block per statement")
                avm = self.parse_avm()
            elif tok.kind == "name":
                self.take()
                nxt = self.peek()
                if tok.text in STRING_CLAUSES and nxt is not None and nxt.kind == "string":
                    if tok.text in clauses:
                        self._error(f"duplicate {tok.text} clause")
                    clauses[tok.text] = self.take("string").text[1:-1]
                elif tok.text == "HEAD":
                    head = self.take("name").text
                    if not head.isdigit():
                        self._error("HEAD takes a daughter position")
                    clauses["HEAD"] = int(head)
                else:
                    parents.append(tok.text)
            else:
                self._error(f"unexpected {tok.text!r}")
            nxt = self.peek()
            if nxt is None:
                break
            self.take("punct", "&")
        return _Statement(keyword, first.text, parents, avm, clauses, first.line)

    # AVM tree: list of (path tuple, value); value is a list of terms,
    # each term one of ("type", name), ("string", text), ("tag", name),
    # ("avm", tree), ("list", [value, ...])

    def parse_avm(self):
        self.take("punct", "[")
        pairs = []
        if not (self.peek() and self.peek().kind == "punct" and self.peek().text == "]"):
            while True:
                pairs.append(self.parse_pair())
                tok = self.peek()
                if tok and tok.kind == "punct" and tok.text == ",":
                    self.take()
                    continue
                break
        self.take("punct", "]")
        return pairs

    def parse_pair(self):
        path = [self.take("name").text]
        while self.peek() and self.peek().kind == "punct" and self.peek().text == ".":
            self.take()
            path.append(self.take("name").text)
        return tuple(path), self.parse_value()

    def parse_value(self):
        terms = [self.parse_term()]
        while self.peek() and self.peek().kind == "punct" and self.peek().text == "&":
            self.take()
            terms.append(self.parse_term())
        return terms

    def parse_term(self):
        tok = self.peek()
        if tok is None:
            self._error("missing value")
        if tok.kind == "name":
            return ("type", self.take().text)
        if tok.kind == "string":
            return ("string", self.take().text)
        if tok.kind == "tag":
            return ("tag", self.take().text[1:])
        if tok.kind == "punct" and tok.text == "[":
            return ("avm", self.parse_avm())
        if tok.kind == "punct" and tok.text == "<":
            self.take()
            values = []
            if not (self.peek() and self.peek().kind == "punct" and self.peek().text == ">"):
                while True:
                    values.append(self.parse_value())
                    nxt = self.peek()
                    if nxt and nxt.kind == "punct" and nxt.text == ",":
                        self.take()
                        continue
                    break
            self.take("punct", ">")
            return ("list", values)
        self._error(f"unexpected {tok.text!r} in value")


# -- AVM graph construction ---------------------------------------------


class _GraphBuilder:
    """Builds a raw node table from an AVM tree, then resolves tag and
    duplicate-path equations with the unifier."""

    def __init__(self, hierarchy, line):
        self.h = hierarchy
        self.line = line
        self.types = {}
        self.arcs = {}
        self.tags = {}
        self.equations = []

    def new_node(self, type_name=TOP):
        nid = len(self.types)
        self.types[nid] = type_name
        self.arcs[nid] = {}
        return nid

    def constrain(self, node, type_name, path):
        if type_name not in self.h:
            raise GrammarLoadError(
                "unknown-type", f"unknown type {type_name}", self.line
            )
        low = self.h.glb(self.types[node], type_name)
        if low is None:
            raise GrammarLoadError(
                "inconsistent-constraint",
                f"types {self.types[node]} and {type_name} clash at "
                f"{'.'.join(path) or '(root)'}",
                self.line,
            )
        self.types[node] = low

    def apply_avm(self, node, pairs, path):
        for rel_path, value in pairs:
            cur = node
            for feature in rel_path[:-1]:
                nxt = self.arcs[cur].get(feature)
                if nxt is None:
                    nxt = self.new_node()
                    self.arcs[cur][feature] = nxt
                cur = nxt
            feature = rel_path[-1]
            vnode = self.eval_value(value, path + rel_path)
            if feature in self.arcs[cur]:
                self.equations.append((self.arcs[cur][feature], vnode, path + rel_path))
            else:
                self.arcs[cur][feature] = vnode

    def eval_value(self, terms, path):
        node = None
        for kind, payload in terms:
            if kind == "tag":
                if payload in self.tags:
                    if node is None:
                        node = self.tags[payload]
                    else:
                        self.equations.append((node, self.tags[payload], path))
                else:
                    if node is None:
                        node = self.new_node()
                    self.tags[payload] = node
        if node is None:
            node = self.new_node()
        for kind, payload in terms:
            if kind == "type" or kind == "string":
                self.constrain(node, payload, path)
            elif kind == "avm":
                self.apply_avm(node, payload, path)
            elif kind == "list":
                self.build_list(node, payload, path)
        return node

    def build_list(self, node, values, path):
        cur = node
        for i, value in enumerate(values):
            self.constrain(cur, CONS, path)
            elem = self.eval_value(value, path + (f"FIRST[{i}]",))
            for feature, target in ((tfs.FIRST, elem), (tfs.REST, None)):
                if feature == tfs.FIRST:
                    if tfs.FIRST in self.arcs[cur]:
                        self.equations.append((self.arcs[cur][tfs.FIRST], elem, path))
                    else:
                        self.arcs[cur][tfs.FIRST] = elem
            nxt = self.arcs[cur].get(tfs.REST)
            if nxt is None:
                nxt = self.new_node()
                self.arcs[cur][tfs.REST] = nxt
            cur = nxt
        self.constrain(cur, NULL, path)

    def finish(self, root):
        parent = {n: n for n in self.types}
        seeds = [(a, b, pth) for a, b, pth in self.equations]
        try:
            find = tfs._merge(self.types, self.arcs, parent, seeds, self.h)
            return tfs._extract(self.types, self.arcs, find, root)
        except UnificationFailure as exc:
            raise GrammarLoadError(
                "inconsistent-constraint",
                f"constraint clash at {'.'.join(exc.path) or '(root)'}: "
                f"{exc.left} / {exc.right}",
                self.line,
            ) from exc


def build_avm(hierarchy, pairs, line=None, root_type=TOP):
    builder = _GraphBuilder(hierarchy, line)
    root = builder.new_node()
    if root_type != TOP:
        builder.constrain(root, root_type, ())
    if pairs:
        builder.apply_avm(root, pairs, ())
    return builder.finish(root)


def parse_fs(text, hierarchy):
    """Parse a standalone `type & [ ... ]` expression into a structure;
    handy for tests and fixtures."""
    tokens = _tokenize(text)
    parser = _StatementParser(tokens)
    value = parser.parse_value()
    if parser.peek() is not None:
        parser._error("trailing tokens after value")
    builder = _GraphBuilder(hierarchy, None)
    root = builder.eval_value(value, ())
    return builder.finish(root)


# -- loader -------------------------------------------------------------


_TAG_PATTERN = re.compile(r"^(?:NC[MFC][SP]000|AQ0[MFC][SP]0|D[API]0[MFC][SP]0|V[SM]IP3[SP]0)$")


def toy_tag_pattern():
    return _TAG_PATTERN


def load_grammar(source, mode="learner", max_chain=3):
    """Parse and validate a grammar from text.  In strict mode every rule
    flagged learner is dropped; version_label records mode and a content
    hash so profiles can tell grammar variants apart."""
    if mode not in ("strict", "learner"):
        raise InputError(f"unknown grammar mode {mode!r}")
    statements = _split_statements(_tokenize(source))
    parsed = [_StatementParser(toks).parse() for toks in statements]

    type_stmts, entry_stmts, lexrule_stmts, phrule_stmts = [], [], [], []
    template_stmts, root_stmt = [], None
    for st in parsed:
        if st.keyword == "template":
            template_stmts.append(st)
        elif st.name == "root":
            if root_stmt is not None:
                raise GrammarLoadError("syntax", "duplicate root statement", st.line)
            root_stmt = st
        elif any(p in LEX_RULE_KINDS for p in st.parents):
            lexrule_stmts.append(st)
        elif any(p in PHRASE_RULE_KINDS for p in st.parents):
            phrule_stmts.append(st)
        elif "STEM" in st.clauses:
            entry_stmts.append(st)
        else:
            type_stmts.append(st)

    # hierarchy
    parents = {}
    for st in type_stmts:
        if st.name in parents or st.name in tfs.BUILTIN_PARENTS or st.name == TOP:
            raise GrammarLoadError("syntax", f"type {st.name} declared twice", st.line)
        parents[st.name] = tuple(st.parents) or (TOP,)
    try:
        hierarchy = TypeHierarchy(parents)
    except InputError as exc:
        raise GrammarLoadError("hierarchy", str(exc)) from exc
    bad = hierarchy.bcpo_violations()
    if bad:
        a, b, lows = bad[0]
        raise GrammarLoadError(
            "hierarchy",
            f"types {a} and {b} have no unique greatest lower bound: "
            f"maximal common subtypes {lows}",
        )

    # local constraints
    constraints = {}
    for st in type_stmts:
        if st.clauses:
            raise GrammarLoadError(
                "syntax", f"type {st.name} cannot carry clauses", st.line
            )
        if st.avm is not None:
            constraints[st.name] = build_avm(hierarchy, st.avm, st.line, st.name)

    expanded = _expand(hierarchy, constraints)

    grammar = Grammar(
        hierarchy=hierarchy,
        constraints=constraints,
        expanded=expanded,
        lexicon={},
        entries={},
        lexical_rules=(),
        phrasal_rules=(),
        root_fs=FeatureStructure.atom(TOP),
        feedback_templates={},
        version_label="",
        mode=mode,
        max_chain=max_chain,
    )

    # feedback templates
    for st in template_stmts:
        severity = None
        for p in st.parents:
            if p in SEVERITIES:
                severity = p
            else:
                raise GrammarLoadError("syntax", f"unknown severity {p}", st.line)
        category = st.clauses.get("CATEGORY")
        message = st.clauses.get("MESSAGE")
        if not (severity and category and message):
            raise GrammarLoadError(
                "syntax", f"template {st.name} needs severity, CATEGORY, MESSAGE", st.line
            )
        unknown = set(re.findall(r"\{(\w+)\}", message)) - PLACEHOLDERS
        if unknown:
            raise GrammarLoadError(
                "syntax", f"template {st.name} uses unknown placeholders {sorted(unknown)}", st.line
            )
        if st.name in grammar.feedback_templates:
            raise GrammarLoadError("syntax", f"template {st.name} declared twice", st.line)
        grammar.feedback_templates[st.name] = FeedbackTemplate(
            st.name, category, message, severity
        )

    # lexical entries
    lexicon = {}
    for st in entry_stmts:
        plain = [p for p in st.parents]
        if len(plain) != 1:
            raise GrammarLoadError(
                "syntax", f"entry {st.name} needs exactly one lexical type", st.line
            )
        lex_type = plain[0]
        if lex_type not in hierarchy:
            raise GrammarLoadError("unknown-type", f"unknown lexical type {lex_type}", st.line)
        missing = [k for k in ("STEM", "PRED", "LEMMA", "PARADIGM", "TAG") if k not in st.clauses]
        if missing:
            raise GrammarLoadError(
                "syntax", f"entry {st.name} missing clauses {missing}", st.line
            )
        surface = st.clauses["STEM"]
        if not surface:
            raise GrammarLoadError("syntax", f"entry {st.name} has empty STEM", st.line)
        tag = st.clauses["TAG"]
        if not _TAG_PATTERN.match(tag):
            raise GrammarLoadError(
                "syntax", f"entry {st.name} tag {tag} not in the toy tagset", st.line
            )
        if st.name in grammar.entries:
            raise GrammarLoadError("syntax", f"entry {st.name} declared twice", st.line)
        if st.avm is not None:
            raise GrammarLoadError(
                "syntax", f"entry {st.name} cannot carry a constraint block", st.line
            )
        entry = LexicalEntry(
            identifier=st.name,
            lemma=st.clauses["LEMMA"],
            surface=surface,
            lex_type=lex_type,
            predicate=st.clauses["PRED"],
            paradigm_key=st.clauses["PARADIGM"],
            tag=tag,
        )
        grammar.entries[entry.identifier] = entry
        lexicon.setdefault(surface, []).append(entry)
    grammar.lexicon = {s: tuple(es) for s, es in lexicon.items()}

    # lexical rules
    lexical_rules = []
    for st in lexrule_stmts:
        kinds = [p for p in st.parents if p in LEX_RULE_KINDS]
        extra = [p for p in st.parents if p not in LEX_RULE_KINDS]
        if len(kinds) != 1 or extra:
            raise GrammarLoadError(
                "syntax", f"lexical rule {st.name} needs exactly one rule kind", st.line
            )
        learner = LEX_RULE_KINDS[kinds[0]]
        if "TAG" not in st.clauses:
            raise GrammarLoadError("syntax", f"lexical rule {st.name} missing TAG", st.line)
        schema = build_avm(hierarchy, st.avm or [], st.line)
        if learner:
            if (
                not schema.has_path((LEARNER_FEATURE,))
                or schema.type_at((LEARNER_FEATURE,)) != LEARNER_PLUS
            ):
                raise GrammarLoadError(
                    "syntax",
                    f"learner rule {st.name} must constrain {LEARNER_FEATURE} to {LEARNER_PLUS}",
                    st.line,
                )
        feedback_key = st.clauses.get("FEEDBACK")
        if feedback_key and feedback_key not in grammar.feedback_templates:
            raise GrammarLoadError(
                "syntax", f"rule {st.name} references unknown template {feedback_key}", st.line
            )
        lexical_rules.append(
            LexicalRule(st.name, st.clauses["TAG"], schema, learner, feedback_key)
        )

    # phrasal rules
    phrasal_rules = []
    for st in phrule_stmts:
        kinds = [p for p in st.parents if p in PHRASE_RULE_KINDS]
        extra = [p for p in st.parents if p not in PHRASE_RULE_KINDS]
        if len(kinds) != 1 or extra:
            raise GrammarLoadError(
                "syntax", f"phrasal rule {st.name} needs exactly one rule kind", st.line
            )
        learner = PHRASE_RULE_KINDS[kinds[0]]
        schema = build_avm(hierarchy, st.avm or [], st.line)
        if not schema.has_path(("MOTHER",)) or not schema.has_path(("DTR1",)):
            raise GrammarLoadError(
                "syntax", f"phrasal rule {st.name} needs MOTHER and DTR1", st.line
            )
        arity = 2 if schema.has_path(("DTR2",)) else 1
        head = st.clauses.get("HEAD", 1)
        if not 1 <= head <= arity:
            raise GrammarLoadError(
                "syntax", f"phrasal rule {st.name} HEAD {head} out of range", st.line
            )
        # fold each slot's effective type constraint into the schema
        for slot in ("MOTHER",) + tuple(f"DTR{i}" for i in range(1, arity + 1)):
            slot_type = schema.type_at((slot,))
            eff = expanded.get(slot_type)
            if eff is not None:
                try:
                    schema = tfs.unify_at(schema, (slot,), eff, hierarchy)
                except UnificationFailure as exc:
                    raise GrammarLoadError(
                        "inconsistent-constraint",
                        f"rule {st.name} slot {slot} clashes with type "
                        f"{slot_type} at {'.'.join(exc.path)}",
                        st.line,
                    ) from exc
        feedback_key = st.clauses.get("FEEDBACK")
        if feedback_key and feedback_key not in grammar.feedback_templates:
            raise GrammarLoadError(
                "syntax", f"rule {st.name} references unknown template {feedback_key}", st.line
            )
        phrasal_rules.append(
            PhrasalRule(st.name, arity, schema, head, learner, feedback_key)
        )

    if mode == "strict":
        lexical_rules = [r for r in lexical_rules if not r.learner]
        phrasal_rules = [r for r in phrasal_rules if not r.learner]
    grammar.lexical_rules = tuple(lexical_rules)
    grammar.phrasal_rules = tuple(phrasal_rules)

    # root condition
    if root_stmt is None:
        raise GrammarLoadError("syntax", "grammar has no root statement")
    root_fs = None
    for p in root_stmt.parents:
        if p not in hierarchy:
            raise GrammarLoadError("unknown-type", f"unknown root type {p}", root_stmt.line)
        eff = expanded.get(p, FeatureStructure.atom(p))
        root_fs = eff if root_fs is None else tfs.unify(root_fs, eff, hierarchy)
    if root_stmt.avm is not None:
        avm_fs = build_avm(hierarchy, root_stmt.avm, root_stmt.line)
        root_fs = avm_fs if root_fs is None else tfs.unify(root_fs, avm_fs, hierarchy)
    if root_fs is None:
        raise GrammarLoadError("syntax", "empty root statement", root_stmt.line)
    grammar.root_fs = root_fs

    # entry structures are derived on demand by morph; validate now that
    # every entry unifies with its expanded lexical type
    for entry in grammar.entries.values():
        try:
            entry_fs(grammar, entry)
        except UnificationFailure as exc:
            raise GrammarLoadError(
                "inconsistent-constraint",
                f"entry {entry.identifier} clashes with type {entry.lex_type} "
                f"at {'.'.join(exc.path)}",
            ) from exc

    digest = hashlib.sha256(source.encode("utf-8")).hexdigest()[:12]
    grammar.version_label = f"{mode}-{digest}"
    grammar._decl = {
        "types": [(st.name, tuple(st.parents) or (TOP,), st.avm) for st in type_stmts],
        "source": source,
    }
    return grammar


def _expand(hierarchy, constraints):
    """Close local constraints under inheritance: each type's effective
    constraint is the unification of all ancestor constraints with its
    local one."""
    expanded = {}

    def eff(name):
        if name in expanded:
            return expanded[name]
        result = FeatureStructure.atom(name)
        for parent in hierarchy.parents(name):
            parent_fs = eff(parent)
            if len(parent_fs.types) == 1 and parent_fs.arcs.get(0) in (None, {}):
                continue  # bare atom adds nothing below `name`
            try:
                result = tfs.unify(result, parent_fs, hierarchy)
            except UnificationFailure as exc:
                raise GrammarLoadError(
                    "inconsistent-constraint",
                    f"type {name} inherits clashing constraints at "
                    f"{'.'.join(exc.path) or '(root)'}: {exc.left} / {exc.right}",
                ) from exc
        local = constraints.get(name)
        if local is not None:
            try:
                result = tfs.unify(result, local, hierarchy)
            except UnificationFailure as exc:
                raise GrammarLoadError(
                    "inconsistent-constraint",
                    f"type {name} constraint clashes with inherited at "
                    f"{'.'.join(exc.path) or '(root)'}: {exc.left} / {exc.right}",
                ) from exc
        expanded[name] = result
        return result

    for name in sorted(hierarchy.types):
        eff(name)
    return expanded


def expand_constraints(grammar):
    """Recompute the inheritance closure.  Idempotent: running it on an
    already-loaded grammar reproduces the same effective constraints."""
    grammar.expanded = _expand(grammar.hierarchy, grammar.constraints)
    return grammar


def entry_fs(grammar, entry):
    """Base lexical structure for an entry: the expanded lexical type
    refined with the surface string and semantic predicate.  The
    predicate lands in the type's RELS list; a type that does not shape
    RELS gets no predication."""
    base = grammar.effective(entry.lex_type)
    pairs = [(("STEM",), [("string", f'"{entry.surface}"')])]
    if base.has_path(("RELS", "FIRST")):
        pairs.append(
            (("RELS", "FIRST", "PRED"), [("string", f'"{entry.predicate}"')])
        )
    add = build_avm(grammar.hierarchy, pairs)
    return tfs.unify(base, add, grammar.hierarchy)


# -- serialization ------------------------------------------------------


def render_fs(fs, omit_root_type=None):
    """Render a structure in the grammar's AVM syntax (round-trippable)."""
    indegree = {}
    for out in fs.arcs.values():
        for child in out.values():
            indegree[child] = indegree.get(child, 0) + 1
    tags = {}
    order = []
    for _, node, first in fs.walk():
        if first and indegree.get(node, 0) > 1:
            tags[node] = len(tags) + 1
        order.append(node)

    seen = set()

    def render(node, at_root=False):
        parts = []
        if node in tags:
            parts.append(f"#{tags[node]}")
            if node in seen:
                return " & ".join(parts)
        seen.add(node)
        t = fs.types[node]
        if not (at_root and omit_root_type == t) and t != TOP:
            parts.append(t)
        out = fs.arcs.get(node)
        if out:
            inner = ", ".join(f"{f} {render(c)}" for f, c in sorted(out.items()))
            parts.append(f"[ {inner} ]")
        if not parts:
            parts.append(TOP)
        return " & ".join(parts)

    return render(fs.root, at_root=True)


def serialize(grammar):
    """Dump a loaded grammar back to the text format."""
    lines = []
    for name, parents, avm in grammar._decl.get("types", []):
        rhs = " & ".join(parents)
        local = grammar.constraints.get(name)
        if local is not None:
            body = render_fs(local, omit_root_type=name)
            if not body.startswith("["):
                body = "[ ]" if body == TOP else body
            rhs += f" & {body}"
        lines.append(f"{name} := {rhs}.")
    for tpl in grammar.feedback_templates.values():
        lines.append(
            f'template {tpl.name} := {tpl.severity} & CATEGORY "{tpl.category}"'
            f' & MESSAGE "{tpl.message}".'
        )
    for e in grammar.entries.values():
        lines.append(
            f'{e.identifier} := {e.lex_type} & STEM "{e.surface}" & PRED "{e.predicate}"'
            f' & LEMMA "{e.lemma}" & PARADIGM "{e.paradigm_key}" & TAG "{e.tag}".'
        )
    for r in grammar.lexical_rules:
        kind = "learner-lex-rule" if r.learner else "lex-rule"
        fb = f' & FEEDBACK "{r.feedback_key}"' if r.feedback_key else ""
        body = render_fs(r.schema)
        lines.append(f'{r.identifier} := {kind} & TAG "{r.trigger_tag}"{fb} & {body}.')
    for r in grammar.phrasal_rules:
        kind = "learner-phrase-rule" if r.learner else "phrase-rule"
        body = render_fs(r.schema)
        lines.append(f"{r.identifier} := {kind} & HEAD {r.head_index} & {body}.")
    lines.append(f"root := {render_fs(grammar.root_fs)}.")
    return "\n".join(lines) + "\n"
