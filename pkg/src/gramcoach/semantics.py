"""MRS-lite: a bag of predications with argument links, read off the
RELS list a parse builds by concatenation, plus conversion to a plain
dependency graph.

Variable identity follows structure sharing: two roles carry the same
variable exactly when their feature paths reach the same node.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import tfs
from .errors import InputError, InvariantError

RELS = "RELS"
INDEX = "INDEX"
PRED = "PRED"
ARG0 = "ARG0"
PNG = "PNG"

ROLES = ("ARG1", "ARG2", "ARG3")
PNG_FEATURES = ("PERNUM", "GEN")

EVENT_TYPE = "event"


@dataclass(frozen=True)
class Predication:
    predicate: str
    intrinsic_var: str
    args: dict = field(default_factory=dict)  # role -> variable
    png: dict | None = None  # PERNUM/GEN value types, when present

    def __repr__(self):
        parts = [f"{self.predicate}({self.intrinsic_var}"]
        for role in sorted(self.args):
            parts.append(f", {role} {self.args[role]}")
        return "".join(parts) + ")"


@dataclass(frozen=True)
class MrsLite:
    rels: tuple
    index: str | None

    def predicates(self):
        return [p.predicate for p in self.rels]


@dataclass(frozen=True)
class DependencyGraph:
    nodes: tuple  # predicate labels, in rels order
    arcs: tuple  # (head label, role, dependent label)
    index: str | None

    def render(self):
        lines = [f"# index: {self.index or '-'}"]
        for head, role, dep in self.arcs:
            lines.append(f"{head} -{role}-> {dep}")
        return "\n".join(lines)


class _VarNamer:
    """Stable variable names: e1, e2, ... for events, x1, x2, ... for the
    rest, numbered in first-encounter order."""

    def __init__(self, fs, grammar):
        self.fs = fs
        self.h = grammar.hierarchy
        self.by_node = {}
        self.counts = {"e": 0, "x": 0}

    def name(self, node):
        if node not in self.by_node:
            t = self.fs.types[node]
            is_event = EVENT_TYPE in self.h and not tfs.is_string_literal(t) \
                and t in self.h and self.h.subtype(t, EVENT_TYPE)
            base = "e" if is_event else "x"
            self.counts[base] += 1
            self.by_node[node] = f"{base}{self.counts[base]}"
        return self.by_node[node]


def extract_from_fs(fs, grammar):
    """Read the MRS off a structure carrying a RELS list (and optionally
    an INDEX hook).  A fully underspecified RELS is an empty bag; a
    half-built spine is an internal error."""
    if not fs.has_path((RELS,)):
        raise InputError("structure carries no RELS list")
    rels_node = fs.node_at((RELS,))
    namer = _VarNamer(fs, grammar)
    if not fs.arcs.get(rels_node):
        index = namer.name(fs.node_at((INDEX,))) if fs.has_path((INDEX,)) else None
        return MrsLite((), index)
    try:
        elements = fs.list_elements(rels_node)
    except InputError as exc:
        raise InvariantError(f"malformed RELS list at RELS: {exc}") from exc
    rels = []
    for node in elements:
        out = fs.arcs.get(node, {})
        if PRED not in out:
            raise InvariantError(f"predication without {PRED} in RELS")
        pred = fs.types[out[PRED]].strip('"')
        if ARG0 not in out:
            raise InvariantError(f"predication {pred} lacks {ARG0}")
        intrinsic = namer.name(out[ARG0])
        args = {}
        for role in ROLES:
            if role in out:
                args[role] = namer.name(out[role])
        png = None
        if PNG in out:
            png_out = fs.arcs.get(out[PNG], {})
            png = {
                f: fs.types[png_out[f]] for f in PNG_FEATURES if f in png_out
            }
        rels.append(Predication(pred, intrinsic, args, png))
    index = namer.name(fs.node_at((INDEX,))) if fs.has_path((INDEX,)) else None
    return MrsLite(tuple(rels), index)


def extract_mrs(reading, grammar):
    return extract_from_fs(reading.root_edge.fs, grammar)


def to_dependencies(mrs):
    """One node per predication, one arc per bound argument link."""
    labels = _labels(mrs)
    by_var = {}
    for pred, label in zip(mrs.rels, labels):
        by_var.setdefault(pred.intrinsic_var, label)
    arcs = []
    for pred, label in zip(mrs.rels, labels):
        for role in sorted(pred.args):
            target = pred.args[role]
            if target in by_var:
                arcs.append((label, role, by_var[target]))
    return DependencyGraph(tuple(labels), tuple(arcs), mrs.index)


def _labels(mrs):
    seen = {}
    labels = []
    for pred in mrs.rels:
        n = seen.get(pred.predicate, 0)
        seen[pred.predicate] = n + 1
        labels.append(pred.predicate if n == 0 else f"{pred.predicate}#{n + 1}")
    return labels
