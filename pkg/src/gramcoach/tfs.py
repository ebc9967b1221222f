"""Typed feature structure algebra.

A TypeHierarchy is a finite bounded-complete partial order of type names.
A FeatureStructure is a rooted, connected, acyclic, feature-labeled DAG
whose nodes carry types; reentrancy is two paths reaching one node.

Operations (glb, subsumes, unify, list_append) are pure: inputs are never
mutated, results are freshly built structures.  Unification failure is
raised as UnificationFailure carrying the first failing path and the two
clashing types, which the coaching layer reads for feedback.
"""

from __future__ import annotations

from .errors import InputError, InvariantError

TOP = "*top*"
STRING = "string"
LIST = "*list*"
CONS = "*cons*"
NULL = "*null*"

FIRST = "FIRST"
REST = "REST"

BUILTIN_PARENTS = {
    STRING: (TOP,),
    LIST: (TOP,),
    CONS: (LIST,),
    NULL: (LIST,),
}


def is_string_literal(name):
    """String-valued types are spelled with surrounding double quotes."""
    return len(name) >= 2 and name[0] == '"' and name[-1] == '"'


class UnificationFailure(Exception):
    """Normal control flow for the parser; counted, not logged.

    reason is "clash" (type glb failed) or "cycle" (occurs check).
    """

    def __init__(self, path, left, right, reason="clash"):
        self.path = tuple(path)
        self.left = left
        self.right = right
        self.reason = reason
        where = ".".join(self.path) or "(root)"
        super().__init__(f"unification {reason} at {where}: {left} / {right}")


class TypeHierarchy:
    """Finite type partial order with unique greatest lower bounds.

    parents maps each declared type to its immediate supertypes.  The
    builtin types *top*, string, *list*, *cons*, *null* are always present.
    String literals ("personas") are implicit subtypes of string and are
    pairwise incompatible; they are not stored in the table.
    """

    def __init__(self, parents):
        table = {TOP: ()}
        for name, ps in BUILTIN_PARENTS.items():
            table[name] = tuple(ps)
        for name, ps in parents.items():
            if name == TOP:
                continue
            if is_string_literal(name):
                raise InputError(f"string literal {name} cannot be declared as a type")
            table[name] = tuple(dict.fromkeys(ps)) or (TOP,)
        self._parents = table
        self._index = {t: i for i, t in enumerate(sorted(table))}
        self._names = sorted(table)
        self._check_wellformed()
        self._desc = self._descendant_masks()
        self._glb_cache = {}

    @property
    def types(self):
        return set(self._parents)

    def parents(self, name):
        return self._parents[name]

    def __contains__(self, name):
        return name in self._parents or is_string_literal(name)

    def _check_wellformed(self):
        # every type reaches *top* along acyclic parent chains
        state = {}  # 0 visiting, 1 done

        for start in self._parents:
            stack = [(start, iter(self._parents[start]))]
            if state.get(start) == 1:
                continue
            state[start] = 0
            while stack:
                node, it = stack[-1]
                advanced = False
                for p in it:
                    if p not in self._parents:
                        raise InputError(f"type {node} has unknown supertype {p}")
                    if state.get(p) == 0:
                        raise InputError(f"type hierarchy cycle through {p}")
                    if state.get(p) != 1:
                        state[p] = 0
                        stack.append((p, iter(self._parents[p])))
                        advanced = True
                        break
                if not advanced:
                    state[node] = 1
                    stack.pop()
        # reachability of *top* follows: () parents only legal on *top*,
        # and every other type has at least one parent chain ending there.
        for name, ps in self._parents.items():
            if name != TOP and not ps:
                raise InputError(f"type {name} does not reach {TOP}")

    def _descendant_masks(self):
        # mask[t] has bit i set iff names[i] is t or a subtype of t
        children = {t: [] for t in self._parents}
        for t, ps in self._parents.items():
            for p in ps:
                children[p].append(t)
        masks = {}

        order = []  # reverse topological: leaves first
        indeg = {t: len(children[t]) for t in self._parents}
        frontier = sorted(t for t, d in indeg.items() if d == 0)
        pending = dict(indeg)
        queue = list(frontier)
        while queue:
            t = queue.pop(0)
            order.append(t)
            for p in self._parents[t]:
                pending[p] -= 1
                if pending[p] == 0:
                    queue.append(p)
        for t in order:
            m = 1 << self._index[t]
            for c in children[t]:
                m |= masks[c]
            masks[t] = m
        return masks

    def subtype(self, a, b):
        """True iff a is b or a specialization of b."""
        if a == b or b == TOP:
            return True
        if is_string_literal(a):
            return b == STRING
        if is_string_literal(b):
            return False
        if a not in self._parents or b not in self._parents:
            raise InputError(f"unknown type in subtype check: {a} / {b}")
        return bool(self._desc[b] & (1 << self._index[a]))

    def glb(self, a, b):
        """Greatest lower bound of a and b, or None when incompatible."""
        if a == b:
            return a if a in self else _unknown(a)
        if a == TOP:
            return b if b in self else _unknown(b)
        if b == TOP:
            return a if a in self else _unknown(a)
        if is_string_literal(a):
            return a if b == STRING else None
        if is_string_literal(b):
            return b if a == STRING else None
        if a not in self._parents:
            raise InputError(f"unknown type {a}")
        if b not in self._parents:
            raise InputError(f"unknown type {b}")
        key = (a, b) if a <= b else (b, a)
        if key in self._glb_cache:
            return self._glb_cache[key]
        lows = self._maximal_common_subtypes(a, b)
        if len(lows) > 1:
            raise InvariantError(
                f"hierarchy not bounded complete: {a} and {b} have "
                f"maximal common subtypes {sorted(lows)}"
            )
        result = lows[0] if lows else None
        self._glb_cache[key] = result
        return result

    def _maximal_common_subtypes(self, a, b):
        common = self._desc[a] & self._desc[b]
        if not common:
            return []
        members = [t for t in self._names if common & (1 << self._index[t])]
        return [
            t
            for t in members
            if not any(
                s != t and (self._desc[s] & (1 << self._index[t]))
                for s in members
            )
        ]

    def bcpo_violations(self):
        """All type pairs whose maximal common subtypes are not unique."""
        bad = []
        names = self._names
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                lows = self._maximal_common_subtypes(a, b)
                if len(lows) > 1:
                    bad.append((a, b, sorted(lows)))
        return bad


def _unknown(name):
    raise InputError(f"unknown type {name}")


def glb(a, b, hierarchy):
    return hierarchy.glb(a, b)


class FeatureStructure:
    """Immutable rooted typed DAG.  Node ids are canonical: breadth of a
    depth-first walk with alphabetically sorted features, so isomorphic
    structures compare equal with plain ==."""

    __slots__ = ("types", "arcs", "root", "_canon")

    def __init__(self, types, arcs, root):
        # use FeatureStructure.build; this trusts its arguments
        self.types = types
        self.arcs = arcs
        self.root = root
        self._canon = None

    @classmethod
    def build(cls, types, arcs, root):
        """Normalize a raw graph: prune unreachable nodes, renumber nodes
        in first-visit order, reject cycles and dangling arcs."""
        renum = {}
        order = []
        state = {}  # 1 on stack, 2 done
        stack = [(root, None)]
        while stack:
            node, it = stack.pop()
            if it is None:
                if node in renum:
                    continue
                if state.get(node) == 1:
                    raise InputError("cyclic feature structure")
                if node not in types:
                    raise InputError(f"arc points at unknown node {node}")
                state[node] = 1
                renum[node] = len(order)
                order.append(node)
                features = sorted(arcs.get(node, ()))
                stack.append((node, iter(features)))
            else:
                advanced = False
                for f in it:
                    child = arcs[node][f]
                    if state.get(child) == 1:
                        raise InputError("cyclic feature structure")
                    stack.append((node, it))
                    stack.append((child, None))
                    advanced = True
                    break
                if not advanced:
                    state[node] = 2
        new_types = {}
        new_arcs = {}
        for old in order:
            nid = renum[old]
            new_types[nid] = types[old]
            out = arcs.get(old)
            if out:
                new_arcs[nid] = {f: renum[c] for f, c in sorted(out.items())}
        return cls(new_types, new_arcs, 0)

    @classmethod
    def atom(cls, type_name):
        return cls({0: type_name}, {}, 0)

    @classmethod
    def bundle(cls, parts, root_type=TOP):
        """One fresh root with an arc per named part; used by tests to put
        several structures into a single graph."""
        types = {0: root_type}
        arcs = {0: {}}
        offset = 1
        for feature, fs in sorted(parts.items()):
            shift = offset
            for n, t in fs.types.items():
                types[n + shift] = t
            for n, out in fs.arcs.items():
                arcs[n + shift] = {f: c + shift for f, c in out.items()}
            arcs[0][feature] = fs.root + shift
            offset += len(fs.types)
        return cls.build(types, arcs, 0)

    # -- inspection ----------------------------------------------------

    def node_at(self, path):
        node = self.root
        for f in path:
            out = self.arcs.get(node)
            if not out or f not in out:
                raise InputError(f"no path {'.'.join(path)}")
            node = out[f]
        return node

    def has_path(self, path):
        try:
            self.node_at(path)
            return True
        except InputError:
            return False

    def type_at(self, path):
        return self.types[self.node_at(path)]

    def features(self, node):
        return sorted(self.arcs.get(node, ()))

    def at(self, path):
        """Sub-structure view rooted at path (pruned and renumbered)."""
        return FeatureStructure.build(self.types, self.arcs, self.node_at(path))

    def list_elements(self, node=None):
        """FIRST targets of a FIRST/REST list; requires *null* termination."""
        node = self.root if node is None else node
        elems = []
        seen = set()
        while True:
            t = self.types[node]
            if t == NULL:
                return elems
            out = self.arcs.get(node, {})
            if node in seen:
                raise InputError("list spine loops")
            seen.add(node)
            if FIRST not in out or REST not in out:
                raise InputError(f"list not {NULL}-terminated (stuck at type {t})")
            elems.append(out[FIRST])
            node = out[REST]

    def walk(self):
        """Yield (path, node, first_visit) in canonical DFS order, not
        descending into already-visited nodes."""
        seen = set()
        stack = [((), self.root)]
        while stack:
            path, node = stack.pop()
            first = node not in seen
            yield path, node, first
            if not first:
                continue
            seen.add(node)
            for f in sorted(self.arcs.get(node, ()), reverse=True):
                stack.append((path + (f,), self.arcs[node][f]))

    def canonical(self):
        """Canonical text form: one line per canonical path.  Shared nodes
        are tagged #n in first-visit order; the first visit prints
        `PATH = #n=type`, later visits print `PATH = #n`."""
        if self._canon is not None:
            return self._canon
        indegree = {}
        for out in self.arcs.values():
            for child in out.values():
                indegree[child] = indegree.get(child, 0) + 1
        tags = {}
        lines = []
        for path, node, first in self.walk():
            prefix = ".".join(path) + " = " if path else "= "
            if first:
                if indegree.get(node, 0) > 1:
                    tags[node] = len(tags) + 1
                    lines.append(f"{prefix}#{tags[node]}={self.types[node]}")
                else:
                    lines.append(f"{prefix}{self.types[node]}")
            else:
                lines.append(f"{prefix}#{tags[node]}")
        self._canon = "\n".join(lines)
        return self._canon

    def __eq__(self, other):
        if not isinstance(other, FeatureStructure):
            return NotImplemented
        return (
            self.root == other.root
            and self.types == other.types
            and self.arcs == other.arcs
        )

    def __hash__(self):
        return hash(self.canonical())

    def __repr__(self):
        head = self.types[self.root]
        return f"<FeatureStructure {head} nodes={len(self.types)}>"


# -- subsumption -------------------------------------------------------


def subsumes(general, specific, hierarchy):
    """True iff every path, typing and reentrancy of `general` is present
    (possibly strengthened) in `specific`."""
    mapping = {general.root: specific.root}
    stack = [general.root]
    done = set()
    while stack:
        gn = stack.pop()
        if gn in done:
            continue
        done.add(gn)
        sn = mapping[gn]
        if not hierarchy.subtype(specific.types[sn], general.types[gn]):
            return False
        s_out = specific.arcs.get(sn, {})
        for f, gc in sorted(general.arcs.get(gn, {}).items()):
            if f not in s_out:
                return False
            sc = s_out[f]
            if gc in mapping:
                if mapping[gc] != sc:
                    return False
            else:
                mapping[gc] = sc
                stack.append(gc)
    return True


# -- unification -------------------------------------------------------


def _merge(types, arcs, parent, seeds, hierarchy):
    """Destructive union-find merge over a combined node table.  seeds is
    a list of (node, node, path) tasks.  Raises UnificationFailure with
    the first clash in canonical (depth-first, sorted-feature) order."""

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    stack = list(reversed(seeds))
    while stack:
        x, y, path = stack.pop()
        rx, ry = find(x), find(y)
        if rx == ry:
            continue
        t = hierarchy.glb(types[rx], types[ry])
        if t is None:
            raise UnificationFailure(path, types[rx], types[ry])
        parent[ry] = rx
        types[rx] = t
        ax = arcs.setdefault(rx, {})
        ay = arcs.pop(ry, {})
        pending = []
        for f, cy in ay.items():
            if f in ax:
                pending.append((ax[f], cy, path + (f,)))
            else:
                ax[f] = cy
        for task in sorted(pending, key=lambda item: item[2], reverse=True):
            stack.append(task)
    return find


def _extract(types, arcs, find, root):
    """Copy the merged graph out of the union-find tables, running the
    occurs check (cycles are rejected as unification failures)."""
    out_types = {}
    out_arcs = {}
    on_stack = set()
    stack = [(find(root), (), None)]
    while stack:
        node, path, it = stack.pop()
        if it is None:
            if node in out_types and node not in on_stack:
                continue
            if node in on_stack:
                raise UnificationFailure(path, types[node], types[node], "cycle")
            on_stack.add(node)
            out_types[node] = types[node]
            out_arcs[node] = {}
            features = sorted(arcs.get(node, ()))
            stack.append((node, path, iter(features)))
        else:
            advanced = False
            for f in it:
                child = find(arcs[node][f])
                out_arcs[node][f] = child
                stack.append((node, path, it))
                if child in on_stack:
                    raise UnificationFailure(
                        path + (f,), types[child], types[child], "cycle"
                    )
                if child not in out_types:
                    stack.append((child, path + (f,), None))
                advanced = True
                break
            if not advanced:
                on_stack.discard(node)
    return FeatureStructure.build(out_types, out_arcs, find(root))


def _combined_tables(a, b):
    offset = len(a.types)
    types = dict(a.types)
    arcs = {n: dict(out) for n, out in a.arcs.items()}
    for n, t in b.types.items():
        types[n + offset] = t
    for n, out in b.arcs.items():
        arcs[n + offset] = {f: c + offset for f, c in out.items()}
    parent = {n: n for n in types}
    return types, arcs, parent, offset


def unify(a, b, hierarchy):
    """Most general structure subsumed by both a and b.

    Inputs are unchanged; raises UnificationFailure when a path forces a
    type clash or the result would be cyclic."""
    types, arcs, parent, offset = _combined_tables(a, b)
    find = _merge(types, arcs, parent, [(a.root, b.root + offset, ())], hierarchy)
    return _extract(types, arcs, find, a.root)


def unify_at(base, path, other, hierarchy):
    """Unify `other` into base's node at `path`, returning the whole
    updated base structure."""
    target = base.node_at(path)
    types, arcs, parent, offset = _combined_tables(base, other)
    find = _merge(
        types, arcs, parent, [(target, other.root + offset, tuple(path))], hierarchy
    )
    return _extract(types, arcs, find, base.root)


def unifiable(a, b, hierarchy):
    try:
        unify(a, b, hierarchy)
        return True
    except UnificationFailure:
        return False


# -- lists -------------------------------------------------------------


def list_append(xs, ys):
    """Concatenate two FIRST/REST lists into a fresh structure.

    Element subgraphs are carried over unchanged (shared, not copied);
    only the spine of xs is rebuilt.  xs must be *null*-terminated."""
    xs_elems = xs.list_elements()
    types, arcs, _, offset = _combined_tables(xs, ys)
    if not xs_elems:
        return FeatureStructure.build(types, arcs, xs.root + offset)
    next_id = len(types) + 1
    spine = [next_id + i for i in range(len(xs_elems))]
    for i, elem in enumerate(xs_elems):
        types[spine[i]] = CONS
        tail = spine[i + 1] if i + 1 < len(xs_elems) else xs.root + offset
        arcs[spine[i]] = {FIRST: elem, REST: tail}
    return FeatureStructure.build(types, arcs, spine[0])
