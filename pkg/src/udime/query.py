"""Twig queries against trees and against disjunction-free schemas.

Satisfiability and implication reduce to embedding the query in the
existential or universal dependency graph. Containment first searches the
characteristic graphs for a counterexample; when none turns up it is decided
exactly by a fixpoint over the finitely many ways a tree node can match the
nodes of both queries.
"""

from __future__ import annotations

import copy
import os
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Callable, Iterator

from .content import ContentModel, ime_content, ime_symbols, min_nb
from .graphs import (
    CharGraph,
    DepGraph,
    Flavor,
    LabeledGraph,
    embed,
    iter_embeddings,
    simulates,
    tree_graph,
    unfold,
)
from .dtd import dtd_symbols
from .model import WILDCARD, Axis, Schema, Tree, TwigQuery, Verdict

DEFAULT_CAP = 10**6


def default_cap() -> int:
    env = os.environ.get("UDIME_CAP")
    return int(env) if env else DEFAULT_CAP


class NotDisjunctionFree(ValueError):
    pass


@dataclass(frozen=True)
class QueryResult:
    """A verdict with its witness or counterexample tree when one applies."""

    verdict: Verdict
    tree: Tree | None = None
    method: str = ""
    graphs: int = 0

    def __bool__(self) -> bool:
        return bool(self.verdict)


@dataclass(frozen=True)
class EvalResult:
    holds: bool
    embedding: dict[int, int] | None = None

    def __bool__(self) -> bool:
        return self.holds


def eval_query(t: Tree, q: TwigQuery) -> EvalResult:
    lam = embed(q, tree_graph(t))
    return EvalResult(lam is not None, lam)


def tree_embeddings(t: Tree, q: TwigQuery) -> Iterator[dict[int, int]]:
    return iter_embeddings(q, tree_graph(t))


def dependency_graphs(s: Schema) -> tuple[DepGraph, DepGraph]:
    """Existential and universal dependency graphs of a disjunction-free schema."""
    ex, fa = set(), set()
    for a in s.alphabet:
        try:
            forall, exists = ime_symbols(s.rule(a))
        except ValueError as err:
            raise NotDisjunctionFree(str(err)) from None
        ex.update((a, b) for b in exists)
        fa.update((a, b) for b in forall)
    nodes = s.alphabet
    return (
        DepGraph(nodes, s.root, frozenset(ex), Flavor.EXISTENTIAL),
        DepGraph(nodes, s.root, frozenset(fa), Flavor.UNIVERSAL),
    )


class Unsatisfiable(ValueError):
    pass


class SchemaView:
    """A trimmed, disjunction-free schema seen through its content models."""

    def __init__(self, root: str, alphabet, contents: dict[str, ContentModel], valid: Callable[[Tree], bool]):
        self.root = root
        self.valid = valid
        productive: set[str] = set()
        changed = True
        while changed:
            changed = False
            for a in alphabet:
                if a not in productive and contents[a].restrict(productive).word_covering(()) is not None:
                    productive.add(a)
                    changed = True
        if root not in productive:
            raise Unsatisfiable(f"no finite tree is rooted at {root}")
        restricted = {a: contents[a].restrict(productive) for a in productive}
        reach = {root}
        todo = deque([root])
        while todo:
            a = todo.popleft()
            for b in sorted(restricted[a].possible()):
                if b not in reach:
                    reach.add(b)
                    todo.append(b)
        self.labels = tuple(sorted(reach))
        self.content = {a: restricted[a] for a in self.labels}
        self._minimal: dict[str, Tree] = {}
        ex, fa = set(), set()
        for a in self.labels:
            ex.update((a, b) for b in self.content[a].possible())
            fa.update((a, b) for b in self.content[a].minimal_word())
        self.g_exists = DepGraph(self.labels, root, frozenset(ex), Flavor.EXISTENTIAL)
        self.g_forall = DepGraph(self.labels, root, frozenset(fa), Flavor.UNIVERSAL)
        self.g_forall.as_labeled().check_acyclic()

    @classmethod
    def of(cls, s) -> "SchemaView":
        from .dtd import Dtd

        if isinstance(s, SchemaView):
            return s
        if isinstance(s, Dtd):
            return _dtd_view(s)
        return _ims_view(s)

    def min_nb(self, a: str, b: str) -> int:
        return self.content[a].minimal_word()[b]

    def minimal_tree(self, a: str) -> Tree:
        """The least valid tree rooted at ``a``: the padded universal unfolding."""
        if a not in self._minimal:
            w = self.content[a].minimal_word()
            kids = [self.minimal_tree(b) for b, n in w.items() for _ in range(n)]
            self._minimal[a] = Tree.build(a, *kids)
        return self._minimal[a]

    def repair(self, t: Tree) -> Tree:
        """Make ``t`` valid by fusing surplus siblings and duplicating or adding missing ones.

        Fusing same-label siblings and adding subtrees both keep every
        embedding of a query intact.
        """
        root = _to_mutable(t)

        def fix(node):
            label, kids = node
            groups: dict[str, list] = {}
            for k in kids:
                groups.setdefault(k[0], []).append(k)
            w = self.content[label].word_covering(set(groups))
            if w is None:
                raise ValueError(f"children {sorted(groups)} cannot occur together under {label}")
            new = []
            for b in sorted(set(w) | set(groups)):
                ks = groups.get(b, [])
                want = w[b]
                if len(ks) > want:
                    head, tail = ks[: want - 1], ks[want - 1:]
                    ks = head + [[b, [c for k in tail for c in k[1]]]]
                for k in ks:
                    fix(k)
                while len(ks) < want:
                    ks.append(copy.deepcopy(ks[0]) if ks else _to_mutable(self.minimal_tree(b)))
                new.extend(ks)
            node[1] = new

        fix(root)
        return Tree.from_nested(_freeze(root))


def _to_mutable(t: Tree, n: int = 0):
    return [t.labels[n], [_to_mutable(t, c) for c in t.children[n]]]


def _freeze(node):
    return (node[0], [_freeze(k) for k in node[1]])


@lru_cache(maxsize=256)
def _ims_view(s: Schema) -> SchemaView:
    from .validator import validate_tree

    contents = {}
    for a in s.alphabet:
        try:
            contents[a] = ime_content(s.rule(a))
        except ValueError as err:
            raise NotDisjunctionFree(f"rule for {a}: {err}") from None
    return SchemaView(s.root, s.alphabet, contents, lambda t: validate_tree(s, t).accepted)


@lru_cache(maxsize=256)
def _dtd_view(d) -> SchemaView:
    from .dtd import dtd_validate_unordered

    contents = {a: d.content(a) for a in d.alphabet}
    return SchemaView(d.root, d.alphabet, contents, lambda t: dtd_validate_unordered(d, t))


# Characteristic graphs


def acyclic_paths(g: LabeledGraph, a, b, limit: int) -> Iterator[tuple]:
    """Paths from ``a`` to ``b`` with at least one edge and no repeated vertex
    (except that the end may equal the start), shortest first."""
    for length in range(1, limit + 1):
        path = [a]

        def go(depth):
            v = path[-1]
            for u in sorted(g.succ.get(v, ()), key=g.key):
                if depth + 1 == length:
                    if u == b:
                        yield tuple(path) + (u,)
                elif u != b and u not in path:
                    path.append(u)
                    yield from go(depth + 1)
                    path.pop()

        yield from go(0)


def _assemble(q: TwigQuery, lam: dict, paths: dict, view: SchemaView) -> CharGraph:
    labels: list[str] = []
    edges: set[tuple[int, int]] = set()

    def new(a):
        labels.append(a)
        return len(labels) - 1

    vq = {}

    def place(n):
        vq[n] = new(lam[n])
        for c, _ in q.edges[n]:
            place(c)

    place(0)
    for n in range(len(q)):
        for c, axis in q.edges[n]:
            if axis is Axis.CHILD:
                edges.add((vq[n], vq[c]))
            else:
                prev = vq[n]
                for a in paths[(n, c)][1:-1]:
                    v = new(a)
                    edges.add((prev, v))
                    prev = v
                edges.add((prev, vq[c]))
    forall = view.g_forall
    for v in range(len(labels)):
        a = labels[v]
        below = sorted(forall.reachable_from(a))
        copies = {a: v}
        for b in below:
            copies[b] = new(b)
        for x, y in forall.edges:
            if x in copies and y in copies and y != a:
                edges.add((copies[x], copies[y]))
    return CharGraph(tuple(range(len(labels))), vq[0], tuple(labels), frozenset(edges), frozenset(vq.values()))


def enumerate_characteristic_graphs(q: TwigQuery, s) -> Iterator[CharGraph]:
    """Every characteristic graph of ``q``: one per embedding in the existential
    graph and choice of connecting path for each descendant edge."""
    view = SchemaView.of(s)
    ge = view.g_exists.as_labeled()
    desc = [(n, c) for n in range(len(q)) for c, ax in q.edges[n] if ax is Axis.DESCENDANT]
    for lam in iter_embeddings(q, ge):
        choices = [list(acyclic_paths(ge, lam[n], lam[c], len(view.labels))) for n, c in desc]
        for combo in product(*choices):
            yield _assemble(q, lam, dict(zip(desc, combo)), view)


def _view_or_none(s):
    try:
        return SchemaView.of(s)
    except Unsatisfiable:
        return None


def query_satisfiable(s, q: TwigQuery) -> QueryResult:
    """Whether some valid tree satisfies ``q``; a witness comes with a yes."""
    view = _view_or_none(s)
    if view is None or embed(q, view.g_exists.as_labeled()) is None:
        return QueryResult(Verdict.FALSE, method="existential-graph")
    n = 0
    for g in enumerate_characteristic_graphs(q, view):
        n += 1
        t = view.repair(unfold(g.as_labeled()))
        if view.valid(t) and eval_query(t, q):
            return QueryResult(Verdict.TRUE, t, "existential-graph", n)
    raise AssertionError("query embeds in the existential graph but no witness was built")


def query_implied(s, q: TwigQuery) -> QueryResult:
    """Whether every valid tree satisfies ``q``; a counterexample comes with a no."""
    view = _view_or_none(s)
    if view is None or embed(q, view.g_forall.as_labeled()) is not None:
        return QueryResult(Verdict.TRUE, method="universal-graph")
    t = view.minimal_tree(view.root)
    assert view.valid(t) and not eval_query(t, q), "padded universal unfolding is not a counterexample"
    return QueryResult(Verdict.FALSE, t, "universal-graph")


def query_contained(s, p: TwigQuery, q: TwigQuery, cap: int | None = None) -> QueryResult:
    """Whether every valid tree satisfying ``p`` also satisfies ``q``.

    A counterexample is always checked for validity and both queries before
    it is returned. When the work bound ``cap`` runs out before an answer the
    verdict is INDETERMINATE.
    """
    cap = default_cap() if cap is None else cap
    view = _view_or_none(s)
    if view is None or embed(p, view.g_exists.as_labeled()) is None:
        return QueryResult(Verdict.TRUE, method="vacuous")
    n = 0
    for g in enumerate_characteristic_graphs(p, view):
        n += 1
        if n > cap:
            break
        if embed(q, g.as_labeled()) is not None:
            continue
        t = view.repair(unfold(g.as_labeled()))
        if view.valid(t) and eval_query(t, p) and not eval_query(t, q):
            return QueryResult(Verdict.FALSE, t, "characteristic-graph", n)
    verdict, t = match_types(view, p, q, cap)
    if verdict is Verdict.FALSE:
        assert view.valid(t) and eval_query(t, p) and not eval_query(t, q)
    return QueryResult(verdict, t, "type-fixpoint", min(n, cap))


class _Budget(Exception):
    pass


def match_types(view: SchemaView, p: TwigQuery, q: TwigQuery | None, cap: int):
    """Decide whether some valid tree satisfies ``p`` but not ``q``.

    The type of a tree node records which query nodes match at it and which
    descendant-edge targets match somewhere below it. A parent's type only
    depends on the union of its children's types, so the achievable types
    form a least fixpoint, each with a recipe for a concrete tree.
    Returns ``(FALSE, tree)`` when such a tree exists, ``(TRUE, None)`` when
    it does not and ``(INDETERMINATE, None)`` when ``cap`` is exceeded.
    """
    qs = [p] + ([q] if q is not None else [])
    labels: list[str] = []
    edges: list[list[tuple[int, Axis]]] = []
    roots = []
    for x in qs:
        off = len(labels)
        roots.append(off)
        labels.extend(x.labels)
        edges.extend([(c + off, ax) for c, ax in e] for e in x.edges)
    child_t = sorted({c for e in edges for c, ax in e if ax is Axis.CHILD})
    desc_t = sorted({c for e in edges for c, ax in e if ax is Axis.DESCENDANT})
    cbit = {n: 1 << i for i, n in enumerate(child_t)}
    dbit = {n: 1 << (len(child_t) + i) for i, n in enumerate(desc_t)}
    dmask = sum(dbit.values())

    def evaluate(a: str, union: int):
        feat = union & dmask
        hits = []
        for n, lab in enumerate(labels):
            if lab != WILDCARD and lab != a:
                continue
            if all(union & (cbit[c] if ax is Axis.CHILD else dbit[c]) for c, ax in edges[n]):
                feat |= cbit.get(n, 0) | dbit.get(n, 0)
                hits.append(n)
        return feat, tuple(r in hits for r in roots)

    types: list[tuple[str, int, tuple, list]] = []
    seen: set = set()
    by_label: dict[str, dict[int, int]] = {a: {} for a in view.labels}
    work = [0]

    def spend(k=1):
        work[0] += k
        if work[0] > cap:
            raise _Budget()

    def unions(b):
        res: dict[int, tuple[int, list]] = {}
        for f, tid in by_label[b].items():
            nxt = dict(res)
            for F, (j, ids) in res.items():
                spend()
                G = F | f
                if G not in nxt or j + 1 < nxt[G][0]:
                    nxt[G] = (j + 1, ids + [tid])
            if f not in nxt or nxt[f][0] > 1:
                nxt[f] = (1, [tid])
            res = nxt
        return res

    try:
        changed = True
        while changed:
            changed = False
            for a in view.labels:
                cm = view.content[a]
                U = {b: unions(b) for b in cm.symbols if b in by_label}
                acc: dict[int, list] = {0: []}
                for g in cm.groups:
                    need = max([1] + [j for b in g.symbols for j, _ in U.get(b, {}).values()])
                    found: dict[int, tuple] = {}
                    for vec, real in g.capped(need).items():
                        opts = []
                        for i, b in enumerate(g.symbols):
                            if vec[i]:
                                opts.append([(b, F, ids) for F, (j, ids) in U.get(b, {}).items() if j <= vec[i]])
                        for pick in product(*opts):
                            spend()
                            F = 0
                            for _, f, _ in pick:
                                F |= f
                            if F not in found:
                                found[F] = (dict(zip(g.symbols, real)), {b: ids for b, _, ids in pick})
                    nxt: dict[int, list] = {}
                    for F1, r1 in acc.items():
                        for F2, r2 in found.items():
                            spend()
                            if F1 | F2 not in nxt:
                                nxt[F1 | F2] = r1 + [r2]
                    acc = nxt
                for F, recipe in acc.items():
                    feat, hit = evaluate(a, F)
                    key = (a, feat, hit)
                    if key in seen:
                        continue
                    seen.add(key)
                    types.append((a, feat, hit, recipe))
                    by_label[a].setdefault(feat, len(types) - 1)
                    changed = True
    except _Budget:
        return Verdict.INDETERMINATE, None

    built: dict[int, Tree] = {}

    def build(tid):
        if tid not in built:
            a, _, _, recipe = types[tid]
            kids = []
            for real, idmap in recipe:
                for b in sorted(idmap):
                    ids = idmap[b]
                    kids.extend(build(i) for i in ids)
                    kids.extend(build(ids[0]) for _ in range(real[b] - len(ids)))
            built[tid] = Tree.build(a, *kids)
        return built[tid]

    want = (True, False) if q is not None else (True,)
    for tid, (a, _, hit, _) in enumerate(types):
        if a == view.root and hit == want:
            return Verdict.FALSE, build(tid)
    return Verdict.TRUE, None


def embed_query_in_graph(q: TwigQuery, g: DepGraph) -> dict[int, str] | None:
    return embed(q, g.as_labeled())


def simulate_graph_in_tree(g: DepGraph, t: Tree) -> bool:
    return simulates(g.as_labeled(), t)


def unfold_graph(g: DepGraph) -> Tree:
    return unfold(g.as_labeled())


def dtd_dependency_graphs(d) -> tuple[DepGraph, DepGraph]:
    ex, fa = set(), set()
    for a in d.alphabet:
        forall, exists = dtd_symbols(d.rule(a))
        ex.update((a, b) for b in exists)
        fa.update((a, b) for b in forall)
    return (
        DepGraph(d.alphabet, d.root, frozenset(ex), Flavor.EXISTENTIAL),
        DepGraph(d.alphabet, d.root, frozenset(fa), Flavor.UNIVERSAL),
    )


# The DTD variants share the machinery: only the content models differ.
dtd_query_satisfiable = query_satisfiable
dtd_query_implied = query_implied
dtd_query_contained = query_contained


def graph_vertex_bound(q: TwigQuery, s) -> int:
    view = SchemaView.of(s)
    return len(q) * len(view.labels) ** 2


__all__ = [
    "EvalResult",
    "NotDisjunctionFree",
    "Unsatisfiable",
    "dtd_dependency_graphs",
    "dtd_query_contained",
    "dtd_query_implied",
    "dtd_query_satisfiable",
    "embed_query_in_graph",
    "simulate_graph_in_tree",
    "unfold_graph",
    "QueryResult",
    "SchemaView",
    "dependency_graphs",
    "enumerate_characteristic_graphs",
    "eval_query",
    "ime_symbols",
    "min_nb",
    "query_contained",
    "query_implied",
    "query_satisfiable",
    "tree_embeddings",
]
