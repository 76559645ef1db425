"""Rooted labelled graphs: query embedding, simulation in trees, unfolding."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterator, Mapping

from .model import WILDCARD, Axis, Tree, TwigQuery


class CycleError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledGraph:
    """Vertices with labels and ordered successor lists; ``order`` breaks ties."""

    root: Hashable
    labels: Mapping[Hashable, str]
    succ: Mapping[Hashable, tuple]

    __hash__ = None

    def key(self, v):
        return (self.labels[v], str(v)) if not isinstance(v, int) else (self.labels[v], v)

    def reachable(self, v) -> list:
        """Vertices reachable from ``v`` by one or more edges."""
        seen = set()
        out = []
        todo = deque(self.succ.get(v, ()))
        while todo:
            u = todo.popleft()
            if u in seen:
                continue
            seen.add(u)
            out.append(u)
            todo.extend(self.succ.get(u, ()))
        return out

    def predecessors(self) -> dict:
        pred: dict = {v: [] for v in self.labels}
        for v, kids in self.succ.items():
            for u in kids:
                pred.setdefault(u, []).append(v)
        return pred

    def check_acyclic(self) -> None:
        state: dict = {}
        stack = [(self.root, iter(self.succ.get(self.root, ())))]
        state[self.root] = 1
        while stack:
            v, it = stack[-1]
            u = next(it, None)
            if u is None:
                state[v] = 2
                stack.pop()
            elif state.get(u) == 1:
                raise CycleError(f"cycle through {self.labels[u]} reachable from the root")
            elif u not in state:
                state[u] = 1
                stack.append((u, iter(self.succ.get(u, ()))))


def tree_graph(t: Tree) -> LabeledGraph:
    return LabeledGraph(0, dict(enumerate(t.labels)), dict(enumerate(t.children)))


def _matches(lab: str, sym: str) -> bool:
    return lab == WILDCARD or lab == sym


def candidates(q: TwigQuery, g: LabeledGraph) -> list[set]:
    """For each query node, the vertices at which its subquery embeds."""
    cand: list[set] = [set() for _ in q.labels]
    pred = None
    for n in q.postorder():
        ok = {v for v in g.labels if _matches(q.labels[n], g.labels[v])}
        for c, axis in q.edges[n]:
            if axis is Axis.CHILD:
                ok = {v for v in ok if any(u in cand[c] for u in g.succ.get(v, ()))}
            else:
                if pred is None:
                    pred = g.predecessors()
                above = set()
                todo = deque(cand[c])
                while todo:
                    u = todo.popleft()
                    for v in pred.get(u, ()):
                        if v not in above:
                            above.add(v)
                            todo.append(v)
                ok &= above
        cand[n] = ok
    return cand


def embed(q: TwigQuery, g: LabeledGraph) -> dict[int, Hashable] | None:
    """One embedding of ``q`` in ``g`` (least vertices first), or None."""
    cand = candidates(q, g)
    if g.root not in cand[0]:
        return None
    lam = {0: g.root}

    def place(n):
        v = lam[n]
        for c, axis in q.edges[n]:
            pool = g.succ.get(v, ()) if axis is Axis.CHILD else g.reachable(v)
            lam[c] = min((u for u in pool if u in cand[c]), key=g.key)
            place(c)

    place(0)
    return lam


def iter_embeddings(q: TwigQuery, g: LabeledGraph) -> Iterator[dict[int, Hashable]]:
    """Every embedding, in lexicographic order of per-node choices."""
    cand = candidates(q, g)
    if g.root not in cand[0]:
        return
    order = []

    def pre(n):
        order.append(n)
        for c, _ in q.edges[n]:
            pre(c)

    pre(0)
    parent = {c: (n, axis) for n in range(len(q.labels)) for c, axis in q.edges[n]}
    reach_cache: dict = {}

    def pool(v, axis):
        if axis is Axis.CHILD:
            return g.succ.get(v, ())
        if v not in reach_cache:
            reach_cache[v] = g.reachable(v)
        return reach_cache[v]

    lam = {0: g.root}

    def go(i):
        if i == len(order):
            yield dict(lam)
            return
        n = order[i]
        par, axis = parent[n]
        for u in sorted((u for u in pool(lam[par], axis) if u in cand[n]), key=g.key):
            lam[n] = u
            yield from go(i + 1)
        del lam[n]

    yield from go(1)


def simulates(g: LabeledGraph, t: Tree) -> bool:
    """Whether a simulation of ``g`` in ``t`` relates the two roots."""
    g.check_acyclic()
    verts = [g.root] + g.reachable(g.root)
    rel = {v: {n for n in range(len(t)) if t.labels[n] == g.labels[v]} for v in verts}
    changed = True
    while changed:
        changed = False
        for v in verts:
            keep = {
                n for n in rel[v]
                if all(any(c in rel[u] for c in t.children[n]) for u in g.succ.get(v, ()))
            }
            if keep != rel[v]:
                rel[v] = keep
                changed = True
    return 0 in rel[g.root]


def unfold(g: LabeledGraph, v=None) -> Tree:
    """The tree of all paths from the root, siblings sorted by label."""
    if v is None:
        g.check_acyclic()
        v = g.root
    kids = sorted(g.succ.get(v, ()), key=g.key)
    return Tree.build(g.labels[v], *(unfold(g, u) for u in kids))


def tree_embeds(small: Tree, big: Tree) -> bool:
    """Whether ``small`` maps into ``big`` preserving root, labels and child edges."""
    q = TwigQuery(small.labels, tuple(tuple((c, Axis.CHILD) for c in kids) for kids in small.children))
    return embed(q, tree_graph(big)) is not None


class Flavor(enum.Enum):
    EXISTENTIAL = "existential"
    UNIVERSAL = "universal"


@dataclass(frozen=True)
class DepGraph:
    """A graph over alphabet symbols rooted at the schema root."""

    nodes: tuple[str, ...]
    root: str
    edges: frozenset[tuple[str, str]]
    flavor: Flavor = Flavor.EXISTENTIAL

    def succ(self, a: str) -> tuple[str, ...]:
        return tuple(sorted(b for x, b in self.edges if x == a))

    def as_labeled(self) -> LabeledGraph:
        succ = {a: self.succ(a) for a in self.nodes}
        return LabeledGraph(self.root, {a: a for a in self.nodes}, succ)

    def reachable_from(self, a: str) -> set[str]:
        return set(self.as_labeled().reachable(a))

    def __str__(self) -> str:
        return " ".join(f"{a}->{b}" for a, b in sorted(self.edges))


@dataclass(frozen=True)
class CharGraph:
    vertices: tuple[int, ...]
    root: int
    labels: tuple[str, ...]
    edges: frozenset[tuple[int, int]]
    marked: frozenset[int]

    def as_labeled(self) -> LabeledGraph:
        succ: dict[int, list[int]] = {v: [] for v in self.vertices}
        for x, y in sorted(self.edges):
            succ[x].append(y)
        return LabeledGraph(self.root, dict(enumerate(self.labels)), {v: tuple(k) for v, k in succ.items()})

    def __len__(self) -> int:
        return len(self.vertices)
