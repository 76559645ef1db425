"""Schema satisfiability, trimming and containment."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .dime import (
    ClauseType,
    dime_contains_detail,
    build_word,
    reduce,
    typed_clauses,
)
from .model import (
    INF,
    ONE,
    PLUS,
    Atom,
    AtomWithInterval,
    ClauseWithInterval,
    DimeAst,
    Schema,
    Tree,
    UnorderedWord,
)


class UnsatisfiableSchema(ValueError):
    pass


@dataclass(frozen=True)
class ProductivityReport:
    productive: frozenset[str]
    reachable: frozenset[str]
    witness: dict[str, Tree] = field(default_factory=dict)
    words: dict[str, UnorderedWord] = field(default_factory=dict)

    __hash__ = None


def _avoid(s: Schema, a: str, productive) -> dict:
    return {b: (0, 0) for b in s.rule(a).symbols() if b not in productive}


def productivity(s: Schema) -> tuple[dict[str, int], dict[str, UnorderedWord]]:
    """Least witness size per productive symbol, with the children word achieving it.

    Sizes start unknown and only ever decrease, Bellman-Ford style, so the
    chosen words never form a cycle.
    """
    sizes: dict[str, int] = {}
    words: dict[str, UnorderedWord] = {}
    alphabet = s.alphabet
    changed = True
    while changed:
        changed = False
        for a in alphabet:
            w = build_word(reduce(s.rule(a)), _avoid(s, a, sizes), sizes)
            if w is None:
                continue
            size = 1 + sum(n * sizes[b] for b, n in w.items())
            if a not in sizes or size < sizes[a]:
                sizes[a] = size
                words[a] = w
                changed = True
    return sizes, words


def _witness_trees(words: dict[str, UnorderedWord]) -> dict[str, Tree]:
    out: dict[str, Tree] = {}

    def make(a):
        if a not in out:
            kids = [make(b) for b, n in words[a].items() for _ in range(n)]
            out[a] = Tree.build(a, *kids)
        return out[a]

    for a in sorted(words):
        make(a)
    return out


def satisfiable(s: Schema) -> tuple[bool, Tree | None]:
    sizes, words = productivity(s)
    if s.root not in sizes:
        return False, None
    return True, _witness_trees(words)[s.root]


def existential_successors(d: DimeAst) -> set[str]:
    return {a for a in d.symbols()}


def reachable(s: Schema) -> frozenset[str]:
    seen = {s.root}
    todo = deque([s.root])
    while todo:
        a = todo.popleft()
        for b in sorted(existential_successors(reduce(s.rule(a)))):
            if b not in seen:
                seen.add(b)
                todo.append(b)
    return frozenset(seen)


def restrict_rule(d: DimeAst, keep) -> DimeAst | None:
    """The rule restricted to words over ``keep``, or None if no such word exists."""
    clauses = []
    for t, atoms in typed_clauses(reduce(d)):
        kept = []
        for ai in atoms:
            if any(a not in keep for a in ai.atom.required()):
                continue
            syms = tuple((a, m) for a, m in ai.atom.symbols if a in keep)
            if syms:
                kept.append(AtomWithInterval(Atom(syms), ai.interval))
        if t is ClauseType.TYPE3:
            if kept:
                clauses.append(ClauseWithInterval(tuple(kept), ONE))
        elif not kept:
            return None
        elif t is ClauseType.TYPE1:
            clauses.append(ClauseWithInterval(tuple(kept), PLUS))
        else:
            clauses.append(ClauseWithInterval(tuple(kept), ONE))
    return reduce(DimeAst(tuple(clauses)))


def trim(s: Schema) -> tuple[Schema, ProductivityReport]:
    """Keep only symbols that are reachable and productive, rewriting rules accordingly."""
    sizes, words = productivity(s)
    if s.root not in sizes:
        raise UnsatisfiableSchema(f"no finite tree satisfies the schema rooted at {s.root}")
    productive = frozenset(sizes)
    rules = {}
    for a in productive:
        r = restrict_rule(s.rule(a), productive)
        assert r is not None
        rules[a] = r
    pruned = Schema(s.root, {a: r for a, r in rules.items() if r.clauses})
    reach = reachable(pruned)
    result = Schema(s.root, {a: r for a, r in pruned.rules.items() if a in reach})
    witness = _witness_trees(words)
    report = ProductivityReport(productive, reach, witness, dict(words))
    return result, report


@dataclass(frozen=True)
class SchemaContainment:
    holds: bool
    symbol: str | None = None
    reason: str | None = None
    word: UnorderedWord | None = None
    counterexample: Tree | None = None

    def __bool__(self) -> bool:
        return self.holds


def _path_to(s: Schema, target: str) -> list[str]:
    prev = {s.root: None}
    todo = deque([s.root])
    while todo:
        a = todo.popleft()
        if a == target:
            break
        for b in sorted(s.rule(a).symbols()):
            if b not in prev:
                prev[b] = a
                todo.append(b)
    path = [target]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def schema_contains(s1: Schema, s2: Schema) -> SchemaContainment:
    """Whether every tree valid for ``s1`` is valid for ``s2``.

    Only symbols that can occur in a valid tree of ``s1`` are compared. A
    failure carries the offending symbol, a children word and a full tree.
    """
    if s1.root != s2.root:
        return SchemaContainment(False, None, "RootMismatch")
    try:
        t1, report = trim(s1)
    except UnsatisfiableSchema:
        return SchemaContainment(True)
    for a in sorted(report.reachable):
        c = dime_contains_detail(s2.rule(a), t1.rule(a))
        if c.holds:
            continue
        tree = _counterexample_tree(t1, report, a, c.counterexample)
        return SchemaContainment(False, a, "RuleNotContained", c.counterexample, tree)
    return SchemaContainment(True)


def _counterexample_tree(s: Schema, report: ProductivityReport, a: str, w: UnorderedWord) -> Tree:
    sizes = {b: len(t) for b, t in report.witness.items()}

    def node(label, word, special=None):
        kids = []
        for b, n in word.items():
            for i in range(n):
                if special is not None and b == special[0] and i == 0:
                    kids.append(special[1])
                else:
                    kids.append(report.witness[b])
        return Tree.build(label, *kids)

    path = _path_to(s, a)
    current = node(a, w)
    for parent, child in zip(reversed(path[:-1]), reversed(path[1:])):
        word = build_word(reduce(s.rule(parent)), {child: (1, INF)}, sizes)
        current = node(parent, word, (child, current))
    return current
