"""Brute-force ground truth: derivation search, bounded enumeration, naive query analysis.

Nothing here uses characterizing tuples or dependency graphs, so these
functions can referee the fast procedures.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache

from .model import (
    INF,
    Axis,
    DimeAst,
    Disjunction,
    Epsilon,
    Repeat,
    Schema,
    Symbol,
    Tree,
    TwigQuery,
    UnorderedConcat,
    UnorderedWord,
    Ure,
    WILDCARD,
)


@dataclass(frozen=True)
class EnumBudget:
    max_word_size: int = 6
    max_tree_nodes: int = 8
    max_alphabet: int = 4
    max_trees: int = 200_000

    def __post_init__(self):
        if min(self.max_word_size, self.max_tree_nodes, self.max_alphabet, self.max_trees) <= 0:
            raise ValueError("budget entries must be positive")


class Bounded(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class BoundedResult:
    verdict: Bounded
    tree: Tree | None = None
    examined: int = 0


# Membership by derivation search


def _as_ure(e) -> Ure:
    return e.to_ure() if isinstance(e, DimeAst) else e


def _derive(e: Ure, index: dict[str, int], fits, cap: int) -> frozenset[tuple]:
    """All count vectors derivable from ``e`` that satisfy ``fits``."""
    zero = (0,) * len(index)
    memo: dict[int, frozenset] = {}

    def plus(us, vs):
        out = set()
        for u in us:
            for v in vs:
                s = tuple(x + y for x, y in zip(u, v))
                if fits(s):
                    out.add(s)
        return out

    def go(node) -> frozenset:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Epsilon):
            res = {zero}
        elif isinstance(node, Symbol):
            if node.name not in index:
                res = set()
            else:
                v = list(zero)
                v[index[node.name]] = 1
                v = tuple(v)
                res = {v} if fits(v) else set()
        elif isinstance(node, Disjunction):
            res = set().union(*(go(x) for x in node.items))
        elif isinstance(node, UnorderedConcat):
            res = {zero}
            for x in node.items:
                res = plus(res, go(x))
                if not res:
                    break
        elif isinstance(node, Repeat):
            body = go(node.child)
            iv = node.interval
            level = {zero}
            res = {zero} if 0 in iv else set()
            limit = cap + iv.lo
            i = 0
            while i < limit and level and i < iv.hi:
                i += 1
                nxt = plus(level, body)
                if i in iv:
                    res |= nxt
                if nxt == level and i >= iv.lo:
                    break
                level = nxt
        else:
            raise TypeError(node)
        res = frozenset(res)
        memo[key] = res
        return res

    return go(e)


def ure_membership_bruteforce(w: UnorderedWord, e) -> bool:
    """Exact membership by computing every derivable sub-multiset of ``w``."""
    e = _as_ure(e)
    syms = sorted(set(w) | e.symbols())
    if any(a not in e.symbols() for a in w):
        return False
    index = {a: i for i, a in enumerate(syms)}
    target = tuple(w[a] for a in syms)
    fits = lambda v: all(x <= y for x, y in zip(v, target))  # noqa: E731
    return target in _derive(e, index, fits, w.size)


def language_upto(e, max_size: int, alphabet=None) -> frozenset[UnorderedWord]:
    """Every word of the language with at most ``max_size`` symbols."""
    e = _as_ure(e)
    syms = sorted(set(alphabet or ()) | e.symbols())
    index = {a: i for i, a in enumerate(syms)}
    fits = lambda v: sum(v) <= max_size  # noqa: E731
    vecs = _derive(e, index, fits, max_size)
    return frozenset(UnorderedWord(dict(zip(syms, v))) for v in vecs)


def enumerate_words(alphabet, max_size: int) -> list[UnorderedWord]:
    """All words over ``alphabet`` of size at most ``max_size``, sorted by count vector."""
    syms = sorted(alphabet)
    out = []

    def go(i, left, acc):
        if i == len(syms):
            out.append(tuple(acc))
            return
        for n in range(left + 1):
            acc.append(n)
            go(i + 1, left - n, acc)
            acc.pop()

    go(0, max_size, [])
    out.sort()
    return [UnorderedWord(dict(zip(syms, v))) for v in out]


def containment_bound(e1: DimeAst, e2: DimeAst) -> int:
    syms = e1.symbols() | e2.symbols()
    ends = [0]
    for d in (e1, e2):
        for iv in d.intervals():
            ends.extend(iv.finite_endpoints())
        if d.names():
            ends.append(1)
    return len(syms) * (max(ends) + 2)


def naive_contains(sup: DimeAst, sub: DimeAst, bound: int | None = None):
    """Bounded sweep: (True, None) or (False, smallest counterexample found)."""
    if bound is None:
        bound = containment_bound(sup, sub)
    alphabet = sup.symbols() | sub.symbols()
    small = language_upto(sub, bound, alphabet)
    big = language_upto(sup, bound, alphabet)
    extra = sorted(small - big, key=lambda w: (w.size, str(w)))
    return (not extra, extra[0] if extra else None)


def required_minimal_sets(e: DimeAst, bound: int | None = None) -> set[frozenset[str]]:
    """The inclusion-minimal sets of symbols that every word meets (bounded)."""
    if bound is None:
        bound = containment_bound(e, e)
    syms = sorted(e.symbols())
    words = language_upto(e, bound, syms)
    req = []
    for r in range(1, len(syms) + 1):
        for x in itertools.combinations(syms, r):
            xs = frozenset(x)
            if any(xs >= y for y in req):
                continue
            if all(any(w[a] for a in xs) for w in words):
                req.append(xs)
    return set(req)


# Trees


def _canon_tree(c) -> Tree:
    return Tree.from_nested((c[0], list(c[1])))


def _canon_to_nested(c):
    return (c[0], [_canon_to_nested(k) for k in c[1]])


def _size(c) -> int:
    return 1 + sum(_size(k) for k in c[1])


def enumerate_trees(alphabet, max_nodes: int) -> list[Tree]:
    """All unordered trees with at most ``max_nodes`` nodes, one per isomorphism class."""
    syms = sorted(alphabet)

    @lru_cache(maxsize=None)
    def exact(n: int) -> tuple:
        if n <= 0:
            return ()
        out = []
        for forest in forests(n - 1, None):
            for a in syms:
                out.append((a, forest))
        return tuple(sorted(out))

    @lru_cache(maxsize=None)
    def forests(n: int, floor) -> tuple:
        # non-decreasing sequences of canonical trees with sizes summing to n
        if n == 0:
            return ((),)
        out = []
        for k in range(1, n + 1):
            for t in exact(k):
                if floor is not None and t < floor:
                    continue
                for rest in forests(n - k, t):
                    out.append((t,) + rest)
        return tuple(out)

    trees = []
    for n in range(1, max_nodes + 1):
        trees.extend(exact(n))
    return [Tree.from_nested(_canon_to_nested(c)) for c in trees]


class _TreeCap(Exception):
    pass


def iter_valid_trees(s: Schema, max_nodes: int, max_trees: int | None = None, member=None):
    """Every tree of L(s) with at most ``max_nodes`` nodes, up to isomorphism.

    Children words are checked by derivation search, so the result equals
    filtering :func:`enumerate_trees` with :func:`naive_validate`.
    """
    member = member or (lambda w, a: ure_membership_bruteforce(w, s.rule(a)))
    @lru_cache(maxsize=None)
    def words(a: str, n: int) -> tuple:
        cand = enumerate_words(s.rule(a).symbols(), n) if s.rule(a).symbols() else [UnorderedWord()]
        return tuple(w for w in cand if w.size <= n and member(w, a))

    @lru_cache(maxsize=None)
    def upto(a: str, n: int) -> tuple:
        # canonical trees rooted at a of size <= n
        if n <= 0:
            return ()
        out = []
        for w in words(a, n - 1):
            labels = sorted(w)
            for forest in _forests(labels, [w[b] for b in labels], n - 1):
                out.append((a, tuple(sorted(forest))))
        return tuple(sorted(set(out)))

    def _forests(labels, counts, budget):
        if not labels:
            yield ()
            return
        b, k = labels[0], counts[0]
        pool = upto(b, budget - (sum(counts) - 1))
        for combo in itertools.combinations_with_replacement(pool, k):
            used = sum(_size(c) for c in combo)
            if used > budget:
                continue
            for rest in _forests(labels[1:], counts[1:], budget - used):
                yield combo + rest

    count = 0
    for c in sorted(upto(s.root, max_nodes), key=lambda c: (_size(c), c)):
        count += 1
        if max_trees is not None and count > max_trees:
            raise _TreeCap()
        yield Tree.from_nested(_canon_to_nested(c))


def naive_validate(s: Schema, t: Tree) -> bool:
    if t.labels[0] != s.root:
        return False
    return all(ure_membership_bruteforce(t.child_word(n), s.rule(t.labels[n])) for n in range(len(t)))


def naive_eval(t: Tree, q: TwigQuery) -> bool:
    """Query evaluation by plain backtracking over node assignments."""

    def below(n):
        for c in t.children[n]:
            yield c
            yield from below(c)

    def fits(qn, tn) -> bool:
        lab = q.labels[qn]
        if lab != WILDCARD and lab != t.labels[tn]:
            return False
        for qc, axis in q.edges[qn]:
            pool = t.children[tn] if axis is Axis.CHILD else list(below(tn))
            if not any(fits(qc, tc) for tc in pool):
                return False
        return True

    return fits(0, 0)


def _sweep(s, budget, test, want):
    examined = 0
    try:
        for t in iter_valid_trees(s, budget.max_tree_nodes, budget.max_trees):
            examined += 1
            if test(t):
                return BoundedResult(want, t, examined)
    except _TreeCap:
        return BoundedResult(Bounded.EXHAUSTED, None, examined)
    other = Bounded.FALSE if want is Bounded.TRUE else Bounded.TRUE
    return BoundedResult(other, None, examined)


def naive_query_sat(s: Schema, q: TwigQuery, budget: EnumBudget = EnumBudget()) -> BoundedResult:
    return _sweep(s, budget, lambda t: naive_eval(t, q), Bounded.TRUE)


def naive_query_impl(s: Schema, q: TwigQuery, budget: EnumBudget = EnumBudget()) -> BoundedResult:
    return _sweep(s, budget, lambda t: not naive_eval(t, q), Bounded.FALSE)


def naive_query_contained(
    s: Schema, p: TwigQuery, q: TwigQuery, budget: EnumBudget = EnumBudget()
) -> BoundedResult:
    return _sweep(s, budget, lambda t: naive_eval(t, p) and not naive_eval(t, q), Bounded.FALSE)


def naive_schema_sat(s: Schema, budget: EnumBudget = EnumBudget()) -> BoundedResult:
    return _sweep(s, budget, lambda t: True, Bounded.TRUE)
