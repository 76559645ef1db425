"""Disjunction-free content models viewed through capped Parikh vectors.

A content model splits into groups over disjoint symbol sets whose counts
vary independently. Each group can list its count vectors with every entry
capped at some ``C``, together with a smallest real vector per capped one.
That is enough to answer "is there a children word with exactly this
support and at least these counts", which query analysis asks repeatedly.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Mapping

from .dime import reduce, tuple_of
from .model import AtomWithInterval, DimeAst, Interval, UnorderedWord


class Group:
    symbols: tuple[str, ...]

    def capped(self, cap: int) -> dict[tuple, tuple]:
        """Map each reachable capped count vector to a least real vector."""
        raise NotImplementedError


class AtomGroup(Group):
    """One atom with interval: required symbols count k, optional ones 0..k."""

    def __init__(self, ai: AtomWithInterval):
        self.ai = ai
        self.symbols = tuple(sorted(ai.atom.names()))
        self._cache: dict[int, dict] = {}

    def capped(self, cap: int) -> dict[tuple, tuple]:
        if cap in self._cache:
            return self._cache[cap]
        iv = self.ai.interval
        req = set(self.ai.atom.required())
        out: dict[tuple, tuple] = {}

        def add(vec, real):
            if vec not in out or sum(real) < sum(out[vec]):
                out[vec] = real

        if 0 in iv:
            add((0,) * len(self.symbols), (0,) * len(self.symbols))
        ks = []
        first = max(1, iv.lo)
        for k in range(first, int(min(iv.hi, cap)) + 1):
            ks.append((k, k))
        if iv.hi >= cap:
            ks.append((cap, max(cap, first)))
        for kk, real_k in ks:
            vecs = [()]
            for a in self.symbols:
                if a in req:
                    vecs = [v + (kk,) for v in vecs]
                else:
                    vecs = [v + (i,) for v in vecs for i in range(kk + 1)]
            for v in vecs:
                real = tuple(real_k if a in req else v[i] for i, a in enumerate(self.symbols))
                add(v, real)
        self._cache[cap] = out
        return out


class _RestrictedGroup(Group):
    def __init__(self, inner: Group, keep):
        self.inner = inner
        self.symbols = inner.symbols
        self._drop = [i for i, a in enumerate(inner.symbols) if a not in keep]

    def capped(self, cap: int) -> dict[tuple, tuple]:
        return {v: r for v, r in self.inner.capped(cap).items() if not any(v[i] for i in self._drop)}


class ContentModel:
    """The children languages of one label, as independent groups."""

    def __init__(self, groups: list[Group]):
        self.groups = groups
        self.symbols = tuple(sorted(a for g in groups for a in g.symbols))
        self._owner = {a: i for i, g in enumerate(groups) for a in g.symbols}

    def word_exact(self, lows: Mapping[str, int]) -> UnorderedWord | None:
        """A least word whose support is exactly ``lows`` with counts at least ``lows``."""
        if any(a not in self._owner for a in lows):
            return None
        cap = max([1] + list(lows.values()))
        total: dict[str, int] = {}
        for g in self.groups:
            best = None
            for vec, real in g.capped(cap).items():
                ok = all((vec[i] > 0) == (a in lows) and vec[i] >= lows.get(a, 0) for i, a in enumerate(g.symbols))
                if ok and (best is None or (sum(real), real) < (sum(best), best)):
                    best = real
            if best is None:
                return None
            total.update((a, n) for a, n in zip(g.symbols, best) if n)
        return UnorderedWord(total)

    def word_covering(self, present) -> UnorderedWord | None:
        """A least word whose support includes ``present``."""
        if any(a not in self._owner for a in present):
            return None
        total: dict[str, int] = {}
        for g in self.groups:
            best = None
            for vec, real in g.capped(1).items():
                if all(vec[i] > 0 for i, a in enumerate(g.symbols) if a in present):
                    if best is None or (sum(real), real) < (sum(best), best):
                        best = real
            if best is None:
                return None
            total.update((a, n) for a, n in zip(g.symbols, best) if n)
        return UnorderedWord(total)

    def contains(self, w: UnorderedWord) -> bool:
        if any(a not in self._owner for a in w):
            return False
        cap = max([0] + list(w.values())) + 1
        for g in self.groups:
            vec = tuple(w[a] for a in g.symbols)
            if vec not in g.capped(cap):
                return False
        return True

    def restrict(self, keep) -> "ContentModel":
        """The same model limited to words over ``keep``."""
        return ContentModel([_RestrictedGroup(g, keep) for g in self.groups])

    def possible(self) -> frozenset[str]:
        """Symbols occurring in at least one word."""
        out = set()
        for g in self.groups:
            for v in g.capped(1):
                out.update(a for a, n in zip(g.symbols, v) if n)
        return frozenset(out)

    def minimal_word(self) -> UnorderedWord:
        w = self.word_covering(())
        assert w is not None
        return w


@lru_cache(maxsize=1024)
def ime_content(d: DimeAst) -> ContentModel:
    r = reduce(d)
    if not r.disjunction_free:
        raise ValueError(f"{d} uses disjunction")
    groups = []
    for c in r.clauses:
        ai = c.atoms[0]
        if c.interval != Interval(1, 1):
            ai = AtomWithInterval(ai.atom, c.interval)
        groups.append(AtomGroup(ai))
    return ContentModel(groups)


def ime_symbols(d: DimeAst) -> tuple[frozenset[str], frozenset[str]]:
    """Symbols present in every word, and symbols present in some word."""
    if not reduce(d).disjunction_free:
        raise ValueError(f"{d} is not disjunction-free")
    t = tuple_of(d)
    forall = frozenset(a for a, iv in t.card_map.items() if 0 not in iv)
    exists = frozenset(a for a, iv in t.card_map.items() if iv.max >= 1)
    return forall, exists


def min_nb(d: DimeAst, a: str) -> int:
    return tuple_of(d).card(a).min

