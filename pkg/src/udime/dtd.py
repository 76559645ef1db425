"""Disjunction-free DTDs: ordered regular expressions read as unordered content.

Rule bodies use ``·`` or ``.`` for concatenation and the postfix operators
``?``, ``*`` and ``+``. Query analysis ignores sibling order, so a rule is
handled through the Parikh image of its language.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from typing import Mapping

from .content import ContentModel, Group
from .model import OPT, PLUS, STAR, Epsilon, Repeat, Symbol, Tree, Ure
from .syntax import ErrorKind, ParseError, _error


@dataclass(frozen=True)
class Concat(Ure):
    """Ordered concatenation."""

    items: tuple[Ure, ...]

    def symbols(self):
        return set().union(*(e.symbols() for e in self.items))


_DTOKEN_RE = re.compile(
    r"\s*(?:(?P<dot>[·.])|(?P<bar>\|)|(?P<lp>\()|(?P<rp>\))|(?P<post>[?*+])|(?P<name>[A-Za-z_][A-Za-z0-9_-]*))"
)


class _RegexParser:
    def __init__(self, text, base):
        self.text = text
        self.base = base
        self.pos = 0

    def fail(self, kind, msg, off):
        return _error(kind, msg, self.text, off, self.base)

    def peek(self):
        m = _DTOKEN_RE.match(self.text, self.pos)
        if not m or m.lastgroup is None:
            rest = self.text[self.pos:]
            if rest.strip():
                off = self.pos + len(rest) - len(rest.lstrip())
                raise self.fail(ErrorKind.UnexpectedToken, f"unexpected {self.text[off]!r}", off)
            return None, None, len(self.text)
        return m.lastgroup, m, m.start(m.lastgroup)

    def parse(self):
        e = self.concat()
        kind, _, off = self.peek()
        if kind == "bar":
            raise self.fail(ErrorKind.UnexpectedToken, "disjunction is not allowed in a disjunction-free DTD", off)
        if kind is not None:
            k = ErrorKind.UnbalancedParen if kind == "rp" else ErrorKind.UnexpectedToken
            raise self.fail(k, f"unexpected {self.text[off]!r}", off)
        return e

    def concat(self):
        items = [self.postfix()]
        while self.peek()[0] == "dot":
            self.pos = self.peek()[1].end()
            items.append(self.postfix())
        return items[0] if len(items) == 1 else Concat(tuple(items))

    def postfix(self):
        e = self.primary()
        while self.peek()[0] == "post":
            _, m, _ = self.peek()
            self.pos = m.end()
            e = Repeat(e, {"?": OPT, "*": STAR, "+": PLUS}[m.group("post")])
        return e

    def primary(self):
        kind, m, off = self.peek()
        if kind == "name":
            self.pos = m.end()
            return Epsilon() if m.group("name") == "eps" else Symbol(m.group("name"))
        if kind == "lp":
            self.pos = m.end()
            e = self.concat()
            k2, m2, off2 = self.peek()
            if k2 == "bar":
                raise self.fail(ErrorKind.UnexpectedToken, "disjunction is not allowed in a disjunction-free DTD", off2)
            if k2 != "rp":
                raise self.fail(ErrorKind.UnbalancedParen, "missing ')'", off if k2 is None else off2)
            self.pos = m2.end()
            return e
        if kind is None:
            raise self.fail(ErrorKind.UnexpectedToken, "unexpected end of expression", off)
        raise self.fail(ErrorKind.UnexpectedToken, f"unexpected {self.text[off]!r}", off)


def parse_regex(text: str, base=(0, 0)) -> Ure:
    if not text.strip():
        return Epsilon()
    return _RegexParser(text, base).parse()


def serialize_regex(e: Ure) -> str:
    if isinstance(e, Epsilon):
        return "eps"
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, Repeat):
        inner = serialize_regex(e.child)
        if not isinstance(e.child, (Symbol, Epsilon)):
            inner = f"({inner})"
        return inner + str(e.interval)
    if isinstance(e, Concat):
        return " · ".join(serialize_regex(x) for x in e.items)
    raise TypeError(e)


def dtd_symbols(e: Ure) -> tuple[frozenset[str], frozenset[str]]:
    """Symbols in every word, and symbols in some word, by structural recursion."""
    if isinstance(e, Epsilon):
        return frozenset(), frozenset()
    if isinstance(e, Symbol):
        return frozenset({e.name}), frozenset({e.name})
    if isinstance(e, Concat):
        parts = [dtd_symbols(x) for x in e.items]
        return frozenset().union(*(p[0] for p in parts)), frozenset().union(*(p[1] for p in parts))
    if isinstance(e, Repeat):
        fa, ex = dtd_symbols(e.child)
        if e.interval == PLUS:
            return fa, ex
        if e.interval in (STAR, OPT):
            return frozenset(), ex
    raise ValueError(f"not a disjunction-free regular expression: {e!r}")


def dtd_min_nb(e: Ure, a: str) -> int:
    """Least number of ``a`` in any word of ``e``."""
    if isinstance(e, Epsilon):
        return 0
    if isinstance(e, Symbol):
        return int(e.name == a)
    if isinstance(e, Concat):
        return sum(dtd_min_nb(x, a) for x in e.items)
    if isinstance(e, Repeat):
        return dtd_min_nb(e.child, a) if e.interval == PLUS else 0
    raise ValueError(f"not a disjunction-free regular expression: {e!r}")


class RegexGroup(Group):
    """Capped Parikh vectors of a regular expression over its own symbols."""

    def __init__(self, e: Ure):
        self.e = e
        self.symbols = tuple(sorted(e.symbols()))
        self._index = {a: i for i, a in enumerate(self.symbols)}
        self._cache: dict[int, dict] = {}

    def capped(self, cap: int) -> dict[tuple, tuple]:
        if cap not in self._cache:
            self._cache[cap] = self._go(self.e, cap)
        return self._cache[cap]

    def _plus(self, xs, ys, cap):
        out: dict = {}
        for v, rv in xs.items():
            for u, ru in ys.items():
                w = tuple(min(cap, a + b) for a, b in zip(v, u))
                r = tuple(a + b for a, b in zip(rv, ru))
                if w not in out or (sum(r), r) < (sum(out[w]), out[w]):
                    out[w] = r
        return out

    def _go(self, e, cap) -> dict:
        zero = (0,) * len(self.symbols)
        if isinstance(e, Epsilon):
            return {zero: zero}
        if isinstance(e, Symbol):
            v = list(zero)
            v[self._index[e.name]] = 1
            return {tuple(min(cap, x) for x in v): tuple(v)}
        if isinstance(e, Concat):
            acc = {zero: zero}
            for x in e.items:
                acc = self._plus(acc, self._go(x, cap), cap)
            return acc
        if isinstance(e, Repeat):
            body = self._go(e.child, cap)
            if e.interval == OPT:
                out = dict(body)
                out.setdefault(zero, zero)
                return out
            closure = {zero: zero}
            while True:
                nxt = self._plus(closure, body, cap)
                merged = dict(closure)
                for w, r in nxt.items():
                    if w not in merged or (sum(r), r) < (sum(merged[w]), merged[w]):
                        merged[w] = r
                if merged == closure:
                    break
                closure = merged
            if e.interval == STAR:
                return closure
            return self._plus(body, closure, cap)
        raise TypeError(e)


def _factors(e: Ure) -> list[Ure]:
    return list(e.items) if isinstance(e, Concat) else [e]


@lru_cache(maxsize=1024)
def regex_content(e: Ure) -> ContentModel:
    """Split top-level factors into groups that share no symbol."""
    factors = [f for f in _factors(e) if f.symbols()]
    groups: list[list[Ure]] = []
    for f in factors:
        merged = [g for g in groups if any(x.symbols() & f.symbols() for x in g)]
        for g in merged:
            groups.remove(g)
        groups.append([x for g in merged for x in g] + [f])
    return ContentModel([RegexGroup(g[0] if len(g) == 1 else Concat(tuple(g))) for g in groups])


@dataclass(frozen=True)
class Dtd:
    """A disjunction-free DTD; symbols without a rule have empty content."""

    root: str
    rules: Mapping[str, Ure] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "rules", dict(sorted(self.rules.items())))
        for a, r in self.rules.items():
            dtd_symbols(r)

    def __hash__(self) -> int:
        return hash((self.root, tuple(self.rules.items())))

    def rule(self, a: str) -> Ure:
        return self.rules.get(a, Epsilon())

    @property
    def alphabet(self) -> tuple[str, ...]:
        syms = {self.root} | set(self.rules)
        for r in self.rules.values():
            syms |= r.symbols()
        return tuple(sorted(syms))

    def content(self, a: str) -> ContentModel:
        return regex_content(self.rule(a))

    def __str__(self) -> str:
        lines = [f"root: {self.root}"]
        lines += [f"{a} -> {serialize_regex(r)}" for a, r in self.rules.items()]
        return "\n".join(lines) + "\n"


def dtd_validate_unordered(d: Dtd, t: Tree) -> bool:
    """Whether some reordering of every node's children fits its rule."""
    if t.labels[0] != d.root:
        return False
    return all(d.content(t.labels[n]).contains(t.child_word(n)) for n in range(len(t)))


# Ordered-word brute force


def _regex_pattern(e: Ure, code: dict[str, str]) -> str:
    if isinstance(e, Epsilon):
        return ""
    if isinstance(e, Symbol):
        return re.escape(code[e.name])
    if isinstance(e, Concat):
        return "".join(f"(?:{_regex_pattern(x, code)})" for x in e.items)
    if isinstance(e, Repeat):
        return f"(?:{_regex_pattern(e.child, code)}){e.interval}"
    raise TypeError(e)


def _coder(symbols):
    return {a: chr(0x4E00 + i) for i, a in enumerate(sorted(symbols))}


def ordered_member(word: list[str], e: Ure) -> bool:
    """Ordered membership via the standard ``re`` engine."""
    syms = e.symbols() | set(word)
    code = _coder(syms)
    return re.fullmatch(_regex_pattern(e, code), "".join(code[a] for a in word)) is not None


def ordered_words(e: Ure, max_len: int) -> list[tuple[str, ...]]:
    """All ordered words of ``e`` up to ``max_len`` symbols, found by exhaustive matching."""
    syms = sorted(e.symbols())
    code = _coder(syms)
    pat = re.compile(_regex_pattern(e, code))
    out = []
    frontier = [()]
    for _ in range(max_len + 1):
        nxt = []
        for w in frontier:
            if pat.fullmatch("".join(code[a] for a in w)):
                out.append(w)
            nxt.extend(w + (a,) for a in syms)
        frontier = nxt
    return out


def ordered_validate(d: Dtd, t: Tree) -> bool:
    """Unordered validity decided by trying sibling orders against ``re``."""
    if t.labels[0] != d.root:
        return False
    for n in range(len(t)):
        kids = [t.labels[c] for c in t.children[n]]
        rule = d.rule(t.labels[n])
        if not any(ordered_member(list(p), rule) for p in set(permutations(kids))):
            return False
    return True
