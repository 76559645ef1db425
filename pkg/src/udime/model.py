"""Domain types: unordered words, intervals, expression trees, trees, queries, schemas."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

INF = math.inf
WILDCARD = "*"


def _fmt_bound(n) -> str:
    return "inf" if n == INF else str(int(n))


@dataclass(frozen=True)
class Interval:
    """A multiplicity ``[lo, hi]``, or ``[lo, hi]?`` when ``optional`` is set.

    Values are kept canonical: an optional interval whose lower bound is at
    most one collapses to the plain interval ``[0, hi]``.
    """

    lo: int
    hi: float
    optional: bool = False

    def __post_init__(self):
        if self.lo < 0 or self.lo == INF:
            raise ValueError(f"bad lower bound {self.lo}")
        if self.hi != INF and self.hi != int(self.hi):
            raise ValueError(f"bad upper bound {self.hi}")
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo},{self.hi}]")
        if self.optional and self.lo <= 1:
            object.__setattr__(self, "lo", 0)
            object.__setattr__(self, "optional", False)
        if self.hi != INF:
            object.__setattr__(self, "hi", int(self.hi))

    def __contains__(self, i: int) -> bool:
        return (self.lo <= i <= self.hi) or (self.optional and i == 0)

    @property
    def min(self) -> int:
        return 0 if self.optional else self.lo

    @property
    def max(self):
        return self.hi

    @property
    def nullable(self) -> bool:
        return 0 in self

    def opt(self) -> "Interval":
        """The same interval with zero admitted."""
        return Interval(self.lo, self.hi, True)

    def values(self, limit: int) -> Iterator[int]:
        """Members of the interval not above ``limit``, ascending."""
        if self.optional:
            yield 0
        hi = limit if self.hi == INF else min(limit, self.hi)
        yield from range(self.lo, hi + 1)

    def finite_endpoints(self) -> list[int]:
        return [self.lo] + ([] if self.hi == INF else [self.hi])

    def __str__(self) -> str:
        macro = {(0, INF): "*", (1, INF): "+", (0, 1): "?", (1, 1): "1"}
        if not self.optional and (self.lo, self.hi) in macro:
            return macro[(self.lo, self.hi)]
        s = f"[{self.lo},{_fmt_bound(self.hi)}]"
        return s + "?" if self.optional else s

    def __repr__(self) -> str:
        return f"Interval({self})"


ONE = Interval(1, 1)
OPT = Interval(0, 1)
STAR = Interval(0, INF)
PLUS = Interval(1, INF)
ZERO = Interval(0, 0)


def interval_contains(outer: Interval, inner: Interval) -> bool:
    """True iff every natural in ``inner`` also lies in ``outer``."""
    if inner.optional and 0 not in outer:
        return False
    lo, hi = inner.lo, inner.hi
    if lo == 0:
        if 0 not in outer:
            return False
        if hi == 0:
            return True
        lo = 1
    return outer.lo <= lo and hi <= outer.hi


class UnorderedWord(Mapping):
    """A finite multiset of symbols. Absent symbols have count zero."""

    __slots__ = ("_counts", "_hash")

    def __init__(self, counts: Mapping[str, int] | Iterable[str] = ()):
        if isinstance(counts, Mapping):
            items = counts.items()
        else:
            acc: dict[str, int] = {}
            for a in counts:
                acc[a] = acc.get(a, 0) + 1
            items = acc.items()
        clean = {}
        for a, n in items:
            if n < 0:
                raise ValueError(f"negative count for {a}")
            if n:
                clean[a] = int(n)
        self._counts = dict(sorted(clean.items()))
        self._hash = None

    @classmethod
    def parse(cls, text: str) -> "UnorderedWord":
        """Read the ``a:2,b:1`` literal; a bare symbol counts once."""
        text = text.strip()
        if text in ("", "eps"):
            return cls()
        acc: dict[str, int] = {}
        for part in text.split(","):
            part = part.strip()
            name, _, num = part.partition(":")
            name = name.strip()
            if not name:
                raise ValueError(f"bad word literal {text!r}")
            acc[name] = acc.get(name, 0) + (int(num) if num else 1)
        return cls(acc)

    def __getitem__(self, a: str) -> int:
        return self._counts.get(a, 0)

    def __iter__(self):
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def __contains__(self, a) -> bool:
        return a in self._counts

    def __eq__(self, other) -> bool:
        if isinstance(other, UnorderedWord):
            return self._counts == other._counts
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._counts.items()))
        return self._hash

    def __add__(self, other: "UnorderedWord") -> "UnorderedWord":
        return word_union(self, other)

    def __mul__(self, i: int) -> "UnorderedWord":
        return UnorderedWord({a: n * i for a, n in self._counts.items()})

    @property
    def size(self) -> int:
        return sum(self._counts.values())

    def support(self) -> frozenset[str]:
        return frozenset(self._counts)

    def __str__(self) -> str:
        if not self._counts:
            return "eps"
        return ",".join(f"{a}:{n}" for a, n in self._counts.items())

    def __repr__(self) -> str:
        return f"UnorderedWord({str(self)!r})"


EPSILON_WORD = UnorderedWord()


def word_union(w1: UnorderedWord, w2: UnorderedWord) -> UnorderedWord:
    acc = dict(w1.items())
    for a, n in w2.items():
        acc[a] = acc.get(a, 0) + n
    return UnorderedWord(acc)


def word_size(w: UnorderedWord) -> int:
    return w.size


# Unordered regular expressions


class Ure:
    """Base of the general expression syntax tree."""

    def symbols(self) -> set[str]:
        raise NotImplementedError

    def __str__(self) -> str:
        from .syntax import serialize_ure

        return serialize_ure(self)


@dataclass(frozen=True)
class Epsilon(Ure):
    def symbols(self):
        return set()


@dataclass(frozen=True)
class Symbol(Ure):
    name: str

    def symbols(self):
        return {self.name}


@dataclass(frozen=True)
class Disjunction(Ure):
    items: tuple[Ure, ...]

    def symbols(self):
        return set().union(*(e.symbols() for e in self.items))


@dataclass(frozen=True)
class UnorderedConcat(Ure):
    items: tuple[Ure, ...]

    def symbols(self):
        return set().union(*(e.symbols() for e in self.items))


@dataclass(frozen=True)
class Repeat(Ure):
    child: Ure
    interval: Interval

    def symbols(self):
        return self.child.symbols()


# Disjunctive interval multiplicity expressions


class Mult(enum.Enum):
    ONE = "1"
    OPT = "?"


@dataclass(frozen=True)
class Atom:
    """Symbols joined by unordered concatenation, each with multiplicity 1 or ?."""

    symbols: tuple[tuple[str, Mult], ...]

    def names(self) -> list[str]:
        return [a for a, _ in self.symbols]

    def required(self) -> list[str]:
        return [a for a, m in self.symbols if m is Mult.ONE]

    def optional(self) -> list[str]:
        return [a for a, m in self.symbols if m is Mult.OPT]

    @property
    def all_optional(self) -> bool:
        return all(m is Mult.OPT for _, m in self.symbols)


@dataclass(frozen=True)
class AtomWithInterval:
    atom: Atom
    interval: Interval

    @property
    def nullable(self) -> bool:
        """Whether this part derives the empty word."""
        return self.interval.nullable or self.atom.all_optional


@dataclass(frozen=True)
class ClauseWithInterval:
    atoms: tuple[AtomWithInterval, ...]
    interval: Interval

    def names(self) -> list[str]:
        return [a for ai in self.atoms for a in ai.atom.names()]

    @property
    def simple(self) -> bool:
        return all(ai.interval in (ONE, OPT) for ai in self.atoms)


@dataclass(frozen=True)
class DimeAst:
    clauses: tuple[ClauseWithInterval, ...] = ()

    def names(self) -> list[str]:
        return [a for c in self.clauses for a in c.names()]

    def symbols(self) -> set[str]:
        return set(self.names())

    @property
    def disjunction_free(self) -> bool:
        return all(len(c.atoms) == 1 for c in self.clauses)

    def to_ure(self) -> Ure:
        """The same expression in the general syntax tree."""

        def atom(ai: AtomWithInterval) -> Ure:
            parts = [
                Symbol(a) if m is Mult.ONE else Repeat(Symbol(a), OPT)
                for a, m in ai.atom.symbols
            ]
            body = parts[0] if len(parts) == 1 else UnorderedConcat(tuple(parts))
            if not parts:
                body = Epsilon()
            return body if ai.interval == ONE else Repeat(body, ai.interval)

        def clause(c: ClauseWithInterval) -> Ure:
            alts = [atom(ai) for ai in c.atoms]
            body = alts[0] if len(alts) == 1 else Disjunction(tuple(alts))
            return body if c.interval == ONE else Repeat(body, c.interval)

        parts = [clause(c) for c in self.clauses]
        if not parts:
            return Epsilon()
        return parts[0] if len(parts) == 1 else UnorderedConcat(tuple(parts))

    def intervals(self) -> Iterator[Interval]:
        for c in self.clauses:
            yield c.interval
            for ai in c.atoms:
                yield ai.interval

    def __str__(self) -> str:
        from .syntax import serialize_dime

        return serialize_dime(self)


EMPTY_DIME = DimeAst(())


# Trees and queries


@dataclass(frozen=True)
class Tree:
    """A rooted labelled tree; node 0 is the root and nodes are in preorder."""

    labels: tuple[str, ...]
    children: tuple[tuple[int, ...], ...]

    root = 0

    @classmethod
    def build(cls, label: str, *subtrees: "Tree") -> "Tree":
        labels = [label]
        children: list[list[int]] = [[]]
        for sub in subtrees:
            off = len(labels)
            children[0].append(off)
            labels.extend(sub.labels)
            children.extend([c + off for c in kids] for kids in sub.children)
        return cls(tuple(labels), tuple(tuple(k) for k in children))

    @classmethod
    def from_nested(cls, spec) -> "Tree":
        """Build from ``label`` or ``(label, [subspecs])``."""
        if isinstance(spec, str):
            return cls.build(spec)
        label, kids = spec
        return cls.build(label, *(cls.from_nested(k) for k in kids))

    def to_nested(self, n: int = 0):
        return (self.labels[n], [self.to_nested(c) for c in self.children[n]])

    def __len__(self) -> int:
        return len(self.labels)

    def label(self, n: int) -> str:
        return self.labels[n]

    def child_word(self, n: int) -> UnorderedWord:
        return UnorderedWord(self.labels[c] for c in self.children[n])

    def subtree(self, n: int) -> "Tree":
        return Tree.build(self.labels[n], *(self.subtree(c) for c in self.children[n]))

    def parents(self) -> list[int | None]:
        par: list[int | None] = [None] * len(self.labels)
        for n, kids in enumerate(self.children):
            for c in kids:
                par[c] = n
        return par

    def height(self) -> int:
        """Number of nodes on the longest root-to-leaf path."""
        h = [1] * len(self.labels)
        for n in reversed(range(len(self.labels))):
            for c in self.children[n]:
                h[n] = max(h[n], h[c] + 1)
        return h[0]

    def canonical(self, n: int = 0):
        """A hashable form equal for isomorphic trees."""
        return (self.labels[n], tuple(sorted(self.canonical(c) for c in self.children[n])))

    def isomorphic(self, other: "Tree") -> bool:
        return self.canonical() == other.canonical()

    def label_paths(self) -> set[tuple[str, ...]]:
        out = set()

        def walk(n, prefix):
            p = prefix + (self.labels[n],)
            out.add(p)
            for c in self.children[n]:
                walk(c, p)

        walk(0, ())
        return out

    def __str__(self) -> str:
        from .syntax import serialize_tree

        return serialize_tree(self)


class Axis(enum.Enum):
    CHILD = "/"
    DESCENDANT = "//"


@dataclass(frozen=True)
class TwigQuery:
    """A tree pattern; node 0 is the root, ``edges[n]`` lists ``(child, axis)``."""

    labels: tuple[str, ...]
    edges: tuple[tuple[tuple[int, Axis], ...], ...]

    root = 0

    @classmethod
    def build(cls, label: str, *branches: tuple[Axis, "TwigQuery"]) -> "TwigQuery":
        labels = [label]
        edges: list[list[tuple[int, Axis]]] = [[]]
        for axis, sub in branches:
            off = len(labels)
            edges[0].append((off, axis))
            labels.extend(sub.labels)
            edges.extend([(c + off, ax) for c, ax in e] for e in sub.edges)
        return cls(tuple(labels), tuple(tuple(e) for e in edges))

    def __len__(self) -> int:
        return len(self.labels)

    def postorder(self) -> list[int]:
        order = []

        def walk(n):
            for c, _ in self.edges[n]:
                walk(c)
            order.append(n)

        walk(0)
        return order

    def symbols(self) -> set[str]:
        return {a for a in self.labels if a != WILDCARD}

    def __str__(self) -> str:
        from .syntax import serialize_query

        return serialize_query(self)


# Schemas


class SchemaKind(enum.Enum):
    DIMS = "DIMS"
    IMS = "IMS"


@dataclass(frozen=True)
class Schema:
    """Root label plus one expression per symbol; missing rules mean epsilon."""

    root: str
    rules: Mapping[str, DimeAst] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "rules", dict(sorted(self.rules.items())))

    def __hash__(self) -> int:
        return hash((self.root, tuple((a, r) for a, r in self.rules.items())))

    def rule(self, a: str) -> DimeAst:
        return self.rules.get(a, EMPTY_DIME)

    @property
    def alphabet(self) -> tuple[str, ...]:
        syms = {self.root} | set(self.rules)
        for r in self.rules.values():
            syms |= r.symbols()
        return tuple(sorted(syms))

    @property
    def kind(self) -> SchemaKind:
        if all(r.disjunction_free for r in self.rules.values()):
            return SchemaKind.IMS
        return SchemaKind.DIMS

    def __str__(self) -> str:
        from .syntax import serialize_schema

        return serialize_schema(self)


class Verdict(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    INDETERMINATE = "indeterminate"

    def __bool__(self) -> bool:
        if self is Verdict.INDETERMINATE:
            raise ValueError("indeterminate verdict has no truth value")
        return self is Verdict.TRUE
