"""Parsers and serializers for expressions, schema files, trees, event streams and queries.

Expression syntax::

    a || b?        unordered concatenation (binds tighter than |)
    a | b          disjunction
    e? e* e+       postfix macros for [0,1], [0,inf], [1,inf]
    e[2,5] e[3,inf]?   intervals; a trailing ? admits zero as well
    eps            the empty word
"""

from __future__ import annotations

import enum
import io
import re
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

from .model import (
    INF,
    OPT,
    PLUS,
    STAR,
    Axis,
    Disjunction,
    DimeAst,
    Epsilon,
    Interval,
    Mult,
    Repeat,
    Schema,
    Symbol,
    Tree,
    TwigQuery,
    UnorderedConcat,
    Ure,
    WILDCARD,
)

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*")


class ErrorKind(enum.Enum):
    UnexpectedToken = "UnexpectedToken"
    UnbalancedParen = "UnbalancedParen"
    BadInterval = "BadInterval"
    DuplicateRule = "DuplicateRule"
    DuplicateSymbol = "DuplicateSymbol"
    NotADime = "NotADime"
    BadTag = "BadTag"
    UnsupportedXmlFeature = "UnsupportedXmlFeature"
    TruncatedStream = "TruncatedStream"


class ParseError(Exception):
    """Malformed input, located at its first offending character (1-based)."""

    def __init__(self, kind: ErrorKind, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {kind.value}: {message}")
        self.kind = kind
        self.message = message
        self.line = line
        self.column = column

    @property
    def position(self) -> tuple[int, int]:
        return (self.line, self.column)


def _locate(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def _error(kind, message, text, offset, base=(0, 0)) -> ParseError:
    line, col = _locate(text, offset)
    if line == 1:
        col += base[1]
    return ParseError(kind, message, line + base[0], col)


# Expressions

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<conc>\|\|)|(?P<bar>\|)|(?P<lp>\()|(?P<rp>\))|(?P<post>[?*+])"
    r"|(?P<iv>\[)|(?P<name>[A-Za-z_][A-Za-z0-9_-]*))"
)
_INTERVAL_RE = re.compile(r"\[\s*(\d+)\s*,\s*(\d+|inf)\s*\]")


class _ExprParser:
    def __init__(self, text: str, base=(0, 0)):
        self.text = text
        self.base = base
        self.pos = 0
        self.positions: dict[int, int] = {}
        self.names: list[tuple[str, int]] = []

    def fail(self, kind, msg, offset=None):
        return _error(kind, msg, self.text, self.pos if offset is None else offset, self.base)

    def peek(self):
        m = _TOKEN_RE.match(self.text, self.pos)
        if not m or m.lastgroup is None:
            rest = self.text[self.pos:]
            if rest.strip():
                off = self.pos + len(rest) - len(rest.lstrip())
                raise self.fail(ErrorKind.UnexpectedToken, f"unexpected {self.text[off]!r}", off)
            return None, None, len(self.text)
        return m.lastgroup, m, m.start(m.lastgroup)

    def mark(self, node: Ure, offset: int) -> Ure:
        self.positions.setdefault(id(node), offset)
        return node

    def parse(self) -> Ure:
        e = self.disj()
        kind, _, off = self.peek()
        if kind is not None:
            k = ErrorKind.UnbalancedParen if kind == "rp" else ErrorKind.UnexpectedToken
            raise self.fail(k, f"unexpected {self.text[off]!r}", off)
        return e

    def disj(self) -> Ure:
        start = self.peek()[2]
        items = [self.conc()]
        while self.peek()[0] == "bar":
            self.pos = self.peek()[1].end()
            items.append(self.conc())
        if len(items) == 1:
            return items[0]
        return self.mark(Disjunction(tuple(items)), start)

    def conc(self) -> Ure:
        start = self.peek()[2]
        items = [self.postfix()]
        while self.peek()[0] == "conc":
            self.pos = self.peek()[1].end()
            items.append(self.postfix())
        if len(items) == 1:
            return items[0]
        return self.mark(UnorderedConcat(tuple(items)), start)

    def postfix(self) -> Ure:
        start = self.peek()[2]
        e = self.primary()
        while True:
            kind, m, off = self.peek()
            if kind == "post":
                iv = {"?": OPT, "*": STAR, "+": PLUS}[m.group("post")]
                self.pos = m.end()
            elif kind == "iv":
                iv = self.interval(off)
            else:
                return e
            e = self.mark(Repeat(e, iv), start)

    def interval(self, off: int) -> Interval:
        m = _INTERVAL_RE.match(self.text, off)
        if not m:
            raise self.fail(ErrorKind.BadInterval, "expected [n,m] with m a number or inf", off)
        lo = int(m.group(1))
        hi = INF if m.group(2) == "inf" else int(m.group(2))
        self.pos = m.end()
        optional = False
        if self.pos < len(self.text) and self.text[self.pos] == "?":
            optional = True
            self.pos += 1
        if lo > hi:
            raise self.fail(ErrorKind.BadInterval, f"empty interval [{lo},{m.group(2)}]", off)
        return Interval(lo, hi, optional)

    def primary(self) -> Ure:
        kind, m, off = self.peek()
        if kind == "name":
            self.pos = m.end()
            name = m.group("name")
            if name == "eps":
                return self.mark(Epsilon(), off)
            if name == "inf":
                raise self.fail(ErrorKind.UnexpectedToken, "'inf' is reserved", off)
            self.names.append((name, off))
            return self.mark(Symbol(name), off)
        if kind == "lp":
            self.pos = m.end()
            e = self.disj()
            k2, m2, off2 = self.peek()
            if k2 != "rp":
                raise self.fail(ErrorKind.UnbalancedParen, "missing ')'", off if k2 is None else off2)
            self.pos = m2.end()
            return e
        if kind is None:
            raise self.fail(ErrorKind.UnexpectedToken, "unexpected end of expression", off)
        if kind == "rp":
            raise self.fail(ErrorKind.UnbalancedParen, "unexpected ')'", off)
        raise self.fail(ErrorKind.UnexpectedToken, f"unexpected {self.text[off]!r}", off)


def parse_ure(text: str) -> Ure:
    return _ExprParser(text).parse()


def parse_dime(text: str, base: tuple[int, int] = (0, 0)) -> DimeAst:
    """Parse and check the restricted grammar; raises ParseError otherwise."""
    from .dime import check_dime

    p = _ExprParser(text, base)
    ure = p.parse()
    seen: dict[str, int] = {}
    for name, off in p.names:
        if name in seen:
            raise p.fail(ErrorKind.DuplicateSymbol, f"symbol {name} occurs twice", off)
        seen[name] = off
    result = check_dime(ure)
    if isinstance(result, DimeAst):
        return result
    v = result[0]
    off = p.positions.get(id(v.node), 0)
    msg = "; ".join(x.message for x in result)
    raise p.fail(ErrorKind.NotADime, msg, off)


def _iv_text(iv: Interval) -> str:
    s = str(iv)
    return "[1,1]" if s == "1" else s


def serialize_ure(e: Ure, prec: int = 0) -> str:
    if isinstance(e, Epsilon):
        return "eps"
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, Repeat):
        inner = serialize_ure(e.child, 3)
        if not isinstance(e.child, (Symbol, Epsilon)):
            inner = f"({serialize_ure(e.child)})"
        return inner + _iv_text(e.interval)
    if isinstance(e, UnorderedConcat):
        s = " || ".join(serialize_ure(x, 2) for x in e.items)
        return f"({s})" if prec > 1 else s
    if isinstance(e, Disjunction):
        s = " | ".join(serialize_ure(x, 1) for x in e.items)
        return f"({s})" if prec > 0 else s
    raise TypeError(e)


def serialize_dime(d: DimeAst) -> str:
    def atom(ai) -> str:
        syms = [a if m is Mult.ONE else f"{a}?" for a, m in ai.atom.symbols]
        body = " || ".join(syms) if syms else "eps"
        if ai.interval == Interval(1, 1):
            return body
        if len(syms) == 1 and ai.atom.symbols[0][1] is Mult.ONE:
            return body + _iv_text(ai.interval)
        return f"({body}){_iv_text(ai.interval)}"

    parts = []
    for c in d.clauses:
        alts = [atom(ai) for ai in c.atoms]
        body = " | ".join(alts)
        if c.interval == Interval(1, 1):
            parts.append(f"({body})" if len(alts) > 1 and len(d.clauses) > 1 else body)
        elif len(c.atoms) == 1 and c.atoms[0].interval == Interval(1, 1) and body == c.atoms[0].atom.symbols[0][0]:
            parts.append(body + _iv_text(c.interval))
        else:
            parts.append(f"({body}){_iv_text(c.interval)}")
    return " || ".join(parts) if parts else "eps"


# Schema files

_RULE_RE = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_-]*)\s*->")
_ROOT_RE = re.compile(r"\s*root\s*:\s*([A-Za-z_][A-Za-z0-9_-]*)\s*$")


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_schema(text: str, dtd: bool = False):
    """Read ``root: r`` followed by ``a -> body`` lines.

    With ``dtd`` set, bodies are disjunction-free ordered expressions and a
    :class:`udime.dtd.Dtd` is returned instead of a :class:`Schema`.
    """
    root = None
    rules: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        m = _ROOT_RE.match(line)
        if m:
            if root is not None:
                raise ParseError(ErrorKind.DuplicateRule, "second root header", lineno, 1)
            root = m.group(1)
            continue
        m = _RULE_RE.match(line)
        if not m:
            col = len(line) - len(line.lstrip()) + 1
            raise ParseError(ErrorKind.UnexpectedToken, "expected 'a -> expression' or 'root: a'", lineno, col)
        head = m.group(1)
        if head in rules:
            raise ParseError(ErrorKind.DuplicateRule, f"second rule for {head}", lineno, m.start(1) + 1)
        body = line[m.end():]
        try:
            if dtd:
                from .dtd import parse_regex

                rules[head] = parse_regex(body, base=(lineno - 1, m.end()))
            else:
                rules[head] = parse_dime(body if body.strip() else "eps", base=(lineno - 1, m.end()))
        except ParseError as err:
            err.message = f"in rule for {head}: {err.message}"
            err.args = (f"{err.line}:{err.column}: {err.kind.value}: {err.message}",)
            raise
    if root is None:
        raise ParseError(ErrorKind.UnexpectedToken, "missing 'root: <symbol>' header", 1, 1)
    if dtd:
        from .dtd import Dtd

        return Dtd(root, rules)
    return Schema(root, rules)


def serialize_schema(s: Schema) -> str:
    lines = [f"root: {s.root}"]
    lines += [f"{a} -> {serialize_dime(r)}" for a, r in s.rules.items()]
    return "\n".join(lines) + "\n"


# Trees and event streams


class EventKind(enum.Enum):
    OPEN = "open"
    CLOSE = "close"


@dataclass(frozen=True)
class TreeEvent:
    kind: EventKind
    symbol: str

    def __str__(self) -> str:
        return f"{self.kind.value} {self.symbol}"


def _as_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


_TAG_RE = re.compile(r"<(/?)([A-Za-z_][A-Za-z0-9_-]*)\s*(/?)>")


def _xml_events(text: str) -> Iterator[TreeEvent]:
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch != "<":
            raise _error(ErrorKind.UnsupportedXmlFeature, "text content is not supported", text, pos)
        nxt = text[pos + 1] if pos + 1 < n else ""
        if nxt == "!":
            raise _error(ErrorKind.UnsupportedXmlFeature, "comments and declarations are not supported", text, pos)
        if nxt == "?":
            raise _error(ErrorKind.UnsupportedXmlFeature, "processing instructions are not supported", text, pos)
        m = _TAG_RE.match(text, pos)
        if not m:
            nm = NAME_RE.match(text, pos + 1 + (nxt == "/"))
            if nm and nxt != "/":
                rest = text[nm.end():].lstrip()
                if rest[:1] not in (">", "/", ""):
                    off = n - len(rest)
                    raise _error(ErrorKind.UnsupportedXmlFeature, "attributes are not supported", text, off)
            raise _error(ErrorKind.BadTag, "malformed tag", text, pos)
        closing, name, empty = m.group(1), m.group(2), m.group(3)
        if closing and empty:
            raise _error(ErrorKind.BadTag, "malformed tag", text, pos)
        if closing:
            yield TreeEvent(EventKind.CLOSE, name), pos
        else:
            yield TreeEvent(EventKind.OPEN, name), pos
            if empty:
                yield TreeEvent(EventKind.CLOSE, name), pos
        pos = m.end()


_LINE_RE = re.compile(r"\s*(open|close)\s+([A-Za-z_][A-Za-z0-9_-]*)\s*$")


def _line_events(text: str) -> Iterator[TreeEvent]:
    offset = 0
    for raw in text.splitlines(keepends=True):
        line = raw.rstrip("\r\n")
        if line.strip():
            m = _LINE_RE.match(line)
            if not m:
                col = len(line) - len(line.lstrip())
                raise _error(ErrorKind.UnexpectedToken, "expected 'open <sym>' or 'close <sym>'", text, offset + col)
            kind = EventKind.OPEN if m.group(1) == "open" else EventKind.CLOSE
            yield TreeEvent(kind, m.group(2)), offset + m.start(1)
        offset += len(raw)


def read_events(source: str | bytes | IO) -> Iterator[TreeEvent]:
    """Yield the open/close events of one tree, checking balance as it goes.

    The format is XML when the first non-blank character is ``<`` and the
    ``open a`` / ``close a`` line format otherwise.
    """
    text = _as_text(source)
    stripped = text.lstrip()
    raw = _xml_events(text) if stripped.startswith("<") else _line_events(text)
    stack: list[str] = []
    done = False
    for ev, off in raw:
        if done:
            raise _error(ErrorKind.UnexpectedToken, "content after the root element", text, off)
        if ev.kind is EventKind.OPEN:
            stack.append(ev.symbol)
        else:
            if not stack:
                raise _error(ErrorKind.BadTag, f"close of {ev.symbol} without open", text, off)
            if stack[-1] != ev.symbol:
                raise _error(ErrorKind.BadTag, f"close of {ev.symbol} inside {stack[-1]}", text, off)
            stack.pop()
            done = not stack
        yield ev
    if not done:
        msg = f"stream ends with {len(stack)} open element(s)" if stack else "empty stream"
        raise _error(ErrorKind.TruncatedStream, msg, text, len(text))


def tree_from_events(events: Iterable[TreeEvent]) -> Tree:
    labels: list[str] = []
    children: list[list[int]] = []
    stack: list[int] = []
    for ev in events:
        if ev.kind is EventKind.OPEN:
            n = len(labels)
            labels.append(ev.symbol)
            children.append([])
            if stack:
                children[stack[-1]].append(n)
            stack.append(n)
        else:
            stack.pop()
    return Tree(tuple(labels), tuple(tuple(k) for k in children))


def parse_tree(text: str | bytes | IO) -> Tree:
    return tree_from_events(read_events(text))


def tree_events(t: Tree, n: int = 0) -> Iterator[TreeEvent]:
    yield TreeEvent(EventKind.OPEN, t.labels[n])
    for c in t.children[n]:
        yield from tree_events(t, c)
    yield TreeEvent(EventKind.CLOSE, t.labels[n])


def serialize_tree(t: Tree, indent: int | None = None) -> str:
    out: list[str] = []

    def walk(n, depth):
        pad = "" if indent is None else " " * (indent * depth)
        end = "" if indent is None else "\n"
        lab = t.labels[n]
        if not t.children[n]:
            out.append(f"{pad}<{lab}/>{end}")
            return
        out.append(f"{pad}<{lab}>{end}")
        for c in t.children[n]:
            walk(c, depth + 1)
        out.append(f"{pad}</{lab}>{end}")

    walk(0, 0)
    return "".join(out)


def serialize_events(t: Tree) -> str:
    return "".join(f"{ev}\n" for ev in tree_events(t))


# Twig queries

_QTOKEN_RE = re.compile(r"\s*(?:(?P<dslash>//)|(?P<slash>/)|(?P<lb>\[)|(?P<rb>\])|(?P<star>\*)|(?P<name>[A-Za-z_][A-Za-z0-9_-]*))")


class _QueryParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.labels: list[str] = []
        self.edges: list[list[tuple[int, Axis]]] = []

    def peek(self):
        m = _QTOKEN_RE.match(self.text, self.pos)
        if not m or m.lastgroup is None:
            rest = self.text[self.pos:]
            if rest.strip():
                off = self.pos + len(rest) - len(rest.lstrip())
                raise _error(ErrorKind.UnexpectedToken, f"unexpected {self.text[off]!r}", self.text, off)
            return None, None, len(self.text)
        return m.lastgroup, m, m.start(m.lastgroup)

    def take(self):
        kind, m, _ = self.peek()
        self.pos = m.end()
        return kind, m

    def parse(self) -> TwigQuery:
        if self.peek()[0] == "slash":
            self.take()
        self.step()
        kind, _, off = self.peek()
        if kind is not None:
            k = ErrorKind.UnbalancedParen if kind == "rb" else ErrorKind.UnexpectedToken
            raise _error(k, f"unexpected {self.text[off]!r}", self.text, off)
        return TwigQuery(tuple(self.labels), tuple(tuple(e) for e in self.edges))

    def step(self) -> int:
        kind, m, off = self.peek()
        if kind not in ("name", "star"):
            what = "end of query" if kind is None else repr(self.text[off])
            raise _error(ErrorKind.UnexpectedToken, f"expected a label, found {what}", self.text, off)
        self.take()
        n = len(self.labels)
        self.labels.append(WILDCARD if kind == "star" else m.group("name"))
        self.edges.append([])
        while self.peek()[0] == "lb":
            _, _, lb_off = self.peek()
            self.take()
            axis = Axis.CHILD
            if self.peek()[0] in ("slash", "dslash"):
                axis = Axis.DESCENDANT if self.take()[0] == "dslash" else Axis.CHILD
            c = self.step()
            self.edges[n].append((c, axis))
            kind, _, off = self.peek()
            if kind != "rb":
                raise _error(ErrorKind.UnbalancedParen, "missing ']'", self.text, lb_off if kind is None else off)
            self.take()
        kind = self.peek()[0]
        if kind in ("slash", "dslash"):
            self.take()
            axis = Axis.DESCENDANT if kind == "dslash" else Axis.CHILD
            c = self.step()
            self.edges[n].append((c, axis))
        return n


def parse_query(text: str) -> TwigQuery:
    return _QueryParser(text).parse()


def serialize_query(q: TwigQuery, n: int = 0) -> str:
    s = q.labels[n]
    edges = q.edges[n]
    for c, axis in edges[:-1]:
        prefix = "//" if axis is Axis.DESCENDANT else ""
        s += f"[{prefix}{serialize_query(q, c)}]"
    if edges:
        c, axis = edges[-1]
        s += axis.value + serialize_query(q, c)
    return s
