"""Earliest-rejection streaming validation of trees against DIMS schemas."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .dime import CompactTuple, tuple_of
from .model import Schema, Tree
from .syntax import EventKind, TreeEvent, read_events, tree_events


class Reason(enum.Enum):
    MaxCountExceeded = "MaxCountExceeded"
    ConflictViolated = "ConflictViolated"
    CardinalityViolated = "CardinalityViolated"
    RequiredMissing = "RequiredMissing"
    CountingViolated = "CountingViolated"
    UnknownLabel = "UnknownLabel"
    RootMismatch = "RootMismatch"


@dataclass(frozen=True)
class Rejection:
    event_index: int
    node_path: tuple[str, ...]
    reason: Reason
    detail: str

    def __str__(self) -> str:
        return (
            f"REJECT at event #{self.event_index}, path {'/'.join(self.node_path)}, "
            f"reason={self.reason.value}({self.detail})"
        )


@dataclass(frozen=True)
class ValidationOutcome:
    accepted: bool
    rejection: Rejection | None = None

    def __bool__(self) -> bool:
        return self.accepted

    def __str__(self) -> str:
        return "ACCEPT" if self.accepted else str(self.rejection)


@dataclass(frozen=True)
class StreamStats:
    max_stack_depth: int
    events_consumed: int


@dataclass(frozen=True)
class CompiledSchema:
    """A schema with one tuple per symbol, computed once."""

    root: str
    alphabet: frozenset[str]
    tuples: dict[str, CompactTuple]

    __hash__ = None

    def tuple(self, a: str) -> CompactTuple:
        return self.tuples[a]


@lru_cache(maxsize=256)
def compile_schema(s: Schema) -> CompiledSchema:
    alphabet = s.alphabet
    return CompiledSchema(s.root, frozenset(alphabet), {a: tuple_of(s.rule(a)) for a in alphabet})


def _fmt(x) -> str:
    if isinstance(x, tuple):
        return ",".join(x)
    if isinstance(x, frozenset):
        return "{" + ",".join(sorted(x)) + "}"
    return str(x)


def validate_stream(s: Schema | CompiledSchema, events: Iterable[TreeEvent] | str | bytes):
    """Run the streaming check; returns ``(ValidationOutcome, StreamStats)``.

    Events are pulled one at a time and nothing is read past the event that
    proves the tree invalid.
    """
    cs = s if isinstance(s, CompiledSchema) else compile_schema(s)
    if isinstance(events, (str, bytes)) or hasattr(events, "read"):
        events = read_events(events)
    labels: list[str] = []
    counts: list[dict[str, int]] = []
    depth = 0
    k = 0

    def reject(reason, detail, path):
        return (
            ValidationOutcome(False, Rejection(k, tuple(path), reason, _fmt(detail))),
            StreamStats(depth, k),
        )

    for ev in events:
        k += 1
        b = ev.symbol
        if ev.kind is EventKind.OPEN:
            if not labels:
                if b != cs.root:
                    return reject(Reason.RootMismatch, b, [b])
            elif b not in cs.alphabet:
                return reject(Reason.UnknownLabel, b, labels)
            else:
                t = cs.tuples[labels[-1]]
                cnt = counts[-1]
                cnt[b] = cnt.get(b, 0) + 1
                if cnt[b] > t.card(b).max:
                    return reject(Reason.MaxCountExceeded, b, labels)
                for c in cnt:
                    if c != b and (b, c) in t.conflicts:
                        return reject(Reason.ConflictViolated, (c, b), labels)
            labels.append(b)
            counts.append({})
            depth = max(depth, len(labels))
        else:
            t = cs.tuples[labels[-1]]
            cnt = counts[-1]
            for a, iv in t.card_map.items():
                if cnt.get(a, 0) not in iv:
                    return reject(Reason.CardinalityViolated, a, labels)
            for x in sorted(t.required, key=sorted):
                if not any(cnt.get(a, 0) for a in x):
                    return reject(Reason.RequiredMissing, x, labels)
            for a, c in sorted(t.counting):
                if cnt.get(a, 0) < cnt.get(c, 0):
                    return reject(Reason.CountingViolated, (a, c), labels)
            labels.pop()
            counts.pop()
    return ValidationOutcome(True), StreamStats(depth, k)


def validate_tree(s: Schema | CompiledSchema, t: Tree) -> ValidationOutcome:
    return validate_stream(s, tree_events(t))[0]


def is_valid(s: Schema, t: Tree) -> bool:
    return validate_tree(s, t).accepted
