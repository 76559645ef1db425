"""Shape checking, reduction, characterizing tuples, membership and containment of DIMEs."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Mapping

from .model import (
    INF,
    ONE,
    OPT,
    PLUS,
    STAR,
    ZERO,
    Atom,
    AtomWithInterval,
    ClauseWithInterval,
    DimeAst,
    Disjunction,
    Epsilon,
    Interval,
    Mult,
    Repeat,
    Symbol,
    UnorderedConcat,
    UnorderedWord,
    Ure,
    interval_contains,
)


# Shape checking


@dataclass(frozen=True)
class DimeViolation:
    restriction: str
    node: object
    message: str


REPEATED_SYMBOL = "single occurrence"
NOT_SIMPLE = "simple clause under + or *"
BAD_ATOM = "atom of symbols with multiplicity 1 or ?"
BAD_CLAUSE = "clause of atoms with intervals"


class _NotShape(Exception):
    def __init__(self, restriction, node, message):
        self.violation = DimeViolation(restriction, node, message)


def _flatten(e: Ure, kind) -> list[Ure]:
    if isinstance(e, kind):
        return [x for item in e.items for x in _flatten(item, kind)]
    if isinstance(e, Repeat) and e.interval == ONE:
        return _flatten(e.child, kind)
    return [e]


def _atom(e: Ure) -> Atom:
    syms = []
    for item in _flatten(e, UnorderedConcat):
        if isinstance(item, Epsilon):
            continue
        if isinstance(item, Symbol):
            syms.append((item.name, Mult.ONE))
        elif isinstance(item, Repeat) and item.interval == OPT and isinstance(item.child, Symbol):
            syms.append((item.child.name, Mult.OPT))
        else:
            from .syntax import serialize_ure

            raise _NotShape(BAD_ATOM, item, f"{serialize_ure(item)} may not appear inside an atom")
    return Atom(tuple(syms))


def _atom_with_interval(e: Ure) -> AtomWithInterval:
    if isinstance(e, Repeat) and e.interval != ONE:
        try:
            return AtomWithInterval(_atom(e.child), e.interval)
        except _NotShape:
            pass
    return AtomWithInterval(_atom(e), ONE)


def _clause(e: Ure, interval: Interval) -> ClauseWithInterval:
    return ClauseWithInterval(tuple(_atom_with_interval(x) for x in _flatten(e, Disjunction)), interval)


def _part(e: Ure) -> ClauseWithInterval | None:
    if isinstance(e, Epsilon):
        return None
    if isinstance(e, Repeat) and e.interval in (STAR, PLUS):
        try:
            c = _clause(e.child, e.interval)
        except _NotShape:
            c = None
        if c is not None and c.simple:
            return c
        try:
            return _clause(e, ONE)
        except _NotShape:
            from .syntax import serialize_ure

            raise _NotShape(NOT_SIMPLE, e, f"{serialize_ure(e.child)} under {e.interval} is not a simple clause")
    if isinstance(e, Repeat) and e.interval == OPT:
        try:
            return _clause(e.child, OPT)
        except _NotShape:
            pass
    return _clause(e, ONE)


def check_dime(e: Ure) -> DimeAst | list[DimeViolation]:
    """Structure ``e`` as a DIME, or list every violated restriction."""
    violations = []
    seen: set[str] = set()
    for node in _iter_symbols(e):
        if node.name in seen:
            violations.append(DimeViolation(REPEATED_SYMBOL, node, f"symbol {node.name} occurs more than once"))
        seen.add(node.name)
    clauses = []
    for part in _flatten(e, UnorderedConcat):
        try:
            c = _part(part)
        except _NotShape as err:
            violations.append(err.violation)
            continue
        if c is not None:
            clauses.append(c)
    if violations:
        return violations
    return DimeAst(tuple(clauses))


def _iter_symbols(e: Ure):
    if isinstance(e, Symbol):
        yield e
    elif isinstance(e, Repeat):
        yield from _iter_symbols(e.child)
    elif isinstance(e, (Disjunction, UnorderedConcat)):
        for x in e.items:
            yield from _iter_symbols(x)


# Reduction


class ClauseType(enum.Enum):
    TYPE1 = 1
    TYPE2 = 2
    TYPE3 = 3


def _fold(d: ClauseWithInterval) -> ClauseWithInterval:
    if len(d.atoms) == 1 and d.interval != ONE and d.atoms[0].interval == ONE:
        return ClauseWithInterval((AtomWithInterval(d.atoms[0].atom, d.interval),), ONE)
    return d


def clause_type(d: ClauseWithInterval) -> ClauseType:
    d = _fold(d)
    atoms = d.atoms
    if d.interval == PLUS and len(atoms) >= 2:
        if all(ai.interval == ONE and not ai.atom.all_optional for ai in atoms):
            return ClauseType.TYPE1
    elif d.interval == ONE and atoms:
        if all(ai.interval.nullable for ai in atoms):
            return ClauseType.TYPE3
        if not any(ai.nullable for ai in atoms):
            return ClauseType.TYPE2
    raise ValueError(f"clause {DimeAst((d,))} has no type; the expression is not reduced")


def _normalize_atom(ai: AtomWithInterval) -> AtomWithInterval:
    if ai.atom.all_optional:
        return AtomWithInterval(ai.atom, Interval(0, ai.interval.max))
    return ai


def _reduce_clause(c: ClauseWithInterval) -> list[ClauseWithInterval]:
    atoms = [_normalize_atom(ai) for ai in c.atoms]
    eps = any(ai.nullable for ai in atoms)
    I = c.interval
    if I in (STAR, PLUS):
        if I == STAR or eps:
            out = [ClauseWithInterval((AtomWithInterval(ai.atom, STAR),), ONE) for ai in atoms]
        elif len(atoms) == 1:
            out = [ClauseWithInterval((AtomWithInterval(atoms[0].atom, PLUS),), ONE)]
        else:
            out = [ClauseWithInterval(tuple(atoms), PLUS)]
    elif I == OPT or (I == ONE and eps):
        out = [ClauseWithInterval(tuple(AtomWithInterval(ai.atom, ai.interval.opt()) for ai in atoms), ONE)]
    elif I == ONE:
        out = [ClauseWithInterval(tuple(atoms), ONE)]
    else:
        raise ValueError(f"clause interval {I} is not allowed at top level")
    result = []
    for d in out:
        kept = tuple(
            _normalize_atom(ai) for ai in d.atoms if ai.interval != ZERO and ai.atom.symbols
        )
        if kept:
            result.append(ClauseWithInterval(kept, d.interval))
    return result


def _reduce_pass(d: DimeAst) -> DimeAst:
    return DimeAst(tuple(x for c in d.clauses for x in _reduce_clause(c)))


@lru_cache(maxsize=4096)
def reduce(d: DimeAst) -> DimeAst:
    """Rewrite into reduced form; every clause of the result has a type."""
    r = _reduce_pass(d)
    assert _reduce_pass(r) == r, "reduction did not reach a fixpoint in two passes"
    for c in r.clauses:
        clause_type(c)
    return r


def typed_clauses(reduced: DimeAst) -> list[tuple[ClauseType, list[AtomWithInterval]]]:
    out = []
    for c in reduced.clauses:
        t = clause_type(c)
        out.append((t, list(_fold(c).atoms)))
    return out


# Characterizing tuples


def phi(atom: Atom) -> str:
    """The least symbol with multiplicity 1 in the atom."""
    return min(atom.required())


@dataclass(frozen=True, eq=True)
class CompactTuple:
    """Conflicts C, cardinality map N, required sets P and counting pairs K."""

    conflicts: frozenset[tuple[str, str]]
    card_map: Mapping[str, Interval]
    required: frozenset[frozenset[str]]
    counting: frozenset[tuple[str, str]]

    __hash__ = None

    def card(self, a: str) -> Interval:
        return self.card_map.get(a, ZERO)

    @property
    def symbols(self) -> set[str]:
        return set(self.card_map)

    def __str__(self) -> str:
        def pairs(s):
            return "{" + ", ".join(f"({a},{b})" for a, b in sorted(s)) + "}"

        sets = sorted(sorted(x) for x in self.required)
        lines = [
            "C = " + pairs(self.conflicts),
            "N = {" + ", ".join(f"{a}: {iv}" for a, iv in sorted(self.card_map.items())) + "}",
            "P = {" + ", ".join("{" + ",".join(x) + "}" for x in sets) + "}",
            "K = " + pairs(self.counting),
        ]
        return "\n".join(lines)


def characterizing_tuple(reduced: DimeAst) -> CompactTuple:
    conflicts = set()
    card: dict[str, Interval] = {}
    required = set()
    counting = set()
    for t, atoms in typed_clauses(reduced):
        if t in (ClauseType.TYPE1, ClauseType.TYPE2):
            required.add(frozenset(phi(ai.atom) for ai in atoms))
        if t in (ClauseType.TYPE2, ClauseType.TYPE3):
            for x, y in combinations(atoms, 2):
                for a in x.atom.names():
                    for b in y.atom.names():
                        conflicts.add((a, b))
                        conflicts.add((b, a))
        for ai in atoms:
            names = ai.atom.names()
            for a in ai.atom.required():
                counting.update((a, b) for b in names if b != a)
            for a, m in ai.atom.symbols:
                if t is ClauseType.TYPE1:
                    card[a] = STAR
                elif m is Mult.OPT:
                    card[a] = Interval(0, ai.interval.max)
                elif len(atoms) == 1:
                    card[a] = ai.interval
                else:
                    card[a] = ai.interval.opt()
    return CompactTuple(
        frozenset(conflicts), dict(sorted(card.items())), frozenset(required), frozenset(counting)
    )


@lru_cache(maxsize=4096)
def tuple_of(d: DimeAst) -> CompactTuple:
    """Tuple of an arbitrary (not necessarily reduced) DIME, memoized.

    Symbols that reduction drops keep an explicit [0,0] entry.
    """
    t = characterizing_tuple(reduce(d))
    card = {a: ZERO for a in d.names()}
    card.update(t.card_map)
    return CompactTuple(t.conflicts, dict(sorted(card.items())), t.required, t.counting)


def impl_set(t: CompactTuple, x) -> frozenset[str]:
    x = set(x)
    out = set(x)
    for a, b in t.counting:
        if b in x and (b, a) in t.counting:
            out.add(a)
    return frozenset(out)


@dataclass(frozen=True)
class Satisfaction:
    """Outcome of checking a word against a tuple.

    Truthy when satisfied; otherwise ``component`` is one of ``C``, ``N``,
    ``P``, ``K`` and ``witness`` is the offending pair, symbol or set.
    """

    ok: bool
    component: str | None = None
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok

    @property
    def name(self) -> str | None:
        return {"C": "conflicts", "N": "card_map", "P": "required", "K": "counting"}.get(self.component)

    @property
    def witness_text(self) -> str:
        """The witness in tuple notation: ``(a,b)``, ``{a,b}`` or a bare symbol."""
        w = self.witness
        if isinstance(w, (set, frozenset)):
            return "{" + ",".join(sorted(w)) + "}"
        if isinstance(w, tuple):
            return "(" + ",".join(w) + ")"
        return "" if w is None else str(w)


SATISFIED = Satisfaction(True)


def word_satisfies(w: UnorderedWord, t: CompactTuple) -> Satisfaction:
    present = sorted(w)
    for a, b in combinations(present, 2):
        if (a, b) in t.conflicts:
            return Satisfaction(False, "C", (a, b))
    for a in sorted(set(present) | t.symbols):
        if w[a] not in t.card(a):
            return Satisfaction(False, "N", a)
    for x in sorted(t.required, key=sorted):
        if not any(w[a] for a in x):
            return Satisfaction(False, "P", x)
    for a, b in sorted(t.counting):
        if w[a] < w[b]:
            return Satisfaction(False, "K", (a, b))
    return SATISFIED


def membership(w: UnorderedWord, d: DimeAst) -> bool:
    return bool(word_satisfies(w, tuple_of(d)))


# Containment


def _dead(t: CompactTuple, a: str) -> bool:
    return t.card(a) == ZERO


def semantic_conflicts(t: CompactTuple, alphabet) -> set[tuple[str, str]]:
    """All pairs that never occur together in a word of the language."""
    out = set(t.conflicts)
    for a in alphabet:
        if _dead(t, a):
            for b in alphabet:
                if a != b:
                    out.add((a, b))
                    out.add((b, a))
    return out


def semantic_counting(t: CompactTuple, alphabet) -> set[tuple[str, str]]:
    """All pairs (a, b) with w(a) >= w(b) in every word of the language."""
    out = set(t.counting)
    for a in alphabet:
        for b in alphabet:
            if a != b and t.card(a).min >= t.card(b).max:
                out.add((a, b))
    return out


def _subsumption_failure(t_sub: CompactTuple, t_sup: CompactTuple):
    alphabet = sorted(t_sub.symbols | t_sup.symbols)
    c_sub = semantic_conflicts(t_sub, alphabet)
    for pair in sorted(t_sup.conflicts):
        if pair not in c_sub:
            return "C", pair
    for a in alphabet:
        if not interval_contains(t_sup.card(a), t_sub.card(a)):
            return "N", a
    for x in sorted(t_sup.required, key=sorted):
        closed = impl_set(t_sub, x)
        if not any(y <= closed for y in t_sub.required):
            return "P", x
    k_sub = semantic_counting(t_sub, alphabet)
    for pair in sorted(t_sup.counting):
        if pair not in k_sub:
            return "K", pair
    return None


def tuple_subsumes(t_sub: CompactTuple, t_sup: CompactTuple) -> bool:
    """True iff every word satisfying ``t_sub`` satisfies ``t_sup``.

    The conflict and counting parts of ``t_sub`` are first closed under the
    facts implied by its cardinality map (absent symbols conflict with all,
    a symbol whose least count bounds another's largest count dominates it).
    """
    return _subsumption_failure(t_sub, t_sup) is None


@dataclass(frozen=True)
class Containment:
    holds: bool
    component: str | None = None
    witness: object = None
    counterexample: UnorderedWord | None = None

    def __bool__(self) -> bool:
        return self.holds


def dime_contains_detail(sup: DimeAst, sub: DimeAst) -> Containment:
    t_sub, t_sup = tuple_of(sub), tuple_of(sup)
    fail = _subsumption_failure(t_sub, t_sup)
    if fail is None:
        return Containment(True)
    comp, what = fail
    word = _counterexample(reduce(sub), t_sub, t_sup, comp, what)
    assert word is not None and membership(word, sub) and not membership(word, sup), (
        f"no verified counterexample for failing component {comp}"
    )
    return Containment(False, comp, what, word)


def dime_contains(sup: DimeAst, sub: DimeAst) -> bool:
    """True iff L(sub) is a subset of L(sup)."""
    return dime_contains_detail(sup, sub).holds


def dime_equivalent(e1: DimeAst, e2: DimeAst) -> bool:
    return dime_contains(e1, e2) and dime_contains(e2, e1)


def _counterexample(sub_reduced, t_sub, t_sup, comp, what):
    if comp == "C":
        a, b = what
        return build_word(sub_reduced, {a: (1, INF), b: (1, INF)})
    if comp == "N":
        inner, outer = t_sub.card(what), t_sup.card(what)
        for i in inner.values(max(inner.finite_endpoints() + outer.finite_endpoints()) + 1):
            if i not in outer:
                return build_word(sub_reduced, {what: (i, i)})
        return None
    if comp == "P":
        return build_word(sub_reduced, {a: (0, 0) for a in what})
    a, b = what
    w = build_word(sub_reduced, {a: (0, 0), b: (1, INF)})
    if w is None:
        m = t_sub.card(a).min
        w = build_word(sub_reduced, {a: (m, m), b: (m + 1, INF)})
    return w


# Word construction


def _atom_min_k(ai: AtomWithInterval, bounds, need_positive: bool):
    """Least iteration count of the atom compatible with ``bounds``, or None."""
    req, opt = ai.atom.required(), ai.atom.optional()
    lo = max([bounds.get(a, (0, INF))[0] for a in req + opt] + [1 if need_positive else 0])
    hi = min([bounds.get(a, (0, INF))[1] for a in req] + [ai.interval.hi])
    iv = ai.interval
    if lo == 0 and 0 in iv:
        k = 0
    else:
        k = max(lo, iv.lo, 1)
    if k > hi:
        return None
    return k


def _atom_word(ai: AtomWithInterval, k: int, bounds) -> dict[str, int]:
    out = {a: k for a in ai.atom.required()}
    for a in ai.atom.optional():
        out[a] = bounds.get(a, (0, INF))[0]
    return out


def _cost(counts: dict[str, int], cost) -> float:
    return sum(n * (cost.get(a, 1) if cost else 1) for a, n in counts.items())


def build_word(
    reduced: DimeAst,
    bounds: Mapping[str, tuple[int, float]],
    cost: Mapping[str, float] | None = None,
) -> UnorderedWord | None:
    """A cheapest word of the reduced DIME whose counts respect ``bounds``.

    ``bounds`` maps symbols to inclusive ``(lo, hi)`` ranges; other symbols are
    unconstrained. ``cost`` weighs each occurrence (default 1). Returns None
    when no word fits.
    """
    syms = reduced.symbols()
    for a, (lo, _) in bounds.items():
        if a not in syms and lo > 0:
            return None
    total: dict[str, int] = {}
    for t, atoms in typed_clauses(reduced):
        best = None
        if t is ClauseType.TYPE1:
            loose = [AtomWithInterval(ai.atom, STAR) for ai in atoms]
            parts = []
            for ai in loose:
                k = _atom_min_k(ai, bounds, False)
                if k is None:
                    return None
                parts.append(_atom_word(ai, k, bounds))
            if any(any(p.values()) for p in parts):
                best = {a: n for p in parts for a, n in p.items()}
            else:
                # every atom sits at zero rounds; give the cheapest one a round
                options = []
                for i, ai in enumerate(loose):
                    k = _atom_min_k(ai, bounds, True)
                    if k is not None:
                        p = _atom_word(ai, k, bounds)
                        options.append((_cost(p, cost), i, p))
                if options:
                    best = min(options, key=lambda o: (o[0], o[1]))[2]
        else:
            names = [a for ai in atoms for a in ai.atom.names()]
            options = []
            for i, ai in enumerate(atoms):
                others = [a for a in names if a not in ai.atom.names()]
                if any(bounds.get(a, (0, INF))[0] > 0 for a in others):
                    continue
                k = _atom_min_k(ai, bounds, t is ClauseType.TYPE2)
                if k is None:
                    continue
                p = _atom_word(ai, k, bounds)
                options.append((_cost(p, cost), i, p))
            if options:
                best = min(options, key=lambda o: (o[0], o[1]))[2]
        if best is None:
            return None
        for a, n in best.items():
            if n:
                total[a] = n
    for a, (lo, hi) in bounds.items():
        if not lo <= total.get(a, 0) <= hi:
            return None
    return UnorderedWord(total)
