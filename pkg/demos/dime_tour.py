"""A tour of DIME expressions: normal form, the compact tuple, membership, containment."""

# %% An expression over four symbols: one or more a, plus either a run of
# (b with an optional c) blocks or at least five d.
from udime import UnorderedWord, dime_contains, membership, parse_dime, reduce, tuple_of
from udime.dime import dime_contains_detail, impl_set, word_satisfies

e0 = parse_dime("a+ || ((b || c?)+ | d[5,inf])")
print("expression:", e0)
print("reduced:   ", reduce(e0))

# %% The compact tuple: conflicts, per-symbol cardinalities, required sets and
# counting dependencies. Everything downstream is read off these four parts.
t = tuple_of(e0)
print(t)

# %% Membership is a check against each part; a rejection names the part.
for text in ["a:2,b:2,c:1", "a:1,b:1,d:5", "a:1,d:2", "a:2", "a:1,b:2,c:3"]:
    sat = word_satisfies(UnorderedWord.parse(text), t)
    print(f"{text:14s}", "ok" if sat else f"rejected by {sat.name} {sat.witness_text}")

# %% Symbols forced by a set of present symbols.
e1 = parse_dime("((a || b) | (c || d))+ || ((e || f)[2,5] | g[1,3]) || (h* || i[0,9])")
print("required sets:", sorted(map(sorted, tuple_of(e1).required)))
print("forced by {a, c}:", sorted(impl_set(tuple_of(e1), {"a", "c"})))

# %% Containment is decided on tuples; a failure comes with a counterexample word.
pairs = [("a* || b*", "(a || b?)*"), ("(a || b?)*", "(a || b?)[0,5]"), ("(a | b)+", "a+ | b+")]
for sup, sub in pairs:
    print(f"{sub!s:18s} inside {sup!s:18s}", dime_contains(parse_dime(sup), parse_dime(sub)))
    back = dime_contains_detail(parse_dime(sub), parse_dime(sup))
    print(f"{'':18s} and back?  {back.holds}, e.g. {back.counterexample}")
    assert membership(back.counterexample, parse_dime(sup))
