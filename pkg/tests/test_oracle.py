import random
from math import comb

import pytest

from gen import random_dime
from udime.model import Tree, UnorderedWord
from udime.oracle import (
    Bounded,
    EnumBudget,
    containment_bound,
    enumerate_trees,
    enumerate_words,
    iter_valid_trees,
    language_upto,
    naive_eval,
    naive_query_contained,
    naive_query_impl,
    naive_query_sat,
    naive_validate,
    ure_membership_bruteforce,
)
from udime.syntax import parse_dime, parse_query, parse_schema, parse_ure

W = UnorderedWord.parse


def test_membership_examples(e0):
    assert ure_membership_bruteforce(W("a:2,b:2,c:1"), e0)
    balanced = parse_ure("(a || (b | c))*")
    assert ure_membership_bruteforce(W("a:3,b:1,c:2"), balanced)
    assert not ure_membership_bruteforce(W("a:3,b:1,c:1"), balanced)
    assert not ure_membership_bruteforce(W("a:1,b:2"), parse_ure("(a || b?)+ || (a | c)?"))


def test_repeated_symbols_have_only_brute_force_semantics():
    e = parse_ure("a || a?")
    assert ure_membership_bruteforce(W("a:1"), e)
    assert ure_membership_bruteforce(W("a:2"), e)
    assert not ure_membership_bruteforce(W("a:3"), e)


def test_word_enumeration():
    assert enumerate_words("a", 2) == [W("eps"), W("a:1"), W("a:2")]
    assert set(enumerate_words("ab", 1)) == {W("eps"), W("a:1"), W("b:1")}
    assert len(enumerate_words("abc", 4)) == comb(4 + 3, 3) == 35
    assert len(set(enumerate_words("abcd", 5))) == comb(9, 4)


def test_bound_examples(e0):
    assert containment_bound(e0, parse_dime("a* || b* || c* || d[5,inf]?")) == 28
    assert containment_bound(parse_dime("eps"), parse_dime("eps")) == 0
    assert containment_bound(parse_dime("(a || b?)[0,5]"), parse_dime("(a || b?)*")) == 14


def test_tree_enumeration():
    assert {t.canonical() for t in enumerate_trees("r", 2)} == {Tree.build("r").canonical(), Tree.from_nested(("r", ["r"])).canonical()}
    assert len(enumerate_trees("ra", 2)) == 6
    assert sum(len(t) == 4 for t in enumerate_trees("r", 4)) == 4
    # unlabeled rooted trees: 1, 1, 2, 4, 9, 20
    assert [sum(len(t) == n for t in enumerate_trees("r", 6)) for n in range(1, 7)] == [1, 1, 2, 4, 9, 20]


def test_valid_tree_enumeration_matches_filtering():
    s = parse_schema("root: r\nr -> a* || b?\na -> b?\n")
    direct = {t.canonical() for t in iter_valid_trees(s, 5)}
    filtered = {t.canonical() for t in enumerate_trees("rab", 5) if naive_validate(s, t)}
    assert direct == filtered and direct


def test_query_examples(example3):
    sat = naive_query_sat(example3, parse_query("r[a]/b//d"))
    assert sat.verdict is Bounded.TRUE and naive_eval(sat.tree, parse_query("r[a]/b//d"))
    assert naive_query_sat(parse_schema("root: r\n"), parse_query("r//a")).verdict is Bounded.FALSE
    cnt = naive_query_contained(example3, parse_query("r"), parse_query("r/a"))
    assert cnt.verdict is Bounded.FALSE and naive_validate(example3, cnt.tree)
    assert naive_query_impl(example3, parse_query("r/b//d")).verdict is Bounded.TRUE


def test_exhaustion_is_a_verdict(example3):
    res = naive_query_sat(example3, parse_query("r//x"), EnumBudget(max_tree_nodes=8, max_trees=3))
    assert res.verdict is Bounded.EXHAUSTED


def test_raising_the_repeat_cap_never_changes_membership():
    rng = random.Random(41)
    for _ in range(150):
        d = random_dime(rng)
        assert language_upto(d, 5, "abcd") == {w for w in language_upto(d, 7, "abcd") if w.size <= 5}


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        EnumBudget(max_word_size=0)
