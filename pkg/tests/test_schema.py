import random

import pytest

from gen import random_ims
from udime.model import Schema, Tree
from udime.oracle import EnumBudget, iter_valid_trees, naive_schema_sat, Bounded
from udime.query import dependency_graphs
from udime.schema import UnsatisfiableSchema, reachable, satisfiable, schema_contains, trim
from udime.dime import dime_equivalent
from udime.syntax import parse_dime, parse_schema
from udime.validator import validate_tree


def test_satisfiable_examples(peers):
    ok, t = satisfiable(peers)
    assert ok and t == Tree.build("peers")
    assert satisfiable(parse_schema("root: r\nr -> a\na -> r\n")) == (False, None)
    ok, t = satisfiable(parse_schema("root: r\nr -> a | b\na -> r\n"))
    assert ok and t == Tree.from_nested(("r", ["b"]))


def test_trim_examples(example3):
    t, report = trim(example3)
    assert t.root == example3.root and set(t.rules) == set(example3.rules)
    assert all(dime_equivalent(t.rule(a), example3.rule(a)) for a in example3.alphabet)
    t, _ = trim(parse_schema("root: r\nr -> a?\na -> a\n"))
    assert t.alphabet == ("r",) and dime_equivalent(t.rule("r"), parse_dime("eps"))
    t, report = trim(parse_schema("root: r\nr -> b\nc -> b\n"))
    assert "c" not in t.rules and "c" not in report.reachable
    with pytest.raises(UnsatisfiableSchema):
        trim(parse_schema("root: r\nr -> r\n"))


def test_contains_examples(dblp):
    assert schema_contains(dblp, dblp)
    small = parse_schema("root: r\nr -> a[0,5]\n")
    big = parse_schema("root: r\nr -> a*\n")
    assert schema_contains(small, big)
    res = schema_contains(big, small)
    assert not res and res.symbol == "r" and res.word["a"] == 6
    assert validate_tree(big, res.counterexample).accepted
    assert not validate_tree(small, res.counterexample).accepted
    res = schema_contains(parse_schema("root: r\nr -> a || b\n"), parse_schema("root: q\nq -> a || b\n"))
    assert not res and res.reason == "RootMismatch"


def test_unreachable_junk_does_not_break_containment():
    s1 = parse_schema("root: r\nr -> a\nz -> a*\n")
    s2 = parse_schema("root: r\nr -> a\n")
    assert schema_contains(s1, s2)


def test_satisfiability_agrees_with_tree_search():
    rng = random.Random(31)
    for _ in range(120):
        rules = {a: parse_dime(t) for a, t in [("r", rng.choice(["a", "a?", "a | b", "a || b", "b+"])),
                                               ("a", rng.choice(["r", "a?", "b", "eps", "a"])),
                                               ("b", rng.choice(["a", "eps", "b?", "r | a"]))]}
        s = Schema("r", rules)
        ok, t = satisfiable(s)
        naive = naive_schema_sat(s, EnumBudget(max_tree_nodes=6))
        assert ok == (naive.verdict is Bounded.TRUE)
        if ok:
            assert validate_tree(s, t).accepted


def test_trim_preserves_language_and_breaks_universal_cycles():
    rng = random.Random(32)
    for i in range(60):
        s = random_ims(rng, disjunction=i % 2 == 0)
        t, report = trim(s)
        before = {x.canonical() for x in iter_valid_trees(s, 6)}
        after = {x.canonical() for x in iter_valid_trees(t, 6)}
        assert before == after
        for a, w in report.witness.items():
            if a == s.root:
                assert validate_tree(s, w).accepted
        if all(r.disjunction_free for r in t.rules.values()):
            _, forall = dependency_graphs(t)
            forall.as_labeled().check_acyclic()


def test_containment_is_sound_and_a_preorder():
    rng = random.Random(33)
    schemas = [random_ims(rng, disjunction=i % 2 == 0) for i in range(25)]
    for s1 in schemas:
        assert schema_contains(s1, s1)
        for s2 in schemas:
            res = schema_contains(s1, s2)
            if res:
                assert all(validate_tree(s2, t).accepted for t in iter_valid_trees(s1, 6))
            elif res.counterexample is not None:
                assert validate_tree(s1, res.counterexample).accepted
                assert not validate_tree(s2, res.counterexample).accepted
            for s3 in schemas:
                if res and schema_contains(s2, s3):
                    assert schema_contains(s1, s3)


def test_reachable_follows_existential_edges(example3):
    assert reachable(example3) == set("rabcd")
