import random
from collections import deque

import pytest

from conftest import DATA
from gen import random_dag, random_ims, random_query, random_tree
from udime.dtd import dtd_symbols, dtd_min_nb, ordered_validate, ordered_words, parse_regex
from udime.graphs import DepGraph, Flavor, embed, simulates, tree_embeds, tree_graph, unfold
from udime.model import Tree, Verdict
from udime.oracle import Bounded, EnumBudget, iter_valid_trees, naive_eval, naive_query_contained, naive_query_impl, naive_query_sat
from udime.query import (
    NotDisjunctionFree,
    SchemaView,
    dependency_graphs,
    dtd_dependency_graphs,
    dtd_query_contained,
    dtd_query_implied,
    embed_query_in_graph,
    enumerate_characteristic_graphs,
    eval_query,
    graph_vertex_bound,
    ime_symbols,
    min_nb,
    query_contained,
    query_implied,
    query_satisfiable,
    simulate_graph_in_tree,
    tree_embeddings,
    unfold_graph,
)
from udime.syntax import parse_dime, parse_query, parse_schema, parse_tree, serialize_tree
from udime.validator import validate_tree

Q = parse_query

EX3_EXISTS = {("r", "a"), ("r", "b"), ("r", "c"), ("b", "a"), ("b", "c"), ("b", "d"), ("a", "d")}
EX3_FORALL = {("r", "b"), ("r", "c"), ("b", "a"), ("b", "d")}


def _edges(g: DepGraph) -> set:
    return set(g.edges)


def test_eval_examples():
    t0 = parse_tree((DATA / "t0.xml").read_text())
    q0 = Q("r/*[*]//a")
    assert eval_query(t0, q0)
    assert len(list(tree_embeddings(t0, q0))) == 2
    assert eval_query(Tree.build("r"), Q("r"))
    assert not eval_query(Tree.build("r"), Q("r//a"))


def test_ime_symbols_examples():
    assert ime_symbols(parse_dime("(a || b?)[5,6] || c+")) == ({"a", "c"}, {"a", "b", "c"})
    assert ime_symbols(parse_dime("eps")) == (set(), set())
    assert ime_symbols(parse_dime("a? || b")) == ({"b"}, {"a", "b"})
    with pytest.raises(ValueError):
        ime_symbols(parse_dime("a | b"))


def test_min_nb_examples():
    assert min_nb(parse_dime("(a || b?)[5,6] || c+"), "a") == 5
    assert min_nb(parse_dime("(a || b?)[5,6] || c+"), "x") == 0
    assert min_nb(parse_dime("a[2,3] || c*"), "c") == 0


def test_dependency_graphs(example3, peers):
    ge, ga = dependency_graphs(example3)
    assert _edges(ge) == EX3_EXISTS and _edges(ga) == EX3_FORALL
    assert ge.flavor is Flavor.EXISTENTIAL and ga.flavor is Flavor.UNIVERSAL and ge.root == "r"
    ge, ga = dependency_graphs(parse_schema("root: r\n"))
    assert not ge.edges and not ga.edges
    ge, ga = dependency_graphs(peers)
    assert _edges(ge) == {
        ("peers", "user"), ("peers", "vip"), ("user", "upload"), ("user", "download"), ("vip", "upload"), ("vip", "download"),
    }
    assert _edges(ga) == {("vip", "upload")}
    with pytest.raises(NotDisjunctionFree):
        dependency_graphs(parse_schema("root: r\nr -> a | b\n"))


def test_graph_embedding_examples(example3):
    ge, ga = dependency_graphs(example3)
    assert embed_query_in_graph(Q("r[a]/b//d"), ge) is not None
    assert embed_query_in_graph(Q("r[a]/b//d"), ga) is None
    assert embed_query_in_graph(Q("r/b//d"), ga) is not None


def test_simulation_examples(example3):
    _, ga = dependency_graphs(example3)
    for t in iter_valid_trees(example3, 9):
        assert simulate_graph_in_tree(ga, t)
    assert simulate_graph_in_tree(DepGraph(("r",), "r", frozenset()), Tree.build("r"))
    assert not simulate_graph_in_tree(DepGraph(("r", "a"), "r", frozenset({("r", "a")})), Tree.build("r"))


def test_unfolding_examples():
    g1 = DepGraph(tuple("rabcde"), "r", frozenset({("r", "a"), ("r", "b"), ("r", "c"), ("b", "d"), ("c", "d"), ("d", "e")}))
    assert unfold_graph(g1) == Tree.from_nested(("r", ["a", ("b", [("d", ["e"])]), ("c", [("d", ["e"])])]))
    g2 = DepGraph(
        ("r", "a1", "a2", "b", "c1", "c2", "d"), "r",
        frozenset({("r", "a1"), ("r", "a2"), ("a1", "b"), ("a2", "b"), ("b", "c1"), ("b", "c2"), ("c1", "d"), ("c2", "d")}),
    )
    u = unfold_graph(g2)
    assert len(u) == 13 and sum(lab == "d" for lab in u.labels) == 4
    assert unfold_graph(DepGraph(("r",), "r", frozenset())) == Tree.build("r")
    with pytest.raises(ValueError):
        unfold_graph(DepGraph(("r", "a"), "r", frozenset({("r", "a"), ("a", "r")})))


def _path_to_marked(g, label):
    lab = g.as_labeled()
    target = [v for v in g.marked if g.labels[v] == label][0]
    prev = {g.root: None}
    todo = deque([g.root])
    while todo:
        v = todo.popleft()
        for u in lab.succ[v]:
            if u not in prev:
                prev[u] = v
                todo.append(u)
    path = []
    v = target
    while v is not None:
        path.append(g.labels[v])
        v = prev[v]
    return "".join(reversed(path))


def test_characteristic_graphs(example3):
    graphs = list(enumerate_characteristic_graphs(Q("r//d"), example3))
    assert sorted(_path_to_marked(g, "d") for g in graphs) == ["rad", "rbad", "rbd"]
    assert len(list(enumerate_characteristic_graphs(Q("r/b/d"), example3))) == 1
    assert list(enumerate_characteristic_graphs(Q("r/d"), example3)) == []
    for g in enumerate_characteristic_graphs(Q("r[a]/b//d"), example3):
        g.as_labeled().check_acyclic()
        assert len(g) <= 4 * 25
        assert {g.labels[v] for v in g.marked} == set("rabd")


def test_query_battery(example3):
    q, q2 = Q("r[a]/b//d"), Q("r/b//d")
    sat = query_satisfiable(example3, q)
    assert sat.verdict is Verdict.TRUE
    assert validate_tree(example3, sat.tree).accepted and eval_query(sat.tree, q)
    assert serialize_tree(sat.tree) == "<r><a/><b><a/><a/><d/></b><c/></r>"
    imp = query_implied(example3, q)
    assert imp.verdict is Verdict.FALSE
    assert validate_tree(example3, imp.tree).accepted and not eval_query(imp.tree, q)
    assert query_implied(example3, q2).verdict is Verdict.TRUE
    assert query_satisfiable(example3, Q("r")).verdict is Verdict.TRUE
    assert query_satisfiable(example3, Q("r/d")).verdict is Verdict.FALSE
    assert query_implied(example3, Q("*")).verdict is Verdict.TRUE


def test_containment_examples(example3):
    p = Q("r[a]/b//d")
    assert query_contained(example3, p, p).verdict is Verdict.TRUE
    assert query_contained(example3, Q("r/b"), Q("r/b[d]")).verdict is Verdict.TRUE
    res = query_contained(example3, Q("r"), Q("r/a"))
    assert res.verdict is Verdict.FALSE
    assert serialize_tree(res.tree) == "<r><b><a/><a/><d/></b><c/></r>"
    assert query_contained(example3, Q("r/d"), Q("r/a")).verdict is Verdict.TRUE


def test_counterexample_needing_a_repeated_label_on_a_path():
    s = parse_schema("root: r\nr -> a?\na -> b? || x?\nb -> a?\n")
    res = query_contained(s, Q("r//x"), Q("r/a/x"))
    assert res.verdict is Verdict.FALSE
    assert serialize_tree(res.tree) == "<r><a><b><a><x/></a></b></a></r>"


def test_containment_forced_by_an_upper_bound():
    s = parse_schema("root: r\nr -> a\na -> b? || c?\n")
    assert query_contained(s, Q("r[a/b][a/c]"), Q("r/a[b][c]")).verdict is Verdict.TRUE
    assert naive_query_contained(s, Q("r[a/b][a/c]"), Q("r/a[b][c]")).verdict is Bounded.TRUE


def test_cap_exhaustion_is_reported(example3):
    res = query_contained(example3, Q("r//d"), Q("r/b/d"), cap=0)
    assert res.verdict is Verdict.INDETERMINATE
    with pytest.raises(ValueError):
        bool(res)


def test_rejects_disjunctive_schemas():
    s = parse_schema("root: r\nr -> a | b\n")
    with pytest.raises(NotDisjunctionFree):
        query_satisfiable(s, Q("r/a"))


def test_dtd_examples():
    d = parse_schema("root: r\nr -> a · b\n", dtd=True)
    assert dtd_query_implied(d, Q("r[a][b]")).verdict is Verdict.TRUE
    d = parse_schema("root: r\nr -> a? · b\n", dtd=True)
    res = dtd_query_implied(d, Q("r/a"))
    assert res.verdict is Verdict.FALSE and res.tree == Tree.from_nested(("r", ["b"]))
    assert ordered_validate(d, res.tree)
    d = parse_schema("root: r\nr -> a · a\n", dtd=True)
    assert dtd_query_contained(d, Q("r/a"), Q("r[a]/a")).verdict is Verdict.TRUE
    assert dtd_min_nb(d.rule("r"), "a") == 2
    ge, ga = dtd_dependency_graphs(d)
    assert _edges(ga) == {("r", "a")}


def test_dtd_symbols_examples():
    assert dtd_symbols(parse_regex("a · (b?) · c+")) == ({"a", "c"}, {"a", "b", "c"})
    assert dtd_symbols(parse_regex("eps")) == (set(), set())
    assert dtd_symbols(parse_regex("(a · b)*")) == (set(), {"a", "b"})


def test_dtd_symbols_agree_with_ordered_words():
    rng = random.Random(51)
    atoms = ["a", "b", "c", "(a · b)", "(b · c?)", "(a+ · c)"]
    for _ in range(200):
        parts = [rng.choice(atoms) + rng.choice(["", "?", "*", "+"]) for _ in range(rng.randint(1, 3))]
        e = parse_regex(" · ".join(parts))
        words = ordered_words(e, 4)
        forall, exists = dtd_symbols(e)
        assert forall == set.intersection(*(set(w) for w in words))
        short = set().union(*(set(w) for w in words))
        assert short <= exists
        if all(len(w) < 4 for w in ordered_words(e, 6)):
            assert short == exists


def test_dtd_unordered_validation_matches_ordered_oracle():
    rng = random.Random(52)
    d = parse_schema("root: r\nr -> a · b* · (c · a)?\nb -> (c · c)?\n", dtd=True)
    for _ in range(300):
        t = random_tree(rng, ["r", "a", "b", "c"], 6, root="r")
        assert SchemaView.of(d).valid(t) == ordered_validate(d, t)


def test_graph_and_unfolding_agree_on_random_instances():
    rng = random.Random(53)
    for _ in range(250):
        syms = ["r", "a", "b", "c", "d", "e"][: rng.randint(2, 6)]
        g = random_dag(rng, syms)
        u = unfold(g)
        t = random_tree(rng, syms, 10, root=g.labels[g.root])
        assert simulates(g, t) == tree_embeds(u, t)
        q = random_query(rng, syms, 4, root=rng.choice([g.root, "*"]))
        assert (embed(q, g) is not None) == bool(eval_query(u, q)) == naive_eval(u, q)


def test_eval_agrees_with_backtracking():
    rng = random.Random(54)
    for _ in range(300):
        t = random_tree(rng, ["r", "a", "b"], 9)
        q = random_query(rng, ["r", "a", "b"], 4)
        assert bool(eval_query(t, q)) == naive_eval(t, q)
        lam = eval_query(t, q).embedding
        if lam:
            assert lam[0] == 0 and all(t.labels[lam[n]] == lab or lab == "*" for n, lab in enumerate(q.labels))


def _satisfiable_query(rng, s, tries=20):
    for _ in range(tries):
        q = random_query(rng, s.alphabet, 4, root="r")
        if query_satisfiable(s, q).verdict is Verdict.TRUE:
            return q
    return q


def test_analysis_agrees_with_tree_search():
    rng = random.Random(55)
    budget = EnumBudget(max_tree_nodes=7)
    for _ in range(60):
        s = random_ims(rng)
        q = random_query(rng, s.alphabet, 4, root=rng.choice(["r", "*"]))
        sat = query_satisfiable(s, q)
        naive = naive_query_sat(s, q, budget)
        if naive.verdict is Bounded.TRUE:
            assert sat.verdict is Verdict.TRUE
        if sat.verdict is Verdict.TRUE:
            assert validate_tree(s, sat.tree).accepted and eval_query(sat.tree, q)
        imp = query_implied(s, q)
        if imp.verdict is Verdict.TRUE:
            assert naive_query_impl(s, q, budget).verdict is not Bounded.FALSE
        else:
            assert validate_tree(s, imp.tree).accepted and not eval_query(imp.tree, q)
        p = _satisfiable_query(rng, s)
        for g in enumerate_characteristic_graphs(p, s):
            assert len(g) <= graph_vertex_bound(p, s)
        res = query_contained(s, p, q)
        if res.verdict is Verdict.FALSE:
            t = res.tree
            assert validate_tree(s, t).accepted and eval_query(t, p) and not eval_query(t, q)
        else:
            assert naive_query_contained(s, p, q, budget).verdict is not Bounded.FALSE
