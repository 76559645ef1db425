"""Static analysis of twig queries under a disjunction-free schema."""

# %% The running schema and its two dependency graphs: an edge a -> b means
# b may (existential) or must (universal) appear under a.
from udime import dependency_graphs, parse_query, parse_schema, query_contained, query_implied, query_satisfiable
from udime.query import enumerate_characteristic_graphs
from udime.syntax import serialize_tree

s = parse_schema("""
root: r
r -> (a? || b)[1,10] || c
a -> d?
b -> a[2,3] || c* || d+
""")
may, must = dependency_graphs(s)
print("may: ", sorted(may.edges))
print("must:", sorted(must.edges))

# %% Satisfiability builds a valid witness; implication failures come with a
# valid tree that avoids the query.
q = parse_query("r[a]/b//d")
sat = query_satisfiable(s, q)
print("satisfiable:", sat.verdict.name, serialize_tree(sat.tree))
imp = query_implied(s, q)
print("implied:    ", imp.verdict.name, serialize_tree(imp.tree))
print("r/b//d implied:", query_implied(s, parse_query("r/b//d")).verdict.name)

# %% Each way of reaching d from r gives one characteristic graph.
for g in enumerate_characteristic_graphs(parse_query("r//d"), s):
    print(len(g), "vertices:", "".join(g.labels))

# %% Containment; negative answers carry a counterexample tree.
for p, q in [("r/b", "r/b[d]"), ("r", "r/a"), ("r//d", "r/b//d")]:
    res = query_contained(s, parse_query(p), parse_query(q))
    extra = f" {serialize_tree(res.tree)}" if res.tree is not None else ""
    print(f"{p} within {q}: {res.verdict.name} via {res.method}{extra}")
