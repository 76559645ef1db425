import random

import pytest

from gen import random_dime_text, random_ims, random_query, random_tree
from udime.model import INF, STAR, Axis, Disjunction, Epsilon, Interval, Repeat, SchemaKind, Symbol, Tree, UnorderedConcat
from udime.syntax import (
    ErrorKind,
    EventKind,
    ParseError,
    parse_dime,
    parse_query,
    parse_schema,
    parse_tree,
    parse_ure,
    read_events,
    serialize_dime,
    serialize_query,
    serialize_schema,
    serialize_tree,
    serialize_ure,
    tree_from_events,
    tree_events,
)


def test_ure_examples():
    assert parse_ure("(a || (b | c))*") == Repeat(UnorderedConcat((Symbol("a"), Disjunction((Symbol("b"), Symbol("c"))))), STAR)
    assert parse_ure("eps") == Epsilon()
    assert parse_ure("d[5,inf]") == Repeat(Symbol("d"), Interval(5, INF))


def test_concat_binds_tighter_than_disjunction():
    assert parse_ure("a || b | c") == Disjunction((UnorderedConcat((Symbol("a"), Symbol("b"))), Symbol("c")))


def test_dime_examples():
    d = parse_dime("(a | (b||c?))+ || (d[3,4] | e*)")
    assert len(d.clauses) == 2
    with pytest.raises(ParseError) as err:
        parse_dime("(a||b?)+ || (a|c)")
    assert err.value.kind is ErrorKind.DuplicateSymbol
    assert err.value.position == (1, 14)
    with pytest.raises(ParseError) as err:
        parse_dime("(a? || b+) | c")
    assert err.value.kind is ErrorKind.NotADime


@pytest.mark.parametrize(
    "text, kind, pos",
    [
        ("(a || b", ErrorKind.UnbalancedParen, (1, 1)),
        ("a || b)", ErrorKind.UnbalancedParen, (1, 7)),
        ("a[3,2]", ErrorKind.BadInterval, (1, 2)),
        ("a || || b", ErrorKind.UnexpectedToken, (1, 6)),
        ("a $ b", ErrorKind.UnexpectedToken, (1, 3)),
    ],
)
def test_errors_point_at_first_offending_character(text, kind, pos):
    with pytest.raises(ParseError) as err:
        parse_ure(text)
    assert err.value.kind is kind
    assert err.value.position == pos


def test_not_a_dime_names_the_restriction():
    with pytest.raises(ParseError) as err:
        parse_dime("(a[2,3] | b)+")
    assert "simple" in err.value.message


def test_schema_examples(peers):
    assert len(peers.rules) == 3 and peers.kind is SchemaKind.IMS
    events = parse_schema("root: events\nevents -> (play || theater) | (movie || cinema)\n")
    assert events.kind is SchemaKind.DIMS
    bare = parse_schema("root: r\n")
    assert bare.root == "r" and not bare.rules


def test_schema_errors():
    with pytest.raises(ParseError) as err:
        parse_schema("root: r\nr -> a\nr -> b\n")
    assert err.value.kind is ErrorKind.DuplicateRule and err.value.line == 3
    with pytest.raises(ParseError):
        parse_schema("r -> a\n")
    with pytest.raises(ParseError) as err:
        parse_schema("root: r\nr -> a || a\n")
    assert err.value.kind is ErrorKind.DuplicateSymbol and err.value.position == (2, 11)


def test_comments_are_ignored():
    s = parse_schema("# peers\nroot: r  # the root\nr -> a*  # many\n")
    assert serialize_schema(s) == "root: r\nr -> a*\n"


def test_tree_examples():
    t1 = parse_tree("<r><a><b/></a><a><b/></a></r>")
    assert t1 == Tree.from_nested(("r", [("a", ["b"]), ("a", ["b"])]))
    assert parse_tree("<r/>") == Tree.build("r")
    with pytest.raises(ParseError) as err:
        parse_tree("<r><a></b></r>")
    assert err.value.kind is ErrorKind.BadTag


@pytest.mark.parametrize(
    "text",
    ['<r a="1"/>', "<r>hello</r>", "<r><!-- c --></r>", "<?xml version='1.0'?><r/>"],
)
def test_unsupported_xml(text):
    with pytest.raises(ParseError) as err:
        parse_tree(text)
    assert err.value.kind is ErrorKind.UnsupportedXmlFeature


def test_event_examples():
    kinds = [(e.kind, e.symbol) for e in read_events("<r><a/></r>")]
    assert kinds == [(EventKind.OPEN, "r"), (EventKind.OPEN, "a"), (EventKind.CLOSE, "a"), (EventKind.CLOSE, "r")]
    assert [str(e) for e in read_events("open r\nclose r")] == ["open r", "close r"]
    seen = []
    with pytest.raises(ParseError) as err:
        for e in read_events("<r><a/>"):
            seen.append(str(e))
    assert seen == ["open r", "open a", "close a"]
    assert err.value.kind is ErrorKind.TruncatedStream


def test_query_examples():
    q0 = parse_query("r/*[*]//a")
    assert q0.labels == ("r", "*", "*", "a")
    assert q0.edges[1] == ((2, Axis.CHILD), (3, Axis.DESCENDANT))
    q = parse_query("r[a]/b//d")
    assert q.labels == ("r", "a", "b", "d")
    assert q.edges[0] == ((1, Axis.CHILD), (2, Axis.CHILD))
    assert parse_query("r").labels == ("r",)
    assert parse_query("/r//a") == parse_query("r//a")
    for bad in ["r/", "r[a", "r//", "", "r]"]:
        with pytest.raises(ParseError):
            parse_query(bad)


def test_round_trips_on_random_values():
    rng = random.Random(7)
    for _ in range(300):
        text = random_dime_text(rng)
        d = parse_dime(text)
        assert parse_dime(serialize_dime(d)) == d
        assert parse_ure(serialize_ure(d.to_ure())) == d.to_ure()
    for _ in range(50):
        s = random_ims(rng)
        assert parse_schema(serialize_schema(s)) == s
    for _ in range(200):
        t = random_tree(rng, ["r", "a", "b"], 9)
        assert parse_tree(serialize_tree(t)).isomorphic(t)
        assert parse_tree(serialize_tree(t, indent=2)) == t
        assert tree_from_events(tree_events(t)) == t
        text = "".join(f"{e}\n" for e in tree_events(t))
        assert parse_tree(text) == tree_from_events(read_events(text)) == t
        q = random_query(rng, ["r", "a", "b"], 5)
        assert parse_query(serialize_query(q)) == q
