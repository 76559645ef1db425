"""Unordered XML schemas: DIME expressions, streaming validation and twig-query analysis."""

from .model import (
    INF,
    WILDCARD,
    Axis,
    DimeAst,
    Interval,
    Schema,
    SchemaKind,
    Tree,
    TwigQuery,
    UnorderedWord,
    Verdict,
    interval_contains,
    word_size,
    word_union,
)
from .syntax import (
    ErrorKind,
    ParseError,
    parse_dime,
    parse_query,
    parse_schema,
    parse_tree,
    parse_ure,
    read_events,
)
from .dime import (
    ClauseType,
    CompactTuple,
    characterizing_tuple,
    check_dime,
    clause_type,
    dime_contains,
    dime_equivalent,
    impl_set,
    membership,
    reduce,
    tuple_of,
    tuple_subsumes,
    word_satisfies,
)
from .validator import validate_stream, validate_tree
from .schema import satisfiable, schema_contains, trim

from .query import (
    QueryResult,
    dependency_graphs,
    embed_query_in_graph,
    enumerate_characteristic_graphs,
    eval_query,
    query_contained,
    query_implied,
    query_satisfiable,
    simulate_graph_in_tree,
    unfold_graph,
)

__version__ = "0.1.0"
