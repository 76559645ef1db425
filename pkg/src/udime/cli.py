"""Command-line front end.

Exit codes: 0 yes or accepted, 1 no or rejected, 2 input error, 3 undecided
within the configured cap or budget.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import oracle
from .dime import dime_contains_detail, membership, tuple_of, word_satisfies
from .model import Tree, UnorderedWord, Verdict
from .query import NotDisjunctionFree, eval_query, query_contained, query_implied, query_satisfiable
from .schema import satisfiable, schema_contains
from .syntax import ParseError, parse_dime, parse_query, parse_schema, parse_tree, parse_ure, serialize_dime, serialize_tree
from .validator import validate_stream

YES, NO, INPUT_ERROR, UNDECIDED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Out:
    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def emit(self, text: str, **record) -> None:
        if self.fmt == "json-lines":
            print(json.dumps(record, sort_keys=True), file=self.stream)
        else:
            print(text, file=self.stream)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror}") from None


def _word(text: str) -> UnorderedWord:
    try:
        return UnorderedWord.parse(text)
    except ValueError as err:
        raise UsageError(f"bad word {text!r}: {err}") from None


def _tree_text(t: Tree | None) -> str | None:
    return None if t is None else serialize_tree(t)


def _verdict_code(v: Verdict) -> int:
    return {Verdict.TRUE: YES, Verdict.FALSE: NO, Verdict.INDETERMINATE: UNDECIDED}[v]


def _bounded_code(v: oracle.Bounded) -> int:
    return {oracle.Bounded.TRUE: YES, oracle.Bounded.FALSE: NO, oracle.Bounded.EXHAUSTED: UNDECIDED}[v]


def _schema(args, dtd: bool = False):
    return parse_schema(_read(args.schema), dtd=dtd)


def _budget(args) -> oracle.EnumBudget:
    return oracle.EnumBudget(max_word_size=args.max_word, max_tree_nodes=args.max_nodes, max_trees=args.max_trees)


# Subcommands


def cmd_parse_dime(args, out: Out) -> int:
    d = parse_dime(args.dime)
    text = serialize_dime(d)
    out.emit(text, dime=text, disjunction_free=d.disjunction_free)
    return YES


def cmd_tuple(args, out: Out) -> int:
    t = tuple_of(parse_dime(args.dime))
    out.emit(str(t), tuple=str(t))
    return YES


def cmd_member(args, out: Out) -> int:
    w = _word(args.word)
    sat = word_satisfies(w, tuple_of(parse_dime(args.dime)))
    if sat:
        out.emit("ACCEPT", member=True, word=str(w))
        return YES
    wit = sat.witness_text
    out.emit(f"REJECT {sat.name}: {wit}", member=False, word=str(w), component=sat.component, witness=wit)
    return NO


def cmd_dime_contains(args, out: Out) -> int:
    res = dime_contains_detail(parse_dime(args.sup), parse_dime(args.sub))
    if res:
        out.emit("CONTAINED", contained=True)
        return YES
    cex = str(res.counterexample)
    out.emit(f"NOT CONTAINED {res.component}: counterexample {cex}", contained=False, component=res.component, counterexample=cex)
    return NO


def cmd_validate(args, out: Out) -> int:
    s = _schema(args)
    source = _read(args.tree if args.tree else args.events)
    outcome, stats = validate_stream(s, source)
    out.emit(
        f"{outcome}\nevents_consumed={stats.events_consumed} max_stack_depth={stats.max_stack_depth}",
        accepted=outcome.accepted,
        rejection=None if outcome.accepted else str(outcome.rejection),
        events_consumed=stats.events_consumed,
        max_stack_depth=stats.max_stack_depth,
    )
    return YES if outcome.accepted else NO


def cmd_schema_sat(args, out: Out) -> int:
    ok, t = satisfiable(_schema(args))
    text = "SATISFIABLE" if ok else "UNSATISFIABLE"
    if ok and args.witness:
        text += "\n" + serialize_tree(t)
    out.emit(text, satisfiable=ok, witness=_tree_text(t) if args.witness else None)
    return YES if ok else NO


def cmd_schema_contains(args, out: Out) -> int:
    res = schema_contains(parse_schema(_read(args.sub)), parse_schema(_read(args.sup)))
    if res:
        out.emit("CONTAINED", contained=True)
        return YES
    cex = _tree_text(res.counterexample)
    out.emit(
        f"NOT CONTAINED at {res.symbol}: {res.reason}\n{cex}",
        contained=False, symbol=res.symbol, reason=res.reason, word=str(res.word), counterexample=cex,
    )
    return NO


def _query_result(res, out: Out, args, key: str) -> int:
    tree = _tree_text(res.tree) if args.witness else None
    text = res.verdict.name
    if tree:
        text += "\n" + tree
    out.emit(text, **{key: res.verdict.name.lower()}, method=res.method, tree=tree)
    return _verdict_code(res.verdict)


def cmd_query_sat(args, out: Out) -> int:
    return _query_result(query_satisfiable(_schema(args, args.dtd), parse_query(args.query)), out, args, "satisfiable")


def cmd_query_impl(args, out: Out) -> int:
    return _query_result(query_implied(_schema(args, args.dtd), parse_query(args.query)), out, args, "implied")


def cmd_query_contains(args, out: Out) -> int:
    if not args.query2:
        raise UsageError("query-contains needs --query2")
    res = query_contained(_schema(args, args.dtd), parse_query(args.query), parse_query(args.query2), cap=args.cap)
    return _query_result(res, out, args, "contained")


def cmd_eval(args, out: Out) -> int:
    res = eval_query(parse_tree(_read(args.tree)), parse_query(args.query))
    emb = {str(k): v for k, v in sorted(res.embedding.items())} if res else None
    out.emit("TRUE" if res else "FALSE", holds=res.holds, embedding=emb)
    return YES if res else NO


def cmd_oracle(args, out: Out) -> int:
    what = args.what
    if what == "member":
        ok = oracle.ure_membership_bruteforce(_word(args.word), parse_ure(args.expr))
        out.emit("ACCEPT" if ok else "REJECT", member=ok)
        return YES if ok else NO
    if what == "contains":
        ok, cex = oracle.naive_contains(parse_dime(args.sup), parse_dime(args.sub), args.bound)
        out.emit("CONTAINED" if ok else f"NOT CONTAINED: counterexample {cex}", contained=ok, counterexample=None if ok else str(cex))
        return YES if ok else NO
    s = _schema(args)
    if what == "validate":
        ok = oracle.naive_validate(s, parse_tree(_read(args.tree)))
        out.emit("ACCEPT" if ok else "REJECT", accepted=ok)
        return YES if ok else NO
    q = parse_query(args.query)
    budget = _budget(args)
    if what == "query-sat":
        res = oracle.naive_query_sat(s, q, budget)
    elif what == "query-impl":
        res = oracle.naive_query_impl(s, q, budget)
    else:
        if not args.query2:
            raise UsageError("oracle query-contains needs --query2")
        res = oracle.naive_query_contained(s, q, parse_query(args.query2), budget)
    tree = _tree_text(res.tree)
    out.emit(f"{res.verdict.name} (examined {res.examined})" + (f"\n{tree}" if tree else ""),
             verdict=res.verdict.name.lower(), tree=tree, examined=res.examined)
    return _bounded_code(res.verdict)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json-lines"], default="text")
    common.add_argument("--max-word", type=int, default=6, help="oracle word size bound")
    common.add_argument("--max-nodes", type=int, default=8, help="oracle tree size bound")
    common.add_argument("--max-trees", type=int, default=200_000, help="oracle cap on trees examined")

    p = argparse.ArgumentParser(prog="udime", description="Schemas and queries for unordered XML.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(func=func)
        return sp

    sp = add("parse-dime", cmd_parse_dime, "check and normalize a DIME")
    sp.add_argument("--dime", required=True)
    sp = add("tuple", cmd_tuple, "print the compact characterizing tuple")
    sp.add_argument("--dime", required=True)
    sp = add("member", cmd_member, "test an unordered word against a DIME")
    sp.add_argument("--dime", required=True)
    sp.add_argument("--word", required=True, help="e.g. a:2,b:1 or eps")
    sp = add("dime-contains", cmd_dime_contains, "test L(sub) within L(sup)")
    sp.add_argument("--sup", required=True)
    sp.add_argument("--sub", required=True)

    sp = add("validate", cmd_validate, "stream-validate a tree")
    sp.add_argument("--schema", required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--tree")
    g.add_argument("--events")
    sp = add("schema-sat", cmd_schema_sat, "test whether a schema has a valid tree")
    sp.add_argument("--schema", required=True)
    sp.add_argument("--witness", action="store_true")
    sp = add("schema-contains", cmd_schema_contains, "test schema containment")
    sp.add_argument("--sub", required=True)
    sp.add_argument("--sup", required=True)

    for name, func in [("query-sat", cmd_query_sat), ("query-impl", cmd_query_impl), ("query-contains", cmd_query_contains)]:
        sp = add(name, func, name.replace("-", " "))
        sp.add_argument("--schema", required=True)
        sp.add_argument("--query", required=True)
        sp.add_argument("--query2")
        sp.add_argument("--witness", action="store_true")
        sp.add_argument("--cap", type=int)
        sp.add_argument("--dtd", action="store_true", help="rule bodies are disjunction-free DTD expressions")

    sp = add("eval", cmd_eval, "evaluate a twig query on a tree")
    sp.add_argument("--tree", required=True)
    sp.add_argument("--query", required=True)

    sp = add("oracle", cmd_oracle, "brute-force reference answers")
    sp.add_argument("what", choices=["member", "contains", "validate", "query-sat", "query-impl", "query-contains"])
    sp.add_argument("--expr", help="any unordered regular expression (member)")
    sp.add_argument("--word")
    sp.add_argument("--sup")
    sp.add_argument("--sub")
    sp.add_argument("--bound", type=int)
    sp.add_argument("--schema")
    sp.add_argument("--tree")
    sp.add_argument("--query")
    sp.add_argument("--query2")
    return p


_ORACLE_NEEDS = {
    "member": ("expr", "word"),
    "contains": ("sup", "sub"),
    "validate": ("schema", "tree"),
    "query-sat": ("schema", "query"),
    "query-impl": ("schema", "query"),
    "query-contains": ("schema", "query", "query2"),
}


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return YES if exc.code == 0 else INPUT_ERROR
    out = Out(args.format, stdout)
    try:
        if args.command == "oracle":
            missing = [f"--{n}" for n in _ORACLE_NEEDS[args.what] if not getattr(args, n)]
            if missing:
                raise UsageError(f"oracle {args.what} needs {' '.join(missing)}")
        return args.func(args, out)
    except ParseError as err:
        print(f"error: {err}", file=stderr)
        return INPUT_ERROR
    except (UsageError, NotDisjunctionFree) as err:
        print(f"error: {err}", file=stderr)
        return INPUT_ERROR
    except KeyboardInterrupt:
        out.emit("INDETERMINATE", verdict="indeterminate", reason="interrupted")
        return UNDECIDED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
