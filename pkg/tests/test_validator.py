import random
from itertools import islice

from conftest import DATA, load_schema
from gen import random_ims, random_tree
from udime.model import Schema, Tree
from udime.oracle import iter_valid_trees, naive_validate
from udime.syntax import parse_dime, parse_tree, tree_events
from udime.validator import Reason, validate_stream, validate_tree


def _permuted(t: Tree, rng: random.Random) -> Tree:
    def sub(n):
        kids = list(t.children[n])
        rng.shuffle(kids)
        return Tree.build(t.labels[n], *(sub(c) for c in kids))

    return sub(0)


def test_fig1_tree_is_accepted(dblp):
    outcome, stats = validate_stream(dblp, (DATA / "fig1.xml").read_text())
    assert outcome.accepted and outcome.rejection is None
    assert stats.events_consumed == 20 and stats.max_stack_depth == 3


def test_two_titles_rejected_at_second_title(dblp):
    outcome, stats = validate_stream(dblp, (DATA / "two_titles.xml").read_text())
    assert not outcome.accepted
    r = outcome.rejection
    assert r.reason is Reason.MaxCountExceeded and r.event_index == 5
    assert stats.events_consumed == 5
    assert str(r) == "REJECT at event #5, path dblp/article, reason=MaxCountExceeded(title)"


def test_conflict_rejected_at_second_conflicting_open():
    s = load_schema("events.ims")
    text = "<events><event><date/><play/><cinema/><theater/></event></events>"
    outcome, stats = validate_stream(s, text)
    assert outcome.rejection.reason is Reason.ConflictViolated
    assert stats.events_consumed == 7


def test_rejected_stream_is_not_read_further(dblp):
    consumed = []

    def events():
        for e in tree_events(parse_tree((DATA / "two_titles.xml").read_text())):
            consumed.append(e)
            yield e

    validate_stream(dblp, events())
    assert len(consumed) == 5


def test_tree_examples(peers):
    assert validate_tree(Schema("r"), Tree.build("r")).accepted
    ok = parse_tree("<peers><user><upload/><upload/><download/></user></peers>")
    assert validate_tree(peers, ok).accepted
    vip = Tree.build("peers", Tree.build("vip", *[Tree.build("upload")] * 99))
    outcome, stats = validate_stream(peers, tree_events(vip))
    assert outcome.rejection.reason is Reason.CardinalityViolated
    assert stats.events_consumed == 2 + 2 * 99 + 1


def test_close_time_reasons(dblp):
    cases = {
        "<dblp><article><title/><year/></article></dblp>": Reason.CardinalityViolated,
        "<dblp><book><title/><year/></book></dblp>": Reason.RequiredMissing,
        "<dblp><book><title/><year/><editor/><foo/></book></dblp>": Reason.UnknownLabel,
        "<book/>": Reason.RootMismatch,
    }
    for text, reason in cases.items():
        assert validate_tree(dblp, parse_tree(text)).rejection.reason is reason
    counting = Schema("r", {"r": parse_dime("(a || b?)*")})
    assert validate_tree(counting, parse_tree("<r><b/><a/><b/></r>")).rejection.reason is Reason.CountingViolated


def test_max_count_rejection_is_exact():
    s = Schema("r", {"r": parse_dime("a[0,3] || b*")})
    t = Tree.build("r", Tree.build("b"), *[Tree.build("a")] * 5)
    outcome, stats = validate_stream(s, tree_events(t))
    # r, b, /b, then three a pairs: the fourth a opens at event 3 + 2*3 + 1
    assert outcome.rejection.reason is Reason.MaxCountExceeded
    assert stats.events_consumed == 10


def test_agrees_with_brute_force_and_is_order_oblivious():
    rng = random.Random(21)
    for i in range(80):
        s = random_ims(rng, disjunction=i % 2 == 0)
        for _ in range(10):
            t = random_tree(rng, list(s.alphabet), 7, root="r")
            res = validate_tree(s, t)
            assert res.accepted == naive_validate(s, t)
            assert validate_tree(s, _permuted(t, rng)).accepted == res.accepted
        for t in islice(iter_valid_trees(s, 6), 10):
            assert validate_tree(s, t).accepted


def test_stack_depth_on_accepted_trees():
    rng = random.Random(22)
    seen = 0
    while seen < 100:
        s = random_ims(rng)
        for t in islice(iter_valid_trees(s, 7), 30):
            outcome, stats = validate_stream(s, tree_events(t))
            assert outcome.accepted
            assert stats.max_stack_depth <= t.height()
            assert validate_tree(s, _permuted(t, rng)).accepted
            seen += 1
