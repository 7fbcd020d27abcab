import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import RUNNING_TREE, REPAIR_TREE
from logmine.tree import (
    Activity,
    Node,
    Tau,
    TreeSyntaxError,
    canonical,
    leaves,
    metrics,
    number_taus,
    parse_tree,
)


def test_running_tree_metrics():
    m = metrics(parse_tree(RUNNING_TREE))
    assert m["activities_no_tau"] == 8
    assert m["height"] == 6


def test_repair_tree_metrics():
    # End frames every trace of the repair log, so it is an artificial marker there
    m = metrics(parse_tree(REPAIR_TREE), artificial=frozenset({"End"}))
    assert m["activities_all"] == 13
    assert m["activities_no_tau"] == 8
    assert metrics(parse_tree(REPAIR_TREE))["activities_no_tau"] == 9


def test_single_leaf_metrics():
    assert metrics(Activity("a")) == {"activities_all": 1, "activities_no_tau": 1, "height": 1, "leaf_count": 1}


def test_tau_numbering_left_to_right():
    t = number_taus(parse_tree(REPAIR_TREE))
    assert [str(x) for x in leaves(t) if isinstance(x, Tau)] == ["tau1", "tau2", "tau3", "tau4"]


@pytest.mark.parametrize(
    "text, pos",
    [("Seq(a", 5), ("Seq(a,)", 6), ("Loop(a, b, c)", 0), ("", 0), ("a b", 2)],
)
def test_syntax_errors(text, pos):
    with pytest.raises(TreeSyntaxError) as err:
        parse_tree(text)
    assert err.value.pos == pos


def test_commutative_equality():
    a = parse_tree("Xor(a, And(b, c))")
    b = parse_tree("Xor(And(c, b), a)")
    assert canonical(a) == canonical(b)
    assert canonical(parse_tree("Seq(a, b)")) != canonical(parse_tree("Seq(b, a)"))


names = st.sampled_from(["a", "b", "Check_ticket", "x.y", "tau"])


def trees():
    leaf = names.map(lambda n: Tau() if n == "tau" else Activity(n))

    def extend(children):
        ops = st.sampled_from(["Seq", "Xor", "And"])
        wide = st.tuples(ops, st.lists(children, min_size=2, max_size=4)).map(lambda p: Node(p[0], tuple(p[1])))
        lp = st.tuples(children, children).map(lambda p: Node("Loop", p))
        return wide | lp

    return st.recursive(leaf, extend, max_leaves=12).map(number_taus)


@given(trees())
def test_print_parse_round_trip(t):
    assert parse_tree(str(t)) == t


@given(trees())
def test_tau_ids_unique(t):
    ids = [x.id for x in leaves(t) if isinstance(x, Tau)]
    assert ids == list(range(1, len(ids) + 1))
