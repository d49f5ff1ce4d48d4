import pytest
from hypothesis import given, settings, strategies as st

from causalacc import corpus
from causalacc.graph import (CausalGraph, GraphError, TripleKind, backdoor_sets,
                             check_backdoor, check_frontdoor, d_separated, enumerate_paths,
                             is_d_separated)

from oracles import oracle_dsep


def paths(g, x, y):
    return [str(p) for p in enumerate_paths(g, x, y)]


def test_paths_chain():
    g = CausalGraph([("X", "Z"), ("Z", "Y")])
    assert [p.nodes for p in enumerate_paths(g, "X", "Y")] == [("X", "Z", "Y")]


def test_paths_uber_c_s_to_t():
    g = CausalGraph.from_model(corpus.load("uber-c"))
    assert [p.nodes for p in enumerate_paths(g, "S", "T")] == [("S", "T"), ("S", "U", "E", "T")]
    assert paths(g, "S", "T")[1] == "S <- U -> E -> T"


def test_paths_disconnected():
    assert enumerate_paths(CausalGraph([], ["X", "Y"]), "X", "Y") == []


def test_triple_kinds():
    g = CausalGraph([("A", "B"), ("C", "B"), ("C", "D")])
    (p,) = enumerate_paths(g, "A", "D")
    assert p.kinds() == (TripleKind.COLLIDER, TripleKind.FORK)


def test_chain_fork_collider_table():
    chain = CausalGraph([("X", "Z"), ("Z", "Y")])
    fork = CausalGraph([("X", "Y"), ("X", "Z")])
    collider = CausalGraph([("X", "Z"), ("Y", "Z")])
    assert d_separated(chain, {"X"}, {"Y"}, {"Z"}).separated
    assert not d_separated(chain, {"X"}, {"Y"}).separated
    assert d_separated(fork, {"Y"}, {"Z"}, {"X"}).separated
    assert d_separated(collider, {"X"}, {"Y"}).separated
    assert not d_separated(collider, {"X"}, {"Y"}, {"Z"}).separated


def test_collider_descendant_opens():
    g = CausalGraph([("A", "B"), ("C", "B"), ("B", "D")])
    assert d_separated(g, "A", "C").separated
    v = d_separated(g, "A", "C", "D")
    assert not v.separated and str(v.witness) == "A -> B <- C"


def test_verdict_explanations():
    g = CausalGraph([("X", "Z"), ("Z", "Y")])
    v = d_separated(g, "X", "Y", "Z")
    assert v.witness is None
    (b,) = v.blocked
    assert b.node == "Z" and b.kind is TripleKind.CHAIN
    v = d_separated(g, "X", "Y")
    assert v.witness is not None and v.blocked == ()


def test_dsep_requires_disjoint():
    g = CausalGraph([("X", "Y")])
    with pytest.raises(GraphError):
        d_separated(g, {"X"}, {"X"})
    with pytest.raises(GraphError):
        d_separated(g, {"X"}, {"Y"}, {"Y"})


def test_cycle_rejected():
    with pytest.raises(GraphError):
        CausalGraph([("A", "B"), ("B", "A")])


def test_backdoor_uber_c():
    m = corpus.load("uber-c")
    assert check_backdoor(m, "S", "T", {"U"}).satisfied
    assert check_backdoor(m, "S", "T", {"E"}).satisfied
    assert check_backdoor(m, "S", "T", {"U", "E"}).satisfied
    v = check_backdoor(m, "S", "T", set())
    assert v.violated == "unblocked-backdoor-path"
    assert str(v.witness) == "S <- U -> E -> T"


def test_backdoor_descendant_condition():
    g = CausalGraph([("X", "M"), ("M", "Y")])
    v = check_backdoor(g, "X", "Y", {"M"})
    assert not v.satisfied and v.violated == "descendant" and v.witness == "M"


def test_backdoor_sets_examples():
    assert backdoor_sets(corpus.load("uber-c"), "S", "T") == [frozenset("E"), frozenset("U")]
    assert backdoor_sets(CausalGraph([("X", "Y")]), "X", "Y") == [frozenset()]
    g = CausalGraph([("C", "X"), ("C", "Y"), ("X", "Y")])
    assert backdoor_sets(g, "X", "Y") == [frozenset("C")]


def test_backdoor_sets_max_size():
    g = CausalGraph([("A", "X"), ("A", "Y"), ("B", "X"), ("B", "Y"), ("X", "Y")])
    assert backdoor_sets(g, "X", "Y") == [frozenset("AB")]
    assert backdoor_sets(g, "X", "Y", max_size=1) == []


def test_frontdoor_examples():
    g = CausalGraph([("X", "M"), ("M", "Y"), ("C", "X"), ("C", "Y")])
    assert check_frontdoor(g, "X", "Y", {"M"}).satisfied
    v = check_frontdoor(g, "X", "Y", set())
    assert v.violated == "1" and str(v.witness) == "X -> M -> Y"
    g2 = CausalGraph([("X", "M"), ("M", "Y"), ("C", "X"), ("C", "M")])
    v = check_frontdoor(g2, "X", "Y", {"M"})
    assert v.violated == "2" and str(v.witness) == "X <- C -> M"


def test_frontdoor_condition_three():
    g = CausalGraph([("X", "M"), ("M", "Y"), ("C", "M"), ("C", "Y")])
    v = check_frontdoor(g, "X", "Y", {"M"})
    assert v.violated == "3" and str(v.witness) == "M <- C -> Y"


def test_pearl_rules_on_chain_and_collider():
    chain = CausalGraph([("A", "B"), ("B", "C")])
    assert is_d_separated(chain, "A", "C", "B")
    collider = CausalGraph([("A", "B"), ("C", "B"), ("B", "D"), ("D", "F")])
    for z in ("B", "D", "F"):
        assert not is_d_separated(collider, "A", "C", z)


@st.composite
def dag_query(draw):
    n = draw(st.integers(2, 7))
    nodes = [chr(65 + i) for i in range(n)]
    edges = [(nodes[i], nodes[j]) for i in range(n) for j in range(i + 1, n)
             if draw(st.booleans())]
    roles = draw(st.lists(st.sampled_from("xyz-"), min_size=n, max_size=n))
    xs = {a for a, r in zip(nodes, roles) if r == "x" and a != nodes[-1]} or {nodes[0]}
    ys = {a for a, r in zip(nodes, roles) if r == "y" and a not in xs} or {nodes[-1]}
    zs = {a for a, r in zip(nodes, roles) if r == "z" and a not in xs | ys}
    return nodes, edges, xs, ys, zs


@settings(max_examples=200, deadline=None)
@given(dag_query())
def test_dsep_matches_path_oracle(q):
    nodes, edges, xs, ys, zs = q
    g = CausalGraph(edges, nodes)
    v = d_separated(g, xs, ys, zs)
    assert v.separated == oracle_dsep(nodes, edges, xs, ys, zs)
    assert v.separated == d_separated(g, ys, xs, zs).separated
    assert (v.witness is None) == v.separated


@settings(max_examples=100, deadline=None)
@given(dag_query())
def test_backdoor_sets_minimal(q):
    nodes, edges, xs, ys, _ = q
    g = CausalGraph(edges, nodes)
    x, y = sorted(xs)[0], sorted(ys)[0]
    for s in backdoor_sets(g, x, y):
        assert check_backdoor(g, x, y, s).satisfied
        for drop in s:
            assert not check_backdoor(g, x, y, s - {drop}).satisfied
