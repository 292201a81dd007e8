import itertools

import pytest
from hypothesis import given, settings, strategies as st

from bao.graphs import (
    INF, Graph, chromatic_number, clique_number, complete_graph, cycle_graph, disjoint_union,
    find_cycles, girth, is_colouring, optimal_colouring, petersen_graph, random_graph,
)


def brute_chi(g: Graph) -> int:
    for k in range(g.vertices + 1):
        for colours in itertools.product(range(k), repeat=g.vertices):
            if all(colours[u] != colours[v] for u, v in g.edges):
                return k
    raise AssertionError("unreachable")


def brute_girth(g: Graph):
    best = INF
    adj = g.adjacency()
    for length in range(3, g.vertices + 1):
        for cyc in itertools.permutations(range(g.vertices), length):
            if cyc[0] == min(cyc) and all(cyc[(i + 1) % length] in adj[cyc[i]] for i in range(length)):
                return length
    return best


@pytest.mark.parametrize(
    "g, chi, gir",
    [
        (complete_graph(1), 1, INF),
        (complete_graph(5), 5, 3),
        (cycle_graph(5), 3, 5),
        (cycle_graph(6), 2, 6),
        (petersen_graph(), 3, 5),
        (Graph.from_edges(4, []), 1, INF),
        (Graph.from_edges(0, []), 0, INF),
    ],
)
def test_known_values(g, chi, gir):
    assert chromatic_number(g) == chi
    assert girth(g) == gir


def test_optimal_colouring_is_proper():
    g = petersen_graph()
    col = optimal_colouring(g)
    assert is_colouring(g, col)
    assert len(set(col)) == 3


def test_loops_rejected():
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(1, 1)])


def test_json_roundtrip():
    g = petersen_graph()
    assert Graph.from_json(g.to_json()) == g


def test_disjoint_union_takes_max():
    g = disjoint_union([cycle_graph(5), complete_graph(4)])
    assert g.vertices == 9
    assert chromatic_number(g) == 4
    assert girth(g) == 3


def test_cycles_never_shorter_than_girth():
    g = petersen_graph()
    cycles = find_cycles(g, 6)
    assert cycles
    assert min(len(c) for c in cycles) == girth(g)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.floats(0, 1), st.integers(0, 10**6))
def test_against_brute_force(n, p, seed):
    g = random_graph(n, p, seed)
    assert chromatic_number(g) == brute_chi(g)
    assert girth(g) == brute_girth(g)
    assert chromatic_number(g) >= clique_number(g)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.floats(0.1, 1), st.integers(0, 10**6))
def test_bipartite_graphs_need_two_colours(left, right, p, seed):
    import random

    rng = random.Random(seed)
    edges = [(u, left + v) for u in range(left) for v in range(right) if rng.random() < p]
    g = Graph.from_edges(left + right, edges)
    assert chromatic_number(g) == (2 if edges else 1)
    gir = girth(g)
    assert gir == INF or gir % 2 == 0
