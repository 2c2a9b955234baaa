import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ktfactor import generators
from ktfactor.graph import (
    EdgeListError,
    Graph,
    common_neighborhood,
    degree_profile,
    from_mask,
    load_edge_list,
    to_mask,
    write_edge_list,
)

from conftest import graph_and_subset, graphs


def test_triangle_loads():
    g = load_edge_list(b"3 3\n0 1\n0 2\n1 2")
    assert g.n == 3 and g.edge_count == 3
    assert g.is_clique([0, 1, 2])


def test_edgeless_loads():
    g = load_edge_list(b"2 0")
    assert g.n == 2 and g.edge_count == 0


@pytest.mark.parametrize("text", [
    b"3 1\n0 3",          # index out of range
    b"3 1\n1 1",          # loop
    b"3 1\n2 1",          # u > v
    b"3 2\n0 1\n0 1",     # duplicate
    b"3 2\n0 1",          # count mismatch
    b"3\n",               # bad header
    b"3 1\n0 x",          # not an integer
])
def test_malformed_inputs_raise(text):
    with pytest.raises(EdgeListError):
        load_edge_list(text)


def test_comments_and_streams():
    g = load_edge_list(io.BytesIO(b"# triangle\n3 3\n0 1\n# mid\n0 2\n1 2\n"))
    assert g.edge_count == 3


def test_write_canonical():
    assert write_edge_list(generators.complete(3)) == b"3 3\n0 1\n0 2\n1 2\n"
    assert write_edge_list(Graph(2)) == b"2 0\n"


def test_petersen_round_trip(petersen):
    data = write_edge_list(petersen)
    assert data.count(b"\n") == 16
    assert load_edge_list(data) == petersen


def test_degree_profile():
    assert degree_profile(generators.complete(4)) == (True, 3)
    assert degree_profile(Graph(3, [(0, 1), (1, 2)])) == (False, None)


def test_petersen_is_kneser():
    # Kneser K(5,2): 2-subsets adjacent when disjoint
    from itertools import combinations
    subsets = list(combinations(range(5), 2))
    kneser = Graph(10, [(i, j) for i in range(10) for j in range(i + 1, 10)
                        if not set(subsets[i]) & set(subsets[j])])
    assert degree_profile(kneser) == (True, 3)
    assert degree_profile(generators.petersen()) == (True, 3)
    import networkx as nx
    ours = nx.Graph(generators.petersen().edges())
    assert nx.is_isomorphic(ours, nx.Graph(kneser.edges()))


def test_common_neighborhood_examples():
    assert common_neighborhood(generators.complete(4), [0, 1]) == {2, 3}
    assert common_neighborhood(generators.cycle(5), [0, 1]) == frozenset()
    p = generators.paley(13)
    brute = {v for v in range(13) if p.has_edge(v, 0) and p.has_edge(v, 1)}
    assert common_neighborhood(p, [0, 1]) == brute
    assert len(brute) == 2


def test_common_neighborhood_empty_set_raises():
    with pytest.raises(ValueError):
        common_neighborhood(generators.complete(3), [])


@pytest.mark.parametrize("edges", [[(0, 0)], [(0, 1), (1, 0)], [(0, 5)]])
def test_constructor_rejects_bad_edges(edges):
    with pytest.raises(ValueError):
        Graph(3, edges)


def test_from_rows_rejects_asymmetry():
    with pytest.raises(ValueError):
        Graph.from_rows([0b10, 0b00])


@given(graphs())
def test_handshake(g):
    assert sum(g.degrees()) == 2 * g.edge_count


@given(graphs())
def test_load_write_identity(g):
    assert load_edge_list(write_edge_list(g)) == g


@given(graph_and_subset(min_n=1))
def test_common_neighborhood_inside_each_neighbourhood(gs):
    g, s = gs
    if not s:
        return
    cn = common_neighborhood(g, s)
    for v in s:
        assert cn <= set(g.neighbors(v))
    assert not cn & set(s)


@given(st.sets(st.integers(0, 200)))
def test_mask_round_trip(vs):
    assert from_mask(to_mask(vs)) == sorted(vs)


@given(graphs(min_n=1), st.randoms(use_true_random=False))
def test_relabel_preserves_degrees(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    h = g.relabel(perm)
    assert sorted(h.degrees()) == sorted(g.degrees())
    for u, v in g.edges():
        assert h.has_edge(perm[u], perm[v])


def test_words_layout():
    g = Graph(70, [(0, 69), (1, 64)])
    w = g.words
    assert w.shape == (70, 2)
    assert int(w[0, 1]) == 1 << 5 and int(w[69, 0]) == 1
