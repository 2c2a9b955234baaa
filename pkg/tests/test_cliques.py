from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ktfactor import generators
from ktfactor.cliques import (
    EXHAUSTED,
    FOUND,
    INFEASIBLE,
    Tiling,
    enumerate_cliques_in,
    exact_factor,
    find_spider,
    greedy_descent_clique,
    greedy_tiling,
    repair_tiling,
)
from ktfactor.graph import Graph
from ktfactor.pipeline import KtFactor, verify_factor

from conftest import graph_and_subset, graphs, octahedron


def all_cliques(g, vs, k):
    return [c for c in combinations(sorted(vs), k) if g.is_clique(c)]


def test_descent_examples():
    c = greedy_descent_clique(generators.complete(5), range(5), 3)
    assert c is not None and len(c) == 3
    assert greedy_descent_clique(generators.complete_bipartite(3, 3), range(6), 3) is None
    p = generators.paley(13)
    tri = greedy_descent_clique(p, range(13), 3)
    assert tri in all_cliques(p, range(13), 3)


@given(graph_and_subset(max_n=12), st.integers(1, 4))
def test_descent_sound(gs, k):
    g, s = gs
    c = greedy_descent_clique(g, s, k)
    if c is None:
        return
    assert len(c) == k and set(c) <= set(s) and g.is_clique(c)


@given(graph_and_subset(max_n=12), st.integers(1, 4))
def test_descent_never_misses_an_open_path(gs, k):
    g, s = gs
    # replay the greedy path independently
    cand, path = set(s), []
    for _ in range(k):
        if not cand:
            break
        deg = {v: len(set(g.neighbors(v)) & cand) for v in cand}
        v = min(cand, key=lambda x: (-deg[x], x))
        path.append(v)
        cand &= set(g.neighbors(v))
    got = greedy_descent_clique(g, s, k)
    if len(path) == k:
        assert got == tuple(sorted(path))
    else:
        assert got is None
    if not all_cliques(g, s, k):
        assert got is None


def test_spider_examples():
    sp = find_spider(generators.complete(50), range(50), 3, 40)
    assert len(sp.base) == 2 and len(sp.apexes) == 40
    g = generators.complete_multipartite(3, 41)
    sp = find_spider(g, range(g.n), 3, 40)
    parts = {v // 41 for v in sp.base}
    assert len(parts) == 2
    assert {a // 41 for a in sp.apexes} == {3 - sum(parts)}
    for a in sp.apexes:
        assert g.is_clique((a, *sp.base))
    assert find_spider(generators.cycle(5), range(5), 3, 1) is None


def test_tiling_examples():
    t = greedy_tiling(generators.complete(9), [], 3, 0)
    assert len(t.cliques) == 3 and not t.leftover
    t = greedy_tiling(generators.complete_bipartite(3, 3), [], 3, 0)
    assert not t.cliques and len(t.leftover) == 6 and t.stalled
    g = generators.random_regular(60, 30, 1)
    t = greedy_tiling(g, [], 3, 6)
    t.check()
    assert len(t.leftover) <= 6 or t.stalled
    assert all(g.is_clique(c) for c in t.cliques)


@given(graph_and_subset(max_n=14), st.integers(2, 4), st.integers(0, 4))
def test_tiling_invariants(gs, t, stop):
    g, forbidden = gs
    til = greedy_tiling(g, forbidden, t, stop)
    til.check()
    assert not til.covered & set(forbidden)
    assert til.covered | til.leftover | set(forbidden) == set(range(g.n))
    assert all(len(c) == t and g.is_clique(c) for c in til.cliques)


@given(graphs(min_n=3, max_n=12), st.integers(0, 3))
def test_repair_keeps_invariants(g, stop):
    base = greedy_tiling(g, [], 3, stop)
    fixed = repair_tiling(g, base, 3, stop)
    fixed.check()
    assert len(fixed.leftover) <= len(base.leftover)
    assert fixed.covered | fixed.leftover == set(range(g.n))
    assert all(g.is_clique(c) for c in fixed.cliques)


def test_repair_recovers_stall():
    # K4 on 0..3 plus triangle 3,4,5; tiling 1,2,3 strands 0, 4 and 5
    g = Graph(6, [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5)])
    stuck = Tiling([(1, 2, 3)], frozenset({1, 2, 3}), frozenset({0, 4, 5}), True)
    fixed = repair_tiling(g, stuck, 3, 0)
    assert not fixed.leftover and len(fixed.cliques) == 2


def test_enumeration_examples():
    assert len(enumerate_cliques_in(octahedron(), range(6), 3, 100)) == 8
    assert enumerate_cliques_in(generators.petersen(), [1, 4, 7], 1, 10) == [(1,), (4,), (7,)]
    assert enumerate_cliques_in(generators.complete(4), range(4), 3, 2) == [(0, 1, 2), (0, 1, 3)]


def test_exact_factor_examples():
    r = exact_factor(generators.complete(6), 3)
    assert r.status == FOUND and len(r.solution) == 2
    assert exact_factor(generators.complete_bipartite(3, 3), 3).status == INFEASIBLE
    r = exact_factor(octahedron(), 3)
    assert r.found and verify_factor(octahedron(), KtFactor(3, 6, r.solution)).passed
    with pytest.raises(ValueError):
        exact_factor(generators.complete(7), 3)


def test_exact_factor_budget():
    g = generators.random_regular(60, 30, 1)
    assert exact_factor(g, 3, node_budget=1).status == EXHAUSTED


def brute_has_factor(g, t):
    tris = all_cliques(g, range(g.n), t)

    def rec(unc):
        if not unc:
            return True
        v = min(unc)
        return any(rec(unc - set(c)) for c in tris if v in c and set(c) <= unc)

    return rec(set(range(g.n)))


@given(st.sampled_from([3, 6, 9]).flatmap(lambda n: graphs(min_n=n, max_n=n)))
@settings(max_examples=80)
def test_exact_factor_matches_bruteforce(g):
    r = exact_factor(g, 3)
    assert r.found == brute_has_factor(g, 3)
    if r.found:
        assert verify_factor(g, KtFactor(3, g.n, r.solution)).passed
