import random
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ktfactor.matching import hopcroft_karp
from ktfactor.template import (
    Template,
    TemplateError,
    complete_template,
    generate_template,
    resilient_matching,
    verify_template,
)


def nx_has_perfect_left_matching(tpl, removed):
    g = nx.Graph()
    left = [("x", x) for x in range(tpl.n_left)]
    g.add_nodes_from(left)
    g.add_nodes_from(("z", z) for z in range(tpl.n_right) if z not in removed)
    g.add_edges_from((("x", x), ("z", z)) for x, z in tpl.edges if z not in removed)
    m = nx.bipartite.hopcroft_karp_matching(g, top_nodes=left)
    return all(v in m for v in left)


@given(st.integers(1, 8), st.integers(1, 8), st.data())
def test_hopcroft_karp_size_matches_networkx(nl, nr, data):
    adj = [sorted(data.draw(st.sets(st.integers(0, nr - 1)))) for _ in range(nl)]
    match = hopcroft_karp(adj, nr)
    used = [r for r in match if r >= 0]
    assert len(used) == len(set(used))
    assert all(r in adj[l] for l, r in enumerate(match) if r >= 0)
    g = nx.Graph()
    g.add_nodes_from(("l", i) for i in range(nl))
    g.add_nodes_from(("r", j) for j in range(nr))
    g.add_edges_from((("l", i), ("r", j)) for i in range(nl) for j in adj[i])
    ref = nx.bipartite.hopcroft_karp_matching(g, top_nodes=[("l", i) for i in range(nl)])
    assert len(used) == len(ref) // 2


def test_complete_template_m1():
    tpl = complete_template(1)
    assert (tpl.n_left, tpl.n_right) == (3, 4)
    rep = verify_template(tpl, "exhaustive")
    assert rep.passed and rep.checked == 2
    match = resilient_matching(tpl, [0])
    assert len(match) == 3 and {z for _, z in match} == {1, 2, 3}


def test_generate_m1_and_bad_inputs():
    tpl = generate_template(1, 40, 0)
    assert verify_template(tpl, "exhaustive").passed
    with pytest.raises(ValueError):
        generate_template(0)


def test_generated_m4_seed7_against_networkx():
    tpl = generate_template(4, 40, 7)
    rep = verify_template(tpl, "exhaustive")
    assert rep.passed and rep.checked == 70
    for zbar in combinations(range(8), 4):
        assert nx_has_perfect_left_matching(tpl, set(zbar))
    rng = random.Random(1)
    for _ in range(50):
        zbar = rng.sample(range(8), 4)
        match = resilient_matching(tpl, zbar)
        assert sorted(x for x, _ in match) == list(range(12))
        assert not {z for _, z in match} & set(zbar)
        assert all(e in tpl.edges for e in match)


def test_generated_m6_exhaustive():
    tpl = generate_template(6, 40, 3)
    rep = verify_template(tpl, "exhaustive")
    assert rep.passed and rep.checked == 924
    assert tpl.degree_max() <= 40


def test_isolated_left_vertex_fails_everywhere():
    base = complete_template(2)
    tpl = Template(2, 8, frozenset(e for e in base.edges if e[0] != 0))
    rep = verify_template(tpl, "exhaustive")
    assert not rep.passed and len(rep.failures) == rep.checked == 6
    with pytest.raises(TemplateError):
        resilient_matching(tpl, [0, 1])


def test_zbar_size_checked():
    tpl = generate_template(4, 40, 7)
    with pytest.raises(ValueError):
        resilient_matching(tpl, [0, 1, 2])
    with pytest.raises(ValueError):
        resilient_matching(tpl, [0, 1, 2, 9])


def test_sampled_mode_recorded():
    tpl = generate_template(11, 40, 0, mode="sampled")
    assert tpl.verification["mode"] == "sampled"
    rep = verify_template(tpl, "sampled", samples=200, seed=4)
    assert rep.passed and rep.checked == 200


def test_retry_budget_exhaustion_reports_stats():
    with pytest.raises(TemplateError) as info:
        generate_template(6, 3, 0, retry_budget=3)
    assert info.value.stats["attempts"] == 3


def test_json_round_trip():
    tpl = generate_template(3, 40, 2)
    assert Template.from_dict(tpl.to_dict()) == tpl


@given(st.integers(1, 3), st.integers(0, 10**6))
@settings(max_examples=15)
def test_adding_edges_keeps_template_verified(m, seed):
    tpl = generate_template(m, 40, seed)
    rng = random.Random(seed)
    edges = set(tpl.edges)
    for _ in range(5):
        e = (rng.randrange(3 * m), rng.randrange(4 * m))
        trial = Template(m, 40, frozenset(edges | {e}))
        if trial.degree_max() <= 40:
            edges.add(e)
    bigger = Template(m, 40, frozenset(edges))
    assert verify_template(bigger, "exhaustive").passed
    assert bigger.degree_max() <= 40
