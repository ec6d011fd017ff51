import math
import pathlib
import re

import pytest
from hypothesis import given, strategies as st

from cutquery.deterministic import (
    build_pseudo_graph,
    degree_threshold,
    discover_dense_components,
    harvey_baseline,
    harvey_query_bound,
    join_components,
    query_ceiling_constant,
    residual_threshold,
    spanning_forest_deterministic,
)
from cutquery.graph_core import (
    GraphFamilySpec,
    WeightedGraph,
    contract,
    generate_graph,
    ground_truth_components,
    is_maximal_spanning_forest,
)
from cutquery.oracle import TAG_JOIN_HIGH, CutOracle
from cutquery.reconstruct import WeightedInputError

SRC = pathlib.Path(__file__).resolve().parents[1] / "src" / "cutquery"


def test_thresholds():
    assert residual_threshold(2) == 1 and residual_threshold(4) == 2
    assert residual_threshold(256) == residual_threshold(1024) == 1
    assert residual_threshold(2**16) == math.ceil(16 / 16)
    assert residual_threshold(2**256) == math.ceil(256 / 64)
    assert degree_threshold(2) == 1
    assert degree_threshold(2**16) == 4


def test_star_single_component():
    g = generate_graph(GraphFamilySpec("star", n=64))
    disc = discover_dense_components(CutOracle(g))
    assert disc.components == [list(range(64))]
    assert disc.state.order[0] == 0 and disc.state.resdeg[0] == 63


def test_empty_graph_singletons():
    disc = discover_dense_components(CutOracle(WeightedGraph(16, {})))
    assert disc.components == [[v] for v in range(16)]
    assert disc.edges == [] and sum(contract(WeightedGraph(16, {}), disc.components).values()) == 0


def test_path_with_large_L():
    g = generate_graph(GraphFamilySpec("path", n=20))
    disc = discover_dense_components(CutOracle(g), L=3)
    assert disc.components == [[v] for v in range(20)]
    assert sum(contract(g, disc.components).values()) == 19 < 20 * 3


def test_weighted_input_detected():
    with pytest.raises(WeightedInputError):
        discover_dense_components(CutOracle(WeightedGraph(3, {(0, 1): 5})))


@given(st.integers(0, 2**31), st.integers(1, 50), st.floats(0, 0.6), st.integers(1, 8))
def test_discovery_invariants(seed, n, p, L):
    g = generate_graph(GraphFamilySpec("erdos_renyi", n=n, p=p, seed=seed))
    disc = discover_dense_components(CutOracle(g), L)
    assert sorted(disc.state.order) == list(range(n))
    assert sorted(v for c in disc.components for v in c) == list(range(n))
    assert sum(contract(g, disc.components).values()) < n * L
    for u, v, w in disc.edges:
        assert g.weight(u, v) == w == 1
    # at close-out a vertex had fewer than L edges into the still-active set
    pos = {v: i for i, v in enumerate(disc.state.order)}
    owner = {v: i for i, c in enumerate(disc.components) for v in c}
    for v, deg in disc.state.resdeg.items():
        if deg < L:
            later = [u for u in g.neighbors(v) if owner[u] != owner[v] and pos[u] > pos[v]]
            assert len(later) <= deg


def test_pseudo_graph_examples():
    g = WeightedGraph(4, {(0, 2): 1, (0, 3): 1, (1, 3): 1, (0, 1): 1})
    H = build_pseudo_graph(CutOracle(g), [[0, 1], [2, 3]])
    assert H.multiplicity == {(0, 1): 3}
    assert build_pseudo_graph(CutOracle(g), [[0, 1, 2, 3]]).multiplicity == {}
    k = generate_graph(GraphFamilySpec("clique", n=6))
    H = build_pseudo_graph(CutOracle(k), [[v] for v in range(6)])
    assert H.multiplicity == {(i, j): 1 for i in range(6) for j in range(i + 1, 6)}


@given(st.integers(0, 2**31), st.integers(1, 40), st.floats(0, 0.3), st.integers(1, 6))
def test_pseudo_graph_fidelity(seed, n, p, L):
    g = generate_graph(GraphFamilySpec("erdos_renyi", n=n, p=p, seed=seed))
    disc = discover_dense_components(CutOracle(g), L)
    H = build_pseudo_graph(CutOracle(g), disc.components)
    assert H.multiplicity == contract(g, disc.components)
    assert H.is_connected() == (len(ground_truth_components(g)) == 1)


def test_join_single_supernode():
    g = generate_graph(GraphFamilySpec("clique", n=5))
    disc = discover_dense_components(CutOracle(g), 1)
    H = build_pseudo_graph(CutOracle(g), disc.components)
    forest = join_components(CutOracle(g), disc.components, disc.edges, H)
    assert len(disc.components) == 1 and forest.edges == tuple(disc.edges)


def test_join_path_components():
    g = generate_graph(GraphFamilySpec("path", n=20))
    run = spanning_forest_deterministic(CutOracle(g), L=3)
    assert sorted(tuple(sorted(e[:2])) for e in run.forest.edges) == [(i, i + 1) for i in range(19)]


def test_high_degree_hub():
    # hub supernode 0..7 (a clique), each hub vertex carries two pendant
    # paths of length 2 that stay singleton components under L = 3
    edges = {(u, v): 1 for u in range(8) for v in range(u + 1, 8)}
    nxt = 8
    for u in range(8):
        for _ in range(2):
            edges[(u, nxt)] = 1
            edges[(nxt, nxt + 1)] = 1
            nxt += 2
    g = WeightedGraph(nxt, edges)
    o = CutOracle(g)
    run = spanning_forest_deterministic(o, L=3, threshold=2)
    assert is_maximal_spanning_forest(g, run.forest)
    assert o.ledger.by_category[TAG_JOIN_HIGH] > 0


@given(st.integers(0, 2**31), st.integers(1, 60), st.floats(0, 0.4), st.sampled_from([None, 1, 2, 3, 8]))
def test_deterministic_correct(seed, n, p, L):
    g = generate_graph(GraphFamilySpec("erdos_renyi", n=n, p=p, seed=seed))
    run = spanning_forest_deterministic(CutOracle(g), L=L, threshold=1 if seed % 2 else None)
    assert is_maximal_spanning_forest(g, run.forest)


def test_disconnected_components_match():
    g = generate_graph(
        GraphFamilySpec("disjoint_union", parts=(GraphFamilySpec("cycle", n=7), GraphFamilySpec("star", n=9), GraphFamilySpec("path", n=1)))
    )
    run = spanning_forest_deterministic(CutOracle(g), L=2)
    assert run.forest.components() == ground_truth_components(g)


def test_deterministic_repeatable():
    g = generate_graph(GraphFamilySpec("erdos_renyi", n=80, p=0.1, seed=5))
    o1, o2 = CutOracle(g), CutOracle(g)
    assert spanning_forest_deterministic(o1).forest == spanning_forest_deterministic(o2).forest
    assert o1.ledger.as_dict() == o2.ledger.as_dict()


def test_harvey_clique():
    g = generate_graph(GraphFamilySpec("clique", n=32))
    o = CutOracle(g)
    f = harvey_baseline(o)
    assert len(f.edges) == 31 and is_maximal_spanning_forest(g, f)
    assert o.ledger.cut_total <= harvey_query_bound(32)
    assert query_ceiling_constant(o.ledger.cut_total, 32) > 0


def test_harvey_empty_and_weighted():
    assert harvey_baseline(CutOracle(WeightedGraph(5, {}))).edges == ()
    g = generate_graph(GraphFamilySpec("erdos_renyi", n=40, p=0.2, seed=2, weights="uniform_int", lo=1, hi=10**9))
    assert is_maximal_spanning_forest(g, harvey_baseline(CutOracle(g)))


@pytest.mark.parametrize("module", ["randomized.py", "deterministic.py", "forest_common.py", "reconstruct.py"])
def test_learners_only_see_the_oracle(module):
    text = (SRC / module).read_text()
    assert "WeightedGraph" not in text
    assert not re.search(r"\._hidden|\.edges\.items|\._csr", text)
