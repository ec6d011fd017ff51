import numpy as np
import pytest
from hypothesis import given, strategies as st

from cutquery.graph_core import GraphFamilySpec, WeightedGraph, generate_graph
from cutquery.oracle import CutOracle
from cutquery.reconstruct import (
    ABORTED_BUDGET,
    FAILED_VERIFICATION,
    OK,
    ReconResult,
    SumQueryVector,
    WeightedInputError,
    adaptive_split_bipartite,
    bipartite_query_bound,
    capped_adaptive_split,
    clog2,
    coin_weigh_bound,
    coin_weigh_support,
    doubling_reconstruct,
    general_adaptive_split,
    general_query_bound,
)
from cutquery.acceptance import dropping_inner, fabricating_inner


def plain_split_model(edges, R, B):
    """Recursion without reuse of sibling answers: (edges, queries)."""
    found, q = [], 0

    def rec(R, B):
        nonlocal q
        q += 1
        s = sum(edges.get((r, b), 0) for r in R for b in B)
        if s == 0:
            return
        if len(R) == 1 and len(B) == 1:
            found.append((R[0], B[0], s))
            return
        if len(R) >= len(B):
            h = (len(R) + 1) // 2
            rec(R[:h], B)
            rec(R[h:], B)
        else:
            h = (len(B) + 1) // 2
            rec(R, B[:h])
            rec(R, B[h:])

    rec(list(R), list(B))
    return sorted(found), q


def hidden_cross(g, R, B):
    R, B = set(R), set(B)
    out = []
    for (u, v), w in g.edges.items():
        if u in R and v in B:
            out.append((u, v, w))
        elif v in R and u in B:
            out.append((v, u, w))
    return sorted(out)


def test_clog2():
    assert [clog2(k) for k in (0, 1, 2, 3, 4, 5, 8, 9)] == [0, 0, 1, 2, 2, 3, 3, 4]


def test_single_pair():
    res = adaptive_split_bipartite(CutOracle(WeightedGraph(2, {(0, 1): 5})), [0], [1])
    assert res.edges == [(0, 1, 5)] and res.queries_used == 1 and res.ok


def test_no_edges_one_query():
    o = CutOracle(WeightedGraph(6, {(0, 1): 1, (3, 4): 1}))
    res = adaptive_split_bipartite(o, [0, 3], [2, 5])
    assert res.edges == [] and res.queries_used == 1 and o.ledger.cut_total == 3


def test_matching_of_four():
    edges = {(0, 4): 3, (1, 5): 1, (2, 6): 7, (3, 7): 2}
    model_edges, model_q = plain_split_model(edges, [0, 1, 2, 3], [4, 5, 6, 7])
    res = adaptive_split_bipartite(CutOracle(WeightedGraph(8, edges)), [0, 1, 2, 3], [4, 5, 6, 7])
    assert res.edges == model_edges
    # each second sibling is answered by subtraction, so 10 < 19 plain queries
    assert res.queries_used == 10 < model_q == 19
    assert res.queries_used <= 2 * 4 * (2 + 2) + 1


def test_budget_abort():
    g = generate_graph(GraphFamilySpec("bipartite_promise", n=8, profile="complete"))
    res = adaptive_split_bipartite(CutOracle(g), list(range(8)), list(range(8, 16)), budget=5)
    assert res.status == ABORTED_BUDGET and res.queries_used <= 5


@given(st.integers(0, 2**31), st.integers(1, 64), st.integers(1, 64), st.floats(0, 1))
def test_bipartite_equals_hidden(seed, r, b, density):
    rng = np.random.default_rng(seed)
    n = r + b
    pairs = [(u, v) for u in range(r) for v in range(r, n) if rng.random() < density * 200 / (r * b)]
    g = WeightedGraph(n, {pq: int(rng.integers(1, 10**9)) for pq in pairs[:200]})
    perm = rng.permutation(n).tolist()
    R, B = perm[:r], perm[r:]
    o = CutOracle(g)
    res = adaptive_split_bipartite(o, R, B)
    assert res.ok and sorted(res.edges) == hidden_cross(g, R, B)
    assert o.ledger.cross_calls <= bipartite_query_bound(g.m, r, b)


def test_general_examples():
    tri = CutOracle(WeightedGraph(3, {(0, 1): 1, (0, 2): 1, (1, 2): 1}))
    assert sorted(general_adaptive_split(tri, [0, 1, 2]).edges) == [(0, 1, 1), (0, 2, 1), (1, 2, 1)]
    o = CutOracle(WeightedGraph(10, {}))
    res = general_adaptive_split(o, list(range(10)))
    assert res.edges == [] and res.queries_used <= 2 * 10 + 1
    res = general_adaptive_split(CutOracle(WeightedGraph(3, {(0, 1): 1})), [2])
    assert res.edges == [] and res.queries_used == 0


@given(st.integers(0, 2**31), st.integers(1, 30), st.floats(0, 1))
def test_general_equals_hidden(seed, n, p):
    g = generate_graph(GraphFamilySpec("erdos_renyi", n=n, p=p, seed=seed, weights="uniform_int", lo=1, hi=99))
    o = CutOracle(g)
    res = general_adaptive_split(o, list(range(n)))
    got = sorted((min(u, v), max(u, v), w) for u, v, w in res.edges)
    assert got == sorted((u, v, w) for (u, v), w in g.edges.items())
    assert res.queries_used <= general_query_bound(g.m, n)


def three_edge_instance():
    g = WeightedGraph(8, {(0, 4): 2, (1, 6): 9, (3, 7): 4, (0, 1): 5})
    return g, [0, 1, 2, 3], [4, 5, 6, 7]


def test_doubling_stops_at_guess_four():
    g, R, B = three_edge_instance()
    guesses = []

    def spy(oracle, R, B, guess, tag):
        guesses.append(guess)
        return capped_adaptive_split(oracle, R, B, guess, tag)

    res = doubling_reconstruct(CutOracle(g), R, B, spy)
    assert res.ok and sorted(res.edges) == hidden_cross(g, R, B)
    assert guesses[-1] == 4


def test_doubling_empty():
    o = CutOracle(WeightedGraph(4, {(0, 2): 1}))
    res = doubling_reconstruct(o, [0, 2], [1, 3])
    # one inner query plus the totality check
    assert res.ok and res.edges == [] and o.ledger.cross_calls == 2


@pytest.mark.parametrize("inner", [fabricating_inner, dropping_inner])
def test_doubling_rejects_faults(inner):
    g, R, B = three_edge_instance()
    assert doubling_reconstruct(CutOracle(g), R, B, inner).status == FAILED_VERIFICATION


def test_doubling_rejects_out_of_side_edge():
    g, R, B = three_edge_instance()

    def bad(oracle, R, B, guess, tag):
        return ReconResult([(0, 1, 5)], 0, OK)

    assert doubling_reconstruct(CutOracle(g), R, B, bad).status == FAILED_VERIFICATION


def test_coin_weigh_examples():
    v = SumQueryVector.from_vector([0, 0, 0, 1, 0, 0, 0, 0])
    assert coin_weigh_support(v) == [3] and v.queries == 4 <= 7
    v = SumQueryVector.from_vector([0] * 6)
    assert coin_weigh_support(v) == [] and v.queries == 1
    assert coin_weigh_support(SumQueryVector.from_vector([1, 1, 1, 1])) == [0, 1, 2, 3]


@given(st.lists(st.integers(0, 1), max_size=200))
def test_coin_weigh_matches_brute_force(x):
    v = SumQueryVector.from_vector(x)
    support = coin_weigh_support(v)
    assert support == [i for i, xi in enumerate(x) if xi]
    assert v.queries <= coin_weigh_bound(len(support), len(x))


def test_coin_weigh_rejects_non_boolean():
    with pytest.raises(WeightedInputError):
        coin_weigh_support(SumQueryVector.from_vector([0, 3, 0, 0]))
