"""
Recovering edges from sum queries
=================================

Positive weights make cross(X, Y) = 0 mean "no edge", so splitting both
sides recursively finds every edge between two sets.  The same trick
recovers the support of a hidden 0/1 vector.
"""

# %%
from cutquery import CutOracle, GraphFamilySpec, generate_graph
from cutquery.reconstruct import (
    SumQueryVector,
    adaptive_split_bipartite,
    bipartite_query_bound,
    coin_weigh_support,
    doubling_reconstruct,
)
from cutquery.graph_core import bipartite_sides

n = 32
g = generate_graph(GraphFamilySpec("bipartite_promise", n=n, profile="constant", degree=2, seed=1))
R, B = bipartite_sides(n)
oracle = CutOracle(g)
res = adaptive_split_bipartite(oracle, R, B)
print(f"found {len(res.edges)} of {g.m} edges with {res.queries_used} CROSS queries")
print("ceiling:", bipartite_query_bound(len(res.edges), n, n))

# %%
# the doubling wrapper guesses m = 2, 4, 8, ... and checks every answer
res = doubling_reconstruct(CutOracle(g), R, B)
print("doubling:", res.status, len(res.edges), "edges")

# %%
x = [0] * 100
for i in (3, 41, 42, 97):
    x[i] = 1
v = SumQueryVector.from_vector(x)
print("support:", coin_weigh_support(v), "after", v.queries, "sum queries")
