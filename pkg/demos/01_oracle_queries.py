"""
Asking questions of a hidden graph
==================================

A learner never sees the edge list.  It only gets a CutOracle, which answers
CUT queries and keeps a ledger of how many it has answered.
"""

# %%
from cutquery import CutOracle, GraphFamilySpec, generate_graph

g = generate_graph(GraphFamilySpec("erdos_renyi", n=12, p=0.3, seed=4, weights="uniform_int", lo=1, hi=9))
oracle = CutOracle(g)

# weight leaving {0, 1, 2}
print("cut({0,1,2}) =", oracle.cut([0, 1, 2]))
print("ledger:", oracle.ledger.cut_total)

# %%
# CROSS between disjoint sets costs three CUTs
print("cross({0,1},{5,6,7}) =", oracle.cross([0, 1], [5, 6, 7]))
print("ledger:", oracle.ledger.cut_total)

# %%
# ADDITIVE pays n CUTs once for the singleton cache, then one CUT per call
print("additive({0..5}) =", oracle.additive(range(6)))
print("additive({6..11}) =", oracle.additive(range(6, 12)))
print("ledger:", oracle.ledger.cut_total)
print("by tag:", dict(oracle.ledger.by_category))

# overlapping CROSS sides are a learner bug and raise
try:
    oracle.cross([0, 1], [1, 2])
except ValueError as exc:
    print("rejected:", exc)
