"""
The randomized spanning-forest learner
======================================

Each phase colors the current components red or blue, lets every red
component grab an edge into blue through geometric blue sampling, and merges.
A phase that goes badly aborts and is retried; the output is always correct.
"""

# %%
import numpy as np

from cutquery import CutOracle, GraphFamilySpec, generate_graph, is_maximal_spanning_forest
from cutquery.graph_core import bipartite_sides
from cutquery.randomized import skeleton_reduce, spanning_forest_randomized

# skeleton step on a promise instance: every red vertex has a blue neighbour
n = 256
g = generate_graph(GraphFamilySpec("bipartite_promise", n=n, profile="mixed", seed=2))
R, B = bipartite_sides(n)
edges, trace = skeleton_reduce(CutOracle(g), R, B, rng=np.random.default_rng(0))
print("hidden edges:", g.m)
print("blue sample sizes:", trace.blue_sizes)
print("edges learned per round:", trace.edges_found)
print("total learned:", trace.total_sampled_edges, "vs 5n =", 5 * n)

# %%
g = generate_graph(GraphFamilySpec("erdos_renyi", n=512, p=0.02, seed=5))
oracle = CutOracle(g)
run = spanning_forest_randomized(oracle, rng=7)
print("verified:", is_maximal_spanning_forest(g, run.forest))
print("phases:", run.phase_counts, "aborts:", run.aborts)
print("CUT queries:", oracle.ledger.cut_total, f"({oracle.ledger.cut_total / g.n:.1f} per vertex)")
for tag, count in sorted(oracle.ledger.by_category.items()):
    print(f"  {tag:22s} {count}")
