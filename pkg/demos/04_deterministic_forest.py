"""
The deterministic learner and the DFS baseline
==============================================

Dense parts of an unweighted graph are grown breadth-first.  What is left
between the grown components is sparse, so the contracted multigraph is
cheap to reconstruct, and its spanning forest is turned into real edges.
"""

# %%
from cutquery import CutOracle, GraphFamilySpec, generate_graph, is_maximal_spanning_forest
from cutquery.deterministic import harvey_baseline, residual_threshold, spanning_forest_deterministic
from cutquery.graph_core import contract

g = generate_graph(GraphFamilySpec("erdos_renyi", n=300, p=0.05, seed=3))
for L in (residual_threshold(g.n), 4):
    oracle = CutOracle(g)
    run = spanning_forest_deterministic(oracle, L=L)
    crossing = sum(contract(g, run.discovery.components).values())
    print(f"L={L}: {len(run.discovery.components)} components, {crossing} crossing edges (< nL = {g.n * L}),"
          f" verified={is_maximal_spanning_forest(g, run.forest)}, CUT queries={oracle.ledger.cut_total}")

# %%
oracle = CutOracle(g)
forest = harvey_baseline(oracle)
print("DFS baseline:", is_maximal_spanning_forest(g, forest), oracle.ledger.cut_total, "CUT queries")
