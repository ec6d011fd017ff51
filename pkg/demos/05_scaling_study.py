"""
How the query count grows
=========================

Runs the randomized learner on G(n, 0.1) for growing n and fits log-log
slopes against n and against n log n.  With the splitting reconstructor the
count grows like n log n, not linearly.
"""

# %%
import sys

from cutquery.bench import ExperimentConfig, run_experiment, scaling_report

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 5
rows = run_experiment(ExperimentConfig(n_list=[64, 128, 256, 512], p="0.1", trials=trials))
table, fits = scaling_report(rows)
for t in table:
    print(t["n"], t["mean_cut_queries"], t["queries_per_n"], t["queries_per_nlogn"], t["max_phase_ratio"])
print(fits)
