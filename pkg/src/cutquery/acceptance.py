"""Acceptance checks, runnable from pytest or ``python -m cutquery verify``.

Each check returns a :class:`CheckResult`; ``quick=True`` shrinks the
Monte Carlo sample sizes for a fast smoke run (the pytest acceptance
module always runs the full sizes).
"""

from __future__ import annotations

import math
import os
import tempfile
import time
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np
from scipy.stats import binomtest

from .bench import ExperimentConfig, run_experiment, write_csv, write_scaling_report, fit_scaling
from .deterministic import (
    build_pseudo_graph,
    discover_dense_components,
    harvey_baseline,
    spanning_forest_deterministic,
)
from .forest_common import (
    ComponentState,
    bin_search_edge,
    dfs_edge_bound,
    dfs_spanning_forest,
    refresh_representatives,
)
from .graph_core import (
    GraphFamilySpec,
    WeightedGraph,
    bipartite_sides,
    contract,
    cut_by_enumeration,
    generate_graph,
    ground_truth_components,
    is_maximal_spanning_forest,
)
from .oracle import CutOracle
from .randomized import (
    PhaseConfig,
    reduce_connected_components,
    skeleton_reduce,
    spanning_forest_randomized,
    zero_error_reduce,
)
from .reconstruct import (
    FAILED_VERIFICATION,
    OK,
    ReconResult,
    SumQueryVector,
    adaptive_split_bipartite,
    bipartite_query_bound,
    capped_adaptive_split,
    clog2,
    coin_weigh_bound,
    coin_weigh_support,
    doubling_reconstruct,
)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} [{self.number:2d}] {self.name}: {self.detail}"


# --------------------------------------------------------------------------
# corpus


@dataclass(frozen=True)
class CorpusItem:
    label: str
    spec: GraphFamilySpec
    seed: int


def _sizes_and_seeds(quick: bool) -> list[tuple[int, int]]:
    if quick:
        return [(2, 2), (3, 2), (8, 2), (16, 2), (64, 1)]
    return [(2, 10), (3, 10), (5, 10), (8, 10), (16, 10), (32, 5), (64, 3), (128, 2), (256, 1)]


def _union_parts(n: int, seed: int, weights: str) -> tuple[GraphFamilySpec, ...]:
    kw = dict(weights=weights, lo=1, hi=10**9) if weights != "unit" else {}
    sizes = [max(1, n // 2), max(1, n // 4)]
    sizes.append(max(0, n - sum(sizes)))
    kinds = [
        GraphFamilySpec("erdos_renyi", n=sizes[0], p=0.1, seed=seed, **kw),
        GraphFamilySpec("clique", n=sizes[1], seed=seed + 1, **kw),
        GraphFamilySpec("path", n=sizes[2], seed=seed + 2, **kw),
    ]
    return tuple(k for k in kinds if k.n > 0)


def corpus(quick: bool = False) -> Iterator[CorpusItem]:
    """Ten families x sizes in [2, 256] x seeds; 610 items in full mode."""
    weighted = dict(weights="uniform_int", lo=1, hi=10**9)
    for n, seeds in _sizes_and_seeds(quick):
        for seed in range(seeds):
            yield CorpusItem("er_2/n", GraphFamilySpec("erdos_renyi", n=n, p=min(1.0, 2 / n), seed=seed), seed)
            yield CorpusItem("er_0.1", GraphFamilySpec("erdos_renyi", n=n, p=0.1, seed=seed), seed)
            yield CorpusItem("er_0.5", GraphFamilySpec("erdos_renyi", n=n, p=0.5, seed=seed), seed)
            yield CorpusItem("path", GraphFamilySpec("path", n=n, seed=seed), seed)
            yield CorpusItem("cycle", GraphFamilySpec("cycle", n=n, seed=seed), seed)
            yield CorpusItem("star", GraphFamilySpec("star", n=n, seed=seed), seed)
            yield CorpusItem("clique", GraphFamilySpec("clique", n=n, seed=seed), seed)
            yield CorpusItem(
                "union", GraphFamilySpec("disjoint_union", parts=_union_parts(n, seed, "unit")), seed
            )
            yield CorpusItem("weighted_er", GraphFamilySpec("erdos_renyi", n=n, p=0.1, seed=seed, **weighted), seed)
            yield CorpusItem(
                "weighted_union",
                GraphFamilySpec("disjoint_union", parts=_union_parts(n, seed, "uniform_int")),
                seed,
            )


# --------------------------------------------------------------------------
# checks


def check_correctness(quick: bool = False) -> CheckResult:
    started = time.perf_counter()
    pairs = failures = runs = 0
    bad = []
    for item in corpus(quick):
        g = generate_graph(item.spec)
        pairs += 1
        learners: list[tuple[str, Callable]] = [
            ("randomized", lambda o: spanning_forest_randomized(o, rng=item.seed).forest),
            ("harvey", harvey_baseline),
        ]
        if g.is_unweighted():
            learners.append(("deterministic", lambda o: spanning_forest_deterministic(o).forest))
        for name, learn in learners:
            runs += 1
            if not is_maximal_spanning_forest(g, learn(CutOracle(g))):
                failures += 1
                bad.append((name, item.label, g.n, item.seed))
    elapsed = time.perf_counter() - started
    ok = failures == 0 and (quick or pairs >= 500)
    return CheckResult(
        1, "zero-error correctness", ok, f"{pairs} graphs, {runs} runs, {failures} failures {bad[:3]}, {elapsed:.1f}s"
    )


def check_query_simulation(quick: bool = False) -> CheckResult:
    rng = np.random.default_rng(2024)
    trials = 200 if quick else 1000
    mismatches = ledger_errors = 0
    for k in range(trials):
        n = int(rng.integers(2, 40))
        weights = "uniform_int" if k % 2 else "unit"
        g = generate_graph(
            GraphFamilySpec("erdos_renyi", n=n, p=float(rng.random()), seed=k, weights=weights, lo=1, hi=10**9)
        )
        o = CutOracle(g)
        labels = rng.integers(0, 3, size=n)
        A = np.flatnonzero(labels == 0).tolist()
        B = np.flatnonzero(labels == 1).tolist()
        S = np.flatnonzero(rng.random(n) < 0.5).tolist()
        expect_cut = cut_by_enumeration(g, S)
        expect_cross = sum(w for (u, v), w in g.edges.items() if (u in A and v in B) or (u in B and v in A))
        expect_add = sum(w for (u, v), w in g.edges.items() if u in S and v in S)
        before = o.ledger.cut_total
        if o.cut(S) != expect_cut:
            mismatches += 1
        if o.ledger.cut_total - before != 1:
            ledger_errors += 1
        before = o.ledger.cut_total
        if o.cross(A, B) != expect_cross:
            mismatches += 1
        if o.ledger.cut_total - before != 3:
            ledger_errors += 1
        before = o.ledger.cut_total
        if o.additive(S) != expect_add:
            mismatches += 1
        if o.ledger.cut_total - before != n + 1:
            ledger_errors += 1
        before = o.ledger.cut_total
        if o.additive(A) != sum(w for (u, v), w in g.edges.items() if u in A and v in A):
            mismatches += 1
        if o.ledger.cut_total - before != 1:
            ledger_errors += 1
        if not o.ledger.consistent():
            ledger_errors += 1
    ok = mismatches == 0 and ledger_errors == 0
    return CheckResult(2, "query-simulation identities", ok, f"{trials} cases, {mismatches} value mismatches, {ledger_errors} ledger errors")


def _sampled_edge_counts(n: int, runs: int, profile: str, seed0: int) -> tuple[list[int], list[dict]]:
    totals, inclusion = [], []
    for k in range(runs):
        g = generate_graph(GraphFamilySpec("bipartite_promise", n=n, profile=profile, seed=seed0 + k))
        R, B = bipartite_sides(n)
        edges, trace = skeleton_reduce(CutOracle(g), R, B, rng=np.random.default_rng([seed0, k]))
        assert {r for r, _, _ in edges} == set(R)
        totals.append(trace.total_sampled_edges)
        inclusion.append(edges)
    return totals, inclusion


def check_sampling_bound(quick: bool = False) -> CheckResult:
    n = 256
    runs = 60 if quick else 300
    totals, _ = _sampled_edge_counts(n, runs, "mixed", 10_000)
    mean = float(np.mean(totals))
    se = float(np.std(totals, ddof=1) / math.sqrt(runs))
    ok = mean + 3 * se <= 5 * n
    return CheckResult(
        3, "sampling bound", ok, f"mean sampled edges {mean:.1f} (+3SE {mean + 3 * se:.1f}) vs 5n={5 * n}, {runs} runs"
    )


def check_per_edge_inclusion(quick: bool = False) -> CheckResult:
    n = 64
    runs = 100 if quick else 300
    counts = np.zeros((n, n), dtype=np.int64)
    for k in range(runs):
        g = generate_graph(GraphFamilySpec("bipartite_promise", n=n, profile="complete", seed=k))
        R, B = bipartite_sides(n)
        edges, _ = skeleton_reduce(CutOracle(g), R, B, rng=np.random.default_rng([20_000, k]))
        for r, b, _ in edges:
            counts[r, b - n] += 1
    freq = counts / runs
    p = 5 / n
    limit = p + 3 * math.sqrt(p * (1 - p) / runs)
    worst = float(freq.max())
    return CheckResult(
        4,
        "per-edge inclusion",
        worst <= limit,
        f"max frequency {worst:.4f}, mean {freq.mean():.4f}, limit 5/n+3SE={limit:.4f} (d(r)=n={n}, {runs} runs)",
    )


def _phase_states(quick: bool) -> Iterator[tuple[WeightedGraph, ComponentState, CutOracle]]:
    """States with t >= n / log2 n live components: fresh singletons and
    states one phase in."""
    count = 0
    target = 100 if quick else 300
    seed = 0
    while count < target:
        n = [64, 128, 256][seed % 3]
        p = [0.02, 0.1, 0.5][(seed // 3) % 3]
        g = generate_graph(GraphFamilySpec("erdos_renyi", n=n, p=p, seed=seed))
        o = CutOracle(g)
        active = [o.cut([v]) > 0 for v in range(n)]
        state = ComponentState.singletons(n, active)
        if seed % 2 and len(state.live()) >= 2:
            state = refresh_representatives(o, zero_error_reduce(o, state, rng=np.random.default_rng(seed)).state)
        seed += 1
        t = len(state.live())
        if t < 2 or t < n / math.log2(n):
            continue
        count += 1
        yield g, state, o


def check_phase_contract(quick: bool = False) -> CheckResult:
    successes = trials = violations = 0
    for k, (g, state, o) in enumerate(_phase_states(quick)):
        t = len(state.live())
        out = reduce_connected_components(o, state, PhaseConfig(), np.random.default_rng([30_000, k]))
        trials += 1
        if not out.aborted:
            successes += 1
            if out.t_after > (7 * t) // 8:
                violations += 1
    test = binomtest(successes, trials, 0.1, alternative="greater")
    ok = test.pvalue < 0.05 and violations == 0
    return CheckResult(
        5,
        "phase contract",
        ok,
        f"success {successes}/{trials} = {successes / trials:.3f} (one-sided p={test.pvalue:.2e} vs 0.1), {violations} shrink violations",
    )


def check_query_ceilings(quick: bool = False) -> CheckResult:
    """Explicit ledger checks on every routine across the corpus; the
    routines also raise QueryBoundError on their own."""
    violations = calls = 0
    rng = np.random.default_rng(7)
    for item in corpus(quick):
        g = generate_graph(item.spec)
        n = g.n
        o = CutOracle(g)
        labels = rng.integers(0, 2, size=n)
        R = np.flatnonzero(labels == 0).tolist()
        B = np.flatnonzero(labels == 1).tolist()
        if R and B:
            before = o.ledger.cross_calls
            res = adaptive_split_bipartite(o, R, B)
            calls += 1
            if o.ledger.cross_calls - before > bipartite_query_bound(len(res.edges), len(R), len(B)):
                violations += 1
            if o.cross(R, B) > 0:
                before = o.ledger.cross_calls
                bin_search_edge(o, R, B)
                calls += 1
                if o.ledger.cross_calls - before > clog2(len(R)) + clog2(len(B)) + 1:
                    violations += 1
        if g.is_unweighted() and n >= 2:
            v = int(rng.integers(0, n))
            others = [u for u in range(n) if u != v]
            vec = SumQueryVector(len(others), lambda S: o.cross([v], [others[i] for i in S]))
            support = coin_weigh_support(vec)
            calls += 1
            if vec.queries > coin_weigh_bound(len(support), len(others)):
                violations += 1
        before = o.ledger.cut_total
        edges = dfs_spanning_forest(o, ComponentState.singletons(n))
        calls += 1
        if o.ledger.cut_total - before > len(edges) * dfs_edge_bound(n) + n:
            violations += 1
        active = [o.cut([x]) > 0 for x in range(n)]
        state = ComponentState.singletons(n, active)
        if len(state.live()) >= 2:
            cfg = PhaseConfig()
            out = reduce_connected_components(o, state, cfg, np.random.default_rng(item.seed))
            calls += 1
            if out.recon_queries > cfg.budget(len(state.live()), n):
                violations += 1
    return CheckResult(6, "hard query ceilings", violations == 0, f"{calls} ledger-checked calls, {violations} violations")


def _unweighted_corpus(quick: bool) -> Iterator[WeightedGraph]:
    for item in corpus(quick):
        g = generate_graph(item.spec)
        if g.is_unweighted():
            yield g


def check_cross_edge_bound(quick: bool = False) -> CheckResult:
    graphs = violations = 0
    worst = 0.0
    for g in _unweighted_corpus(quick):
        graphs += 1
        for L in (None, 2, 3, 5, 8):
            disc = discover_dense_components(CutOracle(g), L)
            crossing = sum(contract(g, disc.components).values())
            worst = max(worst, crossing / max(1, g.n * disc.state.L))
            # the strict bound is vacuous on the 0-vertex graph
            if crossing >= g.n * disc.state.L and g.n > 0:
                violations += 1
    return CheckResult(
        7, "cross-edge bound", violations == 0,
        f"{graphs} unweighted graphs x 5 thresholds, {violations} violations, max |E[C]|/(nL) {worst:.3f}",
    )


def check_pseudo_graph(quick: bool = False) -> CheckResult:
    """Discovery components on unweighted graphs (multiplicities and
    connectivity); random partitions on every graph (multiplicities)."""
    rng = np.random.default_rng(8)
    graphs = mismatches = 0
    for item in corpus(quick):
        g = generate_graph(item.spec)
        graphs += 1
        partitions = []
        if g.is_unweighted():
            truth_connected = len(ground_truth_components(g)) <= 1
            for L in (3, 8):
                disc = discover_dense_components(CutOracle(g), L)
                H = build_pseudo_graph(CutOracle(g), disc.components)
                if H.is_connected() != truth_connected:
                    mismatches += 1
                partitions.append((disc.components, H))
        labels = rng.integers(0, max(1, g.n // 3), size=g.n)
        comps = [np.flatnonzero(labels == k).tolist() for k in np.unique(labels)]
        partitions.append((comps, build_pseudo_graph(CutOracle(g), comps)))
        for comps, H in partitions:
            if H.multiplicity != contract(g, comps):
                mismatches += 1
    return CheckResult(8, "pseudo-graph fidelity", mismatches == 0, f"{graphs} graphs, {mismatches} mismatches")


def check_scaling(quick: bool = False, out_dir: str | None = None) -> CheckResult:
    started = time.perf_counter()
    sizes = [64, 128, 256] if quick else [64, 128, 256, 512, 1024]
    trials = 5 if quick else 50
    cfg = ExperimentConfig(algorithm="randomized", family="erdos_renyi", n_list=sizes, p="0.1", trials=trials, seed=0)
    rows = run_experiment(cfg)
    decay_violations = sum(1 for r in rows for a, b in r.phase_counts if b > (7 * a) // 8)
    slope = fit_scaling(rows, "cut_queries_total", "nlogn").slope
    out_dir = out_dir or tempfile.mkdtemp(prefix="cutquery-scaling-")
    os.makedirs(out_dir, exist_ok=True)
    write_csv(rows, os.path.join(out_dir, "scaling_rows.csv"))
    report = os.path.join(out_dir, "scaling_report.csv")
    fits = write_scaling_report(rows, report)
    ok = decay_violations == 0 and 0.8 <= slope <= 1.2
    elapsed = time.perf_counter() - started
    return CheckResult(
        9,
        "scaling report",
        ok,
        f"slope vs n log n {slope:.3f} (vs n {fits.get('slope_vs_n', float('nan')):.3f}), "
        f"{decay_violations} decay violations, {len(rows)} runs, report {report}, {elapsed:.0f}s",
    )


def check_determinism(quick: bool = False) -> CheckResult:
    graphs = diffs = 0
    for item in corpus(quick):
        g = generate_graph(item.spec)
        if g.n > 64:
            continue
        graphs += 1
        runs = []
        for _ in range(2):
            o1, o2 = CutOracle(g), CutOracle(g)
            h = harvey_baseline(o1)
            d = spanning_forest_deterministic(o2).forest if g.is_unweighted() else None
            runs.append((h.edges, o1.ledger.as_dict(), d.edges if d else None, o2.ledger.as_dict()))
        if runs[0] != runs[1]:
            diffs += 1
    return CheckResult(10, "determinism", diffs == 0, f"{graphs} graphs run twice, {diffs} differences")


def fabricating_inner(oracle, R, B, guess, tag):
    """Honest reconstruction plus one made-up edge."""
    res = capped_adaptive_split(oracle, R, B, guess, tag)
    if not res.ok:
        return res
    present = {(u, v) for u, v, _ in res.edges}
    fakes = [(r, b) for r in R for b in B if (r, b) not in present]
    if fakes:
        r, b = fakes[0]
        return ReconResult(res.edges + [(r, b, 1)], res.queries_used, OK)
    u, v, w = res.edges[0]
    return ReconResult([(u, v, w + 1)] + res.edges[1:], res.queries_used, OK)


def dropping_inner(oracle, R, B, guess, tag):
    """Honest reconstruction with its last edge withheld."""
    res = capped_adaptive_split(oracle, R, B, guess, tag)
    if not res.ok:
        return res
    return ReconResult(res.edges[:-1], res.queries_used, OK)


def check_doubling_faults(quick: bool = False) -> CheckResult:
    rng = np.random.default_rng(11)
    faults = wrong_ok = 0
    while faults < 100:
        n = int(rng.integers(4, 30))
        g = generate_graph(GraphFamilySpec("erdos_renyi", n=n, p=float(rng.uniform(0.05, 0.6)), seed=faults,
                                           weights="uniform_int", lo=1, hi=1000))
        labels = rng.integers(0, 2, size=n)
        R = np.flatnonzero(labels == 0).tolist()
        B = np.flatnonzero(labels == 1).tolist()
        o = CutOracle(g)
        if not R or not B or o.cross(R, B) == 0:
            continue
        inner = fabricating_inner if faults % 2 == 0 else dropping_inner
        res = doubling_reconstruct(o, R, B, inner)
        faults += 1
        if res.status != FAILED_VERIFICATION:
            wrong_ok += 1
    return CheckResult(11, "doubling wrapper under faults", wrong_ok == 0, f"{faults} injected faults, {wrong_ok} not rejected")


def random_claim3_sequence(rng: np.random.Generator) -> tuple[list[int], int, int]:
    """Integers ``t_i >= 2`` with sum ``t``, ``n / log2 n <= t <= n`` and at
    most ``log2 n`` terms."""
    while True:
        n = int(2 ** rng.uniform(2, 20))
        lo = math.ceil(n / math.log2(n))
        t = int(rng.integers(lo, n, endpoint=True))
        jmax = min(int(math.floor(math.log2(n))), t // 2)
        if jmax < 1:
            continue
        j = int(rng.integers(1, jmax, endpoint=True))
        # composition of t - 2j into j nonnegative parts, then shift by 2
        cuts = np.sort(rng.integers(0, t - 2 * j, size=j - 1, endpoint=True))
        parts = np.diff(np.concatenate([[0], cuts, [t - 2 * j]])) + 2
        return [int(x) for x in parts], t, n


def check_claim3(quick: bool = False) -> CheckResult:
    rng = np.random.default_rng(3)
    bad = 0
    worst = 0.0
    for _ in range(1000):
        ts, t, n = random_claim3_sequence(rng)
        lhs = sum(x / math.log2(x) for x in ts)
        rhs = 4 * t / math.log2(t)
        worst = max(worst, lhs / rhs)
        if lhs > rhs:
            bad += 1
    return CheckResult(12, "sum bound numeric sanity", bad == 0, f"1000 sequences, {bad} violations, max lhs/rhs {worst:.3f}")


CHECKS: list[Callable[..., CheckResult]] = [
    check_correctness,
    check_query_simulation,
    check_sampling_bound,
    check_per_edge_inclusion,
    check_phase_contract,
    check_query_ceilings,
    check_cross_edge_bound,
    check_pseudo_graph,
    check_scaling,
    check_determinism,
    check_doubling_faults,
    check_claim3,
]


def verify_suite(quick: bool = False, checks=None, out_dir: str | None = None) -> bool:
    """Run the checks, print one line each, return True iff all pass."""
    all_ok = True
    for check in checks or CHECKS:
        if check is check_scaling:
            result = check(quick=quick, out_dir=out_dir)
        else:
            result = check(quick=quick)
        print(result.line(), flush=True)
        all_ok &= result.passed
    return all_ok
