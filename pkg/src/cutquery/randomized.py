"""Zero-error randomized spanning-forest learner.

The core routine samples blue vertices at geometrically increasing rates
``2^i / n`` and reconstructs the edges from the still-unmatched red
vertices to each sample.  Red vertices of high blue-degree get matched while
the samples are small, so the reconstructed graphs stay sparse without ever
estimating a degree.  :func:`reduce_connected_components` turns this into a
Monte Carlo phase over a random red/blue coloring of the current components,
:func:`zero_error_reduce` retries it until it succeeds, and
:func:`spanning_forest_randomized` chains phases and finishes with the DFS
routine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .forest_common import ComponentState, Edge, dfs_spanning_forest, refresh_representatives
from .graph_core import Forest
from .oracle import TAG_ACTIVITY, TAG_COLORING, TAG_PHASE_RECON, CutOracle
from .reconstruct import OK, ReconResult, adaptive_split_bipartite, clog2

Reconstructor = Callable[..., ReconResult]

BUDGET_FORMULAS = ("baseline_logn", "paper_linear")


@dataclass
class PhaseConfig:
    """Budget settings for one Monte Carlo phase.

    ``baseline_logn`` allows ``K * t * ceil(log2 n)`` reconstruction CROSS
    queries, matching the O(m log n) cost of the splitting baseline;
    ``paper_linear`` allows ``K * t`` and is meant for an optimal
    reconstructor plugged in through ``reconstructor``.
    """

    budget_constant: int = 64
    budget_formula: str = "baseline_logn"
    reconstructor: Reconstructor = adaptive_split_bipartite

    def __post_init__(self):
        if self.budget_constant < 1:
            raise ValueError("budget_constant must be >= 1")
        if self.budget_formula not in BUDGET_FORMULAS:
            raise ValueError(f"unknown budget formula {self.budget_formula!r}")

    def budget(self, t: int, n: int) -> int:
        if self.budget_formula == "paper_linear":
            return self.budget_constant * t
        return self.budget_constant * t * max(1, clog2(n))


@dataclass
class SampleTrace:
    blue_sizes: list[int] = field(default_factory=list)
    edges_found: list[int] = field(default_factory=list)
    survivors: list[int] = field(default_factory=list)

    @property
    def total_sampled_edges(self) -> int:
        return sum(self.edges_found)


def _sample_and_reconstruct(
    oracle: CutOracle,
    R: Sequence[int],
    B: Sequence[int],
    scale: int,
    rng: np.random.Generator,
    recon: Reconstructor,
    budget: int | None,
    tag: str,
) -> tuple[list[list[Edge]], SampleTrace, str, int]:
    """Rounds ``i = 0..ceil(log2 scale)``: sample ``B`` at rate
    ``min(1, 2^i / scale)``, reconstruct ``E(R_i, B_i)``, drop matched reds."""
    remaining = list(R)
    blue = np.asarray(B, dtype=np.int64)
    rounds: list[list[Edge]] = []
    trace = SampleTrace()
    used = 0
    for i in range(clog2(scale) + 1):
        p = min(1.0, 2.0**i / scale)
        keep = rng.random(blue.size) < p
        sample = blue[keep]
        trace.blue_sizes.append(int(sample.size))
        found: list[Edge] = []
        if remaining and sample.size:
            left = None if budget is None else budget - used
            res = recon(oracle, remaining, sample.tolist(), left, tag)
            used += res.queries_used
            if res.status != OK:
                trace.edges_found.append(len(res.edges))
                trace.survivors.append(len(remaining))
                return rounds, trace, res.status, used
            found = res.edges
            matched = {r for r, _, _ in found}
            remaining = [r for r in remaining if r not in matched]
        rounds.append(found)
        trace.edges_found.append(len(found))
        trace.survivors.append(len(remaining))
    return rounds, trace, OK, used


def skeleton_reduce(
    oracle: CutOracle,
    R: Sequence[int],
    B: Sequence[int],
    recon: Reconstructor = adaptive_split_bipartite,
    rng: np.random.Generator | None = None,
    tag: str = TAG_PHASE_RECON,
) -> tuple[list[Edge], SampleTrace]:
    """At least one edge at every red vertex of a promise bipartite instance.

    Requires every vertex of ``R`` to have a neighbor in ``B``; the final
    round samples all of ``B``, so under that promise every red vertex is
    matched.  Rates are ``2^i / |B|``.
    """
    rng = np.random.default_rng() if rng is None else rng
    rounds, trace, status, _ = _sample_and_reconstruct(
        oracle, R, B, max(1, len(B)), rng, recon, None, tag
    )
    assert status == OK
    return [e for found in rounds for e in found], trace


@dataclass
class PhaseOutcome:
    """Result of one Monte Carlo phase; ``state`` is None on ABORT."""

    state: ComponentState | None
    abort_reason: str | None
    t_before: int
    t_after: int | None = None
    red_with_blue: int = 0
    budget: int = 0
    recon_queries: int = 0
    trace: SampleTrace = field(default_factory=SampleTrace)

    @property
    def aborted(self) -> bool:
        return self.state is None


def _live_count(state: ComponentState) -> int:
    return len(state.live())


def reduce_connected_components(
    oracle: CutOracle,
    state: ComponentState,
    cfg: PhaseConfig | None = None,
    rng: np.random.Generator | None = None,
) -> PhaseOutcome:
    """One phase: either merge away at least an eighth of the live
    components or abort.  Never merges along a non-edge."""
    cfg = PhaseConfig() if cfg is None else cfg
    rng = np.random.default_rng() if rng is None else rng
    assert not state.stale, "refresh representatives before a phase"
    live = state.live()
    t = len(live)
    n = oracle.n
    blue_flags = rng.random(t) < 0.5
    blue = sorted(v for c, is_blue in zip(live, blue_flags) if is_blue for v in state.members[c])
    reds = [state.representative[c] for c, is_blue in zip(live, blue_flags) if not is_blue]
    R = []
    if blue:
        R = [r for r in reds if oracle.cross([r], blue, TAG_COLORING) > 0]
    if 8 * len(R) < t:
        return PhaseOutcome(None, "coloring", t, red_with_blue=len(R))
    budget = cfg.budget(t, n)
    rounds, trace, status, used = _sample_and_reconstruct(
        oracle, R, blue, t, rng, cfg.reconstructor, budget, TAG_PHASE_RECON
    )
    if used > budget:
        raise AssertionError(f"phase spent {used} CROSS queries over its budget {budget}")
    if status != OK:
        return PhaseOutcome(None, status, t, red_with_blue=len(R), budget=budget, recon_queries=used, trace=trace)
    edges = [e for found in rounds for e in found]
    assert trace.survivors[-1] == 0, "a red representative was left unmatched"
    new_state = state.merged(edges)
    t_after = _live_count(new_state)
    assert t_after <= t - len(R)
    return PhaseOutcome(new_state, None, t, t_after, len(R), budget, used, trace)


@dataclass
class ZeroErrorOutcome:
    state: ComponentState
    attempts: int
    outcomes: list[PhaseOutcome]

    @property
    def success(self) -> PhaseOutcome:
        return self.outcomes[-1]


def zero_error_reduce(
    oracle: CutOracle,
    state: ComponentState,
    cfg: PhaseConfig | None = None,
    rng: np.random.Generator | None = None,
    max_attempts: int | None = None,
) -> ZeroErrorOutcome:
    """Repeat :func:`reduce_connected_components` until it does not abort."""
    rng = np.random.default_rng() if rng is None else rng
    outcomes = []
    while max_attempts is None or len(outcomes) < max_attempts:
        out = reduce_connected_components(oracle, state, cfg, rng)
        outcomes.append(out)
        if not out.aborted:
            return ZeroErrorOutcome(out.state, len(outcomes), outcomes)
    raise RuntimeError(f"no successful phase in {max_attempts} attempts")


def phase_limit(n: int) -> int:
    if n <= 4:
        return 0
    return max(1, math.ceil(6 * math.log2(math.log2(n))))


def dfs_threshold(n: int) -> float:
    """Live-component count at or below which phases stop and DFS takes over."""
    return max(1.0, n / max(1, clog2(n)))


@dataclass
class RandomizedRun:
    forest: Forest
    phases_run: int = 0
    aborts: int = 0
    sampled_edges_total: int = 0
    phase_counts: list[tuple[int, int]] = field(default_factory=list)
    dfs_edges: int = 0


def spanning_forest_randomized(
    oracle: CutOracle,
    cfg: PhaseConfig | None = None,
    rng: np.random.Generator | int | None = None,
) -> RandomizedRun:
    """Maximal spanning forest of the hidden graph; correct on every run."""
    cfg = PhaseConfig() if cfg is None else cfg
    rng = np.random.default_rng(rng)
    n = oracle.n
    active = [oracle.cut([v], TAG_ACTIVITY) > 0 for v in range(n)]
    state = ComponentState.singletons(n, active)
    run = RandomizedRun(Forest(n))
    for _ in range(phase_limit(n)):
        t = _live_count(state)
        if t < 2 or t <= dfs_threshold(n):
            break
        result = zero_error_reduce(oracle, state, cfg, rng)
        success = result.success
        if success.t_after > (7 * t) // 8:
            raise AssertionError(f"phase left {success.t_after} of {t} components")
        run.phases_run += 1
        run.aborts += result.attempts - 1
        run.sampled_edges_total += success.trace.total_sampled_edges
        run.phase_counts.append((t, success.t_after))
        state = refresh_representatives(oracle, result.state)
    finish = dfs_spanning_forest(oracle, state)
    run.dfs_edges = len(finish)
    run.forest = Forest(n, tuple(state.learned_edges) + tuple(finish))
    return run
