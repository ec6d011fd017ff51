"""Deterministic spanning-forest learner for unweighted graphs.

Stage one grows components breadth-first, learning the whole residual
neighbourhood of a vertex only when it has at least ``L`` edges into the
still-active vertices.  Every vertex closes out with fewer than ``L`` such
edges, so fewer than ``n * L`` edges cross the resulting components.  Stage
two reconstructs the contracted multigraph on those components and converts
a spanning forest of it into true edges.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .forest_common import ComponentState, Edge, bin_search_edge, dfs_edge_bound, dfs_spanning_forest
from .graph_core import Forest, UnionFind
from .oracle import (
    TAG_COINWEIGH,
    TAG_JOIN_BINSEARCH,
    TAG_JOIN_HIGH,
    TAG_PSEUDO,
    TAG_RESDEG,
    CutOracle,
)
from .reconstruct import (
    QueryBoundError,
    SumQueryVector,
    WeightedInputError,
    clog2,
    coin_weigh_support,
    general_query_bound,
    general_split_groups,
    split_groups,
)


def _loglog(n: int) -> float:
    return math.log2(math.log2(n)) if n > 2 else 0.0


def residual_threshold(n: int) -> int:
    """``L = max(1, ceil(log2 n / (log2 log2 n)^2))``."""
    ll = _loglog(n)
    if ll <= 0:
        return 1
    return max(1, math.ceil(math.log2(n) / ll**2))


def degree_threshold(n: int) -> int:
    """Forest degree above which a supernode is handled by reconstruction."""
    ll = _loglog(n)
    if ll <= 0:
        return 1
    return max(1, math.ceil(math.log2(n) / ll))


@dataclass
class DiscoveryState:
    L: int
    order: list[int] = field(default_factory=list)
    resdeg: dict[int, int] = field(default_factory=dict)
    cross_edge_bound: int = 0
    resdeg_queries: int = 0


@dataclass
class Discovery:
    components: list[list[int]]
    edges: list[Edge]
    state: DiscoveryState


def discover_dense_components(oracle: CutOracle, L: int | None = None) -> Discovery:
    """Breadth-first growth through high residual-degree vertices.

    ``resdeg(v)`` is one ``cross({v}, A)`` against the active set ``A``.
    Start vertices and the queue order are lowest-index first.
    """
    n = oracle.n
    L = residual_threshold(n) if L is None else L
    if L < 1:
        raise ValueError("L must be >= 1")
    active = np.ones(n, dtype=bool)
    st = DiscoveryState(L)
    components: list[list[int]] = []
    learned: list[Edge] = []
    for x in range(n):
        if not active[x]:
            continue
        active[x] = False
        comp = [x]
        queue = deque([x])
        while queue:
            v = queue.popleft()
            st.order.append(v)
            A = np.flatnonzero(active)
            if A.size == 0:
                st.resdeg[v] = 0
                continue
            deg = oracle.cross([v], A, TAG_RESDEG)
            st.resdeg_queries += 1
            st.resdeg[v] = deg
            if deg > A.size:
                raise WeightedInputError(f"resdeg({v}) = {deg} exceeds |A| = {A.size}")
            if deg < L:
                st.cross_edge_bound += deg
                continue
            vec = SumQueryVector(int(A.size), lambda S, v=v, A=A: oracle.cross([v], A[S], TAG_COINWEIGH))
            for i in coin_weigh_support(vec, total=deg):
                w = int(A[i])
                learned.append((v, w, 1))
                active[w] = False
                comp.append(w)
                queue.append(w)
        components.append(sorted(comp))
    if st.cross_edge_bound >= n * L and n > 0:
        raise AssertionError("cross-edge bound violated")
    return Discovery(components, learned, st)


@dataclass
class PseudoGraph:
    """Contracted multigraph: supernode ``i`` is ``components[i]``."""

    components: list[list[int]]
    multiplicity: dict[tuple[int, int], int]

    def is_connected(self) -> bool:
        k = len(self.components)
        uf = UnionFind(k)
        for i, j in self.multiplicity:
            uf.union(i, j)
        return len({uf.find(i) for i in range(k)}) <= 1

    def spanning_forest(self) -> list[tuple[int, int]]:
        uf = UnionFind(len(self.components))
        return [(i, j) for i, j in sorted(self.multiplicity) if uf.union(i, j)]


def build_pseudo_graph(oracle: CutOracle, components: Sequence[Sequence[int]]) -> PseudoGraph:
    """Reconstruct the contracted multigraph; a CROSS between supernode sets
    is a CROSS between their vertex unions."""
    comps = [list(c) for c in components]
    start = oracle.ledger.cross_calls
    pairs, _ = general_split_groups(oracle, comps, TAG_PSEUDO)
    used = oracle.ledger.cross_calls - start
    if used > general_query_bound(len(pairs), len(comps)):
        raise QueryBoundError(f"pseudo-graph reconstruction used {used} CROSS queries")
    return PseudoGraph(comps, {(i, j): w for i, j, w in pairs})


def join_components(
    oracle: CutOracle,
    components: Sequence[Sequence[int]],
    learned: Sequence[Edge],
    H: PseudoGraph,
    threshold: int | None = None,
) -> Forest:
    """Turn a spanning forest of ``H`` into true edges.

    Nodes of the working forest are vertex groups: a whole supernode, or a
    single vertex once its supernode has been expanded.  A supernode of
    forest degree above ``threshold`` is expanded by reconstructing which of
    its vertices touch each neighbouring node and keeping the first such
    vertex per neighbour.  Every remaining node-to-node edge is resolved by
    :func:`bin_search_edge`.
    """
    n = oracle.n
    threshold = degree_threshold(n) if threshold is None else threshold
    comps = [list(c) for c in components]
    adj: dict[tuple[str, int], set[tuple[str, int]]] = {}
    for i, j in H.spanning_forest():
        adj.setdefault(("C", i), set()).add(("C", j))
        adj.setdefault(("C", j), set()).add(("C", i))

    def members(node):
        kind, x = node
        return comps[x] if kind == "C" else [x]

    found: list[Edge] = []
    high = [i for i in range(len(comps)) if len(adj.get(("C", i), ())) > threshold]
    for i in high:
        node = ("C", i)
        nbrs = sorted(adj.pop(node))
        pairs, _, _ = split_groups(oracle, [[u] for u in comps[i]], [members(nb) for nb in nbrs], tag=TAG_JOIN_HIGH)
        first: dict[int, tuple[int, int]] = {}
        for ui, j, w in sorted(pairs):
            first.setdefault(j, (comps[i][ui], w))
        assert len(first) == len(nbrs), "forest neighbour without a crossing edge"
        for j, nb in enumerate(nbrs):
            u, w = first[j]
            adj[nb].discard(node)
            if nb[0] == "v":
                found.append((u, nb[1], w))
            else:
                adj.setdefault(("v", u), set()).add(nb)
                adj[nb].add(("v", u))
    remaining = sorted({tuple(sorted((a, b))) for a, nbs in adj.items() for b in nbs})
    for a, b in remaining:
        found.append(bin_search_edge(oracle, members(a), members(b), TAG_JOIN_BINSEARCH))
    return Forest(n, tuple(learned) + tuple(found))


@dataclass
class DeterministicRun:
    forest: Forest
    discovery: Discovery
    pseudo: PseudoGraph


def spanning_forest_deterministic(
    oracle: CutOracle, L: int | None = None, threshold: int | None = None
) -> DeterministicRun:
    """Discovery, pseudo-graph reconstruction, then joining.  Requires an
    unweighted hidden graph."""
    disc = discover_dense_components(oracle, L)
    H = build_pseudo_graph(oracle, disc.components)
    forest = join_components(oracle, disc.components, disc.edges, H, threshold)
    return DeterministicRun(forest, disc, H)


def harvey_query_bound(n: int) -> int:
    return max(0, n - 1) * dfs_edge_bound(n) + n


def harvey_baseline(oracle: CutOracle) -> Forest:
    """DFS finisher run from the all-singletons partition; works with weights."""
    n = oracle.n
    start = oracle.ledger.cut_total
    edges = dfs_spanning_forest(oracle, ComponentState.singletons(n))
    used = oracle.ledger.cut_total - start
    if used > harvey_query_bound(n):
        raise QueryBoundError(f"harvey baseline used {used} CUT queries")
    return Forest(n, tuple(edges))


def query_ceiling_constant(cut_total: int, n: int) -> float:
    """Measured ``C1`` in ``cut_total <= C1 * n * ceil(log2 n)``."""
    return cut_total / max(1, n * max(1, clog2(n)))
