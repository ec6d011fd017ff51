"""Building blocks shared by the spanning-forest learners."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graph_core import UnionFind
from .oracle import TAG_DEFAULT, TAG_DFS, TAG_REFRESH, CutOracle
from .reconstruct import QueryBoundError, clog2

Edge = tuple[int, int, int]


@dataclass
class ComponentState:
    """Partition of the vertices into components connected by learned edges.

    Components are keyed by their smallest vertex.  ``representative[c]`` is
    an active vertex of ``c`` with an edge leaving ``c``, or ``None``.  A
    component whose representative is ``None`` and which is not ``stale`` is
    finished: it is a connected component of the hidden graph.  ``stale``
    components were produced by a merge and need
    :func:`refresh_representatives`; ``rep_candidates`` lists the old
    representatives to try first.
    """

    n: int
    comp_of: list[int]
    members: dict[int, list[int]]
    representative: dict[int, int | None]
    inactive: list[bool]
    learned_edges: list[Edge] = field(default_factory=list)
    stale: set[int] = field(default_factory=set)
    rep_candidates: dict[int, list[int]] = field(default_factory=dict)

    @classmethod
    def singletons(cls, n: int, active: Sequence[bool] | None = None) -> "ComponentState":
        if active is None:
            active = [True] * n
        return cls(
            n=n,
            comp_of=list(range(n)),
            members={v: [v] for v in range(n)},
            representative={v: (v if active[v] else None) for v in range(n)},
            inactive=[not a for a in active],
        )

    def __len__(self) -> int:
        return len(self.members)

    def components(self) -> list[list[int]]:
        return [self.members[c] for c in sorted(self.members)]

    def live(self) -> list[int]:
        """Ids of components that may still have outgoing edges."""
        return [c for c in sorted(self.members) if self.representative[c] is not None or c in self.stale]

    def finished(self) -> list[int]:
        return [c for c in sorted(self.members) if self.representative[c] is None and c not in self.stale]

    def copy(self) -> "ComponentState":
        return copy.deepcopy(self)

    def merged(self, edges: Iterable[Edge]) -> "ComponentState":
        """New state with components joined along ``edges``.

        Edges closing a cycle among components are dropped, so
        ``learned_edges`` stays a forest.
        """
        ids = sorted(self.members)
        pos = {c: i for i, c in enumerate(ids)}
        uf = UnionFind(len(ids))
        kept = []
        for u, v, w in edges:
            if uf.union(pos[self.comp_of[u]], pos[self.comp_of[v]]):
                kept.append((u, v, w))
        if not kept:
            return self.copy()
        groups: dict[int, list[int]] = {}
        for c in ids:
            groups.setdefault(uf.find(pos[c]), []).append(c)
        out = self.copy()
        out.learned_edges.extend(kept)
        for old in groups.values():
            if len(old) == 1:
                continue
            verts = sorted(v for c in old for v in self.members[c])
            new_id = verts[0]
            candidates = []
            for c in old:
                candidates.extend(self.rep_candidates.get(c, []))
                if self.representative[c] is not None:
                    candidates.append(self.representative[c])
                out.members.pop(c)
                out.representative.pop(c)
                out.stale.discard(c)
                out.rep_candidates.pop(c, None)
            out.members[new_id] = verts
            out.representative[new_id] = None
            out.stale.add(new_id)
            out.rep_candidates[new_id] = sorted(set(candidates))
            for v in verts:
                out.comp_of[v] = new_id
        return out

    def check(self) -> None:
        """Assert the structural invariants (used by tests)."""
        seen = sorted(v for vs in self.members.values() for v in vs)
        assert seen == list(range(self.n)), "components do not partition the vertex set"
        for c, vs in self.members.items():
            assert c == vs[0] and all(self.comp_of[v] == c for v in vs)
        uf = UnionFind(self.n)
        for u, v, _ in self.learned_edges:
            assert self.comp_of[u] == self.comp_of[v], "learned edge crosses components"
            assert uf.union(u, v), "learned edges contain a cycle"
        for c, vs in self.members.items():
            roots = {uf.find(v) for v in vs}
            assert len(roots) == 1, f"component {c} not connected by learned edges"
            r = self.representative[c]
            if r is not None:
                assert r in vs and not self.inactive[r]


# --------------------------------------------------------------------------
# binary edge search


def _narrow(oracle: CutOracle, candidates: np.ndarray, other: np.ndarray, value: int, tag: str) -> tuple[int, int]:
    """Halve ``candidates`` down to one vertex ``x`` with ``cross({x}, other) > 0``.

    ``value`` is ``cross(candidates, other)`` and must be positive.  Returns
    ``(x, cross({x}, other))``.  Always continues into the first half on a
    positive answer.
    """
    lo, hi = 0, len(candidates)
    while hi - lo > 1:
        mid = lo + (hi - lo + 1) // 2
        first = oracle.cross(candidates[lo:mid], other, tag)
        if first > 0:
            hi, value = mid, first
        else:
            lo = mid
    return int(candidates[lo]), value


def bin_search_edge(
    oracle: CutOracle,
    Ci: Sequence[int],
    Cj: Sequence[int],
    tag: str = TAG_DEFAULT,
    total: int | None = None,
) -> Edge:
    """A true edge ``(vi, vj, w)`` with ``vi`` in ``Ci`` and ``vj`` in ``Cj``.

    Finds the ``Ci`` endpoint first, then the ``Cj`` endpoint against it.
    Raises ``ValueError`` if no edge joins the two sets.
    """
    a = np.asarray(Ci, dtype=np.int64)
    b = np.asarray(Cj, dtype=np.int64)
    start = oracle.ledger.cross_calls
    if total is None:
        total = oracle.cross(a, b, tag)
    if total <= 0:
        raise ValueError("bin_search_edge: no edge between the two sets")
    vi, value = _narrow(oracle, a, b, total, tag)
    vj, w = _narrow(oracle, b, np.array([vi], dtype=np.int64), value, tag)
    used = oracle.ledger.cross_calls - start
    if used > clog2(len(a)) + clog2(len(b)) + 1:
        raise QueryBoundError(f"bin_search_edge used {used} CROSS queries")
    return (vi, vj, w)


# --------------------------------------------------------------------------
# DFS-style finisher


def dfs_edge_bound(n: int) -> int:
    """CUT queries allowed per discovered edge."""
    return 1 + 3 * (2 * clog2(n) + 2)


def dfs_spanning_forest(oracle: CutOracle, state: ComponentState, tag: str = TAG_DFS) -> list[Edge]:
    """Edges of ``G`` that span the contraction of ``G`` by ``state``.

    Grows one supernode at a time: a CUT tells whether it has a boundary
    edge, a halving search over the not-yet-absorbed vertices finds the
    outer endpoint, and a halving search inside finds the inner one.
    Finished components are skipped entirely.
    """
    start = oracle.ledger.cut_total
    live = state.live()
    unabsorbed = np.zeros(oracle.n, dtype=bool)
    for c in live:
        unabsorbed[state.members[c]] = True
    edges: list[Edge] = []
    trees = 0
    for c in live:
        if not unabsorbed[c]:
            continue
        trees += 1
        inside = list(state.members[c])
        unabsorbed[inside] = False
        while True:
            value = oracle.cut(inside, tag)
            if value == 0:
                break
            outside = np.flatnonzero(unabsorbed)
            s = np.asarray(inside, dtype=np.int64)
            u, value_u = _narrow(oracle, outside, s, value, tag)
            x, w = _narrow(oracle, s, np.array([u], dtype=np.int64), value_u, tag)
            edges.append((x, u, w))
            grown = state.members[state.comp_of[u]]
            inside.extend(grown)
            unabsorbed[grown] = False
    used = oracle.ledger.cut_total - start
    if used > len(edges) * dfs_edge_bound(oracle.n) + trees:
        raise QueryBoundError(f"dfs_spanning_forest used {used} CUT queries for {len(edges)} edges")
    return edges


# --------------------------------------------------------------------------
# representatives


def refresh_representatives(oracle: CutOracle, state: ComponentState, tag: str = TAG_REFRESH) -> ComponentState:
    """Pick an active representative for every stale component.

    Old representatives are tried first, then the other members that are
    not yet known to be inactive, in index order.  Each test is one
    ``cross({v}, V - C)``; a vertex failing it is inactive for good.  A
    component with no active vertex is finished.
    """
    out = state.copy()
    n = oracle.n
    for c in sorted(out.stale):
        verts = out.members[c]
        candidates = list(out.rep_candidates.get(c, []))
        tried = set(candidates)
        candidates.extend(v for v in verts if v not in tried)
        chosen = None
        if len(verts) == n:
            for v in verts:
                out.inactive[v] = True
        else:
            mask = np.ones(n, dtype=bool)
            mask[verts] = False
            rest = np.flatnonzero(mask)
            for v in candidates:
                if out.inactive[v]:
                    continue
                if oracle.cross([v], rest, tag) > 0:
                    chosen = v
                    break
                out.inactive[v] = True
        out.representative[c] = chosen
        out.rep_candidates.pop(c, None)
    out.stale.clear()
    return out
