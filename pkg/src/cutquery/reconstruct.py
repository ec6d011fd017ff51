"""Recovering hidden edge sets from CROSS and subset-sum queries.

The optimal reconstructors used as black boxes in the literature are not
implemented.  In their place sits an adaptive splitting baseline that works
because weights are positive: ``cross(X, Y) == 0`` exactly when there is no
edge between ``X`` and ``Y``.  Anything with the same call signature as
:func:`adaptive_split_bipartite` can be plugged into the randomized phases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .oracle import TAG_DEFAULT, TAG_VERIFY, CutOracle

OK = "ok"
ABORTED_BUDGET = "aborted_budget"
FAILED_VERIFICATION = "failed_verification"

# Stand-in for the unnamed reconstruction constants: the baseline spends at
# most C_BASELINE * m * (depth of the split tree) + 1 CROSS queries.
C_BASELINE = 2


class QueryBoundError(AssertionError):
    """A routine used more queries than its proven ceiling."""


class WeightedInputError(ValueError):
    """A sum query returned more than a 0/1 vector allows."""


def clog2(k: int) -> int:
    """``ceil(log2(k))`` for ``k >= 1``, and 0 for ``k <= 1``."""
    return (k - 1).bit_length() if k > 1 else 0


@dataclass
class ReconResult:
    edges: list[tuple[int, int, int]] = field(default_factory=list)
    queries_used: int = 0
    status: str = OK

    @property
    def ok(self) -> bool:
        return self.status == OK


# --------------------------------------------------------------------------
# grouped adaptive splitting


class _Groups:
    """A sequence of vertex groups stored flat, so contiguous runs of groups
    can be sliced without copying Python lists."""

    def __init__(self, groups: Sequence[Sequence[int]]):
        sizes = [len(g) for g in groups]
        self.offsets = np.concatenate([[0], np.cumsum(sizes, dtype=np.int64)]).astype(np.int64)
        if groups:
            self.flat = np.concatenate([np.asarray(g, dtype=np.int64) for g in groups])
        else:
            self.flat = np.zeros(0, dtype=np.int64)
        self.count = len(groups)

    def span(self, lo: int, hi: int) -> np.ndarray:
        return self.flat[self.offsets[lo] : self.offsets[hi]]


def split_groups(
    oracle: CutOracle,
    left: Sequence[Sequence[int]],
    right: Sequence[Sequence[int]],
    *,
    budget: int | None = None,
    max_edges: int | None = None,
    tag: str = TAG_DEFAULT,
    known_total: int | None = None,
) -> tuple[list[tuple[int, int, int]], int, str]:
    """Find every pair ``(i, j)`` of groups with ``cross(left[i], right[j]) > 0``.

    Returns ``(pairs, cross_queries, status)`` where ``pairs`` holds
    ``(i, j, total_weight)``.  The larger side (ties go to ``left``) is halved
    at each step; the second half's value is the parent's minus the first
    half's, so only one CROSS is spent per split.
    """
    L, R = _Groups(left), _Groups(right)
    pairs: list[tuple[int, int, int]] = []
    used = 0
    if L.count == 0 or R.count == 0:
        return pairs, used, OK

    def ask(a: np.ndarray, b: np.ndarray) -> int | None:
        nonlocal used
        if budget is not None and used >= budget:
            return None
        used += 1
        return oracle.cross(a, b, tag)

    if known_total is None:
        total = ask(L.span(0, L.count), R.span(0, R.count))
        if total is None:
            return pairs, used, ABORTED_BUDGET
    else:
        total = known_total
    stack = [(0, L.count, 0, R.count, total)] if total > 0 else []
    while stack:
        llo, lhi, rlo, rhi, value = stack.pop()
        nl, nr = lhi - llo, rhi - rlo
        if nl == 1 and nr == 1:
            pairs.append((llo, rlo, value))
            if max_edges is not None and len(pairs) > max_edges:
                return pairs, used, ABORTED_BUDGET
            continue
        if nl >= nr:
            mid = llo + (nl + 1) // 2
            first = ask(L.span(llo, mid), R.span(rlo, rhi))
            if first is None:
                return pairs, used, ABORTED_BUDGET
            children = [(llo, mid, rlo, rhi, first), (mid, lhi, rlo, rhi, value - first)]
        else:
            mid = rlo + (nr + 1) // 2
            first = ask(L.span(llo, lhi), R.span(rlo, mid))
            if first is None:
                return pairs, used, ABORTED_BUDGET
            children = [(llo, lhi, rlo, mid, first), (llo, lhi, mid, rhi, value - first)]
        # LIFO: push the second half first so the first half is explored first
        for child in reversed(children):
            if child[4] > 0:
                stack.append(child)
    return pairs, used, OK


def bipartite_query_bound(m: int, size_r: int, size_b: int) -> int:
    if m == 0:
        return 1
    return C_BASELINE * m * (clog2(size_r) + clog2(size_b)) + 1


def adaptive_split_bipartite(
    oracle: CutOracle,
    R: Sequence[int],
    B: Sequence[int],
    budget: int | None = None,
    tag: str = TAG_DEFAULT,
    *,
    max_edges: int | None = None,
) -> ReconResult:
    """Recover every edge between disjoint vertex sets ``R`` and ``B``.

    Edges come back as ``(r, b, w)`` with ``r`` in ``R``.  With no budget the
    status is always ``ok``; with one, the run stops with
    ``aborted_budget`` as soon as another CROSS would exceed it.
    ``max_edges`` aborts the same way once more edges than that are found.
    """
    R = list(R)
    B = list(B)
    pairs, used, status = split_groups(
        oracle, [[r] for r in R], [[b] for b in B], budget=budget, max_edges=max_edges, tag=tag
    )
    edges = [(R[i], B[j], w) for i, j, w in pairs]
    if status == OK and R and B and used > bipartite_query_bound(len(edges), len(R), len(B)):
        raise QueryBoundError(f"adaptive split used {used} CROSS queries for m={len(edges)}")
    return ReconResult(edges, used, status)


def general_query_bound(m: int, size_u: int) -> int:
    return 2 * m * 2 * clog2(size_u) + 2 * size_u + 1


def general_split_groups(
    oracle: CutOracle, groups: Sequence[Sequence[int]], tag: str = TAG_DEFAULT
) -> tuple[list[tuple[int, int, int]], int]:
    """All pairs of groups ``(i, j)``, ``i < j``, joined by positive weight."""
    pairs: list[tuple[int, int, int]] = []
    used = 0
    stack = [(0, len(groups))]
    while stack:
        lo, hi = stack.pop()
        if hi - lo <= 1:
            continue
        mid = lo + (hi - lo + 1) // 2
        found, q, _ = split_groups(oracle, groups[lo:mid], groups[mid:hi], tag=tag)
        used += q
        pairs.extend((lo + i, mid + j, w) for i, j, w in found)
        stack.append((mid, hi))
        stack.append((lo, mid))
    pairs.sort()
    return pairs, used


def general_adaptive_split(oracle: CutOracle, U: Sequence[int], tag: str = TAG_DEFAULT) -> ReconResult:
    """Recover every edge with both endpoints in ``U``."""
    U = list(U)
    pairs, used = general_split_groups(oracle, [[u] for u in U], tag)
    edges = [(U[i], U[j], w) for i, j, w in pairs]
    if used > general_query_bound(len(edges), len(U)):
        raise QueryBoundError(f"general split used {used} CROSS queries for m={len(edges)}")
    return ReconResult(edges, used, OK)


# --------------------------------------------------------------------------
# guess doubling with verification

Inner = Callable[[CutOracle, Sequence[int], Sequence[int], int, str], ReconResult]


def capped_adaptive_split(
    oracle: CutOracle, R: Sequence[int], B: Sequence[int], guess: int, tag: str = TAG_DEFAULT
) -> ReconResult:
    """Adaptive split that assumes at most ``guess`` edges.

    Gives up once it finds more than ``guess`` edges or spends the query
    allowance that ``guess`` edges would justify.
    """
    cap = bipartite_query_bound(guess, len(R), len(B))
    return adaptive_split_bipartite(oracle, R, B, budget=cap, tag=tag, max_edges=guess)


def doubling_reconstruct(
    oracle: CutOracle,
    R: Sequence[int],
    B: Sequence[int],
    inner: Inner = capped_adaptive_split,
    tag: str = TAG_DEFAULT,
) -> ReconResult:
    """Run ``inner`` with edge-count guesses 2, 4, 8, ... until its answer verifies.

    Each claimed edge is checked with one CROSS on its endpoints; the claimed
    total is then compared against ``cross(R, B)``.  A claimed edge that does
    not exist ends the run with ``failed_verification``; a short total just
    moves on to the next guess.
    """
    R = list(R)
    B = list(B)
    rset, bset = set(R), set(B)
    used = 0
    top = max(1, clog2(len(R) * len(B)))
    for i in range(1, top + 1):
        guess = 2**i
        res = inner(oracle, R, B, guess, tag)
        used += res.queries_used
        if not res.ok or len(res.edges) > guess:
            continue
        seen = set()
        for u, v, w in res.edges:
            key = (u, v)
            if u not in rset or v not in bset or key in seen or w <= 0:
                return ReconResult([], used, FAILED_VERIFICATION)
            seen.add(key)
            used += 1
            if oracle.cross([u], [v], TAG_VERIFY) != w:
                return ReconResult([], used, FAILED_VERIFICATION)
        used += 1
        if oracle.cross(R, B, TAG_VERIFY) == sum(w for _, _, w in res.edges):
            return ReconResult(list(res.edges), used, OK)
    return ReconResult([], used, FAILED_VERIFICATION)


# --------------------------------------------------------------------------
# coin weighing


class SumQueryVector:
    """Query access to a hidden 0/1 vector of length ``N`` through subset sums."""

    def __init__(self, N: int, query_fn: Callable[[list[int]], int]):
        self.N = N
        self._query_fn = query_fn
        self.queries = 0

    @classmethod
    def from_vector(cls, x: Iterable[int]) -> "SumQueryVector":
        x = [int(b) for b in x]
        return cls(len(x), lambda S: sum(x[i] for i in S))

    def query(self, S: list[int]) -> int:
        self.queries += 1
        return self._query_fn(S)


def coin_weigh_bound(d: int, N: int) -> int:
    return 1 if d == 0 else 2 * d * clog2(N) + 1


def coin_weigh_support(v: SumQueryVector, total: int | None = None) -> list[int]:
    """Support of the hidden vector, by adaptive halving.

    A block whose sum equals its length is all ones and is not split
    further.  ``total``, if the caller already knows the full sum, saves the
    first query.
    """
    start = v.queries
    support: list[int] = []
    if v.N == 0:
        return support
    if total is None:
        total = v.query(list(range(v.N)))
    stack = [(0, v.N, total)]
    while stack:
        lo, hi, s = stack.pop()
        if s < 0 or s > hi - lo:
            raise WeightedInputError(f"sum {s} impossible for a 0/1 block of size {hi - lo}")
        if s == 0:
            continue
        if s == hi - lo:
            support.extend(range(lo, hi))
            continue
        mid = lo + (hi - lo + 1) // 2
        first = v.query(list(range(lo, mid)))
        stack.append((mid, hi, s - first))
        stack.append((lo, mid, first))
    support.sort()
    used = v.queries - start
    if used > coin_weigh_bound(len(support), v.N):
        raise QueryBoundError(f"coin weighing used {used} queries for d={len(support)}")
    return support

