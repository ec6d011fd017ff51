"""Hidden weighted graphs, test-family generators, edge-list I/O and
brute-force verification.

Nothing in here is visible to the learners: they only ever see a
:class:`~cutquery.oracle.CutOracle`.  The verification helpers
(:func:`ground_truth_components`, :func:`is_maximal_spanning_forest`) are
for tests and the benchmark harness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp

MAX_WEIGHT = 2**32 - 1
MAX_VERTICES = 2**16

FAMILIES = (
    "erdos_renyi",
    "path",
    "cycle",
    "star",
    "clique",
    "bipartite_promise",
    "disjoint_union",
    "from_file",
)
WEIGHT_DISTRIBUTIONS = ("unit", "uniform_int", "heavy_tail")
DEGREE_PROFILES = ("matching", "complete", "mixed", "constant")


class GraphFormatError(ValueError):
    """Raised for malformed edge-list text."""


class UnionFind:
    """Disjoint-set forest with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        """Merge the sets holding ``a`` and ``b``; False if already merged."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


def _key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph on vertices ``0..n-1`` with positive integer weights.

    ``edges`` maps the unordered pair ``(u, v)`` with ``u < v`` to its weight.
    An absent pair has weight zero.  Treat instances as immutable.
    """

    n: int
    edges: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.n <= MAX_VERTICES:
            raise ValueError(f"vertex count {self.n} outside [0, {MAX_VERTICES}]")
        normalized = {}
        for (u, v), w in self.edges.items():
            u, v, w = int(u), int(v), int(w)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            if not 1 <= w <= MAX_WEIGHT:
                raise ValueError(f"weight {w} on ({u}, {v}) outside [1, 2^32)")
            key = _key(u, v)
            if key in normalized:
                raise ValueError(f"duplicate pair {key}")
            normalized[key] = w
        object.__setattr__(self, "edges", dict(sorted(normalized.items())))

    @property
    def m(self) -> int:
        return len(self.edges)

    def weight(self, u: int, v: int) -> int:
        return self.edges.get(_key(u, v), 0)

    def neighbors(self, v: int) -> list[int]:
        return sorted(self.adjacency[v])

    @cached_property
    def adjacency(self) -> list[dict[int, int]]:
        adj: list[dict[int, int]] = [{} for _ in range(self.n)]
        for (u, v), w in self.edges.items():
            adj[u][v] = w
            adj[v][u] = w
        return adj

    @cached_property
    def csr(self) -> sp.csr_matrix:
        """Symmetric int64 adjacency matrix."""
        if not self.edges:
            return sp.csr_matrix((self.n, self.n), dtype=np.int64)
        pairs = np.array(list(self.edges.keys()), dtype=np.int64)
        weights = np.fromiter(self.edges.values(), dtype=np.int64, count=len(self.edges))
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        data = np.concatenate([weights, weights])
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n), dtype=np.int64)

    @cached_property
    def weighted_degree(self) -> np.ndarray:
        return np.asarray(self.csr.sum(axis=1), dtype=np.int64).ravel()

    def is_unweighted(self) -> bool:
        return all(w == 1 for w in self.edges.values())

    def total_weight(self) -> int:
        return sum(self.edges.values())


@dataclass(frozen=True)
class Forest:
    """Edges ``(u, v, w)`` claimed to form a maximal spanning forest on ``n`` vertices."""

    n: int
    edges: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "edges", tuple(sorted((*_key(int(u), int(v)), int(w)) for u, v, w in self.edges))
        )

    def components(self) -> list[list[int]]:
        uf = UnionFind(self.n)
        for u, v, _ in self.edges:
            uf.union(u, v)
        return _groups(uf, self.n)


def _groups(uf: UnionFind, n: int) -> list[list[int]]:
    groups: dict[int, list[int]] = {}
    for v in range(n):
        groups.setdefault(uf.find(v), []).append(v)
    return sorted(groups.values())


# --------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class GraphFamilySpec:
    """Recipe for a reproducible random graph.

    Family-specific fields: ``p`` for erdos_renyi, ``profile`` (and
    ``degree`` for the constant profile) for bipartite_promise, ``parts``
    for disjoint_union and ``path`` for from_file.  ``lo``/``hi`` bound
    uniform_int weights.  A bipartite_promise spec of size ``n`` yields
    ``2n`` vertices, red ``0..n-1`` and blue ``n..2n-1``.
    """

    family: str
    n: int = 0
    weights: str = "unit"
    seed: int = 0
    p: float | None = None
    lo: int = 1
    hi: int = 1
    profile: str = "mixed"
    degree: int = 1
    parts: tuple["GraphFamilySpec", ...] = ()
    path: str | None = None

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.weights not in WEIGHT_DISTRIBUTIONS:
            raise ValueError(f"unknown weight distribution {self.weights!r}")
        if self.family == "erdos_renyi":
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError("erdos_renyi needs p in [0, 1]")
        if self.weights == "uniform_int" and not 1 <= self.lo <= self.hi <= MAX_WEIGHT:
            raise ValueError("uniform_int needs 1 <= lo <= hi < 2^32")
        if self.family == "disjoint_union":
            if not self.parts:
                raise ValueError("disjoint_union needs at least one part")
            for part in self.parts:
                part.validate()
        elif self.family == "from_file":
            if not self.path:
                raise ValueError("from_file needs a path")
        elif self.n < 0:
            raise ValueError("n must be nonnegative")
        if self.family == "bipartite_promise":
            if self.profile not in DEGREE_PROFILES:
                raise ValueError(f"unknown degree profile {self.profile!r}")
            if self.n < 1:
                raise ValueError("bipartite_promise needs n >= 1")
            if self.profile == "constant" and not 1 <= self.degree <= self.n:
                raise ValueError("constant profile needs 1 <= degree <= n")


def _draw_weights(spec: GraphFamilySpec, rng: np.random.Generator, count: int) -> np.ndarray:
    if spec.weights == "unit":
        return np.ones(count, dtype=np.int64)
    if spec.weights == "uniform_int":
        return rng.integers(spec.lo, spec.hi, size=count, endpoint=True, dtype=np.int64)
    # Pareto-like tail with shape 1, clipped into the legal weight range.
    u = rng.random(count)
    w = np.floor(1.0 / np.maximum(u, 1.0 / MAX_WEIGHT))
    return np.clip(w, 1, MAX_WEIGHT).astype(np.int64)


def _structure(spec: GraphFamilySpec, rng: np.random.Generator) -> tuple[int, list[tuple[int, int]]]:
    n = spec.n
    fam = spec.family
    if fam == "erdos_renyi":
        if n < 2 or spec.p == 0:
            return n, []
        iu, ju = np.triu_indices(n, k=1)
        keep = rng.random(iu.size) < spec.p
        return n, list(zip(iu[keep].tolist(), ju[keep].tolist()))
    if fam == "path":
        return n, [(i, i + 1) for i in range(n - 1)]
    if fam == "cycle":
        if n < 3:
            return n, [(i, i + 1) for i in range(n - 1)]
        return n, [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    if fam == "star":
        return n, [(0, i) for i in range(1, n)]
    if fam == "clique":
        return n, [(i, j) for i in range(n) for j in range(i + 1, n)]
    if fam == "bipartite_promise":
        return 2 * n, _bipartite_pairs(spec, rng)
    raise AssertionError(fam)


def _bipartite_pairs(spec: GraphFamilySpec, rng: np.random.Generator) -> list[tuple[int, int]]:
    # red side 0..n-1, blue side n..2n-1; every red vertex gets >= 1 blue neighbor
    n = spec.n
    if spec.profile == "matching":
        perm = rng.permutation(n)
        return [(r, n + int(perm[r])) for r in range(n)]
    if spec.profile == "complete":
        return [(r, n + b) for r in range(n) for b in range(n)]
    if spec.profile == "constant":
        degrees = np.full(n, spec.degree)
    else:
        # log-uniform degrees in [1, n]
        degrees = np.floor(2.0 ** (rng.random(n) * math.log2(n)) + 1e-9).astype(int)
        degrees = np.clip(degrees, 1, n)
    pairs = []
    for r in range(n):
        blues = rng.choice(n, size=int(degrees[r]), replace=False)
        pairs.extend((r, n + int(b)) for b in np.sort(blues))
    return pairs


def generate_graph(spec: GraphFamilySpec) -> WeightedGraph:
    """Build the graph described by ``spec``; a pure function of the spec."""
    spec.validate()
    if spec.family == "from_file":
        with open(spec.path, "r", encoding="ascii") as fh:
            return load_graph(fh.read())
    if spec.family == "disjoint_union":
        offset = 0
        edges: dict[tuple[int, int], int] = {}
        for part in spec.parts:
            g = generate_graph(part)
            for (u, v), w in g.edges.items():
                edges[(u + offset, v + offset)] = w
            offset += g.n
        return WeightedGraph(offset, edges)
    rng = np.random.default_rng(spec.seed)
    n, pairs = _structure(spec, rng)
    weights = _draw_weights(spec, rng, len(pairs))
    return WeightedGraph(n, {pair: int(w) for pair, w in zip(pairs, weights)})


def bipartite_sides(n: int) -> tuple[list[int], list[int]]:
    """Red and blue vertex lists of a ``bipartite_promise`` graph of size ``n``."""
    return list(range(n)), list(range(n, 2 * n))


# --------------------------------------------------------------------------
# edge-list text format


def save_graph(g: WeightedGraph) -> str:
    lines = [f"n {g.n}"]
    lines.extend(f"{u} {v} {w}" for (u, v), w in g.edges.items())
    return "\n".join(lines) + "\n"


def load_graph(text: str) -> WeightedGraph:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise GraphFormatError("empty input, expected header 'n <count>'")
    header = lines[0].split(" ")
    if len(header) != 2 or header[0] != "n" or not header[1].isdigit():
        raise GraphFormatError(f"bad header line {lines[0]!r}")
    n = int(header[1])
    edges: dict[tuple[int, int], int] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(" ")
        if len(fields) != 3 or not all(f.isdigit() for f in fields):
            raise GraphFormatError(f"line {lineno}: expected 'u v w', got {line!r}")
        u, v, w = map(int, fields)
        if w <= 0:
            raise GraphFormatError(f"line {lineno}: weight must be positive")
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop")
        key = _key(u, v)
        if key in edges:
            raise GraphFormatError(f"line {lineno}: duplicate pair {key}")
        edges[key] = w
    try:
        return WeightedGraph(n, edges)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc


# --------------------------------------------------------------------------
# verification oracles


def ground_truth_components(g: WeightedGraph) -> list[list[int]]:
    uf = UnionFind(g.n)
    for u, v in g.edges:
        uf.union(u, v)
    return _groups(uf, g.n)


def is_maximal_spanning_forest(g: WeightedGraph, f: Forest | Iterable[tuple[int, int, int]]) -> bool:
    edges = f.edges if isinstance(f, Forest) else tuple(f)
    uf = UnionFind(g.n)
    for u, v, w in edges:
        if not (0 <= u < g.n and 0 <= v < g.n) or u == v:
            return False
        if g.weight(u, v) != w:
            return False
        if not uf.union(u, v):
            return False
    return _groups(uf, g.n) == ground_truth_components(g)


def cut_by_enumeration(g: WeightedGraph, s: Iterable[int]) -> int:
    """Reference CUT value computed edge by edge."""
    inside = set(s)
    return sum(w for (u, v), w in g.edges.items() if (u in inside) != (v in inside))


def contract(g: WeightedGraph, components: list[list[int]]) -> dict[tuple[int, int], int]:
    """Pseudo-edge weights between components, by enumeration."""
    owner = {}
    for i, comp in enumerate(components):
        for v in comp:
            owner[v] = i
    out: dict[tuple[int, int], int] = {}
    for (u, v), w in g.edges.items():
        a, b = owner[u], owner[v]
        if a != b:
            key = _key(a, b)
            out[key] = out.get(key, 0) + w
    return out
