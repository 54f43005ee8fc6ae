"""Comparison graphs with their generators and spectral statistics.

A comparison graph is an undirected simple graph on items ``0..n-1`` whose
edges mark the pairs that get compared. Everything the error bounds consume
(algebraic connectivity, degree extremes, common-neighbour counts, the
normalised Laplacian spectrum) is computed here from a dense eigensolve.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from os import PathLike
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ValidationError

__all__ = [
    "ComparisonGraph",
    "SpectralSummary",
    "NormalizedLaplacianSpectrum",
    "complete",
    "path",
    "star",
    "cycle",
    "complete_bipartite",
    "banded",
    "cayley",
    "erdos_renyi",
    "island",
    "island_blocks",
    "barbell",
    "random_tree",
    "spectral_summary",
    "normalized_spectrum",
    "is_connected",
    "is_tree",
    "diameter",
    "root_depth",
    "is_strongly_connected_directed",
    "read_graph",
    "write_graph",
]

ZERO_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ComparisonGraph:
    """Undirected simple graph on ``n`` items.

    ``edges`` is an ``(m, 2)`` integer array with ``i < j`` in every row,
    sorted lexicographically. Any iterable of pairs is accepted on input and
    canonicalised; self-loops and repeated pairs raise ``ValidationError``.
    """

    n: int
    edges: np.ndarray

    def __init__(self, n: int, edges: Iterable[Sequence[int]] | np.ndarray = ()):
        n = int(n)
        if n < 1:
            raise ValidationError(f"graph needs at least one node, got n={n}")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges)
        if arr.size == 0:
            arr = np.empty((0, 2), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValidationError("edges must be a sequence of (i, j) pairs")
        if not np.issubdtype(arr.dtype, np.integer):
            if not np.all(np.equal(np.mod(arr, 1), 0)):
                raise ValidationError("edge endpoints must be integers")
        arr = arr.astype(np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValidationError(f"edge endpoint out of range [0, {n})")
        if np.any(arr[:, 0] == arr[:, 1]):
            raise ValidationError("self-loops are not allowed")
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        order = np.lexsort((hi, lo))
        canon = np.column_stack((lo[order], hi[order]))
        if len(canon) > 1 and np.any(np.all(canon[1:] == canon[:-1], axis=1)):
            raise ValidationError("duplicate edge")
        canon.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", canon)

    def __repr__(self) -> str:
        return f"ComparisonGraph(n={self.n}, m={self.m})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ComparisonGraph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.edges.tobytes()))

    @property
    def m(self) -> int:
        """Number of edges."""
        return len(self.edges)

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.bincount(self.edges.ravel(), minlength=self.n)
        deg.setflags(write=False)
        return deg

    def adjacency(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix as float64."""
        a = np.zeros((self.n, self.n))
        a[self.edges[:, 0], self.edges[:, 1]] = 1.0
        a[self.edges[:, 1], self.edges[:, 0]] = 1.0
        return a

    def laplacian(self) -> np.ndarray:
        """Dense unnormalised Laplacian ``D - A``."""
        lap = -self.adjacency()
        lap[np.diag_indices(self.n)] = self.degrees
        return lap

    def neighbors(self) -> list[list[int]]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges.tolist():
            nbrs[i].append(j)
            nbrs[j].append(i)
        return nbrs

    def edge_index(self) -> dict[tuple[int, int], int]:
        """Map canonical pair ``(i, j)`` to its row in ``edges``."""
        return {(i, j): k for k, (i, j) in enumerate(self.edges.tolist())}

    def subgraph(self, nodes: Iterable[int]) -> tuple["ComparisonGraph", np.ndarray]:
        """Induced subgraph, relabelled to ``0..len(nodes)-1``.

        Returns the subgraph and the sorted array of original node ids, so
        that local node ``a`` is original node ``index[a]``.
        """
        index = np.unique(np.fromiter(nodes, dtype=np.int64))
        if index.size == 0:
            raise ValidationError("subgraph needs at least one node")
        if index[0] < 0 or index[-1] >= self.n:
            raise ValidationError("subgraph node out of range")
        local = np.full(self.n, -1, dtype=np.int64)
        local[index] = np.arange(index.size)
        keep = (local[self.edges[:, 0]] >= 0) & (local[self.edges[:, 1]] >= 0)
        return ComparisonGraph(index.size, local[self.edges[keep]]), index

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": self.edges.tolist()}

    @classmethod
    def from_dict(cls, doc: dict) -> "ComparisonGraph":
        try:
            n = doc["n"]
            edges = doc["edges"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"graph document missing field: {exc}") from None
        if not isinstance(n, int) or isinstance(n, bool):
            raise ValidationError("graph field 'n' must be an integer")
        if not isinstance(edges, list) or not all(
            isinstance(e, list) and len(e) == 2 and all(isinstance(v, int) for v in e)
            for e in edges
        ):
            raise ValidationError("graph field 'edges' must be a list of [i, j] integer pairs")
        return cls(n, edges)


def read_graph(path: str | PathLike) -> ComparisonGraph:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return ComparisonGraph.from_dict(doc)


def write_graph(g: ComparisonGraph, path: str | PathLike) -> None:
    with open(path, "w") as fh:
        json.dump(g.to_dict(), fh)
        fh.write("\n")


# --------------------------------------------------------------------------
# generators


def _check_int(name: str, value, lo: int, hi: float = math.inf) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if not lo <= value < hi:
        raise ValidationError(f"{name}={value} out of range [{lo}, {hi})")
    return value


def complete(n: int) -> ComparisonGraph:
    n = _check_int("n", n, 2)
    return ComparisonGraph(n, list(combinations(range(n), 2)))


def path(n: int) -> ComparisonGraph:
    n = _check_int("n", n, 2)
    return ComparisonGraph(n, [(i, i + 1) for i in range(n - 1)])


def star(n: int) -> ComparisonGraph:
    """Node 0 is the hub."""
    n = _check_int("n", n, 2)
    return ComparisonGraph(n, [(0, i) for i in range(1, n)])


def cycle(n: int) -> ComparisonGraph:
    n = _check_int("n", n, 3)
    return ComparisonGraph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_bipartite(m1: int, m2: int) -> ComparisonGraph:
    """Parts ``0..m1-1`` and ``m1..m1+m2-1``."""
    m1 = _check_int("m1", m1, 1)
    m2 = _check_int("m2", m2, 1)
    return ComparisonGraph(m1 + m2, [(i, m1 + j) for i in range(m1) for j in range(m2)])


def banded(n: int, k: int) -> ComparisonGraph:
    """All pairs whose indices differ by at most ``k``."""
    n = _check_int("n", n, 2)
    k = _check_int("k", k, 1, n)
    return ComparisonGraph(n, [(i, j) for i in range(n) for j in range(i + 1, min(n, i + k + 1))])


def cayley(n: int, d: int) -> ComparisonGraph:
    """Circulant graph joining nodes at circular distance ``1..d``; ``2d``-regular."""
    n = _check_int("n", n, 2)
    if isinstance(d, bool) or int(d) != d or not 1 <= d < n / 2:
        raise ValidationError(f"cayley needs 1 <= d < n/2, got d={d}, n={n}")
    d = int(d)
    return ComparisonGraph(n, [(i, (i + k) % n) for i in range(n) for k in range(1, d + 1)])


def erdos_renyi(n: int, p: float, seed: int) -> ComparisonGraph:
    """G(n, p): each of the n(n-1)/2 pairs kept independently with probability ``p``.

    Pairs are visited in lexicographic order and each consumes one uniform
    draw from ``numpy.random.default_rng(seed)`` (PCG64).
    """
    n = _check_int("n", n, 2)
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return ComparisonGraph(n, np.column_stack((iu[keep], ju[keep])))


def island_blocks(k: int, n_island: int, n_overlap: int) -> list[np.ndarray]:
    """Node blocks of :func:`island`; block ``j`` starts at ``j * (n_island - n_overlap)``."""
    k = _check_int("k", k, 1)
    n_island = _check_int("n_island", n_island, 2)
    n_overlap = _check_int("n_overlap", n_overlap, 0, n_island)
    step = n_island - n_overlap
    return [np.arange(j * step, j * step + n_island) for j in range(k)]


def island(k: int, n_island: int, n_overlap: int) -> ComparisonGraph:
    """Chain of ``k`` cliques of size ``n_island``; consecutive cliques share ``n_overlap`` nodes."""
    k = _check_int("k", k, 2)
    blocks = island_blocks(k, n_island, n_overlap)
    n = k * n_island - (k - 1) * n_overlap
    pairs = {(int(a), int(b)) for blk in blocks for a, b in combinations(blk, 2)}
    return ComparisonGraph(n, sorted(pairs))


def barbell(
    n1: int,
    n2: int,
    *,
    edges: Iterable[Sequence[int]] | None = None,
    count: int | None = None,
    p: float | None = None,
    seed: int = 0,
) -> ComparisonGraph:
    """Two cliques ``0..n1-1`` and ``n1..n1+n2-1`` joined by bridge edges.

    Exactly one of ``edges`` (explicit cross pairs), ``count`` (number of
    bridges sampled uniformly without replacement) or ``p`` (bridge density,
    converted to ``max(1, round(n1*n2*p))`` bridges) must be given.
    """
    n1 = _check_int("n1", n1, 1)
    n2 = _check_int("n2", n2, 1)
    if sum(x is not None for x in (edges, count, p)) != 1:
        raise ValidationError("give exactly one of edges=, count=, p=")
    n = n1 + n2
    if edges is not None:
        cross = [tuple(int(v) for v in e) for e in edges]
        if not cross:
            raise ValidationError("barbell needs at least one bridge edge")
        for a, b in cross:
            lo, hi = min(a, b), max(a, b)
            if not (0 <= lo < n1 <= hi < n):
                raise ValidationError(f"({a}, {b}) does not cross the two cliques")
        bridges = np.array(cross, dtype=np.int64)
    else:
        if p is not None:
            if not 0.0 < p <= 1.0:
                raise ValidationError(f"bridge density must lie in (0, 1], got {p}")
            count = max(1, round(n1 * n2 * p))
        count = _check_int("count", count, 1)
        if count > n1 * n2:
            raise ValidationError(f"{count} bridges requested but only {n1 * n2} cross pairs exist")
        rng = np.random.default_rng(seed)
        flat = rng.choice(n1 * n2, size=count, replace=False)
        bridges = np.column_stack((flat // n2, n1 + flat % n2))
    i1, j1 = np.triu_indices(n1, k=1)
    i2, j2 = np.triu_indices(n2, k=1)
    all_edges = np.concatenate(
        [np.column_stack((i1, j1)), np.column_stack((i2 + n1, j2 + n1)), bridges]
    )
    return ComparisonGraph(n, all_edges)


def random_tree(n: int, seed: int) -> ComparisonGraph:
    """Random recursive tree: node ``i`` attaches to a uniform earlier node."""
    n = _check_int("n", n, 2)
    rng = np.random.default_rng(seed)
    parents = [int(rng.integers(0, i)) for i in range(1, n)]
    return ComparisonGraph(n, [(p, i) for i, p in zip(range(1, n), parents)])


# --------------------------------------------------------------------------
# spectra and topology


@dataclass(frozen=True, eq=False)
class SpectralSummary:
    """Spectral and degree statistics of a comparison graph."""

    lambda2: float
    n_max: int
    n_min: int
    degrees: np.ndarray
    min_common_neighbors: int
    laplacian_spectrum: np.ndarray
    connected: bool
    n: int
    m: int

    @property
    def lambda_max(self) -> float:
        return float(self.laplacian_spectrum[-1])


@dataclass(frozen=True, eq=False)
class NormalizedLaplacianSpectrum:
    """Eigenvalues of the Laplacian averaged over all ``n_comp`` comparisons."""

    eigenvalues: np.ndarray
    n_comp: int

    def trace(self) -> float:
        return float(self.eigenvalues.sum())

    def trace_pinv(self) -> float:
        """Trace of the Moore-Penrose pseudo-inverse (drops the zero eigenvalue)."""
        return float(np.sum(1.0 / self.eigenvalues[1:]))


def spectral_summary(g: ComparisonGraph) -> SpectralSummary:
    lap = g.laplacian()
    spectrum = np.linalg.eigvalsh(lap)
    if g.n >= 2:
        a = -lap
        np.fill_diagonal(a, 0.0)
        common = a @ a
        iu = np.triu_indices(g.n, k=1)
        min_common = int(round(common[iu].min()))
        lambda2 = float(spectrum[1])
    else:
        min_common = 0
        lambda2 = 0.0
    spectrum.setflags(write=False)
    deg = g.degrees
    return SpectralSummary(
        lambda2=lambda2,
        n_max=int(deg.max()),
        n_min=int(deg.min()),
        degrees=deg,
        min_common_neighbors=min_common,
        laplacian_spectrum=spectrum,
        connected=is_connected(g),
        n=g.n,
        m=g.m,
    )


def normalized_spectrum(g: ComparisonGraph, L: int) -> NormalizedLaplacianSpectrum:
    """Spectrum of ``L_A / |E|`` for a graph whose every edge is compared ``L`` times."""
    L = _check_int("L", L, 1)
    if not is_connected(g):
        raise ValidationError("normalized spectrum requires a connected graph")
    eig = np.linalg.eigvalsh(g.laplacian()) / g.m
    eig.setflags(write=False)
    return NormalizedLaplacianSpectrum(eigenvalues=eig, n_comp=g.m * L)


def _components(n: int, rows: np.ndarray, cols: np.ndarray, *, directed: bool) -> int:
    mat = coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n))
    count, _ = connected_components(mat, directed=directed, connection="strong")
    return int(count)


def is_connected(g: ComparisonGraph) -> bool:
    return _components(g.n, g.edges[:, 0], g.edges[:, 1], directed=False) == 1


def is_tree(g: ComparisonGraph) -> bool:
    return g.m == g.n - 1 and is_connected(g)


def _bfs_far(nbrs: list[list[int]], src: int) -> tuple[int, int]:
    dist = {src: 0}
    queue = deque([src])
    far = src
    while queue:
        u = queue.popleft()
        if dist[u] > dist[far]:
            far = u
        for v in nbrs[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return far, dist[far]


def diameter(g: ComparisonGraph) -> int:
    """Diameter of a tree by double breadth-first search."""
    if not is_tree(g):
        raise ValidationError("diameter by double traversal is only exact on trees")
    nbrs = g.neighbors()
    far, _ = _bfs_far(nbrs, 0)
    _, d = _bfs_far(nbrs, far)
    return d


def root_depth(g: ComparisonGraph, root: int = 0) -> int:
    """Largest hop count from ``root`` to any node of a tree (its eccentricity)."""
    if not is_tree(g):
        raise ValidationError("root depth is only defined here for trees")
    return _bfs_far(g.neighbors(), root)[1]


def is_strongly_connected_directed(data) -> bool:
    """Whether the win digraph of ``data`` is strongly connected.

    ``data`` is any object with ``graph``, ``L`` and ``wins`` (a
    :class:`btlrank.model.ComparisonData`). There is an arc ``i -> j``
    whenever ``i`` beat ``j`` at least once. The vanilla MLE exists exactly
    when this digraph is strongly connected.
    """
    g = data.graph
    i, j = g.edges[:, 0], g.edges[:, 1]
    wins = np.asarray(data.wins)
    fwd = wins > 0
    bwd = wins < data.L
    rows = np.concatenate([i[fwd], j[bwd]])
    cols = np.concatenate([j[fwd], i[bwd]])
    return _components(g.n, rows, cols, directed=True) == 1
