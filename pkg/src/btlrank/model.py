"""BTL parameters and comparison outcomes, plus a seeded simulator."""

from __future__ import annotations

import json
from dataclasses import dataclass
from os import PathLike
from typing import Iterable, Sequence

import numpy as np
from scipy.special import expit

from .errors import ValidationError
from .graph import ComparisonGraph, island_blocks

__all__ = [
    "BtlParameters",
    "ComparisonData",
    "win_prob",
    "kappa",
    "kappa_E",
    "linear_theta",
    "shifted_island_theta",
    "shifted_barbell_theta",
    "simulate",
    "read_data",
    "write_data",
]

CENTER_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class BtlParameters:
    """Centred log-strength vector ``theta`` (``sum(theta) == 0``)."""

    theta: np.ndarray

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float)
        if theta.ndim != 1 or theta.size == 0:
            raise ValidationError("theta must be a non-empty vector")
        if not np.all(np.isfinite(theta)):
            raise ValidationError("theta has non-finite entries")
        if abs(theta.sum()) > CENTER_TOL:
            raise ValidationError(f"theta is not centred (sum={theta.sum():.3g})")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def centered(cls, values) -> "BtlParameters":
        """Build from any vector by subtracting its mean."""
        v = np.asarray(values, dtype=float)
        return cls(v - v.mean())

    @property
    def n(self) -> int:
        return self.theta.size

    @property
    def weights(self) -> np.ndarray:
        """Preference scores ``exp(theta)``."""
        return np.exp(self.theta)

    @property
    def kappa(self) -> float:
        return kappa(self.theta)

    def kappa_E(self, g: ComparisonGraph) -> float:
        return kappa_E(self.theta, g)


def _as_theta(theta) -> np.ndarray:
    if isinstance(theta, BtlParameters):
        return theta.theta
    return np.asarray(theta, dtype=float)


def win_prob(theta, i: int, j: int) -> float:
    """Probability that item ``i`` beats item ``j``: ``sigmoid(theta_i - theta_j)``."""
    t = _as_theta(theta)
    if i == j:
        raise ValidationError("win_prob needs two distinct items")
    return float(expit(t[i] - t[j]))


def kappa(theta) -> float:
    """Largest score gap over all pairs."""
    t = _as_theta(theta)
    return float(t.max() - t.min())


def kappa_E(theta, g: ComparisonGraph) -> float:
    """Largest score gap over the edges of ``g``."""
    t = _as_theta(theta)
    if t.size != g.n:
        raise ValidationError(f"theta has length {t.size}, graph has {g.n} nodes")
    if g.m == 0:
        return 0.0
    return float(np.abs(t[g.edges[:, 0]] - t[g.edges[:, 1]]).max())


def linear_theta(n: int, kappa: float) -> BtlParameters:
    """Equally spaced scores with spread ``kappa``, centred."""
    if n < 2:
        raise ValidationError("linear_theta needs n >= 2")
    if kappa < 0:
        raise ValidationError("kappa must be non-negative")
    delta = kappa / (n - 1)
    theta = delta * np.arange(n) - kappa / 2.0
    return BtlParameters.centered(theta)


def shifted_island_theta(
    k: int, n_island: int, n_overlap: int, kappa: float, s: float
) -> BtlParameters:
    """Linear scores on an island graph with island ``j`` (0-based) lowered by ``j * s``.

    Islands are written in order, so a node shared by islands ``j`` and
    ``j + 1`` carries the shift of island ``j + 1``. The result is re-centred.
    """
    blocks = island_blocks(k, n_island, n_overlap)
    n = k * n_island - (k - 1) * n_overlap
    base = linear_theta(n, kappa).theta.copy()
    shifted = base.copy()
    for j, blk in enumerate(blocks):
        shifted[blk] = base[blk] - j * s
    return BtlParameters.centered(shifted)


def shifted_barbell_theta(n: int, kappa: float, s: float) -> BtlParameters:
    """Linear scores with the upper half (``i >= n // 2``) lowered by ``s``, re-centred."""
    base = linear_theta(n, kappa).theta.copy()
    base[n // 2 :] -= s
    return BtlParameters.centered(base)


@dataclass(frozen=True, eq=False)
class ComparisonData:
    """Outcomes of ``L`` comparisons on every edge of ``graph``.

    ``wins[e]`` counts how often the smaller endpoint of ``graph.edges[e]``
    beat the larger one.
    """

    graph: ComparisonGraph
    L: int
    wins: np.ndarray

    def __post_init__(self):
        if isinstance(self.L, bool) or int(self.L) != self.L or self.L < 1:
            raise ValidationError(f"L must be a positive integer, got {self.L!r}")
        object.__setattr__(self, "L", int(self.L))
        wins = np.asarray(self.wins)
        if wins.shape != (self.graph.m,):
            raise ValidationError(f"expected {self.graph.m} win counts, got shape {wins.shape}")
        if wins.size and not np.all(np.equal(np.mod(wins, 1), 0)):
            raise ValidationError("win counts must be integers")
        wins = wins.astype(np.int64)
        if wins.size and (wins.min() < 0 or wins.max() > self.L):
            raise ValidationError(f"win counts must lie in [0, {self.L}]")
        wins.setflags(write=False)
        object.__setattr__(self, "wins", wins)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def ybar(self) -> np.ndarray:
        """Win fraction of the smaller endpoint on each edge."""
        return self.wins / self.L

    @property
    def n_comp(self) -> int:
        return self.graph.m * self.L

    def restrict(self, nodes: Iterable[int]) -> tuple["ComparisonData", np.ndarray]:
        """Data on the induced subgraph, relabelled; also returns the original node ids."""
        sub, index = self.graph.subgraph(nodes)
        lookup = self.graph.edge_index()
        rows = [lookup[(int(index[a]), int(index[b]))] for a, b in sub.edges.tolist()]
        return ComparisonData(sub, self.L, self.wins[rows]), index

    def to_dict(self) -> dict:
        return {
            "n": self.graph.n,
            "L": self.L,
            "edges": [
                {"i": i, "j": j, "wins_i": w}
                for (i, j), w in zip(self.graph.edges.tolist(), self.wins.tolist())
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ComparisonData":
        try:
            n, L, rows = doc["n"], doc["L"], doc["edges"]
            pairs = [(r["i"], r["j"]) for r in rows]
            wins = [r["wins_i"] for r in rows]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"data document missing field: {exc}") from None
        for (i, j), w in zip(pairs, wins):
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in (i, j, w)):
                raise ValidationError("data fields i, j, wins_i must be integers")
            if i >= j:
                raise ValidationError(f"edge ({i}, {j}) is not in canonical i < j order")
        g = ComparisonGraph(n, pairs)
        # the graph may reorder rows into canonical order
        order = {pair: k for k, pair in enumerate(pairs)}
        aligned = [wins[order[(i, j)]] for i, j in g.edges.tolist()]
        return cls(g, L, np.array(aligned, dtype=np.int64))


def read_data(path: str | PathLike) -> ComparisonData:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return ComparisonData.from_dict(doc)


def write_data(data: ComparisonData, path: str | PathLike) -> None:
    with open(path, "w") as fh:
        json.dump(data.to_dict(), fh)
        fh.write("\n")


def simulate(g: ComparisonGraph, theta, L: int, seed: int) -> ComparisonData:
    """Draw ``wins_ij ~ Binomial(L, sigmoid(theta_i - theta_j))`` independently per edge.

    Uses ``numpy.random.default_rng(seed)``; one binomial draw per edge in
    canonical edge order.
    """
    t = _as_theta(theta)
    if t.size != g.n:
        raise ValidationError(f"theta has length {t.size}, graph has {g.n} nodes")
    if isinstance(L, bool) or int(L) != L or L < 1:
        raise ValidationError(f"L must be a positive integer, got {L!r}")
    rng = np.random.default_rng(seed)
    p = expit(t[g.edges[:, 0]] - t[g.edges[:, 1]])
    wins = rng.binomial(int(L), p) if g.m else np.empty(0, dtype=np.int64)
    return ComparisonData(g, int(L), wins)


def as_datasets(data: ComparisonData | Sequence[ComparisonData]) -> list[ComparisonData]:
    """Normalise a dataset or a sequence of datasets on the same items to a list."""
    items = [data] if isinstance(data, ComparisonData) else list(data)
    if not items:
        raise ValidationError("no comparison data given")
    n = items[0].n
    if any(d.n != n for d in items):
        raise ValidationError("all datasets must be defined on the same item set")
    return items
