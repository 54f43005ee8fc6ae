"""Divide-and-conquer (add-MLE) estimators assembled from subgraph fits.

Each local fit is only identified up to an additive constant, so the
assembly aligns fits through nodes they share (or through bridge-edge
log-odds) and finally centres the global vector. Only differences of local
scores enter, which makes every assembler invariant to constant shifts of
its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import ValidationError
from .estimators import FitResult
from .model import BtlParameters, ComparisonData

__all__ = [
    "SubgraphFit",
    "add_mle_three",
    "add_mle_island_chain",
    "add_mle_barbell",
    "bridge_log_odds",
]

CENTER_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SubgraphFit:
    """A centred score estimate for the items in ``index_set``.

    ``theta_hat_local[a]`` is the score of global item ``index_set[a]``.
    """

    index_set: np.ndarray
    theta_hat_local: np.ndarray
    L_used: int = 1

    def __post_init__(self):
        idx = np.asarray(self.index_set, dtype=np.int64)
        theta = np.asarray(self.theta_hat_local, dtype=float)
        if idx.ndim != 1 or idx.size == 0:
            raise ValidationError("index_set must be a non-empty 1-d array")
        if np.any(np.diff(idx) <= 0):
            raise ValidationError("index_set must be sorted without repeats")
        if theta.shape != idx.shape:
            raise ValidationError("theta_hat_local must match index_set in length")
        if abs(theta.sum()) > CENTER_TOL:
            raise ValidationError("theta_hat_local must be centred")
        idx.setflags(write=False)
        theta.setflags(write=False)
        object.__setattr__(self, "index_set", idx)
        object.__setattr__(self, "theta_hat_local", theta)

    @classmethod
    def from_values(cls, index_set: Iterable[int], values, L_used: int = 1) -> "SubgraphFit":
        """Centre ``values`` and pair them with the (sorted) ``index_set``."""
        idx = np.asarray(list(index_set), dtype=np.int64)
        v = np.asarray(values, dtype=float)
        order = np.argsort(idx, kind="stable")
        v = v[order]
        return cls(idx[order], v - v.mean(), L_used)

    @classmethod
    def from_fit(cls, index_set: Iterable[int], result: FitResult, L_used: int = 1) -> "SubgraphFit":
        return cls.from_values(index_set, result.theta, L_used)

    def value(self, node: int) -> float:
        pos = int(np.searchsorted(self.index_set, node))
        if pos >= self.index_set.size or self.index_set[pos] != node:
            raise ValidationError(f"node {node} is not in this subgraph fit")
        return float(self.theta_hat_local[pos])

    def augmented(self, n: int) -> np.ndarray:
        """Length-``n`` vector holding the local fit on ``index_set`` and NaN elsewhere."""
        out = np.full(n, np.nan)
        out[self.index_set] = self.theta_hat_local
        return out


def _centered(v: np.ndarray) -> BtlParameters:
    if np.any(np.isnan(v)):
        raise ValidationError("the subgraph fits do not cover every item")
    return BtlParameters.centered(v)


def add_mle_three(
    fit1: SubgraphFit,
    fit2: SubgraphFit,
    fit3: SubgraphFit,
    t1: int | None = None,
    t2: int | None = None,
) -> BtlParameters:
    """Assemble three overlapping subgraph fits.

    ``fit3`` links the other two: ``t1`` must lie in both index sets 1 and 3,
    ``t2`` in both 2 and 3. By default each anchor is the smallest shared
    node. Fit 1 is kept as is, fit 3 is aligned to it at ``t1``, and fit 2
    is aligned to the shifted fit 3 at ``t2``. Items already placed by an
    earlier fit are not overwritten.
    """
    sets = [set(f.index_set.tolist()) for f in (fit1, fit2, fit3)]
    n = max(max(s) for s in sets) + 1
    if set().union(*sets) != set(range(n)):
        raise ValidationError("index sets must cover 0..n-1 without gaps")
    for a in range(3):
        for b in range(3):
            if a != b and sets[a] <= sets[b]:
                raise ValidationError(f"index set {a + 1} is contained in index set {b + 1}")
    i13 = sets[0] & sets[2]
    i23 = sets[1] & sets[2]
    if not i13 or not i23:
        raise ValidationError("index sets 1 and 2 must each meet index set 3")
    t1 = min(i13) if t1 is None else int(t1)
    t2 = min(i23) if t2 is None else int(t2)
    if t1 not in i13:
        raise ValidationError(f"anchor t1={t1} is not in I1 & I3")
    if t2 not in i23:
        raise ValidationError(f"anchor t2={t2} is not in I2 & I3")

    delta3 = fit1.value(t1) - fit3.value(t1)
    delta2 = fit3.value(t2) - fit2.value(t2)
    out = np.full(n, np.nan)
    out[fit1.index_set] = fit1.theta_hat_local
    s2 = np.array(sorted(sets[1] - sets[0]), dtype=np.int64)
    s3 = np.array(sorted(sets[2] - sets[0] - sets[1]), dtype=np.int64)
    if s2.size:
        out[s2] = fit2.augmented(n)[s2] + delta3 + delta2
    if s3.size:
        out[s3] = fit3.augmented(n)[s3] + delta3
    return _centered(out)


def add_mle_island_chain(
    fits: Sequence[SubgraphFit],
    n_island: int,
    n_overlap: int,
    anchor: Literal["first", "last"] = "first",
) -> BtlParameters:
    """Assemble fits on consecutive islands of an island graph.

    Fit ``k`` must cover the block starting at ``k * (n_island - n_overlap)``.
    Each fit is shifted so that it agrees with the already shifted previous
    fit at one node of their overlap: the overlap's first node by default,
    or its last node with ``anchor="last"``. On shared nodes the later
    island's value is kept.
    """
    if not fits:
        raise ValidationError("need at least one island fit")
    if anchor not in ("first", "last"):
        raise ValidationError(f"unknown anchor {anchor!r}")
    step = n_island - n_overlap
    if len(fits) > 1 and n_overlap < 1:
        raise ValidationError("consecutive islands must overlap")
    for k, f in enumerate(fits):
        expected = np.arange(k * step, k * step + n_island)
        if not np.array_equal(f.index_set, expected):
            raise ValidationError(f"fit {k} does not cover island block {k}")
    n = len(fits) * n_island - (len(fits) - 1) * n_overlap

    out = np.full(n, np.nan)
    shift = 0.0
    for k, f in enumerate(fits):
        if k > 0:
            start = k * step
            node = start if anchor == "first" else start + n_overlap - 1
            shift += fits[k - 1].value(node) - f.value(node)
        out[f.index_set] = f.theta_hat_local + shift
    return _centered(out)


def bridge_log_odds(wins: np.ndarray, totals: np.ndarray, clip: tuple[float, float] = (0.1, 0.9)) -> np.ndarray:
    """``log(p / (1 - p))`` of the empirical win rate clipped to ``clip``."""
    lo, hi = clip
    if not 0.0 < lo < hi < 1.0:
        raise ValidationError(f"clip bounds must satisfy 0 < lo < hi < 1, got {clip}")
    p = np.clip(np.asarray(wins, dtype=float) / np.asarray(totals, dtype=float), lo, hi)
    return np.log(p / (1.0 - p))


def add_mle_barbell(
    fit1: SubgraphFit,
    fit2: SubgraphFit,
    data: ComparisonData,
    bridge_edges: Iterable[Sequence[int]] | None = None,
    clip: tuple[float, float] = (0.1, 0.9),
) -> BtlParameters:
    """Assemble two disjoint clique fits through bridge-edge log-odds.

    Every bridge ``(i, j)`` with ``i`` in fit 1 and ``j`` in fit 2 yields an
    offset estimate ``d_ij - (theta1_i - theta2_j)`` where ``d_ij`` is the
    clipped empirical log-odds of ``i`` beating ``j`` in ``data``. Fit 2 is
    lowered by the mean offset. ``bridge_edges=None`` uses every edge of
    ``data`` that crosses the two fits.
    """
    set1 = set(fit1.index_set.tolist())
    set2 = set(fit2.index_set.tolist())
    if set1 & set2:
        raise ValidationError("barbell fits must cover disjoint item sets")
    n = data.n
    if set1 | set2 != set(range(n)):
        raise ValidationError("barbell fits must cover every item of the data")

    lookup = data.graph.edge_index()
    if bridge_edges is None:
        pairs = [
            (i, j)
            for i, j in data.graph.edges.tolist()
            if (i in set1) != (j in set1)
        ]
    else:
        pairs = [(int(a), int(b)) for a, b in bridge_edges]
    if not pairs:
        raise ValidationError("no bridge edges between the two fits")

    offsets = []
    for a, b in pairs:
        i, j = (a, b) if a in set1 else (b, a)
        if i not in set1 or j not in set2:
            raise ValidationError(f"({a}, {b}) does not join the two fits")
        key = (min(i, j), max(i, j))
        if key not in lookup:
            raise ValidationError(f"bridge {key} has no comparisons in the data")
        w = int(data.wins[lookup[key]])
        wins_i = w if i < j else data.L - w
        d_hat = float(bridge_log_odds(np.array([wins_i]), np.array([data.L]), clip)[0])
        offsets.append(d_hat - (fit1.value(i) - fit2.value(j)))
    s_hat = float(np.mean(offsets))

    out = np.full(n, np.nan)
    out[fit1.index_set] = fit1.theta_hat_local
    out[fit2.index_set] = fit2.theta_hat_local - s_hat
    return _centered(out)
