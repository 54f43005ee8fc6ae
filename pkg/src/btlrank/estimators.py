"""Likelihood with its derivatives, plus maximum-likelihood fits for the BTL model.

The objective is the averaged negative log-likelihood

    l_rho(theta) = -sum_{(i,j) in E} [ybar_ij log s(theta_i - theta_j)
                                      + (1 - ybar_ij) log s(theta_j - theta_i)]
                   + rho/2 ||theta||^2

with ``s`` the logistic sigmoid, minimised over centred vectors. Several
datasets over the same items may be passed as a list; each edge term is then
weighted by ``L_d / min_d L_d`` so the objective is the pooled likelihood
expressed in units of the smallest per-edge comparison count.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from os import PathLike
from typing import Literal, Sequence

import numpy as np
from scipy.special import expit, log_expit

from .errors import MLENonexistenceError, NumericalError, ValidationError
from .graph import ComparisonGraph, is_strongly_connected_directed, is_tree
from .model import BtlParameters, ComparisonData, as_datasets

__all__ = [
    "FitConfig",
    "FitResult",
    "neg_log_likelihood",
    "gradient",
    "hessian",
    "fit",
    "fit_vanilla",
    "fit_tree_closed_form",
    "auto_rho",
    "d_infinity",
]

Data = ComparisonData | Sequence[ComparisonData]


@dataclass(frozen=True)
class _EdgeTable:
    n: int
    i: np.ndarray
    j: np.ndarray
    ybar: np.ndarray
    weight: np.ndarray
    L_ref: int

    @property
    def weighted_degrees(self) -> np.ndarray:
        return np.bincount(self.i, self.weight, self.n) + np.bincount(self.j, self.weight, self.n)


def _edge_table(data: Data) -> _EdgeTable:
    items = as_datasets(data)
    L_ref = min(d.L for d in items)
    return _EdgeTable(
        n=items[0].n,
        i=np.concatenate([d.graph.edges[:, 0] for d in items]),
        j=np.concatenate([d.graph.edges[:, 1] for d in items]),
        ybar=np.concatenate([d.ybar for d in items]),
        weight=np.concatenate([np.full(d.graph.m, d.L / L_ref) for d in items]),
        L_ref=L_ref,
    )


def _theta_vec(theta, n: int) -> np.ndarray:
    t = theta.theta if isinstance(theta, BtlParameters) else np.asarray(theta, dtype=float)
    if t.shape != (n,):
        raise ValidationError(f"theta has shape {t.shape}, expected ({n},)")
    return t


def _nll(t: np.ndarray, tab: _EdgeTable, rho: float) -> float:
    d = t[tab.i] - t[tab.j]
    # 0 * log 0 never arises: log_expit is finite for finite arguments
    terms = tab.ybar * log_expit(d) + (1.0 - tab.ybar) * log_expit(-d)
    return float(-np.dot(tab.weight, terms) + 0.5 * rho * np.dot(t, t))


def _grad(t: np.ndarray, tab: _EdgeTable, rho: float) -> np.ndarray:
    r = tab.weight * (expit(t[tab.i] - t[tab.j]) - tab.ybar)
    return rho * t + np.bincount(tab.i, r, tab.n) - np.bincount(tab.j, r, tab.n)


def neg_log_likelihood(theta, data: Data, rho: float = 0.0) -> float:
    tab = _edge_table(data)
    return _nll(_theta_vec(theta, tab.n), tab, rho)


def gradient(theta, data: Data, rho: float = 0.0) -> np.ndarray:
    tab = _edge_table(data)
    return _grad(_theta_vec(theta, tab.n), tab, rho)


def hessian(theta, data: Data, rho: float = 0.0) -> np.ndarray:
    """``rho I + sum_e w_e s'(theta_i - theta_j) (e_i - e_j)(e_i - e_j)^T``."""
    tab = _edge_table(data)
    t = _theta_vec(theta, tab.n)
    p = expit(t[tab.i] - t[tab.j])
    c = tab.weight * p * (1.0 - p)
    h = np.zeros((tab.n, tab.n))
    np.add.at(h, (tab.i, tab.i), c)
    np.add.at(h, (tab.j, tab.j), c)
    np.add.at(h, (tab.i, tab.j), -c)
    np.add.at(h, (tab.j, tab.i), -c)
    h[np.diag_indices(tab.n)] += rho
    return h


@dataclass(frozen=True)
class FitConfig:
    """Settings for :func:`fit`.

    ``rho_rule="remark1_auto"`` ignores ``rho`` and uses
    ``c_rho * sqrt(n_max / L)``. ``max_iters=None`` picks
    ``200 n (1 + n_max / rho)`` capped at 5e6 for ``rho > 0`` and 1e6 for
    ``rho == 0``.
    """

    rho: float = 0.0
    rho_rule: Literal["explicit", "remark1_auto"] = "explicit"
    c_rho: float = 1.0
    step_size: float | None = None
    max_iters: int | None = None
    grad_tol: float = 1e-8

    def __post_init__(self):
        if self.rho_rule not in ("explicit", "remark1_auto"):
            raise ValidationError(f"unknown rho_rule {self.rho_rule!r}")
        if self.rho < 0 or not math.isfinite(self.rho):
            raise ValidationError("rho must be a finite non-negative number")
        if self.grad_tol <= 0:
            raise ValidationError("grad_tol must be positive")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValidationError("max_iters must be at least 1")
        if self.step_size is not None and not self.step_size > 0:
            raise ValidationError("step_size must be positive")

    @classmethod
    def auto(cls, **kw) -> "FitConfig":
        return cls(rho_rule="remark1_auto", **kw)


@dataclass(frozen=True)
class FitResult:
    theta_hat: BtlParameters
    iterations: int
    final_grad_norm: float
    rho_used: float
    converged: bool
    history: list[float] = field(default_factory=list, repr=False, compare=False)

    @property
    def theta(self) -> np.ndarray:
        return self.theta_hat.theta

    def to_dict(self) -> dict:
        return {
            "theta": self.theta.tolist(),
            "iterations": self.iterations,
            "final_grad_norm": self.final_grad_norm,
            "rho": self.rho_used,
            "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FitResult":
        try:
            return cls(
                theta_hat=BtlParameters.centered(doc["theta"]),
                iterations=int(doc["iterations"]),
                final_grad_norm=float(doc["final_grad_norm"]),
                rho_used=float(doc["rho"]),
                converged=bool(doc["converged"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"fit document missing field: {exc}") from None

    def write(self, path: str | PathLike) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")


def auto_rho(n_max: float, L: int, c_rho: float = 1.0) -> float:
    return c_rho * math.sqrt(n_max / L)


def fit(data: Data, config: FitConfig | None = None, *, track_objective: bool = False) -> FitResult:
    """Regularised (or, with ``rho = 0``, vanilla) MLE by gradient descent.

    Starts from zero and steps with ``1 / (rho + n_max)`` unless
    ``config.step_size`` is set, re-centring after each step. Stops once the
    sup-norm of the gradient is at most ``config.grad_tol``.

    With ``track_objective`` the objective after every iterate is kept in
    ``FitResult.history``.
    """
    config = config or FitConfig()
    items = as_datasets(data)
    tab = _edge_table(items)
    n_max = float(tab.weighted_degrees.max()) if tab.i.size else 0.0
    if config.rho_rule == "remark1_auto":
        rho = auto_rho(n_max, tab.L_ref, config.c_rho)
    else:
        rho = float(config.rho)

    if rho == 0.0:
        if len(items) == 1:
            ok = is_strongly_connected_directed(items[0])
        else:
            ok = is_strongly_connected_directed(_pooled_for_connectivity(items))
        if not ok:
            raise MLENonexistenceError(
                "win digraph is not strongly connected: the vanilla MLE does not exist"
            )
    if rho + n_max == 0.0:
        raise ValidationError("no comparisons and no regularisation: nothing to fit")

    eta = config.step_size if config.step_size is not None else 1.0 / (rho + n_max)
    if config.max_iters is not None:
        max_iters = int(config.max_iters)
    elif rho > 0:
        max_iters = int(min(200 * tab.n * (1 + n_max / rho), 5_000_000))
    else:
        max_iters = 1_000_000

    theta = np.zeros(tab.n)
    history = [_nll(theta, tab, rho)] if track_objective else []
    g = _grad(theta, tab, rho)
    gnorm = float(np.abs(g).max())
    it = 0
    while gnorm > config.grad_tol and it < max_iters:
        theta = theta - eta * g
        theta -= theta.mean()
        g = _grad(theta, tab, rho)
        gnorm = float(np.abs(g).max())
        it += 1
        if not math.isfinite(gnorm):
            raise NumericalError(f"non-finite gradient at iteration {it}")
        if track_objective:
            history.append(_nll(theta, tab, rho))
    if not math.isfinite(_nll(theta, tab, rho)):
        raise NumericalError("objective is not finite at the returned iterate")
    return FitResult(
        theta_hat=BtlParameters.centered(theta),
        iterations=it,
        final_grad_norm=gnorm,
        rho_used=rho,
        converged=gnorm <= config.grad_tol,
        history=history,
    )


def _pooled_for_connectivity(items: list[ComparisonData]) -> ComparisonData:
    """Collapse several datasets into one with the same win digraph.

    Uses L = 2: a pair won both ways gets 1, only by the smaller index 2,
    only by the larger index 0.
    """
    fwd: dict[tuple[int, int], bool] = {}
    bwd: dict[tuple[int, int], bool] = {}
    for d in items:
        for (i, j), w in zip(d.graph.edges.tolist(), d.wins.tolist()):
            fwd[(i, j)] = fwd.get((i, j), False) or w > 0
            bwd[(i, j)] = bwd.get((i, j), False) or w < d.L
    pairs = sorted(fwd)
    wins = [1 if (fwd[p] and bwd[p]) else (2 if fwd[p] else 0) for p in pairs]
    return ComparisonData(ComparisonGraph(items[0].n, pairs), 2, np.array(wins, dtype=np.int64))


def fit_vanilla(data: Data, grad_tol: float = 1e-8, max_iters: int | None = None) -> FitResult:
    return fit(data, FitConfig(rho=0.0, grad_tol=grad_tol, max_iters=max_iters))


def fit_tree_closed_form(data: ComparisonData) -> FitResult:
    """Exact vanilla MLE on a tree by accumulating edge log-odds from node 0.

    On a tree the score equations decouple edge by edge:
    ``theta_i - theta_j = log(wins_ij / wins_ji)``.
    """
    g = data.graph
    if not is_tree(g):
        raise ValidationError("closed-form MLE requires a tree comparison graph")
    wins = data.wins
    if np.any((wins == 0) | (wins == data.L)):
        raise MLENonexistenceError("an edge was decided the same way in every comparison")
    log_odds = np.log(wins) - np.log(data.L - wins)

    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    for e, (a, b) in enumerate(g.edges.tolist()):
        adj[a].append((b, e))
        adj[b].append((a, e))
    theta = np.zeros(g.n)
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v, e in adj[u]:
            if seen[v]:
                continue
            a = g.edges[e, 0]
            # log_odds[e] = theta_a - theta_b
            theta[v] = theta[u] - log_odds[e] if u == a else theta[u] + log_odds[e]
            seen[v] = True
            queue.append(v)
    theta -= theta.mean()
    gnorm = float(np.abs(gradient(theta, data)).max())
    return FitResult(
        theta_hat=BtlParameters.centered(theta),
        iterations=0,
        final_grad_norm=gnorm,
        rho_used=0.0,
        converged=True,
    )


def d_infinity(v1, v2) -> float:
    """Sup-norm distance between the centred versions of two vectors."""
    a = v1.theta if isinstance(v1, BtlParameters) else np.asarray(v1, dtype=float)
    b = v2.theta if isinstance(v2, BtlParameters) else np.asarray(v2, dtype=float)
    if a.shape != b.shape:
        raise ValidationError(f"length mismatch: {a.shape} vs {b.shape}")
    return float(np.abs((a - a.mean()) - (b - b.mean())).max())
