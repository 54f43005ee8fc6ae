"""Closed-form error bounds for BTL estimation on a comparison graph.

All leading constants are set to 1 and logarithms are natural, so values are
only meaningful relative to each other (trends, ratios), never as absolute
error guarantees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ValidationError
from .graph import (
    ComparisonGraph,
    SpectralSummary,
    diameter,
    is_tree,
    normalized_spectrum,
    root_depth,
    spectral_summary,
)
from .model import kappa as _kappa
from .model import kappa_E as _kappa_E

__all__ = [
    "BoundInputs",
    "BoundReport",
    "DISCLAIMER",
    "linf_upper_thm1",
    "l2_upper_thm1",
    "yan_linf_bound",
    "shah_l2_bound",
    "hajek_l2_bound",
    "minimax_lower_linf",
    "er_corollary_bounds",
    "vanilla_upper_linf",
    "TreeBounds",
    "tree_upper_bounds",
    "sample_complexity",
    "bound_report",
    "TOPOLOGIES",
]

DISCLAIMER = "leading constants set to 1; compare trends and ratios, not magnitudes"


@dataclass(frozen=True)
class BoundInputs:
    """Everything the upper-bound formulas consume.

    ``rho=None`` selects the tuned-regularisation form of the main
    upper bound; a number selects the general form. ``B`` defaults to
    ``kappa / 2``.
    """

    spectral: SpectralSummary
    L: int
    kappa: float
    kappa_E: float
    rho: float | None = None
    B: float | None = None

    def __post_init__(self):
        if self.L < 1:
            raise ValidationError("L must be at least 1")
        if self.kappa < 0 or self.kappa_E < 0:
            raise ValidationError("kappa and kappa_E must be non-negative")
        if self.kappa_E > self.kappa + 1e-12:
            raise ValidationError(f"kappa_E={self.kappa_E} exceeds kappa={self.kappa}")
        if self.B is None:
            object.__setattr__(self, "B", self.kappa / 2.0)

    @classmethod
    def from_graph(cls, g: ComparisonGraph, L: int, theta, **kw) -> "BoundInputs":
        return cls(
            spectral=spectral_summary(g),
            L=L,
            kappa=_kappa(theta),
            kappa_E=_kappa_E(theta, g),
            **kw,
        )

    @property
    def n(self) -> int:
        return self.spectral.n

    @property
    def r(self) -> float:
        """``kappa_E + log(kappa)`` clamped below at 0."""
        log_k = math.log(self.kappa) if self.kappa > 0 else -math.inf
        return max(self.kappa_E + log_k, 0.0)


def _lambda2(inputs: BoundInputs) -> float:
    lam = inputs.spectral.lambda2
    if not inputs.spectral.connected or lam <= 1e-9:
        raise ValidationError("bound undefined: graph is disconnected (lambda2 <= 0)")
    return lam


def linf_upper_thm1(inputs: BoundInputs) -> float:
    """Sup-norm upper bound for the regularised MLE."""
    lam = _lambda2(inputs)
    s = inputs.spectral
    n, L, r, kE = inputs.n, inputs.L, inputs.r, inputs.kappa_E
    first = math.sqrt((n + r) / L)
    if inputs.rho is not None:
        first += inputs.rho * inputs.kappa * math.sqrt(n / s.n_max)
    return (
        math.exp(2 * kE) / lam * s.n_max / s.n_min * first
        + math.exp(kE) / lam * math.sqrt(s.n_max * (math.log(n) + r) / L)
    )


def l2_upper_thm1(inputs: BoundInputs) -> float:
    """Euclidean upper bound for the regularised MLE."""
    lam = _lambda2(inputs)
    s = inputs.spectral
    n, L, r = inputs.n, inputs.L, inputs.r
    core = math.sqrt(s.n_max * (n + r) / L)
    if inputs.rho is not None:
        core += inputs.rho * inputs.kappa * math.sqrt(n)
    return math.exp(inputs.kappa_E) / lam * core


def yan_linf_bound(inputs: BoundInputs) -> float | None:
    """Common-neighbour sup-norm bound; ``None`` when some pair has no common neighbour."""
    s = inputs.spectral
    if s.min_common_neighbors == 0:
        return None
    return (
        math.exp(inputs.kappa)
        / s.min_common_neighbors
        * math.sqrt(s.n_max * math.log(inputs.n) / inputs.L)
    )


def shah_l2_bound(inputs: BoundInputs) -> float:
    """Squared-Euclidean bound for the box-constrained MLE (radius ``B``)."""
    lam = _lambda2(inputs)
    n = inputs.n
    return math.exp(8 * inputs.B) * n * math.log(n) / (lam * inputs.L)


def hajek_l2_bound(inputs: BoundInputs) -> float:
    """Squared-Euclidean bound of the edge-count form (radius ``B``)."""
    lam = _lambda2(inputs)
    return math.exp(8 * inputs.B) * inputs.spectral.m * math.log(inputs.n) / (lam**2 * inputs.L)


def minimax_lower_linf(g: ComparisonGraph, L: int, kappa: float) -> float:
    """Square root of the minimax lower bound on the expected squared sup-norm error.

    With ``lam`` the ascending normalised-Laplacian spectrum (1-based), the
    squared bound is ``exp(-2 kappa) / (n N_comp) * max(n^2, S)`` where ``S``
    is the largest over ``n' = 2..n`` of ``sum_{i=ceil(0.99 n')}^{n'} 1/lam_i``.
    """
    norm_spec = normalized_spectrum(g, L)
    lam = norm_spec.eigenvalues
    n = g.n
    inv = np.zeros(n + 1)
    inv[2:] = 1.0 / lam[1:]
    csum = np.cumsum(inv)  # csum[k] = sum of 1/lam_i for i <= k (1-based)
    inner = 0.0
    for n_prime in range(2, n + 1):
        lo = -(-99 * n_prime // 100)  # ceil(0.99 n') in exact integer arithmetic
        inner = max(inner, csum[n_prime] - csum[lo - 1])
    squared = math.exp(-2 * kappa) / (n * norm_spec.n_comp) * max(n**2, inner)
    return math.sqrt(squared)


def er_corollary_bounds(n: int, p: float, L: int, kappa_E: float) -> tuple[float, float]:
    """``(sup-norm, Euclidean)`` rates for an Erdos-Renyi comparison graph."""
    if not 0.0 < p <= 1.0:
        raise ValidationError(f"p must lie in (0, 1], got {p}")
    linf = math.exp(2 * kappa_E) * math.sqrt(math.log(n) / (n * p**2 * L))
    l2 = math.exp(kappa_E) * math.sqrt(1.0 / (p * L))
    return linf, l2


def vanilla_upper_linf(inputs: BoundInputs) -> float:
    """Sup-norm upper bound for the unregularised MLE."""
    lam = _lambda2(inputs)
    sp = inputs.spectral
    n, L, kE = inputs.n, inputs.L, inputs.kappa_E
    s = math.exp(2 * kE) * sp.n_max / (lam * sp.n_min)
    log_n = math.log(n)
    return math.exp(kE) * math.sqrt(sp.n_max * log_n / (L * sp.n_min**2)) + s * math.sqrt(
        sp.n_max / L
    ) * (1 + math.exp(kE) * math.sqrt(log_n) / sp.n_min + s * math.sqrt(n / sp.n_max))


@dataclass(frozen=True)
class TreeBounds:
    """Tree bounds; ``depth`` is the hop depth from root 0 that enters ``linf`` and ``l2``."""

    linf: float
    l2: float
    linf_edge_exact: float
    depth: int
    diameter: int


def tree_upper_bounds(tree: ComparisonGraph, L: int, theta) -> TreeBounds:
    """Path-length bounds for the vanilla MLE on a tree, plus the per-edge sup-norm form.

    The length ``D`` is the depth of the tree seen from node 0, the root the
    closed-form fit accumulates from. It is 1 for a star and ``n - 1`` for a
    path; the true diameter is reported alongside.
    """
    if not is_tree(tree):
        raise ValidationError("tree bounds need a tree comparison graph")
    t = np.asarray(getattr(theta, "theta", theta), dtype=float)
    D = root_depth(tree, 0)
    n = tree.n
    kE = _kappa_E(t, tree)
    log_n = math.log(n)
    gaps = np.abs(t[tree.edges[:, 0]] - t[tree.edges[:, 1]])
    return TreeBounds(
        linf=math.exp(kE) * math.sqrt(D * log_n / L),
        l2=math.exp(kE) * math.sqrt(D * n * log_n / L),
        linf_edge_exact=math.sqrt(float(np.sum(np.exp(2 * gaps))) * log_n / L),
        depth=D,
        diameter=diameter(tree),
    )


TOPOLOGIES = ("complete", "bipartite", "path", "star", "barbell")


def sample_complexity(topology: str, n: int, kappa_E: float = 0.0) -> float:
    """Order of ``N_comp`` needed for vanishing sup-norm error, constant 1.

    These are growth rates, not bounds: only ratios across ``n`` mean anything.
    """
    log_n = math.log(n)
    g = math.exp(2 * kappa_E)
    rates = {
        "complete": lambda: float(n**2),
        "bipartite": lambda: float(n**2),
        "path": lambda: g * n**2 * log_n,
        "star": lambda: g * n * log_n,
        "barbell": lambda: g * n**5 * log_n,
    }
    if topology not in rates:
        raise ValidationError(f"unknown topology {topology!r}; expected one of {TOPOLOGIES}")
    return rates[topology]()


@dataclass(frozen=True)
class BoundReport:
    """Bound name to value; ``None`` marks a bound that does not apply."""

    values: dict[str, float | None]
    disclaimer: str = field(default=DISCLAIMER)

    def rows(self) -> list[tuple[str, float | None]]:
        return list(self.values.items())


def bound_report(g: ComparisonGraph, L: int, theta, rho: float | None = None) -> BoundReport:
    """Evaluate every bound that takes a general graph.

    Bounds whose preconditions fail (disconnected graph, non-tree, and so
    on) are reported as ``None`` rather than raising.
    """
    inputs = BoundInputs.from_graph(g, L, theta, rho=rho)
    values: dict[str, float | None] = {}

    def attempt(name, fn, *args):
        try:
            values[name] = fn(*args)
        except ValidationError:
            values[name] = None

    attempt("linf_upper_thm1", linf_upper_thm1, inputs)
    attempt("l2_upper_thm1", l2_upper_thm1, inputs)
    attempt("l2_upper_thm1_kappa", l2_upper_thm1, replace(inputs, kappa_E=inputs.kappa))
    values["yan_linf"] = yan_linf_bound(inputs)
    attempt("shah_l2sq", shah_l2_bound, inputs)
    attempt("hajek_l2sq", hajek_l2_bound, inputs)
    attempt("vanilla_upper_linf", vanilla_upper_linf, inputs)
    attempt("minimax_lower_linf", minimax_lower_linf, g, L, inputs.kappa)
    if is_tree(g):
        tb = tree_upper_bounds(g, L, theta)
        values.update(tree_linf=tb.linf, tree_l2=tb.l2, tree_linf_edge_exact=tb.linf_edge_exact)
    else:
        values.update(tree_linf=None, tree_l2=None, tree_linf_edge_exact=None)
    return BoundReport(values)
