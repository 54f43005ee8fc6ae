"""Random instance builders shared across test modules."""

import numpy as np

from btlrank import graph as G
from btlrank.model import ComparisonData, simulate


def random_connected_graph(rng, n, p=0.4):
    """An Erdos-Renyi draw with a path threaded through it so it is connected."""
    g = G.erdos_renyi(n, p, seed=int(rng.integers(2**63)))
    edges = {tuple(e) for e in g.edges.tolist()} | {(i, i + 1) for i in range(n - 1)}
    return G.ComparisonGraph(n, sorted(edges))


def random_instance(rng, n_max=20, L_max=100):
    """(graph, centred theta, data, rho) with n <= n_max and L <= L_max."""
    n = int(rng.integers(2, n_max + 1))
    g = random_connected_graph(rng, n)
    theta = rng.normal(0.0, 1.0, n)
    theta -= theta.mean()
    L = int(rng.integers(1, L_max + 1))
    data = simulate(g, theta, L, seed=int(rng.integers(2**63)))
    rho = float(rng.choice([0.0, rng.uniform(0.01, 3.0)]))
    return g, theta, data, rho


def random_theta_with_edge_spread(rng, g, max_kappa_E=5.0):
    """Centred theta whose largest gap across an edge is at most ``max_kappa_E``."""
    theta = rng.normal(0.0, 2.0, g.n)
    gaps = np.abs(theta[g.edges[:, 0]] - theta[g.edges[:, 1]])
    spread = gaps.max() if gaps.size else 0.0
    target = rng.uniform(0.0, max_kappa_E)
    if spread > 0:
        theta *= target / spread
    return theta - theta.mean()


def exact_data(g, theta, L):
    """Data whose win fractions equal the model probabilities (when they are multiples of 1/L)."""
    from scipy.special import expit

    p = expit(theta[g.edges[:, 0]] - theta[g.edges[:, 1]])
    wins = np.rint(p * L)
    assert np.allclose(wins / L, p, atol=1e-12), "probabilities are not multiples of 1/L"
    return ComparisonData(g, L, wins.astype(np.int64))


def random_three_subsets(rng, n):
    """Index sets covering range(n), none inside another, with I1 & I3 and I2 & I3 non-empty."""
    while True:
        perm = rng.permutation(n)
        a = int(rng.integers(1, n - 4))
        b = int(rng.integers(a + 1, n - 2))
        c = int(rng.integers(a + 1, b + 2))
        d = int(rng.integers(max(b, c) + 1, n))
        sets = [set(perm[:b].tolist()), set(perm[c:].tolist()), set(perm[a:d].tolist())]
        for s in sets:  # sprinkle in a few extra members
            s.update(rng.choice(n, size=int(rng.integers(0, 3)), replace=False).tolist())
        nested = any(sets[x] <= sets[y] for x in range(3) for y in range(3) if x != y)
        if not nested and sets[0] & sets[2] and sets[1] & sets[2]:
            return [np.array(sorted(s)) for s in sets]
