"""Simulate BTL outcomes, fit the regularised MLE, watch the error shrink with L."""

import numpy as np

from btlrank import FitConfig, d_infinity, fit, linear_theta, simulate
from btlrank import graph as G
from btlrank.errors import MLENonexistenceError
from btlrank.model import ComparisonData

g = G.complete(20)
truth = linear_theta(20, kappa=2.2)  # equally spaced scores, best beats worst 90% of the time

# More comparisons per pair, smaller sup-norm error (roughly 1/sqrt(L))
for L in (10, 100, 1000, 10000):
    errs = []
    for seed in range(10):
        data = simulate(g, truth, L, seed=seed)
        res = fit(data, FitConfig.auto())  # rho = sqrt(n_max / L)
        errs.append(d_infinity(res.theta, truth))
    print(f"L={L:>6}: mean sup-norm error {np.mean(errs):.4f}  (rho used {res.rho_used:.3f}, {res.iterations} iterations)")

# Without regularisation the MLE exists only if every item beats and loses to someone, indirectly
one_sided = ComparisonData(G.path(3), 5, [5, 2])  # item 0 always beats item 1
try:
    fit(one_sided, FitConfig(rho=0.0))
except MLENonexistenceError as exc:
    print("\nvanilla fit refused:", exc)

# A little ridge keeps the answer finite
print("ridge fit:", np.round(fit(one_sided, FitConfig(rho=0.5)).theta, 3))
