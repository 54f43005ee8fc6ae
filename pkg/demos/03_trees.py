"""On a tree the vanilla MLE is a sum of edge log-odds, no iterations needed."""

import numpy as np

from btlrank import bounds as B
from btlrank import fit_tree_closed_form, linear_theta, simulate
from btlrank import graph as G
from btlrank.estimators import fit_vanilla

tree = G.random_tree(12, seed=3)
truth = linear_theta(12, kappa=2.0)
data = simulate(tree, truth, L=400, seed=8)

closed = fit_tree_closed_form(data).theta
iterative = fit_vanilla(data, grad_tol=1e-10)
print("closed form :", np.round(closed, 4))
print("gradient GD :", np.round(iterative.theta, 4), f"({iterative.iterations} iterations)")
print("largest gap :", np.abs(closed - iterative.theta).max())

# Bounds grow with the depth of the tree seen from the root
for name, g in (("star", G.star(12)), ("path", G.path(12)), ("random", tree)):
    tb = B.tree_upper_bounds(g, 400, linear_theta(12, 2.0))
    print(f"{name:<7} depth={tb.depth:>2} diameter={tb.diameter:>2} linf bound={tb.linf:.3f}")
