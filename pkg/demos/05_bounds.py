"""Evaluate the error bounds side by side. Constants are 1: compare shapes, not sizes."""

import math

from btlrank import bounds as B
from btlrank import graph as G
from btlrank import linear_theta

truth = linear_theta(100, 2.2)
for name, g in (("complete", G.complete(100)), ("barbell", G.barbell(50, 50, p=3 * math.log(50) / 50, seed=0)), ("island", G.island(2, 55, 10))):
    rep = B.bound_report(g, 10, truth)
    print(f"\n{name}  ({rep.disclaimer})")
    for key, value in rep.rows():
        print(f"  {key:<22} {'NA' if value is None else f'{value:.4g}'}")

# The minimax lower bound against the main upper bound on complete graphs
print("\nn    lower        upper")
for n in (20, 50, 100):
    g = G.complete(n)
    lower = B.minimax_lower_linf(g, 10, 2.2)
    upper = B.linf_upper_thm1(B.BoundInputs.from_graph(g, 10, linear_theta(n, 2.2)))
    print(f"{n:<4} {lower:.3e}   {upper:.3e}")

# How many comparisons each topology needs, as orders of growth
for topo in B.TOPOLOGIES:
    print(f"{topo:<9} N_comp(200)/N_comp(100) = {B.sample_complexity(topo, 200) / B.sample_complexity(topo, 100):.1f}")
