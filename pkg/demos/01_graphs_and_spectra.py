"""Comparison graphs and the spectral numbers that drive the error bounds."""

import math

from btlrank import graph as G

# A handful of topologies on 16 items
graphs = {
    "complete": G.complete(16),
    "path": G.path(16),
    "star": G.star(16),
    "cycle": G.cycle(16),
    "cayley d=3": G.cayley(16, 3),
    "banded k=4": G.banded(16, 4),
}

# lambda2 is the algebraic connectivity: the better connected, the larger it is
print(f"{'graph':<12} {'edges':>5} {'lambda2':>9} {'n_max':>5} {'min n_ij':>8}")
for name, g in graphs.items():
    s = G.spectral_summary(g)
    print(f"{name:<12} {g.m:>5} {s.lambda2:>9.4f} {s.n_max:>5} {s.min_common_neighbors:>8}")

# The path has lambda2 = 2(1 - cos(pi/n)), so it shrinks like 1/n^2
print("\npath closed form:", 2 * (1 - math.cos(math.pi / 16)))

# Island graphs: overlapping cliques chained together.
# Items in non-neighbouring islands share no neighbour, so min n_ij = 0.
isl = G.island(3, 50, 5)
s = G.spectral_summary(isl)
print(f"\nisland(3, 50, 5): n={isl.n}, lambda2={s.lambda2:.3f}, min n_ij={s.min_common_neighbors}")

# Barbell: two cliques joined by a few random bridges
bb = G.barbell(50, 50, p=3 * math.log(50) / 50, seed=1)
s = G.spectral_summary(bb)
print(f"barbell(50, 50): bridges={bb.m - 2 * 1225}, lambda2={s.lambda2:.3f}, min n_ij={s.min_common_neighbors}")

# The normalised Laplacian divides by |E|; its trace is always 2
sp = G.normalized_spectrum(isl, L=10)
print(f"\nnormalised trace {sp.trace():.12f}, pseudo-inverse trace {sp.trace_pinv():.1f} vs n^2/4 = {isl.n**2 / 4:.0f}")
