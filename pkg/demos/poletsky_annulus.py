"""
Holomorphic discs and the relative extremal function
====================================================

"""

import math

from crosswedge.domains import make_unit_disc
from crosswedge.poletsky import (
    ComplementIndicator,
    OpenDiscUnion,
    grid_relative_extremal,
    poisson_functional_estimate,
)

# u is the indicator of the complement of the disc |t| < 1/4
E = make_unit_disc()
hole = OpenDiscUnion(((0j, 0.25),))
u = ComplementIndicator(hole)

# the exact answer at 1/2 is log(2) / log(4)
exact = math.log(0.5 / 0.25) / math.log(4.0)

# a grid Dirichlet solve gives an independent value
oracle = grid_relative_extremal(hole.contains, h=0.01, zero_circles=hole.discs)
print("exact %.4f, grid %.4f" % (exact, oracle(0.5)[0]))

# minimize the boundary average of u over discs through 1/2
res = poisson_functional_estimate(u, 0.5, E, budget=10_000, seed=0)
print("disc estimate %.4f after %d evaluations" % (res.value, res.evaluations))
# feasibility is how far the disc leaves the closed unit disc (0 means it stays inside)
print("feasibility:", res.feasibility)

# the constant disc gives 1, so every restart can only improve on it
small = poisson_functional_estimate(u, 0.5, E, budget=1, seed=0)
print("budget 1:", small.value)
