"""
Slicing the wedge over a bidisc
===============================

"""

import math

import numpy as np

from crosswedge.cross import CrossSpec, wedge_contains, wedge_slice
from crosswedge.domains import ArcSet, make_unit_disc
from crosswedge.harmonic_measure import GridSpec

# two copies of the disc, each with the right half circle as its arc
E = make_unit_disc()
right = ArcSet(E, [(-math.pi / 2, math.pi / 2)])
spec = CrossSpec(E, right, E, right)

# a pair belongs to the wedge when the two harmonic measures sum below 1
m = wedge_contains(spec, 0.3, 0.4j)
print(m.verdict.value, "omega sum = %.4f" % m.estimate.value)

# freeze w and classify z on a lattice; at w = 0 the slice is the right half disc
sl = wedge_slice(spec, 0j, GridSpec(21, 21))
z = sl.grid[sl.inside]
inside = sl.in_mask()[sl.inside]
print("slice points:", inside.sum(), "of", z.size)
print("all in Re z > 0:", bool(np.all(z[inside].real > 0)))

# moving w towards its arc enlarges the slice
for w in (0.0, 0.5, 0.9):
    s = wedge_slice(spec, w, GridSpec(21, 21))
    print("w = %.1f: %d lattice points in the slice" % (w, s.in_mask().sum()))
