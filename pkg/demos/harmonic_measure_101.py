"""
Harmonic measure on the disc and the slit square
================================================

"""

import math

import numpy as np

from crosswedge.domains import ArcSet, make_slit_square, make_unit_disc
from crosswedge.harmonic_measure import OmegaOptions, omega_disc, omega_wos

# the unit disc with the upper half circle as the distinguished arc
E = make_unit_disc()
A = ArcSet(E, [(0.0, math.pi)])

# omega vanishes on A and is 1 on the rest of the circle: at the centre it is 1/2
print("omega(0) =", omega_disc(0j, A).value)

# walk on spheres agrees with the Poisson integral within its standard error
est = omega_wos(0.3 - 0.2j, E, A, n=100_000, seed=0)
print("wos %.4f +- %.4f, quadrature %.4f" % (est.value, est.stderr,
                                            omega_disc(0.3 - 0.2j, A).value))

# on the slit square, take both sides of the slit as A
S = make_slit_square(0.5)
slit = ArcSet(S, [(8.0, 10.0)])
for y in (0.5, 0.1, 0.01, 0.001):
    e = omega_wos(complex(0, y), S, slit, n=20_000, seed=1)
    print("omega(%gi) = %.4f" % (y, e.value))

# the same walks with any number of threads give the same bits
a = omega_wos(0.2j, S, slit, n=20_000, seed=2, threads=1)
b = omega_wos(0.2j, S, slit, n=20_000, seed=2, threads=8)
print("thread independent:", a == b)
