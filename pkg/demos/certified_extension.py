"""
Extending a cross function with an error certificate
====================================================

"""

import math

import numpy as np

from crosswedge.cross import CrossSpec, default_counts, sample_cross
from crosswedge.domains import ArcSet, make_unit_disc
from crosswedge.extension import (
    certify_error,
    fit_extension,
    two_constants_report,
    wedge_probes,
)

# the left half circles on both factors of the bidisc
E = make_unit_disc()
left = ArcSet(E, [(math.pi / 2, 3 * math.pi / 2)])
spec = CrossSpec(E, left, E, left)


def f(z, w):
    return 1.0 / ((2.0 - z) * (2.0 - w))


# sample f on the cross only, then fit a 12 x 12 tensor polynomial
samples = sample_cross(spec, f, default_counts(spec, 2000), seed=0)
fit = fit_extension(samples, 12, 12)
print("eps_W = %.2e, eps_AB = %.2e" % (fit.eps_W, fit.eps_AB))

# off the cross, the fit is certified by the two-constants bound
for z, w in wedge_probes(spec, 5, seed=1):
    c = certify_error(fit, spec, z, w)
    print("omega %.3f  bound %.2e  actual %.2e" % (c.omega_sum, c.bound,
                                                  abs(c.value - f(z, w))))

# the estimate itself, checked for f on a grid of wedge points
rep = two_constants_report(f, spec)
print("checked", rep["checked"], "points, violations:", len(rep["violations"]))
