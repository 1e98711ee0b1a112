"""Crosses, wedges and samples of cross functions.

For planar domains ``D``, ``G`` with open boundary arc sets ``A``, ``B`` the
cross is ``W = ((D u A) x B) u (A x (B u G))`` and the wedge is the set where
``omega(z, A, D) + omega(w, B, G) < 1``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .domains import ArcSet, domain_to_descriptor, sample_interior
from .export import write_csv, write_jsonl
from .harmonic_measure import (
    MeasureEstimate,
    Membership,
    OmegaOptions,
    Verdict,
    omega,
    omega_field,
)

BOUNDARY_TOL = 1e-12
WEDGE_EDGE_TOL = 1e-9
AG, DB, AB = "AxG", "DxB", "AxB"
STRATA = (AG, DB, AB)


@dataclass(frozen=True)
class CrossSpec:
    D: object
    A: ArcSet
    G: object
    B: ArcSet
    opts_D: OmegaOptions = field(default_factory=OmegaOptions)
    opts_G: OmegaOptions = field(default_factory=OmegaOptions)

    def __post_init__(self):
        if self.A.is_empty or self.B.is_empty:
            raise ValueError("arc sets of a cross must be nonempty")
        if self.A.owner is not self.D and self.A.owner != self.D:
            raise ValueError("A must live on the boundary of D")
        if self.B.owner is not self.G and self.B.owner != self.G:
            raise ValueError("B must live on the boundary of G")

    def swapped(self):
        return CrossSpec(self.G, self.B, self.D, self.A, self.opts_G, self.opts_D)

    def descriptor(self):
        return {"D": domain_to_descriptor(self.D, self.A), "G": domain_to_descriptor(self.G, self.B)}


def _factor_omega(d, arcs, z, opts):
    """``omega`` extended by 0 to points of the arc set."""
    z = complex(z)
    # arc points first: e^{it} may round to just inside the disc
    if _near_boundary(d, z):
        if bool(arcs.contains(d.nearest_parameter(z))):
            return MeasureEstimate(0.0, 0.0, 0, "closed-form")
        raise ValueError(f"boundary point {z} is not in the arc set")
    if d.contains(z):
        return omega(z, d, arcs, opts)
    raise ValueError(f"point {z} lies outside the closed domain")


def _near_boundary(d, z):
    return d.boundary_distance(z) <= BOUNDARY_TOL * max(1.0, d.diameter)


def omega_sum(spec, z, w):
    a = _factor_omega(spec.D, spec.A, z, spec.opts_D)
    b = _factor_omega(spec.G, spec.B, w, spec.opts_G)
    method = a.method if a.method == b.method else f"{a.method}+{b.method}"
    return MeasureEstimate(a.value + b.value, math.hypot(a.stderr, b.stderr),
                           a.n_samples + b.n_samples, method)


def classify_sum(value, stderr, sigmas=3.0):
    """IN below 1 with confidence; points within 1e-9 of the wedge boundary are OUT."""
    edge = 1.0 - WEDGE_EDGE_TOL
    if value + sigmas * stderr < edge:
        return Verdict.IN
    if value - sigmas * stderr >= edge:
        return Verdict.OUT
    return Verdict.UNCERTAIN


def wedge_contains(spec, z, w):
    est = omega_sum(spec, z, w)
    return Membership(classify_sum(est.value, est.stderr), est)


# -- sampling --------------------------------------------------------------------

@dataclass
class CrossSamples:
    spec: CrossSpec
    z: np.ndarray
    w: np.ndarray
    values: np.ndarray
    stratum: np.ndarray     # one of STRATA per sample
    seed: int = 0

    @property
    def sup_W(self):
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    @property
    def sup_AB(self):
        m = self.stratum == AB
        return float(np.max(np.abs(self.values[m]))) if m.any() else 0.0

    def counts(self):
        return {s: int(np.count_nonzero(self.stratum == s)) for s in STRATA}

    def stratum_ok(self):
        """Per-sample check that each point lies in its declared stratum."""
        sp = self.spec

        def on_arc(d, arcs, p):
            return _near_boundary(d, p) & arcs.contains(d.nearest_parameter(p))

        zA, wB = on_arc(sp.D, sp.A, self.z), on_arc(sp.G, sp.B, self.w)
        zD = sp.D.contains(self.z) & ~_near_boundary(sp.D, self.z)
        wG = sp.G.contains(self.w) & ~_near_boundary(sp.G, self.w)
        return np.where(self.stratum == AG, zA & wG,
                        np.where(self.stratum == DB, zD & wB, zA & wB))

    def to_jsonl(self, path):
        write_jsonl(path, ({"z": z, "w": w, "re": v.real, "im": v.imag, "stratum": s}
                           for z, w, v, s in zip(self.z, self.w, self.values, self.stratum)))


def default_counts(spec, total):
    """Split ``total`` samples in proportion to the size of each stratum."""
    a, b = spec.A.measure, spec.B.measure
    weights = np.array([a * spec.G.area, spec.D.area * b, a * b])
    raw = total * weights / weights.sum()
    counts = np.floor(raw).astype(int)
    counts[np.argmax(raw - counts)] += total - counts.sum()
    return tuple(int(c) for c in counts)


def _arc_points(d, arcs, n, rng):
    return d.boundary_point(arcs.sample(n, rng)) if n else np.zeros(0, dtype=complex)


def _interior_points(d, n, rng):
    return sample_interior(d, n, rng) if n else np.zeros(0, dtype=complex)


def sample_cross(spec, f, counts, seed=0):
    """Sample ``f`` on the strata ``A x G``, ``D x B`` and ``A x B``.

    Arc points are uniform in arc parameter, interior points uniform in area;
    ``f`` is called once on the stacked arrays.
    """
    n_ag, n_db, n_ab = (int(c) for c in counts)
    if min(n_ag, n_db, n_ab) < 0:
        raise ValueError("sample counts must be nonnegative")
    rng = np.random.default_rng(seed)
    z = np.concatenate([_arc_points(spec.D, spec.A, n_ag, rng),
                        _interior_points(spec.D, n_db, rng),
                        _arc_points(spec.D, spec.A, n_ab, rng)])
    w = np.concatenate([_interior_points(spec.G, n_ag, rng),
                        _arc_points(spec.G, spec.B, n_db, rng),
                        _arc_points(spec.G, spec.B, n_ab, rng)])
    stratum = np.array([AG] * n_ag + [DB] * n_db + [AB] * n_ab, dtype=object)
    try:
        values = np.asarray(f(z, w), dtype=complex) * np.ones(z.shape)
    except Exception as exc:
        raise ValueError(f"cross function failed to evaluate: {exc}") from exc
    if not np.all(np.isfinite(values)):
        raise ValueError("cross function is not finite at some sample")
    return CrossSamples(spec, z, w, values, stratum, seed)


# -- wedge slices -----------------------------------------------------------------------

@dataclass
class WedgeSlice:
    w: complex
    grid: np.ndarray
    inside: np.ndarray
    omega_sum: np.ndarray
    stderr: np.ndarray
    verdicts: np.ndarray    # Verdict values, None outside D

    def in_mask(self):
        return np.vectorize(lambda v: v is Verdict.IN)(self.verdicts)

    def rows(self):
        for z, s, v in zip(self.grid[self.inside], self.omega_sum[self.inside],
                           self.verdicts[self.inside]):
            yield (z.real, z.imag, self.w.real, self.w.imag, s, v.value)

    def to_csv(self, path):
        write_csv(path, ["x", "y", "u", "v", "omega_sum", "verdict"], self.rows())


def wedge_slice(spec, w, grid):
    """Classify ``{z : omega(z, A, D) < 1 - omega(w, B, G)}`` on a lattice."""
    w = complex(w)
    ow = _factor_omega(spec.G, spec.B, w, spec.opts_G)
    fz = omega_field(spec.D, spec.A, grid, spec.opts_D)
    total = fz.values + ow.value
    err = np.hypot(fz.stderr, ow.stderr)
    verdicts = np.full(total.shape, None, dtype=object)
    for idx in zip(*np.nonzero(fz.inside)):
        verdicts[idx] = classify_sum(total[idx], err[idx])
    return WedgeSlice(w, fz.grid, fz.inside, total, err, verdicts)
