"""Planar domains with arc-length boundary parametrizations and boundary arc sets.

Three kinds of domain are supported: the unit disc, simple polygons and the
slit square ``(-1, 1)^2 minus [-a, a]``.  Boundaries are parametrized by arc
length, counterclockwise:

* disc: ``t -> exp(i t)`` on ``[0, 2 pi)``, starting at ``+1``;
* polygon: edges in counterclockwise order starting at the first vertex;
* slit square: the square from ``1+i`` (length 8), then the upper side of the
  slit from ``-a`` to ``a``, then the lower side from ``a`` back to ``-a``.
  Every point of the slit therefore has two parameters.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

DISC = "disc"
POLYGON = "polygon"
SLIT_SQUARE = "slit_square"

_ON_BOUNDARY_TOL = 1e-14


class BoundaryPointType(enum.Enum):
    TYPE1 = "type1"
    TYPE2 = "type2"


@dataclass(frozen=True, eq=False)
class PlanarDomain:
    """A bounded open planar region.

    Use :func:`make_unit_disc`, :func:`make_polygon` or
    :func:`make_slit_square` rather than calling this directly.
    """

    kind: str
    vertices: tuple = ()
    a: float = 0.0
    # Straight boundary pieces; empty for the disc.
    seg_start: np.ndarray = field(init=False, repr=False)
    seg_end: np.ndarray = field(init=False, repr=False)
    seg_offset: np.ndarray = field(init=False, repr=False)
    seg_length: np.ndarray = field(init=False, repr=False)
    length: float = field(init=False)

    def __post_init__(self):
        if self.kind == DISC:
            starts = ends = np.empty(0, dtype=complex)
        elif self.kind == POLYGON:
            v = np.asarray(self.vertices, dtype=complex)
            starts, ends = v, np.roll(v, -1)
        elif self.kind == SLIT_SQUARE:
            sq = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j])
            a = self.a
            starts = np.concatenate([sq, [-a, a]]).astype(complex)
            ends = np.concatenate([np.roll(sq, -1), [a, -a]]).astype(complex)
        else:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        lengths = np.abs(ends - starts)
        offsets = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
        total = 2 * math.pi if self.kind == DISC else float(lengths.sum())
        for name, value in [("seg_start", starts), ("seg_end", ends),
                            ("seg_offset", offsets), ("seg_length", lengths),
                            ("length", total)]:
            object.__setattr__(self, name, value)

    def __repr__(self):
        if self.kind == POLYGON:
            return f"PlanarDomain(polygon, {len(self.vertices)} vertices)"
        if self.kind == SLIT_SQUARE:
            return f"PlanarDomain(slit_square, a={self.a})"
        return "PlanarDomain(disc)"

    @property
    def diameter(self):
        if self.kind == DISC:
            return 2.0
        pts = self.seg_start
        return float(np.max(np.abs(pts[:, None] - pts[None, :])))

    @property
    def bbox(self):
        """``(xmin, xmax, ymin, ymax)``."""
        if self.kind == DISC:
            return (-1.0, 1.0, -1.0, 1.0)
        p = self.seg_start
        return (p.real.min(), p.real.max(), p.imag.min(), p.imag.max())

    @property
    def area(self):
        if self.kind == DISC:
            return math.pi
        if self.kind == SLIT_SQUARE:
            return 4.0
        v = np.asarray(self.vertices)
        return 0.5 * float(np.sum(v.real * np.roll(v.imag, -1) - np.roll(v.real, -1) * v.imag))

    def boundary_distance(self, z):
        """Distance from ``z`` (any array) to the boundary point set."""
        z = np.asarray(z, dtype=complex)
        if self.kind == DISC:
            return np.abs(1.0 - np.abs(z))
        return _segment_distances(z, self.seg_start, self.seg_end).min(axis=-1)

    def contains(self, z):
        """Membership in the open domain; boundary points are outside."""
        z = np.asarray(z, dtype=complex)
        if self.kind == DISC:
            return np.abs(z) < 1.0
        if self.kind == SLIT_SQUARE:
            x, y = z.real, z.imag
            inside = (np.abs(x) < 1.0) & (np.abs(y) < 1.0)
            on_slit = (y == 0.0) & (np.abs(x) <= self.a)
            return inside & ~on_slit
        inside = _ray_cast(z, self.seg_start, self.seg_end)
        return inside & (self.boundary_distance(z) > _ON_BOUNDARY_TOL)

    def boundary_point(self, t):
        """Boundary point with arc-length parameter ``t`` (taken mod length)."""
        t = np.mod(np.asarray(t, dtype=float), self.length)
        if self.kind == DISC:
            return np.exp(1j * t)
        k = np.searchsorted(self.seg_offset, t, side="right") - 1
        s = (t - self.seg_offset[k]) / self.seg_length[k]
        return self.seg_start[k] + s * (self.seg_end[k] - self.seg_start[k])

    def nearest_parameter(self, z):
        """Parameter of the boundary point nearest to ``z``.

        On the slit the side is chosen by the sign of ``Im z``: the upper side
        for ``Im z >= 0``.
        """
        z = np.asarray(z, dtype=complex)
        if self.kind == DISC:
            return np.mod(np.angle(z), 2 * math.pi)
        d, s = _segment_distances(z, self.seg_start, self.seg_end, with_position=True)
        if self.kind == SLIT_SQUARE:
            upper = z.imag >= 0
            d = d.copy()
            d[..., 4] = np.where(upper, d[..., 4], np.inf)
            d[..., 5] = np.where(upper, np.inf, d[..., 5])
        k = np.argmin(d, axis=-1)
        pos = np.take_along_axis(s, k[..., None], axis=-1)[..., 0]
        t = self.seg_offset[k] + pos * self.seg_length[k]
        return np.mod(t, self.length)


def _segment_distances(z, p0, p1, with_position=False):
    z = z[..., None]
    d = p1 - p0
    s = ((z - p0) * np.conj(d)).real / (np.abs(d) ** 2)
    s = np.clip(s, 0.0, 1.0)
    dist = np.abs(z - (p0 + s * d))
    return (dist, s) if with_position else dist


def _ray_cast(z, p0, p1):
    x = z.real[..., None]
    y = z.imag[..., None]
    x0, y0, x1, y1 = p0.real, p0.imag, p1.real, p1.imag
    crosses = (y0 > y) != (y1 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    return np.count_nonzero(crosses & (x < xi), axis=-1) % 2 == 1


def make_unit_disc():
    return PlanarDomain(DISC)


def make_slit_square(a):
    """Open square with vertices ``±1±i`` minus the closed segment ``[-a, a]``."""
    if not 0.0 < a < 1.0:
        raise ValueError(f"slit half-width must lie in (0, 1), got {a}")
    return PlanarDomain(SLIT_SQUARE, a=float(a))


def make_polygon(vertices):
    """Simple polygon domain.

    Clockwise input is reoriented counterclockwise; the first vertex stays the
    parameter origin.  Self-intersecting, degenerate or repeated-vertex input
    raises ``ValueError``.
    """
    v = [complex(p) if not isinstance(p, (list, tuple)) else complex(*p) for p in vertices]
    if len(v) < 3:
        raise ValueError("a polygon needs at least 3 vertices")
    n = len(v)
    for i in range(n):
        if abs(v[i] - v[(i + 1) % n]) == 0.0:
            raise ValueError(f"repeated consecutive vertex at index {i}")
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]):
                raise ValueError("polygon is self-intersecting")
    arr = np.array(v)
    signed = 0.5 * np.sum(arr.real * np.roll(arr.imag, -1) - np.roll(arr.real, -1) * arr.imag)
    if abs(signed) < 1e-14:
        raise ValueError("polygon has zero area")
    if signed < 0:
        v = [v[0]] + v[:0:-1]
    return PlanarDomain(POLYGON, vertices=tuple(v))


def _orient(p, q, r):
    return (q.real - p.real) * (r.imag - p.imag) - (q.imag - p.imag) * (r.real - p.real)


def _segments_intersect(p1, p2, q1, q2):
    d1, d2 = _orient(q1, q2, p1), _orient(q1, q2, p2)
    d3, d4 = _orient(p1, p2, q1), _orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and 0 not in (d1, d2, d3, d4):
        return True

    def on_seg(p, q, r):
        return (min(p.real, q.real) <= r.real <= max(p.real, q.real)
                and min(p.imag, q.imag) <= r.imag <= max(p.imag, q.imag))

    return ((d1 == 0 and on_seg(q1, q2, p1)) or (d2 == 0 and on_seg(q1, q2, p2))
            or (d3 == 0 and on_seg(p1, p2, q1)) or (d4 == 0 and on_seg(p1, p2, q2)))


def classify_boundary_point(d, t):
    """Type 2 exactly on the open slit (either side); type 1 everywhere else."""
    if d.kind != SLIT_SQUARE:
        return BoundaryPointType.TYPE1
    u = math.fmod(float(t), d.length)
    if u < 0:
        u += d.length
    slit0, mid, slit1 = 8.0, 8.0 + 2 * d.a, 8.0 + 4 * d.a
    if slit0 < u < mid or mid < u < slit1:
        return BoundaryPointType.TYPE2
    return BoundaryPointType.TYPE1


def distance_to_boundary(d, z):
    z = complex(z)
    if not d.contains(z):
        raise ValueError(f"point {z} is not inside {d!r}")
    return float(d.boundary_distance(z))


def sample_interior(d, n, rng):
    """``n`` points uniformly distributed in ``d`` (rejection from the bounding box)."""
    xmin, xmax, ymin, ymax = d.bbox
    out = np.empty(0, dtype=complex)
    while out.size < n:
        k = max(2 * (n - out.size), 16)
        z = rng.uniform(xmin, xmax, k) + 1j * rng.uniform(ymin, ymax, k)
        out = np.concatenate([out, z[d.contains(z)]])
    return out[:n]


class ArcSet:
    """Open subset of a domain boundary given by finitely many parameter intervals.

    Intervals are open, taken mod the boundary length, and merged where they
    overlap.  Intervals that merely touch are kept apart, so the shared point
    stays excluded.  An interval covering a whole period makes the set the
    entire boundary.
    """

    def __init__(self, owner, intervals=()):
        self.owner = owner
        L = owner.length
        pieces = []
        full = False
        for t0, t1 in intervals:
            t0, t1 = float(t0), float(t1)
            if not t1 > t0:
                raise ValueError(f"arc interval ({t0}, {t1}) must have t0 < t1")
            if t1 - t0 >= L:
                full = True
                break
            s = t0 % L
            if s >= L:  # rounding of tiny negative t0
                s = 0.0
            pieces.append((s, s + (t1 - t0)))
        if not full:
            pieces, full = _merge_circular(pieces, L)
        self.full = full
        self.intervals = ((0.0, L),) if full else tuple(pieces)

    @classmethod
    def entire(cls, owner):
        return cls(owner, [(0.0, owner.length)])

    @classmethod
    def empty(cls, owner):
        return cls(owner, [])

    def __repr__(self):
        if self.full:
            return f"ArcSet(entire boundary of {self.owner!r})"
        return f"ArcSet({list(self.intervals)})"

    def __eq__(self, other):
        return (isinstance(other, ArcSet) and other.owner is self.owner
                and other.full == self.full and other.intervals == self.intervals)

    @property
    def is_empty(self):
        return not self.full and not self.intervals

    @property
    def measure(self):
        return self.owner.length if self.full else sum(e - s for s, e in self.intervals)

    def contains(self, t):
        t = np.asarray(t, dtype=float)
        if self.full:
            return np.ones(t.shape, dtype=bool)
        L = self.owner.length
        u = np.mod(t, L)
        hit = np.zeros(t.shape, dtype=bool)
        for s, e in self.intervals:
            hit |= ((u > s) & (u < e)) | ((u + L > s) & (u + L < e))
        return hit

    def complement(self):
        """Open complement (endpoints of the intervals belong to neither set)."""
        L = self.owner.length
        if self.full:
            return ArcSet.empty(self.owner)
        if not self.intervals:
            return ArcSet.entire(self.owner)
        iv = sorted(self.intervals)
        gaps = []
        for (s0, e0), (s1, _) in zip(iv, iv[1:] + [(iv[0][0] + L, None)]):
            if s1 > e0:
                gaps.append((e0, s1))
        return ArcSet(self.owner, gaps)

    def points(self, t):
        return self.owner.boundary_point(t)

    def sample(self, n, rng):
        """``n`` parameters uniform with respect to arc length on the set."""
        if self.is_empty:
            raise ValueError("cannot sample an empty arc set")
        lengths = np.array([e - s for s, e in self.intervals])
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        u = rng.uniform(0.0, cum[-1], n)
        k = np.clip(np.searchsorted(cum, u, side="right") - 1, 0, len(lengths) - 1)
        starts = np.array([s for s, _ in self.intervals])
        return np.mod(starts[k] + (u - cum[k]), self.owner.length)


def _merge_circular(pieces, L):
    if not pieces:
        return [], False
    pieces = sorted(pieces)
    merged = [list(pieces[0])]
    for s, e in pieces[1:]:
        if s < merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    # the last piece may run past L and overlap the first ones
    while len(merged) > 1 and merged[-1][1] - L > merged[0][0]:
        s0, e0 = merged.pop(0)
        merged[-1][1] = max(merged[-1][1], e0 + L)
    if len(merged) == 1 and merged[0][1] - merged[0][0] >= L:
        return [], True
    return [tuple(p) for p in merged], False


def domain_from_descriptor(desc):
    """Build ``(domain, arcs)`` from ``{"kind", "vertices", "a", "arcs"}``.

    ``arcs`` is ``None`` when the descriptor has no ``"arcs"`` key.
    """
    kind = desc["kind"]
    if kind == DISC:
        d = make_unit_disc()
    elif kind == POLYGON:
        d = make_polygon([complex(x, y) for x, y in desc["vertices"]])
    elif kind == SLIT_SQUARE:
        d = make_slit_square(desc["a"])
    else:
        raise ValueError(f"unknown domain kind {kind!r}")
    arcs = ArcSet(d, desc["arcs"]) if "arcs" in desc else None
    return d, arcs


def domain_to_descriptor(d, arcs=None):
    desc = {"kind": d.kind}
    if d.kind == POLYGON:
        desc["vertices"] = [[v.real, v.imag] for v in d.vertices]
    elif d.kind == SLIT_SQUARE:
        desc["a"] = d.a
    if arcs is not None:
        desc["arcs"] = [list(iv) for iv in arcs.intervals]
    return desc
