"""Harmonic measure of boundary arc sets in planar domains.

``omega(z, A, D)`` is the value at ``z`` of the bounded harmonic function on
``D`` with boundary values 0 on ``A`` and 1 on the rest of the boundary.  On
the unit disc it is a Poisson integral; elsewhere it is the probability that
Brownian motion started at ``z`` leaves ``D`` outside ``A``, estimated by
walk-on-spheres.
"""

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import integrate

from . import streams
from .domains import DISC, ArcSet

CLOSED_FORM = "closed-form"
QUADRATURE = "quadrature"
WOS = "wos"

QUAD_TOL = 1e-10
DEFAULT_SHELL_FACTOR = 1e-6
MAX_WALK_STEPS = 100_000
_CHUNK = 8192


class Verdict(enum.Enum):
    IN = "in"
    OUT = "out"
    UNCERTAIN = "uncertain"


@dataclass(frozen=True)
class MeasureEstimate:
    value: float
    stderr: float
    n_samples: int
    method: str


@dataclass(frozen=True)
class OmegaOptions:
    """Sampler settings; ``shell=None`` means ``1e-6 * diam(D)``."""

    n: int = 10_000
    shell: Optional[float] = None
    seed: int = 0
    threads: int = 1


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    bounds: Optional[tuple] = None  # (xmin, xmax, ymin, ymax); domain bbox if None

    def points(self, d):
        xmin, xmax, ymin, ymax = self.bounds if self.bounds is not None else d.bbox
        x = np.linspace(xmin, xmax, self.nx)
        y = np.linspace(ymin, ymax, self.ny)
        X, Y = np.meshgrid(x, y)
        return X + 1j * Y


@dataclass
class HarmonicMeasureField:
    grid: np.ndarray      # complex lattice, shape (ny, nx)
    inside: np.ndarray    # bool mask
    values: np.ndarray    # nan outside
    stderr: np.ndarray
    method: str

    def rows(self):
        for z, v, s in zip(self.grid[self.inside], self.values[self.inside],
                           self.stderr[self.inside]):
            yield (z.real, z.imag, v, s, self.method)

    def to_csv(self, path):
        from .export import write_csv
        write_csv(path, ["x", "y", "omega", "stderr", "method"], self.rows())


@dataclass(frozen=True)
class LevelSetSpec:
    """``D_eps = {z in D : omega(z, A, D) < 1 - eps}``."""

    domain: object
    arcs: ArcSet
    eps: float

    def __post_init__(self):
        if not 0.0 <= self.eps < 1.0:
            raise ValueError(f"eps must lie in [0, 1), got {self.eps}")


class Membership(NamedTuple):
    verdict: Verdict
    estimate: MeasureEstimate


# -- unit disc ---------------------------------------------------------------

def poisson_kernel(z, theta):
    return (1.0 - abs(z) ** 2) / np.abs(np.exp(1j * theta) - z) ** 2


def omega_disc(z, A):
    """Poisson integral of the indicator of the boundary outside ``A``.

    Adaptive quadrature (absolute tolerance 1e-10) over each complementary
    arc; exact normalized arc length at ``z = 0``.
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise ValueError(f"|z| must be < 1, got {z}")
    rest = A.complement()
    if A.is_empty:
        return MeasureEstimate(1.0, 0.0, 0, QUADRATURE)
    if rest.is_empty:
        return MeasureEstimate(0.0, 0.0, 0, QUADRATURE)
    if z == 0:
        return MeasureEstimate(rest.measure / (2 * math.pi), 0.0, 0, CLOSED_FORM)
    peak = math.atan2(z.imag, z.real) % (2 * math.pi)
    total = 0.0
    for s, e in rest.intervals:
        # the kernel peaks at arg z; tell quad where
        pts = [p for p in (peak, peak + 2 * math.pi) if s < p < e]
        val, _ = integrate.quad(lambda t: poisson_kernel(z, t), s, e, points=pts or None,
                                epsabs=QUAD_TOL, epsrel=0.0, limit=500)
        total += val
    value = min(max(total / (2 * math.pi), 0.0), 1.0)
    return MeasureEstimate(value, 0.0, 0, QUADRATURE)


def disc_omega_exact(z, A):
    """Vectorized closed form of :func:`omega_disc` for arrays of points.

    An arc ``(a, b)`` seen from ``z`` subtends the angle
    ``arg((e^{ib} - z) / (e^{ia} - z))`` taken in ``(0, 2 pi)``; its harmonic
    measure is ``angle / pi - (b - a) / (2 pi)``.
    """
    z = np.asarray(z, dtype=complex)
    if A.full:
        return np.zeros(z.shape)
    hit = np.zeros(z.shape)
    for s, e in A.intervals:
        ang = np.mod(np.angle((np.exp(1j * e) - z) / (np.exp(1j * s) - z)), 2 * math.pi)
        hit += ang / math.pi - (e - s) / (2 * math.pi)
    return np.clip(1.0 - hit, 0.0, 1.0)


# -- walk-on-spheres ---------------------------------------------------------

def _default_shell(d, shell):
    return DEFAULT_SHELL_FACTOR * d.diameter if shell is None else float(shell)


def _run_chunked(fn, n, threads):
    """Run ``fn(walk_ids)`` over fixed chunks of walk indices; concatenate in order."""
    chunks = [np.arange(i, min(i + _CHUNK, n), dtype=np.uint64) for i in range(0, n, _CHUNK)]
    if threads <= 1 or len(chunks) == 1:
        parts = [fn(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(fn, chunks))
    return np.concatenate(parts) if parts else np.empty(0)


def wos_terminal_parameters(d, z, walk_ids, seed, shell):
    """Boundary parameters where walks ``walk_ids`` started at ``z`` terminate."""
    keys = streams.stream_keys(seed, walk_ids)
    pos = np.full(len(walk_ids), complex(z))
    active = np.arange(len(walk_ids))
    for step in range(MAX_WALK_STEPS):
        r = d.boundary_distance(pos[active])
        moving = r >= shell
        active = active[moving]
        if active.size == 0:
            break
        u = streams.uniforms(keys[active], step)
        pos[active] += r[moving] * np.exp(2j * math.pi * u)
    return d.nearest_parameter(pos)


def omega_wos(z, d, A, n=10_000, shell=None, seed=0, threads=1):
    """Fraction of walk-on-spheres paths from ``z`` that end outside ``A``.

    Walk ``k`` draws its randomness from stream ``(seed, k)`` only, so the
    estimate is identical for any ``threads``.
    """
    z = complex(z)
    if not d.contains(z):
        raise ValueError(f"point {z} is not inside {d!r}")
    if n < 1:
        raise ValueError("need at least one walk")
    shell = _default_shell(d, shell)

    def outside_a(ids):
        t = wos_terminal_parameters(d, z, ids, seed, shell)
        return ~A.contains(t)

    hits = int(np.count_nonzero(_run_chunked(outside_a, n, threads)))
    p = hits / n
    return MeasureEstimate(p, math.sqrt(p * (1.0 - p) / n), n, WOS)


def omega(z, d, A, opts=None):
    """Quadrature on the disc, walk-on-spheres on every other domain."""
    opts = opts or OmegaOptions()
    if d.kind == DISC:
        return omega_disc(z, A)
    return omega_wos(z, d, A, n=opts.n, shell=opts.shell, seed=opts.seed, threads=opts.threads)


def omega_field(d, A, grid, opts=None):
    """``omega`` at every interior lattice point; point ``k`` uses seed ``(seed, k)``."""
    opts = opts or OmegaOptions()
    Z = grid.points(d)
    inside = d.contains(Z)
    pts = Z[inside]

    def one(item):
        k, z = item
        sub = OmegaOptions(n=opts.n, shell=opts.shell, seed=streams.derive_seed(opts.seed, k))
        return omega(z, d, A, sub)

    items = list(enumerate(pts))
    if opts.threads > 1:
        with ThreadPoolExecutor(max_workers=opts.threads) as ex:
            est = list(ex.map(one, items))
    else:
        est = [one(it) for it in items]
    values = np.full(Z.shape, np.nan)
    errs = np.full(Z.shape, np.nan)
    values[inside] = [e.value for e in est]
    errs[inside] = [e.stderr for e in est]
    method = QUADRATURE if d.kind == DISC else WOS
    return HarmonicMeasureField(Z, inside, values, errs, method)


# -- level sets --------------------------------------------------------------

def classify_threshold(est, threshold, sigmas=3.0):
    """IN if surely below ``threshold``, OUT if surely at or above it."""
    if est.value + sigmas * est.stderr < threshold:
        return Verdict.IN
    if est.value - sigmas * est.stderr >= threshold:
        return Verdict.OUT
    return Verdict.UNCERTAIN


def level_set_contains(ls, z, opts=None):
    if not ls.domain.contains(complex(z)):
        raise ValueError(f"point {z} is not inside the domain")
    est = omega(z, ls.domain, ls.arcs, opts)
    return Membership(classify_threshold(est, 1.0 - ls.eps), est)


def wos_level_set(z, d, A, eps, omega_fn, n, shell=None, seed=0, threads=1,
                  level_tol=1e-3):
    """Estimate ``omega(z, A, D_eps)`` by walks killed on the level curve.

    The ball around a walker must stay inside ``D_eps``.  With ``R`` the
    distance to the boundary of ``D``, ``w = omega`` at the walker and
    ``c = 1 - eps``, Harnack's inequality on ``B(z, R)`` applied to the
    positive harmonic functions ``omega`` and ``1 - omega`` keeps
    ``omega < c`` on balls of radius ``R (c - w) / (c + w)`` and
    ``R (c - w) / (1 + eps - w)``; the larger is used.  A walk stops on the
    level curve once ``c - w < level_tol * c`` (value 1; the bias is at most
    ``level_tol``), or on the boundary of ``D`` when the ball shrinks below
    the shell (value 1 only outside ``A``).
    """
    c = 1.0 - eps
    shell = _default_shell(d, shell)

    def level_or_outside(ids):
        keys = streams.stream_keys(seed, ids)
        pos = np.full(len(ids), complex(z))
        active = np.arange(len(ids))
        for step in range(MAX_WALK_STEPS):
            p = pos[active]
            R = d.boundary_distance(p)
            w = omega_fn(p)
            gap = np.maximum(c - w, 0.0)
            rho = R * gap / np.minimum(c + w, 1.0 + eps - w)
            moving = (rho >= shell) & (gap >= level_tol * c)
            active = active[moving]
            if active.size == 0:
                break
            u = streams.uniforms(keys[active], step)
            pos[active] += rho[moving] * np.exp(2j * math.pi * u)
        w = omega_fn(pos)
        at_level = c - w < level_tol * c
        outside = ~A.contains(d.nearest_parameter(pos))
        return at_level | outside

    hits = int(np.count_nonzero(_run_chunked(level_or_outside, n, threads)))
    p = hits / n
    return MeasureEstimate(p, math.sqrt(p * (1.0 - p) / n), n, WOS)


def verify_level_identity(d, A, eps, points, n=100_000, shell=None, seed=0, threads=1,
                          omega_fn=None, rel_tol=0.02):
    """Check ``omega(z, A, D_eps) = omega(z, A, D) / (1 - eps)`` at each point.

    The left side comes from walks confined to ``D_eps``; the right side from
    ``omega``.  ``omega_fn`` must evaluate ``omega(., A, D)`` on arrays; the
    closed form is used on the disc.  Returns one record per point.
    """
    if omega_fn is None:
        if d.kind != DISC:
            raise ValueError("omega_fn is required for domains other than the disc")
        omega_fn = lambda p: disc_omega_exact(p, A)  # noqa: E731
    records = []
    for k, z in enumerate(points):
        z = complex(z)
        if not d.contains(z):
            raise ValueError(f"point {z} is not inside the domain")
        base = omega(z, d, A, OmegaOptions(n=n, shell=shell, seed=seed, threads=threads))
        if base.value >= 1.0 - eps:
            raise ValueError(f"point {z} is not in D_eps (omega = {base.value:.6g})")
        rhs = base.value / (1.0 - eps)
        lhs = wos_level_set(z, d, A, eps, omega_fn, n, shell=shell,
                            seed=streams.derive_seed(seed, k), threads=threads)
        err = abs(lhs.value - rhs)
        rel = err / rhs if rhs > 0 else err
        records.append({"z": z, "eps": eps, "lhs": lhs.value, "lhs_stderr": lhs.stderr,
                        "rhs": rhs, "rel_err": rel,
                        "verdict": "pass" if rel < rel_tol else "fail"})
    return records


def boundary_limit_check(d, A, zeta_t, approach, opts=None, tol=0.05):
    """Follow ``omega`` along points ``approach`` tending to the boundary point
    with parameter ``zeta_t`` (which must lie in ``A``)."""
    if not bool(A.contains(zeta_t)):
        raise ValueError(f"parameter {zeta_t} is not in the arc set")
    opts = opts or OmegaOptions()
    zeta = complex(d.boundary_point(zeta_t))
    ests = [omega(z, d, A, OmegaOptions(opts.n, opts.shell, streams.derive_seed(opts.seed, k),
                                        opts.threads))
            for k, z in enumerate(approach)]
    values = np.array([e.value for e in ests])
    errs = np.array([e.stderr for e in ests])
    steps = np.diff(values)
    return {
        "zeta": zeta,
        "distances": [abs(complex(z) - zeta) for z in approach],
        "values": values.tolist(),
        "stderr": errs.tolist(),
        "monotone": bool(np.all(steps <= 3 * (errs[1:] + errs[:-1]))),
        "decreasing_fraction": float(np.mean(steps <= 0)) if steps.size else 1.0,
        "final": float(values[-1]),
        "passed": bool(values[-1] + 3 * errs[-1] < tol),
    }
