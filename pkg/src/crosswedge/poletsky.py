"""Holomorphic discs and the Poisson functional.

For an upper semicontinuous ``u`` the Poisson functional at ``z`` is the
infimum of boundary averages ``(1/2pi) int u(phi(e^{it})) dt`` over
holomorphic discs ``phi`` with ``phi(0) = z``.  With ``u`` the indicator of
``M minus A`` (``A`` open in ``M``) it equals the plurisubharmonic measure
``omega(z, A, M)``.  Any admissible disc gives an upper bound; this module
searches finite-dimensional disc families for small ones and compares them
with grid Dirichlet solutions.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy import optimize

from . import streams
from .domains import DISC, make_unit_disc

POLYNOMIAL = "polynomial"
EXPONENTIAL = "exponential"

DEFAULT_DEGREE = 6
DEFAULT_RESTART_EVALS = 500
DEFAULT_M = 1024
FEAS_BOUNDARY = 512
FEAS_INTERIOR = 256
INIT_SCALE = 0.3

# exponential family: low-degree polynomial part plus logarithmic branch terms
EXP_DEGREE = 3
EXP_LOG_TERMS = 3
_ANNEAL = ((0.05, 1e-2), (0.015, 1e-2), (0.005, 1e-2), (0.0015, 1e-2), (0.0005, 1e-2))


# -- open sets and integrands -------------------------------------------------

@dataclass(frozen=True)
class OpenDiscUnion:
    """Union of open discs ``|t - c| < r``; the empty union is the empty set."""

    discs: tuple = ()

    def contains(self, t):
        t = np.asarray(t, dtype=complex)
        out = np.zeros(t.shape, dtype=bool)
        for c, r in self.discs:
            out |= np.abs(t - c) < r
        return out

    def signed_distance(self, t):
        """Negative inside the set; a lower bound on the distance outside it."""
        t = np.asarray(t, dtype=complex)
        if not self.discs:
            return np.full(t.shape, np.inf)
        return np.min([np.abs(t - c) - r for c, r in self.discs], axis=0)


class ComplementIndicator:
    """``u = 1`` off the open set, ``0`` on it."""

    def __init__(self, open_set):
        self.open_set = open_set

    def __call__(self, pts):
        return (~self.open_set.contains(pts)).astype(float)


class ProductRegion:
    """Product of planar domains; points are arrays of shape ``(..., n)``."""

    def __init__(self, factors):
        self.factors = tuple(factors)

    @property
    def dimension(self):
        return len(self.factors)

    def contains(self, pts):
        pts = np.asarray(pts, dtype=complex)
        ok = np.ones(pts.shape[:-1], dtype=bool)
        for k, d in enumerate(self.factors):
            ok &= d.contains(pts[..., k])
        return ok

    def penetration(self, pts):
        pts = np.asarray(pts, dtype=complex)
        out = np.zeros(pts.shape[:-1])
        for k, d in enumerate(self.factors):
            z = pts[..., k]
            out = np.maximum(out, np.where(d.contains(z), 0.0, d.boundary_distance(z)))
        return out

    @property
    def diameter(self):
        return math.sqrt(sum(d.diameter ** 2 for d in self.factors))


def _region_dim(region):
    return region.dimension if isinstance(region, ProductRegion) else 1


def _penetration(region, pts):
    if isinstance(region, ProductRegion):
        return region.penetration(pts)
    return np.where(region.contains(pts), 0.0, region.boundary_distance(pts))


# -- discs ----------------------------------------------------------------------

@dataclass(frozen=True)
class DiscCandidate:
    """Holomorphic disc with ``phi(0) = base`` exactly.

    polynomial:   ``phi_k(t) = base_k + sum_j coeffs[k, j] t^(j+1)``
    exponential:  ``phi_k(t) = base_k exp(sum_j coeffs[k, j] t^(j+1)
                                  + sum_i gammas[k, i] log(1 - t / poles[k, i]))``

    Poles satisfy ``|p| > 1``, so both kinds are holomorphic past the closed
    unit disc.
    """

    base: np.ndarray
    coeffs: np.ndarray
    kind: str = POLYNOMIAL
    gammas: Optional[np.ndarray] = None
    poles: Optional[np.ndarray] = None

    @classmethod
    def constant(cls, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return cls(z, np.zeros((z.size, 0), dtype=complex))

    @property
    def dimension(self):
        return self.base.size

    @property
    def degree(self):
        return self.coeffs.shape[1]

    def table(self):
        """``c[k][j]`` for ``j = 0..deg`` with the pinned constant term (polynomial kind)."""
        return np.column_stack([self.base, self.coeffs])

    def exponent(self, t):
        t = np.asarray(t, dtype=complex)
        powers = t[:, None] ** np.arange(1, self.degree + 1)
        s = powers @ self.coeffs.T
        if self.gammas is not None:
            for k in range(self.dimension):
                for g, p in zip(self.gammas[k], self.poles[k]):
                    s[:, k] += g * np.log(1.0 - t / p)
        return s

    def __call__(self, t):
        """Images of the points ``t``: shape ``(len(t),)`` for planar discs, else ``(len(t), n)``."""
        t = np.atleast_1d(np.asarray(t, dtype=complex))
        if self.kind == EXPONENTIAL:
            with np.errstate(over="ignore", invalid="ignore"):
                out = self.base * np.exp(self.exponent(t))
        else:
            out = self.base + self.exponent(t)
        return out[:, 0] if self.dimension == 1 else out

    def to_dict(self):
        d = {"kind": self.kind, "base": [[b.real, b.imag] for b in self.base],
             "coefficients": [[[c.real, c.imag] for c in row] for row in self.table()]}
        if self.gammas is not None:
            d["gammas"] = [[[g.real, g.imag] for g in row] for row in self.gammas]
            d["poles"] = [[[p.real, p.imag] for p in row] for row in self.poles]
        return d


@dataclass
class DiscFunctionalResult:
    value: float
    disc: DiscCandidate
    feasibility: float
    evaluations: int
    seed: int
    history: list = field(default_factory=list, repr=False)

    def to_dict(self):
        return {"value": self.value, "feasibility": self.feasibility,
                "coefficients": self.disc.to_dict(), "evaluations": self.evaluations,
                "seed": self.seed}


def _circle(m):
    return np.exp(2j * math.pi * np.arange(m) / m)


_FEAS_NODES = np.concatenate([
    _circle(FEAS_BOUNDARY),
    np.concatenate([r * _circle(FEAS_INTERIOR // 4) for r in (0.25, 0.5, 0.75, 0.95)]),
])


def disc_boundary_average(u, phi, m=DEFAULT_M, region=None):
    """Trapezoidal average of ``u(phi(e^{it}))`` over ``m`` equispaced angles.

    Raises ``ValueError`` if ``m < 16``, if a node image leaves ``region``, or
    if ``u`` is not finite there.
    """
    if m < 16:
        raise ValueError("need at least 16 quadrature points")
    pts = phi(_circle(m))
    if region is not None and not np.all(region.contains(pts)):
        raise ValueError("disc image leaves the region")
    vals = np.asarray(u(pts), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("integrand undefined on the disc boundary")
    return float(vals.mean())


def disc_feasibility(phi, region):
    """Largest distance by which sampled disc points leave ``region`` (0 if admissible)."""
    pts = phi(_FEAS_NODES)
    if not np.all(np.isfinite(pts)):
        return math.inf
    return float(np.max(_penetration(region, pts)))


# -- search -----------------------------------------------------------------------

class _Tracker:
    """Keeps the best admissible disc seen; counts every objective evaluation."""

    def __init__(self, u, region, m, budget):
        self.u, self.region, self.m, self.budget = u, region, m, budget
        self.nodes = _circle(m)
        self.evals = 0
        self.best = (math.inf, None)

    def exhausted(self):
        return self.evals >= self.budget

    def offer(self, disc, node_images=None):
        """Score ``disc`` by the raw average; return it (inf if inadmissible)."""
        self.evals += 1
        pts = disc(self.nodes) if node_images is None else node_images
        if not np.all(np.isfinite(pts)) or not np.all(self.region.contains(pts)):
            return math.inf
        value = float(np.mean(self.u(pts)))
        if value < self.best[0]:
            if disc_feasibility(disc, self.region) > 0.0:
                return math.inf
            self.best = (value, disc)
        return value


class _BudgetStop(Exception):
    pass


def _poly_disc(z, x, n, deg):
    c = (x[: n * deg] + 1j * x[n * deg:]).reshape(n, deg)
    return DiscCandidate(z, c)


def _restart_polynomial(u, z, region, m, evals, rng, degree):
    """Raw-indicator Nelder-Mead over polynomial coefficients."""
    n = z.size
    tr = _Tracker(u, region, m, evals)
    scale = INIT_SCALE * _region_scale(region)
    x0 = rng.normal(0.0, scale, 2 * n * degree)
    for _ in range(40):
        if disc_feasibility(_poly_disc(z, x0, n, degree), region) == 0.0:
            break
        x0 *= 0.5

    def f(x):
        if tr.exhausted():
            raise _BudgetStop
        return tr.offer(_poly_disc(z, x, n, degree))

    try:
        optimize.minimize(f, x0, method="Nelder-Mead",
                          options={"maxfev": evals, "xatol": 1e-12, "fatol": 0.0,
                                   "adaptive": True})
    except _BudgetStop:
        pass
    return tr


def _region_scale(region):
    return 0.5 * region.diameter


def _exp_disc(z, x):
    d, k = EXP_DEGREE, EXP_LOG_TERMS
    c = x[:d] + 1j * x[d:2 * d]
    y = x[2 * d:].reshape(k, 4)
    alpha, s = y[:, 0], np.clip(y[:, 1], -30.0, 30.0)
    poles = (1.0 + np.exp(s)) * np.exp(1j * alpha)
    gammas = y[:, 2] + 1j * y[:, 3]
    return DiscCandidate(z, c[None, :], EXPONENTIAL, gammas[None, :], poles[None, :])


def _planar_gradient(g, pts, h=1e-7):
    return ((g(pts + h) - g(pts - h)) + 1j * (g(pts + 1j * h) - g(pts - 1j * h))) / (2 * h)


def _signed_region_distance(region, pts):
    d = region.boundary_distance(pts)
    return np.where(region.contains(pts), d, -d)


def _barrier(d, e):
    """``-log d`` for ``d > e``, continued quadratically below ``e``."""
    q = np.clip((d - e) / e, -1e6, 0.0)
    val = np.where(d > e, -np.log(np.maximum(d, e)), -math.log(e) - q + 0.5 * q * q)
    der = np.where(d > e, -1.0 / np.maximum(d, e), (-1.0 + q) / e)
    return val, der


def _restart_exponential(u, z, region, m, evals, rng):
    """Annealed smooth-surrogate search over the exponential family.

    The surrogate replaces the indicator by a logistic function of the signed
    distance to the open set and adds a log barrier keeping the image inside
    the region; gradients are exact in the disc parameters.  Every evaluated
    disc is also scored by the raw indicator, and only raw scores are kept.
    """
    tr = _Tracker(u, region, m, evals)
    A = u.open_set
    nodes = tr.nodes
    d, k = EXP_DEGREE, EXP_LOG_TERMS
    x0 = np.concatenate([
        rng.normal(0.0, INIT_SCALE, 2 * d),
        np.column_stack([rng.uniform(0, 2 * math.pi, k), rng.uniform(-4.0, 0.0, k),
                         rng.normal(0.0, INIT_SCALE, k), rng.normal(0.0, INIT_SCALE, k)]).ravel(),
    ])
    for _ in range(40):
        if disc_feasibility(_exp_disc(z, x0), region) == 0.0:
            break
        x0[:2 * d] *= 0.5
        x0[2 * d:].reshape(k, 4)[:, 2:] *= 0.5
    powers = [nodes ** (j + 1) for j in range(d)]
    scale = region.diameter

    def surrogate(x, tau, mu):
        if tr.exhausted():
            raise _BudgetStop
        disc = _exp_disc(z, x)
        y = x[2 * d:].reshape(k, 4)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            phi = disc(nodes)
            # d phi / d param = phi * d S / d param
            dS = powers + [1j * p for p in powers]
            for (alpha, s, _, _), g, p in zip(y, disc.gammas[0], disc.poles[0]):
                L = np.log(1.0 - nodes / p)
                dLdp = (nodes / p ** 2) / (1.0 - nodes / p)
                es = math.exp(min(max(s, -30.0), 30.0))
                dS += [g * dLdp * 1j * p, g * dLdp * es * np.exp(1j * alpha), L, 1j * L]
        tr.offer(disc, phi)
        if not np.all(np.isfinite(phi)):
            return 1e6, np.zeros_like(x)
        sd = A.signed_distance(phi)
        gsd = _planar_gradient(A.signed_distance, phi)
        sig = 0.5 * (1.0 + np.tanh(sd / (2 * tau * scale)))
        dsig = sig * (1.0 - sig) / (tau * scale)
        rd = _signed_region_distance(region, phi)
        grd = _planar_gradient(lambda p: _signed_region_distance(region, p), phi)
        bar, dbar = _barrier(rd, 1e-3 * scale)
        val = float(np.mean(sig) + mu * tau * scale * np.mean(bar))
        # chain rule for a real function g of the image: Re(conj(grad g) * dphi)
        w = dsig * np.conj(gsd) + mu * tau * scale * dbar * np.conj(grd)
        grad = np.array([np.mean(np.real(w * phi * ds)) for ds in dS])
        if not (math.isfinite(val) and np.all(np.isfinite(grad))):
            return 1e6, np.zeros_like(x)
        return val, grad

    x = x0
    per_stage = max(evals // len(_ANNEAL), 1)
    try:
        while True:
            for tau, mu in _ANNEAL:
                res = optimize.minimize(surrogate, x, args=(tau, mu), jac=True,
                                        method="L-BFGS-B", options={"maxfun": per_stage})
                if np.all(np.isfinite(res.x)):
                    x = res.x
            # budget left after convergence: re-anneal from a kicked endpoint
            x = x + rng.normal(0.0, 0.05, x.size)
    except _BudgetStop:
        pass
    return tr


def _exponential_ok(u, z, region):
    return (isinstance(u, ComplementIndicator) and hasattr(u.open_set, "signed_distance")
            and z.size == 1 and z[0] != 0 and not isinstance(region, ProductRegion))


def poisson_functional_estimate(u, z, region, budget=10_000, seed=0, degree=DEFAULT_DEGREE,
                                m=DEFAULT_M, family="auto", restart_evals=DEFAULT_RESTART_EVALS,
                                threads=1):
    """Upper bound for the Poisson functional of ``u`` at ``z``.

    Restart ``r`` draws its start from seed ``(seed, r)`` and spends exactly
    ``restart_evals`` evaluations (the last one whatever budget remains), so a
    larger budget only adds candidates.  The constant disc is always the
    first candidate.  ``family="auto"`` uses the exponential family when ``u``
    is a :class:`ComplementIndicator` of a set with a signed distance on a
    planar region and ``z != 0``; otherwise polynomial discs with Nelder-Mead
    on the raw average.
    """
    zarr = np.atleast_1d(np.asarray(z, dtype=complex))
    if zarr.size != _region_dim(region):
        raise ValueError("base point dimension does not match the region")
    pt = zarr[0] if zarr.size == 1 else zarr
    if not bool(region.contains(pt)):
        raise ValueError(f"base point {z} is not in the region")
    if family == "auto":
        family = EXPONENTIAL if _exponential_ok(u, zarr, region) else POLYNOMIAL
    if family == EXPONENTIAL and not _exponential_ok(u, zarr, region):
        raise ValueError("exponential discs need a planar region, z != 0 and a "
                         "ComplementIndicator integrand with a signed distance")

    const = DiscCandidate.constant(zarr)
    base_value = disc_boundary_average(u, const, m)
    budget = int(budget)
    plan = []
    left = budget - 1
    while left > 0:
        plan.append(min(restart_evals, left))
        left -= plan[-1]

    def run(item):
        r, evals = item
        rng = np.random.default_rng(streams.derive_seed(seed, r))
        if family == EXPONENTIAL:
            return _restart_exponential(u, zarr, region, m, evals, rng)
        return _restart_polynomial(u, zarr, region, m, evals, rng, degree)

    items = list(enumerate(plan))
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            trackers = list(ex.map(run, items))
    else:
        trackers = [run(it) for it in items]

    best_value, best_disc = base_value, const
    history = [base_value]
    for tr in trackers:  # index order breaks ties
        history.append(tr.best[0])
        if tr.best[1] is not None and tr.best[0] < best_value:
            best_value, best_disc = tr.best
    evaluations = 1 + sum(tr.evals for tr in trackers)
    return DiscFunctionalResult(best_value, best_disc, disc_feasibility(best_disc, region),
                                evaluations, seed, history)


# -- grid Dirichlet oracle on the unit disc ---------------------------------------------

@dataclass(frozen=True)
class DiscSubset:
    """An open subset ``T`` of the closed unit disc.

    ``sectors``: ``(rho, t0, t1)`` meaning ``{rho < |t| <= 1, arg t in (t0, t1)}``;
    ``discs``: ``(c, r)`` meaning ``{|t - c| < r}`` intersected with the closed disc.
    Both pieces are open in the closed disc; their traces on the circle make up
    the boundary part of ``T``.
    """

    sectors: tuple = ()
    discs: tuple = ()

    def __post_init__(self):
        for rho, t0, t1 in self.sectors:
            if not (0.0 <= rho < 1.0) or not t1 > t0:
                raise ValueError(f"malformed sector {(rho, t0, t1)}")
        for c, r in self.discs:
            if not r > 0:
                raise ValueError(f"malformed disc {(c, r)}")

    @classmethod
    def whole(cls):
        return cls(discs=((0j, 2.0),))

    def contains(self, t):
        t = np.asarray(t, dtype=complex)
        out = np.zeros(t.shape, dtype=bool)
        a = np.abs(t)
        ang = np.angle(t)
        for rho, t0, t1 in self.sectors:
            rel = np.mod(ang - t0, 2 * math.pi)
            out |= (a > rho) & (a <= 1.0) & (rel > 0) & (rel < t1 - t0)
        for c, r in self.discs:
            out |= (np.abs(t - c) < r) & (a <= 1.0)
        return out

    def trace_intervals(self):
        """Angular intervals (mod 2 pi) of ``T`` on the unit circle."""
        iv = []
        for _, t0, t1 in self.sectors:
            iv.append((t0, t1) if t1 - t0 < 2 * math.pi else (0.0, 2 * math.pi))
        for c, r in self.discs:
            c = complex(c)
            if abs(c) == 0:
                if r > 1:
                    iv.append((0.0, 2 * math.pi))
                continue
            # |e^{it} - c| < r  <=>  cos(t - arg c) > (1 + |c|^2 - r^2) / (2|c|)
            q = (1 + abs(c) ** 2 - r * r) / (2 * abs(c))
            if q < -1:
                iv.append((0.0, 2 * math.pi))
            elif q < 1:
                half = math.acos(q)
                mid = math.atan2(c.imag, c.real)
                iv.append((mid - half, mid + half))
        return iv

    def trace_measure(self):
        from .domains import ArcSet
        return ArcSet(make_unit_disc(), self.trace_intervals()).measure


def _first_crossing(x, y, dx, dy, circles):
    """Arm length along ``(dx, dy)`` to the first resolved circle, and which circle."""
    best = np.full(x.shape, np.inf)
    which = np.full(x.shape, -1)
    for k, (c, r) in enumerate(circles):
        px, py = x - c.real, y - c.imag
        b = px * dx + py * dy
        cc = px * px + py * py - r * r
        disc = b * b - cc
        sq = np.sqrt(np.maximum(disc, 0.0))
        # from inside (cc < 0) the exit root, from outside the entry root
        s = np.where(cc < 0, -b + sq, -b - sq)
        ok = (disc >= 0) & (s > 0) & (s < best)
        best = np.where(ok, s, best)
        which = np.where(ok, k, which)
    return best, which


def grid_relative_extremal(zero_set, h=0.01, zero_circles=(), trace=None):
    """Discrete harmonic measure on the unit disc: 0 on ``zero_set``, 1 on the circle.

    ``zero_set(points) -> bool`` marks where the value is fixed to 0.
    ``zero_circles`` lists ``(c, r)`` discs inside ``zero_set`` whose circles
    are resolved with Shortley-Weller arms, as is the unit circle; other parts
    of ``zero_set`` are staircased.  ``trace(theta) -> bool`` marks arcs of the
    unit circle carrying boundary value 0.  Returns a function evaluating the
    discrete solution (bilinear interpolation) at complex points.
    """
    n = int(round(2.0 / h)) + 1
    xs = np.linspace(-1.0, 1.0, n)
    h = xs[1] - xs[0]
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    P = X + 1j * Y
    inside = np.abs(P) < 1.0
    zero = inside & zero_set(P)
    free = inside & ~zero
    nf = int(free.sum())
    idx = -np.ones(P.shape, dtype=int)
    idx[free] = np.arange(nf)
    fi, fj = np.nonzero(free)
    x, y = xs[fi], xs[fj]
    circles = [(0j, 1.0)] + [(complex(c), float(r)) for c, r in zero_circles]

    rows, cols, vals = [np.arange(nf)], [np.arange(nf)], []
    diag = np.zeros(nf)
    rhs = np.zeros(nf)
    for dx, dy in ((1, 0), (0, 1)):
        arms, targets = [], []
        for sgn in (1, -1):
            s, which = _first_crossing(x, y, sgn * dx, sgn * dy, circles)
            ii = np.clip(fi + sgn * dx, 0, n - 1)
            jj = np.clip(fj + sgn * dy, 0, n - 1)
            # a neighbour on or past the unit circle always ends the arm
            cut = (s < h * (1 - 1e-9)) | ~inside[ii, jj]
            s = np.where(cut, np.clip(s, 1e-6 * h, h), h)
            value = np.zeros(nf)
            hit = (x + sgn * dx * s) + 1j * (y + sgn * dy * s)
            on_unit = cut & (which == 0)
            if trace is not None and on_unit.any():
                th = np.angle(hit[on_unit])
                value[on_unit] = np.where([trace(t) for t in th], 0.0, 1.0)
            else:
                value[on_unit] = 1.0
            # uncut links to staircased zero nodes carry value 0
            nb = np.where(cut, -1, idx[ii, jj])
            arms.append(s)
            targets.append((nb, value))
        sp_, sm = arms
        for s, (nb, value), other in ((sp_, targets[0], sm), (sm, targets[1], sp_)):
            coef = 2.0 / (s * (s + other))
            diag += coef
            link = nb >= 0
            rows.append(np.nonzero(link)[0])
            cols.append(nb[link])
            vals.append(-coef[link])
            rhs += np.where(link, 0.0, coef * value)
    A = sp.csr_matrix((np.concatenate([diag] + vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(nf, nf))
    U = np.full(P.shape, np.nan)
    U[zero] = 0.0
    U[free] = spla.spsolve(A.tocsc(), rhs)

    def evaluate(z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        fx = (z.real + 1.0) / h
        fy = (z.imag + 1.0) / h
        i0 = np.clip(np.floor(fx).astype(int), 0, n - 2)
        j0 = np.clip(np.floor(fy).astype(int), 0, n - 2)
        ax, ay = fx - i0, fy - j0
        num = np.zeros(z.shape)
        den = np.zeros(z.shape)
        for ci, cj, w in ((i0, j0, (1 - ax) * (1 - ay)), (i0 + 1, j0, ax * (1 - ay)),
                          (i0, j0 + 1, (1 - ax) * ay), (i0 + 1, j0 + 1, ax * ay)):
            v = U[ci, cj]
            ok = np.isfinite(v)
            num += np.where(ok, w * np.nan_to_num(v), 0.0)
            den += np.where(ok, w, 0.0)
        out = np.where(den > 0, num / np.where(den > 0, den, 1.0), 1.0)
        return np.where(zero_set(z) & (np.abs(z) < 1), 0.0, out)

    return evaluate



def rosay_identity_check(A, points, budget=10_000, seed=0, h=0.01, slack=0.05, threads=1):
    """Compare disc upper bounds of ``omega(z, A, E)`` with a grid Dirichlet solve.

    ``A`` is an :class:`OpenDiscUnion` inside the unit disc ``E``.  Each record
    holds the oracle value, the disc estimate, the gap, and whether
    ``oracle - tol <= estimate <= oracle + slack``, where ``tol`` allows for
    the grid and quadrature error (``h`` plus one quadrature node).
    """
    E = make_unit_disc()
    u = ComplementIndicator(A)
    covers_disc = any(abs(c) + 1.0 <= r for c, r in A.discs)
    if covers_disc:
        oracle = lambda z: np.zeros(np.shape(np.atleast_1d(z)))  # noqa: E731
    else:
        oracle = grid_relative_extremal(A.contains, h=h, zero_circles=A.discs)
    records = []
    tol = h + 1.0 / DEFAULT_M
    for k, z in enumerate(points):
        z = complex(z)
        ref = float(oracle(z)[0])
        res = poisson_functional_estimate(u, z, E, budget=budget,
                                          seed=streams.derive_seed(seed, k), threads=threads)
        gap = res.value - ref
        records.append({"z": z, "oracle": ref, "estimate": res.value, "gap": gap,
                        "evaluations": res.evaluations,
                        "passed": bool(-tol <= gap <= slack)})
    return records


def open_subset_check(T, h=0.01):
    """Check ``omega(0, T cap E, E) <= |circle minus T| / 2pi`` for an open ``T``.

    The left side comes from :func:`grid_relative_extremal`; it is
    deterministic, so its error allowance is the discretization slack only.
    """
    if not isinstance(T, DiscSubset):
        raise ValueError("T must be a DiscSubset")
    rhs = 1.0 - T.trace_measure() / (2 * math.pi)
    if T.contains(np.array([0j]))[0]:
        lhs = 0.0
    else:
        from .domains import ArcSet
        arcs = ArcSet(make_unit_disc(), T.trace_intervals())
        inner_discs = [(c, r) for c, r in T.discs if abs(c) + r < 1.0]
        sol = grid_relative_extremal(T.contains, h=h, zero_circles=inner_discs,
                                     trace=lambda th: bool(arcs.contains(th)))
        lhs = float(sol(0j)[0])
    return {"lhs": lhs, "rhs": rhs, "margin": rhs - lhs, "sigma": 0.0}


def random_disc_subsets(count, seed=0):
    """Random open subsets of the closed disc: sectors reaching the circle plus interior discs."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        sectors = []
        for _ in range(rng.integers(0, 4)):
            t0 = rng.uniform(0, 2 * math.pi)
            sectors.append((float(rng.uniform(0.05, 0.95)), t0, t0 + float(rng.uniform(0.1, 2.5))))
        discs = []
        for _ in range(rng.integers(0, 3)):
            c = complex(*rng.uniform(-0.9, 0.9, 2))
            discs.append((c, float(rng.uniform(0.05, 0.5))))
        if not sectors and not discs:
            sectors.append((0.5, 0.0, 1.0))
        out.append(DiscSubset(tuple(sectors), tuple(discs)))
    return out
