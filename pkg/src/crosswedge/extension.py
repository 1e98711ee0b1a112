"""Extension of cross functions to the wedge by tensor least squares.

A fit ``sum c[j, k] z^j w^k`` to samples on the cross is certified on the
wedge by the two-constants estimate applied to the difference between the
fit and the true extension: that difference is at most ``eps_AB`` on
``A x B`` and ``eps_W`` on the cross, hence at most
``eps_AB^(1 - omega) eps_W^omega`` at a wedge point with ``omega`` the
harmonic-measure sum.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cross import AB, classify_sum, omega_sum, sample_cross
from .domains import DISC
from .export import write_csv, write_json
from .harmonic_measure import Verdict

BASIS = "monomial"
DEFAULT_RIDGE = 1e-10
MIN_SAMPLE_RATIO = 4
EPS_INFLATION = 2.0
MAX_CONDITION = 1e14


@dataclass(frozen=True)
class TensorFit:
    degrees: tuple
    coefficients: np.ndarray    # shape (p + 1, q + 1)
    eps_W: float
    eps_AB: float
    M: float
    sup_AB: float
    condition: float
    ridge: float
    seed: Optional[int] = None
    domains: Optional[dict] = None
    basis: str = BASIS

    def to_dict(self):
        c = self.coefficients
        return {"degrees": list(self.degrees), "basis": self.basis,
                "coefficients": {"re": c.real.tolist(), "im": c.imag.tolist()},
                "eps_W": self.eps_W, "eps_AB": self.eps_AB, "M": self.M,
                "sup_AB": self.sup_AB, "ridge": self.ridge, "condition": self.condition,
                "seed": self.seed, "domains": self.domains}

    def to_json(self, path):
        write_json(path, self.to_dict())


@dataclass(frozen=True)
class CertifiedValue:
    value: complex
    omega_sum: float
    omega_stderr: float
    bound: float
    magnitude_bound: float


def _vandermonde(z, deg):
    return np.asarray(z, dtype=complex)[:, None] ** np.arange(deg + 1)


def _design(z, w, p, q):
    Vz, Vw = _vandermonde(z, p), _vandermonde(w, q)
    return (Vz[:, :, None] * Vw[:, None, :]).reshape(len(Vz), -1)


def _residuals(c, z, w, values):
    p, q = c.shape[0] - 1, c.shape[1] - 1
    return np.abs(_evaluate(c, z, w, p, q) - values)


def _evaluate(c, z, w, p, q):
    Vz, Vw = _vandermonde(z, p), _vandermonde(w, q)
    return np.einsum("nj,jk,nk->n", Vz, c, Vw)


def fit_extension(samples, p, q, ridge=DEFAULT_RIDGE):
    """Ridge least squares in the monomial tensor basis on the unit bidisc."""
    spec = samples.spec
    if spec.D.kind != DISC or spec.G.kind != DISC:
        raise ValueError("tensor fits are implemented for the unit bidisc only")
    counts = samples.counts()
    if min(counts.values()) == 0:
        raise ValueError(f"every stratum needs samples, got {counts}")
    ncoef = (p + 1) * (q + 1)
    if samples.values.size < MIN_SAMPLE_RATIO * ncoef:
        raise ValueError(f"{samples.values.size} samples for {ncoef} coefficients; "
                         f"need at least {MIN_SAMPLE_RATIO} per coefficient")
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")
    V = _design(samples.z, samples.w, p, q)
    rhs = samples.values
    if ridge > 0:
        V = np.vstack([V, math.sqrt(ridge) * np.eye(ncoef)])
        rhs = np.concatenate([rhs, np.zeros(ncoef)])
    sol, _, rank, sv = np.linalg.lstsq(V, rhs, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    if rank < ncoef or cond > MAX_CONDITION:
        raise ValueError(f"least-squares system is rank deficient (rank {rank}/{ncoef}, "
                         f"condition {cond:.3g}); raise the ridge or lower the degrees")
    c = sol.reshape(p + 1, q + 1)
    res = _residuals(c, samples.z, samples.w, samples.values)
    ab = samples.stratum == AB
    return TensorFit((p, q), c, EPS_INFLATION * float(res.max()),
                     EPS_INFLATION * float(res[ab].max()), samples.sup_W, samples.sup_AB,
                     cond, ridge, samples.seed, spec.descriptor())


def evaluate(fit, z, w):
    """Fitted extension at ``(z, w)``; scalars give a complex number, arrays an array."""
    zz, ww = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
    out = _evaluate(fit.coefficients, zz.ravel(), ww.ravel(), *fit.degrees).reshape(zz.shape)
    return complex(out) if out.ndim == 0 else out


def two_constants(small, large, om):
    """``small^(1 - om) * large^om`` with ``0^0 = 1``."""
    if om >= 1.0:
        return large
    if small == 0.0:
        return 0.0
    return small ** (1.0 - om) * large ** om


def certify_error(fit, spec, z, w, sigmas=3.0):
    """Error bound at a wedge point, evaluated at ``omega_sum + 3 sigma``."""
    est = omega_sum(spec, z, w)
    if classify_sum(est.value, est.stderr, sigmas) is not Verdict.IN:
        raise ValueError(f"({z}, {w}) is not certainly in the wedge "
                         f"(omega sum {est.value:.6g} +- {est.stderr:.2g})")
    om = min(est.value + sigmas * est.stderr, 1.0)
    return CertifiedValue(evaluate(fit, z, w), est.value, est.stderr,
                          two_constants(fit.eps_AB, fit.eps_W, om),
                          two_constants(fit.sup_AB, fit.M, om))


def write_certification_csv(path, records):
    """Records with keys z, w, omega_sum, bound and optionally actual_err."""
    rows = ((r["z"].real, r["z"].imag, r["w"].real, r["w"].imag, r["omega_sum"], r["bound"],
             r.get("actual_err", "")) for r in records)
    write_csv(path, ["x_z", "y_z", "x_w", "y_w", "omega_sum", "bound", "actual_err"], rows)


# -- reports -----------------------------------------------------------------------------

def vogel_points(n, radius=0.95):
    """``n`` quasi-uniform points of the disc ``|z| <= radius`` on a golden-angle spiral."""
    k = np.arange(n)
    return radius * np.sqrt((k + 0.5) / n) * np.exp(1j * k * math.pi * (3.0 - math.sqrt(5.0)))


def wedge_probes(spec, n, seed=0, max_tries=None):
    """``n`` random pairs of interior points certainly inside the wedge."""
    rng = np.random.default_rng(seed)
    out = []
    tries = 0
    max_tries = max_tries or 200 * n
    while len(out) < n and tries < max_tries:
        tries += 1
        z = complex(*rng.uniform(-1, 1, 2))
        w = complex(*rng.uniform(-1, 1, 2))
        if not (spec.D.contains(z) and spec.G.contains(w)):
            continue
        est = omega_sum(spec, z, w)
        if est.value + 3 * est.stderr < 1.0 - 1e-9:
            out.append((z, w))
    if len(out) < n:
        raise ValueError(f"found only {len(out)} wedge points in {max_tries} tries")
    return out


def boundary_sup_norms(f, spec, n=400):
    """``(|f|_{A x B}, |f|_W)`` for ``f`` holomorphic near the closed bidisc.

    By the maximum principle in the free variable, the sup over ``A x G`` is
    reached on ``A x circle`` (and symmetrically), so both norms are maxima
    over products of boundary parameter grids.
    """
    def arc_grid(arcs):
        out = []
        for s, e in arcs.intervals:
            out.append(np.linspace(s, e, n))
        return np.exp(1j * np.concatenate(out))

    full = np.exp(2j * math.pi * np.arange(4 * n) / (4 * n))
    za, wb = arc_grid(spec.A), arc_grid(spec.B)
    ab = np.abs(f(za[:, None], wb[None, :])).max()
    ag = np.abs(f(za[:, None], full[None, :])).max()
    db = np.abs(f(full[:, None], wb[None, :])).max()
    return float(ab), float(max(ab, ag, db))


def two_constants_report(target, spec, points=None, slack=1e-9, n_boundary=400):
    """Check ``|f(z, w)| <= |f|_{AxB}^(1-omega) |f|_W^omega`` on wedge points.

    ``target`` is a callable ``f(z, w)`` holomorphic near the closed bidisc, or
    a :class:`TensorFit` (its stored empirical norms are used).  ``points``
    defaults to the 21 x 21 product of golden-spiral points of ``D`` and
    ``G``; points not certainly in the wedge are skipped.  The exponent is
    taken at ``omega_sum + 3 sigma``, the direction that loosens the bound
    since ``|f|_{AxB} <= |f|_W``.
    """
    if isinstance(target, TensorFit):
        f = lambda z, w: evaluate(target, z, w)  # noqa: E731
        small, large = target.sup_AB, target.M
    else:
        f = target
        small, large = boundary_sup_norms(target, spec, n_boundary)
    if points is None:
        zs, ws = vogel_points(21), vogel_points(21)
        points = [(z, w) for z in zs for w in ws]
    checked, violations = 0, []
    worst = -math.inf
    for z, w in points:
        est = omega_sum(spec, z, w)
        if classify_sum(est.value, est.stderr) is not Verdict.IN:
            continue
        om = min(est.value + 3 * est.stderr, 1.0)
        lhs = abs(complex(f(np.asarray(z), np.asarray(w))))
        rhs = two_constants(small, large, om)
        checked += 1
        worst = max(worst, lhs - rhs)
        if lhs > rhs + slack:
            violations.append({"z": z, "w": w, "omega_sum": est.value, "lhs": lhs, "rhs": rhs})
    return {"sup_AB": small, "sup_W": large, "checked": checked, "violations": violations,
            "max_excess": worst}


def uniqueness_check(spec, f, seed1, seed2, p, q, counts, probes, ridge=DEFAULT_RIDGE):
    """Two fits from independent samplings must agree within their summed certificates."""
    fits = [fit_extension(sample_cross(spec, f, counts, seed), p, q, ridge)
            for seed in (seed1, seed2)]
    records, excluded = [], 0
    for z, w in probes:
        est = omega_sum(spec, z, w)
        if classify_sum(est.value, est.stderr) is not Verdict.IN:
            excluded += 1
            continue
        c1, c2 = (certify_error(fit, spec, z, w) for fit in fits)
        diff = abs(c1.value - c2.value)
        records.append({"z": z, "w": w, "omega_sum": est.value, "difference": diff,
                        "allowance": c1.bound + c2.bound,
                        "passed": bool(diff <= c1.bound + c2.bound)})
    return {"records": records, "excluded": excluded,
            "passed": all(r["passed"] for r in records), "fits": fits}


def analytic_residual_sups(fit, f, spec, n=400):
    """``(sup_{AxB}, sup_W)`` of ``|fit - f|`` on boundary grids, for analytic ``f``.

    These are the quantities ``eps_AB`` and ``eps_W`` estimate from samples;
    comparing the two measures how far the sample-based estimate falls short.
    """
    return boundary_sup_norms(lambda z, w: evaluate(fit, z, w) - f(z, w), spec, n)
