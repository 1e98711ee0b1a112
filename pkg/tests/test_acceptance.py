"""End-to-end acceptance checks at their stated tolerances.

Each test records a line through ``record_criterion``; the terminal summary
prints one pass/fail line per criterion with the measured numbers.
"""

import math
import time

import numpy as np
import pytest

from crosswedge.cross import CrossSpec, default_counts, sample_cross
from crosswedge.domains import (
    ArcSet,
    BoundaryPointType,
    classify_boundary_point,
    make_slit_square,
    make_unit_disc,
)
from crosswedge.extension import (
    certify_error,
    fit_extension,
    two_constants_report,
    uniqueness_check,
    vogel_points,
    wedge_probes,
)
from crosswedge.harmonic_measure import (
    GridSpec,
    OmegaOptions,
    boundary_limit_check,
    disc_omega_exact,
    omega_disc,
    omega_field,
    omega_wos,
    verify_level_identity,
    wos_level_set,
)
from crosswedge.poletsky import (
    ComplementIndicator,
    OpenDiscUnion,
    open_subset_check,
    poisson_functional_estimate,
    random_disc_subsets,
)
from oracles import radial_fd

RIGHT = (-math.pi / 2, math.pi / 2)
LEFT = (math.pi / 2, 3 * math.pi / 2)
HALVES = {"right": RIGHT, "left": LEFT}


def exp_sum(z, w):
    return np.exp(z + w)


def rational(z, w):
    return 1.0 / ((2.0 - z) * (2.0 - w))


FUNCTIONS = {"exp(z+w)": exp_sum, "1/((2-z)(2-w))": rational}


@pytest.fixture(scope="module")
def E():
    return make_unit_disc()


def half_spec(E, name):
    arc = HALVES[name]
    return CrossSpec(E, ArcSet(E, [arc]), E, ArcSet(E, [arc]))


def test_c01_disc_closed_forms(E, record_criterion):
    t0 = time.perf_counter()
    errs = [abs(omega_disc(0j, ArcSet(E, [(0.0, th)])).value - (1 - th / (2 * math.pi)))
            for th in (math.pi / 6, math.pi / 2, math.pi, 3 * math.pi / 2)]
    dt = time.perf_counter() - t0
    ok = max(errs) < 1e-10 and dt < 1.0
    record_criterion(1, "disc closed forms", ok, f"max err {max(errs):.2e}, {dt:.3f} s")
    assert ok


def test_c02_wos_consistency(E, record_criterion):
    A = ArcSet(E, [(0.0, math.pi)])
    t0 = time.perf_counter()
    worst_sig, worst_se = 0.0, 0.0
    for k, z in enumerate(vogel_points(10, 0.9)):
        est = omega_wos(z, E, A, n=100_000, seed=k, threads=8)
        ref = omega_disc(z, A).value
        worst_sig = max(worst_sig, abs(est.value - ref) / est.stderr)
        worst_se = max(worst_se, est.stderr)
    dt = time.perf_counter() - t0
    ok = worst_sig <= 3 and worst_se < 0.005 and dt < 10
    record_criterion(2, "walk on spheres vs quadrature", ok,
                     f"max |err|/stderr {worst_sig:.2f}, max stderr {worst_se:.4f}, {dt:.1f} s")
    assert ok


def test_c03_level_set_identity(E, record_criterion):
    A = ArcSet(E, [(0.0, math.pi)])
    # ten points of D_0.5 with omega bounded away from 0 and from the level
    pts = [z for z in vogel_points(200, 0.9) if 0.15 < disc_omega_exact(z, A) < 0.45][::4][:10]
    assert len(pts) == 10
    t0 = time.perf_counter()
    recs = []
    for eps in (0.25, 0.5):
        recs += verify_level_identity(E, A, eps, pts, n=100_000, seed=11, threads=8)
    dt = time.perf_counter() - t0
    worst = max(r["rel_err"] for r in recs)
    ok = worst < 0.02 and dt < 60
    record_criterion(3, "level-set identity", ok,
                     f"{len(recs)} cases, max rel err {worst:.4f}, {dt:.1f} s")
    assert ok


def test_c04_boundary_limit(E, record_criterion):
    approach = [1 - 2.0 ** -k for k in range(1, 13)]
    disc = boundary_limit_check(E, ArcSet(E, [RIGHT]), 0.0, approach)
    S = make_slit_square(0.5)
    A = ArcSet(S, [(8.0, 10.0)])
    o = OmegaOptions(n=4000, seed=5)
    up = boundary_limit_check(S, A, 8.5, [1j * 2.0 ** -k for k in range(1, 13)], o)
    down = boundary_limit_check(S, A, 9.5, [-1j * 2.0 ** -k for k in range(1, 13)], o)
    for label, rep in (("disc", disc), ("slit, upper side", up), ("slit, lower side", down)):
        record_criterion(4, f"boundary limit, {label}", rep["passed"],
                         f"omega at k=12: {rep['final']:.4f} +- {rep['stderr'][-1]:.4f}")
    assert disc["passed"] and up["passed"] and down["passed"]


def test_c05_open_subset_inequality(record_criterion):
    reps = [open_subset_check(T, h=0.02) for T in random_disc_subsets(50, seed=0)]
    margins = [r["margin"] for r in reps]
    hard = sum(r["margin"] < -(3 * r["sigma"] + 1e-2) for r in reps)
    record_criterion(5, "open-subset inequality, 50 random T", hard == 0,
                     f"min margin {min(margins):.4f}, violations {hard}")
    assert hard == 0


def test_c06_disc_optimizer(E, record_criterion):
    z, r = 0.5, 0.25
    exact = math.log(abs(z) / r) / math.log(1 / r)
    oracle = radial_fd(r, z, 8000)
    sigma_oracle = abs(oracle - radial_fd(r, z, 4000))
    assert abs(oracle - exact) < 1e-4
    u = ComplementIndicator(OpenDiscUnion(((0j, r),)))
    t0 = time.perf_counter()
    res = poisson_functional_estimate(u, z, E, budget=10_000, seed=0)
    dt = time.perf_counter() - t0
    ok = oracle - 3 * sigma_oracle <= res.value <= 0.55 and dt < 30
    record_criterion(6, "disc optimizer on the annulus", ok,
                     f"estimate {res.value:.4f} (oracle {oracle:.6f}), "
                     f"{res.evaluations} evaluations, {dt:.1f} s")
    assert ok


def test_c07_type_classification(record_criterion):
    S = make_slit_square(0.5)
    rng = np.random.default_rng(0)
    square_t = rng.uniform(0.0, 8.0, 2000)
    slit_t = rng.uniform(8.0, 10.0, 2000)
    slit_t = slit_t[(slit_t != 9.0)]
    pts = S.boundary_point(slit_t)
    assert np.all(np.abs(pts.imag) == 0) and np.all(np.abs(pts.real) < 0.5)
    bad1 = sum(classify_boundary_point(S, t) is not BoundaryPointType.TYPE1 for t in square_t)
    bad2 = sum(classify_boundary_point(S, t) is not BoundaryPointType.TYPE2 for t in slit_t)
    record_criterion(7, "slit-square boundary types", bad1 == bad2 == 0,
                     f"{square_t.size} square points, {slit_t.size} slit points, "
                     f"misclassified {bad1} + {bad2}")
    assert bad1 == bad2 == 0


@pytest.mark.parametrize("fname", list(FUNCTIONS))
@pytest.mark.parametrize("half", list(HALVES))
def test_c08_certified_continuation(E, half, fname, record_criterion):
    f = FUNCTIONS[fname]
    spec = half_spec(E, half)
    t0 = time.perf_counter()
    fit = fit_extension(sample_cross(spec, f, default_counts(spec, 2000), seed=0), 12, 12)
    violations = []
    for z, w in wedge_probes(spec, 100, seed=1):
        c = certify_error(fit, spec, z, w)
        err = abs(c.value - f(z, w))
        if err > c.bound:
            violations.append(err / c.bound)
    dt = time.perf_counter() - t0
    ok = not violations and fit.eps_W <= 1e-4 and dt < 60
    worst = f", worst err/bound {max(violations):.2f}" if violations else ""
    record_criterion(8, f"{fname}, {half} half circles", ok,
                     f"eps_W {fit.eps_W:.2e}, bound violations {len(violations)}/100{worst}, "
                     f"{dt:.1f} s")
    assert ok


@pytest.mark.parametrize("fname", list(FUNCTIONS))
@pytest.mark.parametrize("half", list(HALVES))
def test_c09_two_constants(E, half, fname, record_criterion):
    rep = two_constants_report(FUNCTIONS[fname], half_spec(E, half))
    ok = rep["checked"] > 0 and not rep["violations"]
    record_criterion(9, f"{fname}, {half} half circles", ok,
                     f"{rep['checked']} wedge points of 441, max excess {rep['max_excess']:.2e}")
    assert ok


@pytest.mark.parametrize("fname", list(FUNCTIONS))
@pytest.mark.parametrize("half", list(HALVES))
def test_c10_uniqueness(E, half, fname, record_criterion):
    spec = half_spec(E, half)
    probes = wedge_probes(spec, 50, seed=7)
    rep = uniqueness_check(spec, FUNCTIONS[fname], 100, 200, 12, 12,
                           default_counts(spec, 2000), probes)
    n_bad = sum(not r["passed"] for r in rep["records"])
    ok = rep["passed"] and len(rep["records"]) == 50
    worst = max(r["difference"] / r["allowance"] for r in rep["records"])
    record_criterion(10, f"{fname}, {half} half circles", ok,
                     f"{len(rep['records'])} probes, disagreements {n_bad}, "
                     f"max diff/allowance {worst:.3f}")
    assert ok


def test_c11_thread_determinism(E, record_criterion):
    S = make_slit_square(0.5)
    A = ArcSet(S, [(8.0, 10.0)])
    H = ArcSet(E, [(0.0, math.pi)])
    u = ComplementIndicator(OpenDiscUnion(((0j, 0.25),)))
    runs = {
        "walk on spheres": lambda t: omega_wos(0.3 + 0.4j, S, A, n=50_000, seed=1, threads=t),
        "omega field": lambda t: omega_field(S, A, GridSpec(6, 6),
                                             OmegaOptions(n=2000, seed=2, threads=t)).values.tobytes(),
        "level-set walks": lambda t: wos_level_set(0.2j, E, H, 0.3,
                                                   lambda p: disc_omega_exact(p, H), 20_000,
                                                   seed=3, threads=t),
        "disc optimizer": lambda t: poisson_functional_estimate(u, 0.5, E, budget=1500, seed=4,
                                                                threads=t).value,
    }
    ok = True
    for label, fn in runs.items():
        outs = [fn(t) for t in (1, 4, 8)]
        same = outs[0] == outs[1] == outs[2]
        record_criterion(11, label, same, "identical at 1/4/8 threads" if same else "differs")
        ok &= same
    assert ok
