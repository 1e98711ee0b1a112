import math

import numpy as np
import pytest
from scipy.optimize import brentq

from crosswedge.domains import ArcSet, make_polygon, make_slit_square, make_unit_disc
from crosswedge.harmonic_measure import (
    QUADRATURE,
    WOS,
    GridSpec,
    LevelSetSpec,
    OmegaOptions,
    Verdict,
    boundary_limit_check,
    disc_omega_exact,
    level_set_contains,
    omega,
    omega_disc,
    omega_field,
    omega_wos,
    verify_level_identity,
)
from oracles import poisson_integral_mp, slit_square_fd

HALF = math.pi


@pytest.fixture(scope="module")
def disc():
    return make_unit_disc()


@pytest.fixture(scope="module")
def upper(disc):
    return ArcSet(disc, [(0.0, HALF)])


def complement_intervals(A):
    C = A.complement()
    return [(s, e) for s, e in C.intervals] if not C.full else [(0.0, 2 * math.pi)]


class TestOmegaDisc:
    def test_empty_arc_set_gives_one(self, disc):
        est = omega_disc(0j, ArcSet.empty(disc))
        assert est.value == 1.0 and est.stderr == 0.0

    def test_full_circle_gives_zero(self, disc):
        assert omega_disc(0j, ArcSet.entire(disc)).value == 0.0

    def test_half_circle_at_origin(self, upper):
        assert omega_disc(0j, upper).value == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("z", [0.5, 0.3 + 0.4j, -0.7j, 0.95 + 0.1j, -0.2 - 0.2j])
    def test_matches_high_precision_quadrature(self, disc, z):
        A = ArcSet(disc, [(-math.pi / 2, math.pi / 2)])
        ref = poisson_integral_mp(complex(z), complement_intervals(A))
        est = omega_disc(z, A)
        assert 0 < est.value < 1
        assert est.value == pytest.approx(ref, abs=1e-9)
        assert est.method == QUADRATURE and est.stderr == 0.0

    def test_closed_form_agrees_with_quadrature(self, disc):
        A = ArcSet(disc, [(0.3, 1.2), (2.0, 4.5)])
        rng = np.random.default_rng(5)
        r = np.sqrt(rng.uniform(0, 0.98, 20))
        z = r * np.exp(2j * math.pi * rng.uniform(size=20))
        exact = disc_omega_exact(z, A)
        quad = np.array([omega_disc(p, A).value for p in z])
        assert np.max(np.abs(exact - quad)) < 1e-9

    def test_outside_raises(self, upper):
        with pytest.raises(ValueError):
            omega_disc(1.0, upper)

    def test_sub_mean_value(self, upper):
        # omega is harmonic away from the boundary: the circle average equals the centre value
        z, r = 0.2 + 0.1j, 0.3
        ring = z + r * np.exp(2j * math.pi * np.arange(64) / 64)
        avg = np.mean([omega_disc(p, upper).value for p in ring])
        assert omega_disc(z, upper).value <= avg + 1e-6

    def test_monotone_in_arc_set(self, disc):
        small = ArcSet(disc, [(0.5, 1.5)])
        big = ArcSet(disc, [(0.2, 2.5), (4.0, 5.0)])
        for z in (0j, 0.4 + 0.3j, -0.6j):
            assert omega_disc(z, big).value <= omega_disc(z, small).value + 1e-12


class TestWalkOnSpheres:
    def test_disc_half_circle(self, disc, upper):
        est = omega_wos(0j, disc, upper, n=100_000, seed=11)
        assert abs(est.value - 0.5) < 3 * est.stderr
        assert est.method == WOS

    def test_entire_boundary(self):
        d = make_slit_square(0.5)
        est = omega_wos(0.3j, d, ArcSet.entire(d), n=2000)
        assert est.value == 0.0 and est.stderr == 0.0

    def test_slit_square_against_grid_solve(self):
        d = make_slit_square(0.5)
        A = ArcSet(d, [(8.0, 10.0)])  # both sides of the slit
        x, U = slit_square_fd(0.5, 0.005, on_square=1.0, on_slit=0.0)
        j = int(np.argmin(np.abs(x - 0.5)))
        i = int(np.argmin(np.abs(x - 0.0)))
        ref = U[j, i]
        est = omega_wos(0.5j, d, A, n=20_000, seed=2)
        assert abs(est.value - ref) < 3 * est.stderr + 1e-2

    def test_outside_raises(self, disc, upper):
        with pytest.raises(ValueError):
            omega_wos(2.0, disc, upper)

    def test_thread_count_does_not_change_result(self):
        d = make_slit_square(0.5)
        A = ArcSet(d, [(8.0, 9.0)])
        runs = [omega_wos(0.2 + 0.3j, d, A, n=20_000, seed=9, threads=t) for t in (1, 4, 8)]
        assert runs[0] == runs[1] == runs[2]

    def test_rerun_is_bit_identical(self):
        d = make_slit_square(0.5)
        A = ArcSet(d, [(0.0, 4.0)])
        assert omega_wos(-0.4j, d, A, n=5000, seed=3) == omega_wos(-0.4j, d, A, n=5000, seed=3)

    def test_monotone_in_arc_set(self):
        d = make_polygon([0, 2, 2 + 1j, 1 + 0.4j, 2j])
        small = ArcSet(d, [(0.0, 1.5)])
        big = ArcSet(d, [(0.0, 3.0)])
        for z in (0.5 + 0.3j, 0.4 + 1.2j):
            a = omega_wos(z, d, big, n=20_000, seed=1)
            b = omega_wos(z, d, small, n=20_000, seed=1)
            assert a.value <= b.value + 3 * math.hypot(a.stderr, b.stderr)


class TestDispatchAndField:
    def test_dispatch(self, disc, upper):
        assert omega(0.1, disc, upper).method == QUADRATURE
        tri = make_polygon([0, 1, 1j])
        A = ArcSet(tri, [(0.0, 1.0)])
        assert omega(0.2 + 0.2j, tri, A, OmegaOptions(n=500)).method == WOS

    def test_outside_point(self, disc, upper):
        with pytest.raises(ValueError):
            omega(1.5j, disc, upper)
        tri = make_polygon([0, 1, 1j])
        with pytest.raises(ValueError):
            omega(0.9 + 0.9j, tri, ArcSet(tri, [(0.0, 1.0)]))

    def test_full_and_empty(self, disc):
        grid = GridSpec(11, 11)
        assert np.all(omega_field(disc, ArcSet.entire(disc), grid).values[
            omega_field(disc, ArcSet.entire(disc), grid).inside] == 0.0)
        f = omega_field(disc, ArcSet.empty(disc), grid)
        assert np.all(f.values[f.inside] == 1.0)
        assert np.all(np.isnan(f.values[~f.inside]))

    def test_reflection_antisymmetry(self, disc, upper):
        f = omega_field(disc, upper, GridSpec(11, 11))
        # rows are y-ordered and symmetric about y = 0
        v = f.values
        flipped = v[::-1, :]
        mask = f.inside & f.inside[::-1, :]
        assert np.allclose(v[mask], 1.0 - flipped[mask], atol=1e-9)

    def test_csv_columns(self, disc, upper, tmp_path):
        f = omega_field(disc, upper, GridSpec(5, 5))
        path = tmp_path / "field.csv"
        f.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "x,y,omega,stderr,method"
        assert len(lines) == 1 + int(f.inside.sum())

    def test_field_threads_identical(self):
        d = make_slit_square(0.5)
        A = ArcSet(d, [(8.0, 10.0)])
        g = GridSpec(4, 4, (-0.9, 0.9, -0.9, 0.9))
        a = omega_field(d, A, g, OmegaOptions(n=300, seed=4, threads=1))
        b = omega_field(d, A, g, OmegaOptions(n=300, seed=4, threads=4))
        assert np.array_equal(a.values, b.values, equal_nan=True)


class TestLevelSets:
    def test_eps_zero(self, disc, upper):
        ls = LevelSetSpec(disc, upper, 0.0)
        assert level_set_contains(ls, 0.3 - 0.2j).verdict is Verdict.IN

    def test_half_circle_thresholds(self, disc, upper):
        assert level_set_contains(LevelSetSpec(disc, upper, 0.6), 0j).verdict is Verdict.OUT
        assert level_set_contains(LevelSetSpec(disc, upper, 0.3), 0j).verdict is Verdict.IN

    def test_uncertain_is_reported(self):
        d = make_slit_square(0.5)
        A = ArcSet(d, [(8.0, 10.0)])
        ref = omega_wos(0.5j, d, A, n=200, seed=0)
        ls = LevelSetSpec(d, A, 1.0 - ref.value)
        assert level_set_contains(ls, 0.5j, OmegaOptions(n=200, seed=0)).verdict is Verdict.UNCERTAIN

    def test_bad_eps(self, disc, upper):
        with pytest.raises(ValueError):
            LevelSetSpec(disc, upper, 1.0)

    def test_monotone_in_eps(self, disc, upper):
        pts = 0.9 * np.exp(2j * math.pi * np.arange(12) / 12) * np.linspace(0.1, 1, 12)
        for z in pts:
            inside = [level_set_contains(LevelSetSpec(disc, upper, e), z).verdict is Verdict.IN
                      for e in (0.1, 0.3, 0.5)]
            assert inside == sorted(inside, reverse=True)


class TestLevelIdentity:
    def test_point_with_omega_03(self, disc, upper):
        y = brentq(lambda t: omega_disc(1j * t, upper).value - 0.3, -0.99, 0.99)
        z = 1j * y
        assert omega_disc(z, upper).value == pytest.approx(0.3, abs=1e-9)
        (rec,) = verify_level_identity(disc, upper, 0.5, [z], n=100_000, seed=1)
        assert rec["rhs"] == pytest.approx(0.6, abs=1e-9)
        assert rec["lhs"] == pytest.approx(0.6, rel=0.02)
        assert rec["verdict"] == "pass"

    def test_several_points_within_two_percent(self, disc):
        A = ArcSet(disc, [(0.0, 2.0), (3.0, 4.0)])
        pts = [0.1 + 0.2j, -0.3 + 0.1j, -0.4 - 0.3j, 0.5 + 0.3j]
        for rec in verify_level_identity(disc, A, 0.25, pts, n=100_000, seed=5):
            assert rec["rel_err"] < 0.02

    def test_small_eps_reduces_to_omega(self, disc, upper):
        (rec,) = verify_level_identity(disc, upper, 1e-9, [0.2 + 0.1j], n=50_000, seed=2)
        assert rec["rhs"] == pytest.approx(omega_disc(0.2 + 0.1j, upper).value, abs=1e-8)
        assert abs(rec["lhs"] - rec["rhs"]) < 3 * rec["lhs_stderr"] + 2e-3

    def test_entire_boundary(self, disc):
        A = ArcSet.entire(disc)
        for eps in (0.1, 0.7):
            (rec,) = verify_level_identity(disc, A, eps, [0.4j], n=1000)
            assert rec["lhs"] == 0.0 and rec["rhs"] == 0.0

    def test_point_outside_level_set(self, disc, upper):
        with pytest.raises(ValueError):
            verify_level_identity(disc, upper, 0.6, [0j], n=100)

    def test_non_disc_needs_evaluator(self):
        d = make_slit_square(0.5)
        with pytest.raises(ValueError):
            verify_level_identity(d, ArcSet(d, [(8.0, 10.0)]), 0.2, [0.5j], n=100)


class TestBoundaryLimit:
    def test_disc_radial_approach(self, disc):
        A = ArcSet(disc, [(-math.pi / 2, math.pi / 2)])
        approach = [1 - 2.0 ** -k for k in range(1, 13)]
        rep = boundary_limit_check(disc, A, 0.0, approach)
        assert rep["final"] < 0.05 and rep["passed"] and rep["monotone"]
        assert rep["decreasing_fraction"] == 1.0

    def test_slit_two_sided(self):
        d = make_slit_square(0.5)
        A = ArcSet(d, [(8.0, 10.0)])
        t_up, t_down = 8.0 + 0.5, 9.0 + 0.5  # both parametrize the slit point 0
        opts = OmegaOptions(n=4000, seed=3)
        up = boundary_limit_check(d, A, t_up, [1j * 2.0 ** -k for k in range(1, 9)], opts)
        down = boundary_limit_check(d, A, t_down, [-1j * 2.0 ** -k for k in range(1, 9)], opts)
        assert up["passed"] and down["passed"]
        assert up["zeta"] == pytest.approx(0) and down["zeta"] == pytest.approx(0)

    def test_point_not_in_arc_set(self, disc, upper):
        with pytest.raises(ValueError):
            boundary_limit_check(disc, upper, 4.0, [-0.5j, -0.9j])
