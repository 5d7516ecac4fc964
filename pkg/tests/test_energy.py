"""Cutoffs, energy-inequality sides, and the embedding-constant fits."""

import numpy as np
import pytest

import parabound as pb
from parabound import BoundaryError, ConfigError, GridTooCoarse
from parabound.cylinders import Cylinder, ShrinkSchedule, cylinder_mask
from parabound.energy import (Cutoff, build_cutoff, caccioppoli_sides,
                              combined_energy_bound, lateral_boundary_max,
                              sobolev_sides)

G1 = pb.Grid(dim=1, extent=1.0, nx=41, nt=11, dt=0.02)


# ---- cutoff construction ---------------------------------------------------

def test_cutoff_validation():
    with pytest.raises(ConfigError):
        Cutoff(Cylinder(1.0, 0.1), Cylinder(2.0, 0.2), "weird", 1.0, 1.0)
    with pytest.raises(ConfigError):
        Cutoff(Cylinder(2.0, 0.1), Cylinder(1.0, 0.2), "full", 1.0, 1.0)


def test_cutoff_is_one_inside_and_zero_on_parabolic_boundary():
    sched = ShrinkSchedule(sigma=0.5, base=Cylinder(1.0, 0.1))
    cut = build_cutoff(sched, 0, kind="full", grid=G1)
    z = cut.values(G1)
    assert z.min() >= 0.0 and z.max() <= 1.0
    r = G1.radius()
    t = G1.t_axis()
    inside = (r[:, None] <= cut.inner.rho + 1e-12) \
        & (t[None, :] >= -cut.inner.theta - 1e-12)
    assert np.allclose(z[inside], 1.0)
    lateral = r[:, None] >= cut.outer.rho - 1e-12
    initial = np.broadcast_to(t[None, :] <= -cut.outer.theta - 1e-12,
                              z.shape)
    assert np.allclose(z[lateral | initial], 0.0)


def test_cutoff_gradient_bounds_sampled():
    # the advertised bounds hold node-wise for every step and sigma
    for sigma in (0.25, 0.5, 0.75):
        sched = ShrinkSchedule(sigma=sigma, base=Cylinder(1.0, 0.1))
        for i in range(9):
            cut = build_cutoff(sched, i, kind="full")
            grad = cut.grad_magnitude(G1)
            dt = cut.time_derivative(G1)
            assert grad.max() <= cut.grad_bound * (1 + 1e-12)
            assert np.abs(dt).max() <= cut.dt_bound * (1 + 1e-12)
            lat = build_cutoff(sched, i, kind="lateral")
            assert lat.grad_magnitude(G1).max() <= lat.grad_bound * (1 + 1e-12)
            assert (lat.time_derivative(G1) == 0.0).all()


def test_cutoff_gradient_bound_is_attained():
    # fine grid puts nodes inside the transition band; the linear ramp
    # then realizes its advertised max slope exactly
    fine = pb.Grid(dim=1, extent=1.0, nx=321, nt=11, dt=0.02)
    sched = ShrinkSchedule(sigma=0.5, base=Cylinder(1.0, 0.1))
    for i in range(3):
        cut = build_cutoff(sched, i, kind="full", grid=fine)
        assert cut.grad_magnitude(fine).max() == pytest.approx(cut.grad_bound)


def test_cutoff_finite_difference_slopes_respect_bounds():
    sched = ShrinkSchedule(sigma=0.5, base=Cylinder(1.0, 0.1))
    cut = build_cutoff(sched, 0, kind="full", grid=G1)
    z = pb.SpaceTimeField(G1, cut.values(G1))
    assert z.grad_magnitude().max() <= cut.grad_bound * (1 + 1e-12)
    assert np.abs(z.time_derivative()).max() <= cut.dt_bound * (1 + 1e-12)


def test_build_cutoff_grid_too_coarse():
    sched = ShrinkSchedule(sigma=0.5, base=Cylinder(1.0, 0.1))
    with pytest.raises(GridTooCoarse):
        build_cutoff(sched, 6, kind="full", grid=G1)
    # without a grid the construction is unconditional
    build_cutoff(sched, 6, kind="full")


def test_lateral_cutoff_geometry():
    sched = ShrinkSchedule(sigma=0.5, base=Cylinder(1.0, 0.1))
    cut = build_cutoff(sched, 1, kind="lateral")
    rho_1, _, rho_t, _ = sched.radii(1)
    rho_2 = sched.radii(2)[0]
    assert cut.inner.rho == pytest.approx(rho_2)
    assert cut.outer.rho == pytest.approx(rho_t)
    assert cut.grad_bound == pytest.approx(2 ** 3 / (0.5 * 1.0))


# ---- caccioppoli sides -----------------------------------------------------

def test_caccioppoli_zero_above_sup():
    f = pb.random_nonneg(G1, np.random.default_rng(0), amplitude=1.0)
    sched = ShrinkSchedule(sigma=0.5, base=Cylinder(1.0, 0.1))
    cut = build_cutoff(sched, 0, kind="full", grid=G1)
    sides = caccioppoli_sides(f, f.values.max() + 1.0, cut, 2.0)
    assert sides == type(sides)(0.0, 0.0, 0.0, 0.0)
    assert sides.fitted_constant() == 0.0


def test_caccioppoli_affine_closed_form():
    # static affine u with k=0 and a lateral cutoff: the gradient of u is
    # exact in centered differences, so both space terms match piecewise
    # integration of the ramp up to quadrature error
    grid = pb.Grid(dim=1, extent=1.0, nx=161, nt=11, dt=0.02)
    a, b = 0.8, 1.5
    u = a * grid.x_axis() + b
    f = pb.SpaceTimeField(grid, np.broadcast_to(u[:, None], grid.shape))
    rho_in, rho_out, theta = 0.5, 0.75, 0.08
    band = rho_out - rho_in
    cut = Cutoff(Cylinder(rho_in, theta), Cylinder(rho_out, theta),
                 "lateral", grad_bound=1.0 / band, dt_bound=0.0)
    sides = caccioppoli_sides(f, 0.0, cut, p=2.0)

    t_count = (np.abs(grid.t_axis()) <= theta + 1e-12).sum()
    t_factor = t_count * grid.dt
    ix_zeta_sq = 2.0 * (rho_in + band / 3.0)
    want_lhs_grad = a * a * t_factor * ix_zeta_sq

    def cube(x):
        return (a * x + b) ** 3 / (3 * a)

    # the slope field vanishes at the two ramp-edge nodes, so the node
    # sum covers the half-open band shrunk by h/2 at either end
    lo, hi = rho_in + grid.h / 2, rho_out - grid.h / 2
    ramp_u2 = (cube(hi) - cube(lo)) + (cube(-lo) - cube(-hi))
    want_rhs_space = t_factor / band ** 2 * ramp_u2

    assert sides.rhs_time == 0.0
    assert sides.lhs_grad == pytest.approx(want_lhs_grad, rel=2e-2)
    assert sides.rhs_space == pytest.approx(want_rhs_space, rel=2e-2)
    # static field: the sup slice equals every slice
    w = f.values[:, 0]
    zeta = cut.values(grid)[:, 0]
    inside = np.abs(grid.x_axis()) <= rho_out + 1e-12
    slice_int = float((w * w * zeta * zeta)[inside].sum()) * grid.h
    assert sides.lhs_sup == pytest.approx(slice_int, rel=1e-12)


def test_caccioppoli_scaling_homogeneity():
    f = pb.random_nonneg(G1, np.random.default_rng(1), amplitude=1.0)
    sched = ShrinkSchedule(sigma=0.5, base=Cylinder(1.0, 0.1))
    cut = build_cutoff(sched, 0, kind="full", grid=G1)
    k, lam, p = 0.4, 3.7, 2.5
    base = caccioppoli_sides(f, k, cut, p)
    scaled_field = pb.SpaceTimeField(G1, lam * f.values, nonneg=True)
    scaled = caccioppoli_sides(scaled_field, lam * k, cut, p)
    assert scaled.lhs_grad == pytest.approx(lam ** p * base.lhs_grad,
                                            rel=1e-10)
    assert scaled.rhs_space == pytest.approx(lam ** p * base.rhs_space,
                                             rel=1e-10)
    assert scaled.lhs_sup == pytest.approx(lam ** 2 * base.lhs_sup, rel=1e-10)
    assert scaled.rhs_time == pytest.approx(lam ** 2 * base.rhs_time,
                                            rel=1e-10)


def test_caccioppoli_fit_stable_across_p():
    grid = pb.Grid(dim=1, extent=1.5, nx=61, nt=41, dt=0.01)
    sched = ShrinkSchedule(sigma=0.5, base=Cylinder(1.0, 0.15))
    fits = []
    for p in (1.8, 1.9, 2.0, 2.1, 2.5, 3.0):
        params = pb.StructureParams(1, p, pb.default_eps0(1))
        u = pb.clipped_nonneg(pb.solve(pb.smooth_positive_initial(grid, 2.0),
                                       pb.SolverConfig(params=params), grid))
        k = float(np.median(u.values))
        cut = build_cutoff(sched, 0, kind="full", grid=grid)
        fits.append(caccioppoli_sides(u, k, cut, p).fitted_constant())
    assert all(np.isfinite(c) and c > 0 for c in fits)
    assert max(fits) / min(fits) < 50.0


# ---- sobolev sides ---------------------------------------------------------

def test_sobolev_requires_zero_lateral_trace():
    with pytest.raises(BoundaryError):
        sobolev_sides(pb.constant_field(G1, 1.0), 2.0)
    assert lateral_boundary_max(pb.constant_field(G1, 1.0)) == 1.0


def test_sobolev_zero_field():
    assert sobolev_sides(pb.zero_field(G1), 2.0) == (0.0, 0.0)


def hat_oracle_1d(grid, A, p):
    L, T = grid.extent, grid.t_half
    q = 3.0 * p
    lhs = A ** q * (2 * L / (q + 1)) * (2 * T / (q + 1))
    sup_l2 = A ** 2 * 2 * L / 3
    grad_lp = (A / L) ** p * 2 * L * (2 * T / (p + 1))
    return lhs, sup_l2 ** p * grad_lp


def test_sobolev_hat_closed_form_1d():
    A = 1.3
    for p in (2.0, 3.0):
        errs = []
        for grid in (pb.Grid(dim=1, extent=1.0, nx=81, nt=101, dt=0.002),
                     pb.Grid(dim=1, extent=1.0, nx=161, nt=201, dt=0.001)):
            f = pb.hat_field(grid, amplitude=A)
            lhs, rhs = sobolev_sides(f, p)
            want_l, want_r = hat_oracle_1d(grid, A, p)
            assert lhs == pytest.approx(want_l, rel=5e-2)
            assert rhs == pytest.approx(want_r, rel=5e-2)
            errs.append(abs(lhs - want_l) / want_l)
        assert errs[1] < errs[0]     # refinement converges to the oracle


def test_sobolev_hat_closed_form_2d():
    grid = pb.Grid(dim=2, extent=1.0, nx=41, nt=21, dt=0.01)
    A, p = 1.0, 2.0
    L, T = grid.extent, grid.t_half
    f = pb.hat_field(grid, amplitude=A)
    lhs, rhs = sobolev_sides(f, p)
    q = 2.0 * p
    want_lhs = A ** q * (2 * L / (q + 1)) ** 2 * (2 * T / (q + 1))
    sup_l2 = A ** 2 * (2 * L / 3) ** 2
    grad_l2 = 2 * (A / L) ** 2 * (2 * L) * (2 * L / 3) * (2 * T / 3)
    assert lhs == pytest.approx(want_lhs, rel=5e-2)
    assert rhs == pytest.approx(sup_l2 ** (p / 2) * grad_l2, rel=5e-2)


def test_sobolev_fit_stable_under_refinement():
    coarse = pb.Grid(dim=1, extent=1.0, nx=21, nt=11, dt=0.02)
    fine = coarse.refine()

    def c_fit(grid):
        worst = 0.0
        for seed in range(40):
            f = pb.random_zero_lateral(grid, np.random.default_rng(seed))
            lhs, rhs = sobolev_sides(f, 2.0)
            if rhs > 0:
                worst = max(worst, lhs / rhs)
        return worst

    a, b = c_fit(coarse), c_fit(fine)
    assert np.isfinite(a) and np.isfinite(b) and a > 0
    assert abs(b - a) / a < 0.25


# ---- combined bound --------------------------------------------------------

def test_combined_energy_bound_admissibility():
    f = pb.random_nonneg(G1, np.random.default_rng(2))
    sched = ShrinkSchedule(sigma=0.5, base=Cylinder(1.0, 0.1))
    with pytest.raises(pb.AdmissibilityError):
        combined_energy_bound(f, sched, 1.0, 0, p=2.0, eps0=5.0)


def test_combined_energy_bound_zero_field():
    sched = ShrinkSchedule(sigma=0.5, base=Cylinder(1.0, 0.1))
    lhs, rhs = combined_energy_bound(pb.zero_field(G1), sched, 1.0, 0,
                                     2.0, 4.0 / 3.0)
    assert lhs == 0.0 and rhs == 0.0


def test_combined_energy_bound_on_random_suite():
    # the discrete sides at unit constant leave the inequality lhs <= rhs
    # with wide margin on smooth bounded fields; freeze a conservative cap
    worst = 0.0
    for seed in range(40):
        rng = np.random.default_rng(seed)
        grid = G1 if seed % 3 else pb.Grid(dim=2, extent=1.0, nx=11,
                                           nt=7, dt=0.02)
        f = pb.random_nonneg(grid, rng, amplitude=2.0)
        rho = grid.extent * rng.uniform(0.6, 1.0)
        theta = grid.t_half * rng.uniform(0.6, 1.0)
        sched = ShrinkSchedule(sigma=rng.uniform(0.3, 0.7),
                               base=Cylinder(rho, theta))
        k = f.values.max() * rng.uniform(0.2, 0.8)
        p = rng.uniform(1.9, 3.0)
        for i in range(4):
            lhs, rhs = combined_energy_bound(f, sched, k, i, p,
                                             pb.default_eps0(grid.dim))
            assert np.isfinite(lhs) and np.isfinite(rhs) and rhs >= 0
            if rhs > 0:
                worst = max(worst, lhs / rhs)
    assert worst <= 1.0
