"""Expanding-cylinder sup recursion, the p-moment sup bound, the
classical degenerate/singular comparators, and the eps0 window root."""

import math

import numpy as np
import pytest

import parabound as pb
from parabound import ConfigError, CylinderOutOfGrid, RangeError
from parabound.cylinders import ExpandSchedule
from parabound.iteration2 import (classical_bounds, bb_display, delta0_bisect,
                                  delta0_root, degenerate_bound,
                                  eps0_admissible, g_window, lambda_r,
                                  mn_value, second_exponents,
                                  second_iteration, singular_bound,
                                  thm2_bound, thm2_exponent,
                                  volume_ratio_bound)


# ---- recursion exponents ----------------------------------------------------

def test_second_exponents_hand_values():
    # p = 2, N = 2, eps0 = 2/3: gap = 8/3
    mu, nu, d, eta = second_exponents(2.0, 2)
    assert mu == pytest.approx(0.75)
    assert nu == pytest.approx(0.5)
    assert d == pytest.approx(64.0)
    assert eta == pytest.approx(1.0 / 128.0)


def test_second_exponents_identities():
    for n_dim in (1, 2):
        for p in np.arange(2.0 * n_dim / (n_dim + 1) + 0.05, 4.0, 0.07):
            p = float(p)
            mu, nu, d, eta = second_exponents(p, n_dim)
            # nu collapses to p/(p(N+1)-N) at the default eps0
            assert nu == pytest.approx(p / (p * (n_dim + 1) - n_dim),
                                       rel=1e-12)
            assert nu < 1
            # d in its dual form, and the eta*d = 1/2 normalization
            dual = 2.0 ** (p * (n_dim + p) * (n_dim + 1)
                           / (2.0 * n_dim * (p - 1.0)))
            assert d == pytest.approx(dual, rel=1e-12)
            assert eta * d == pytest.approx(0.5, rel=1e-12)


def test_second_exponents_range_errors():
    with pytest.raises(RangeError):
        second_exponents(2.0, 2, eps0=2.0)      # gap closes
    with pytest.raises(RangeError):
        second_exponents(2.0, 2, eps0=1.2)      # nu >= 1


# ---- eps0 admissibility window ----------------------------------------------

def test_eps0_admissible_window_endpoints():
    # window is (2-p, 2p/(N+p)); inside all three flags hold
    assert eps0_admissible(2.0, 2, 2.0 / 3.0) == (True, True, True)
    assert eps0_admissible(4.0 / 3.0, 2, 0.7) == (True, True, True)
    # below the left endpoint only the first flag fails
    c1, c2, c3 = eps0_admissible(4.0 / 3.0, 2, 0.5)
    assert (c1, c3) == (False, True)
    # above the right endpoint the third fails
    c1, c2, c3 = eps0_admissible(4.0 / 3.0, 2, 0.9)
    assert (c1, c3) == (True, False)
    with pytest.raises(RangeError):
        eps0_admissible(1.0, 2, 0.5)


def test_eps0_admissible_flag_semantics():
    rng = np.random.default_rng(7)
    for _ in range(400):
        n_dim = int(rng.integers(1, 3))
        p = rng.uniform(1.05, 4.0)
        eps0 = rng.uniform(0.01, 3.0)
        c1, c2, c3 = eps0_admissible(p, n_dim, eps0)
        assert c1 == (eps0 > 2.0 - p)
        assert c2 == (eps0 < 2.0 * p / n_dim)
        assert c3 == (eps0 < 2.0 * p / (n_dim + p))
        if c3:
            assert c2                            # third flag is stronger


# ---- sup samples over expanding cylinders ------------------------------------

def test_mn_value_constant_and_monotone():
    grid = pb.Grid(dim=1, extent=1.0, nx=41, nt=21, dt=0.01)
    sched = ExpandSchedule(sigma=0.5, rho=0.8, theta=0.08)
    const = pb.constant_field(grid, 2.5)
    assert mn_value(const, sched, 0) == 2.5
    assert mn_value(const, sched, 5) == 2.5
    bump = pb.random_nonneg(grid, np.random.default_rng(3))
    ms = [mn_value(bump, sched, n) for n in range(8)]
    assert all(a <= b + 1e-15 for a, b in zip(ms, ms[1:]))


def test_mn_value_out_of_grid():
    grid = pb.Grid(dim=1, extent=1.0, nx=41, nt=21, dt=0.01)
    sched = ExpandSchedule(sigma=0.4, rho=2.0, theta=0.08)
    f = pb.zero_field(grid)
    assert mn_value(f, sched, 0) == 0.0          # inner cylinder still fits
    with pytest.raises(CylinderOutOfGrid):
        mn_value(f, sched, 3)


def test_volume_ratio_bound():
    assert volume_ratio_bound(0.5, 2) == pytest.approx(8.0)
    assert volume_ratio_bound(1.0, 1) == 1.0
    for bad in (0.0, -0.2, 1.5):
        with pytest.raises(ConfigError):
            volume_ratio_bound(bad, 2)


# ---- sup recursion end to end --------------------------------------------------

def test_second_iteration_validation():
    grid = pb.Grid(dim=1, extent=1.0, nx=21, nt=11, dt=0.02)
    f = pb.zero_field(grid)
    with pytest.raises(RangeError):
        second_iteration(f, 1.0, 1, 0.5, 0.8, 0.08)
    with pytest.raises(ConfigError):
        second_iteration(f, 2.0, 2, 0.5, 0.8, 0.08)
    with pytest.raises(CylinderOutOfGrid):
        second_iteration(f, 2.0, 1, 0.5, 3.0, 0.08)


def test_second_iteration_zero_field():
    grid = pb.Grid(dim=1, extent=1.0, nx=21, nt=11, dt=0.02)
    res = second_iteration(pb.zero_field(grid), 2.0, 1, 0.5, 0.8, 0.08)
    assert res.m_trace == (0.0,) * 10
    assert res.bb == 0.0 and res.bb_lsq == 0.0 and res.c_fit == 0.0
    assert res.limit == 0.0
    assert res.satisfied


def test_second_iteration_constant_field():
    grid = pb.Grid(dim=1, extent=1.0, nx=21, nt=11, dt=0.02)
    c = 1.7
    res = second_iteration(pb.constant_field(grid, c), 2.0, 1, 0.5,
                           0.8, 0.08)
    eta, d = res.eta, res.d
    # every step demands bb >= c(1-eta)/d^{n+1}; the first step binds
    assert res.bb == pytest.approx(c * (1.0 - eta) / d, rel=1e-12)
    assert res.limit == pytest.approx(2.0 * c * (1.0 - eta), rel=1e-12)
    assert res.satisfied
    # log-space mean of the step requirements lands mid-ladder
    assert res.bb_lsq == pytest.approx(c * (1.0 - eta) / d ** 5, rel=1e-10)
    assert res.bb_lsq <= res.bb


def test_second_iteration_on_solver_suite(solved_suite):
    for (p, n_dim), (u, grid, rho, theta) in solved_suite.items():
        res = second_iteration(u, p, n_dim, 0.5, rho, theta)
        assert res.satisfied, (p, n_dim)
        ms = res.m_trace
        assert all(a <= b + 1e-15 for a, b in zip(ms, ms[1:]))
        assert res.bb_lsq <= res.bb * (1 + 1e-12)
        assert math.isfinite(res.c_fit) and res.c_fit >= 0
        # fitted constant closes the closed-form display
        again = bb_display(pb.average(grid, np.abs(u.values) ** p,
                                      pb.Cylinder(rho, theta)),
                           p, n_dim, 0.5, rho, theta, C=res.c_fit)
        assert again == pytest.approx(res.bb, rel=1e-9)


def test_bb_display_validation():
    with pytest.raises(ConfigError):
        bb_display(-1.0, 2.0, 1, 0.5, 1.0, 0.1)


# ---- sup-bound exponent (p-moment branch) -------------------------------------

def test_thm2_exponent_values():
    assert thm2_exponent(2.0, 2) == pytest.approx(1.5, abs=1e-12)
    assert thm2_exponent(2.0, 1) == pytest.approx(2.0, abs=1e-12)
    assert thm2_exponent(3.0, 1) == pytest.approx(1.5, abs=1e-12)


def test_thm2_exponent_range_error():
    for n_dim in (1, 2):
        crit = 2.0 * n_dim / (n_dim + 1)
        with pytest.raises(RangeError):
            thm2_exponent(crit, n_dim)


def test_thm2_exponent_continuous_and_decreasing():
    for n_dim in (1, 2, 3):
        crit = 2.0 * n_dim / (n_dim + 1)
        ps = np.arange(crit + 0.05, 5.0, 0.01)
        es = np.array([thm2_exponent(float(p), n_dim) for p in ps])
        assert np.isfinite(es).all()
        diffs = np.diff(es)
        assert (diffs < 0).all()
        assert np.abs(diffs).max() == pytest.approx(abs(diffs[0]))
        i2 = int(np.argmin(np.abs(ps - 2.0)))
        assert abs(es[i2 + 1] - es[i2 - 1]) < 0.1


def test_thm2_bound_hand_value():
    rep = thm2_bound(1.0, 2.0, 2, 0.5, 1.0, 1.0)
    # E = 1.5, A = 2: 2^1.5 / (0.5^4.5 * 0.5^6) = 2^12
    assert rep.main == pytest.approx(4096.0, rel=1e-12)
    assert rep.cap == 1.0
    assert rep.value == 1.0
    assert thm2_bound(0.0, 2.0, 2, 0.5, 1.0, 1.0).value == 0.0
    doubled = thm2_bound(1.0, 2.0, 2, 0.5, 1.0, 1.0, C=2.0)
    assert doubled.main == pytest.approx(8192.0, rel=1e-12)
    with pytest.raises(ConfigError):
        thm2_bound(-0.1, 2.0, 2, 0.5, 1.0, 1.0)


# ---- classical comparators -------------------------------------------------------

def test_lambda_r_values():
    assert lambda_r(1.5, 2, 2.0) == pytest.approx(2.0, abs=1e-12)
    assert lambda_r(2.0, 1, 2.0) == pytest.approx(4.0)
    assert lambda_r(1.2, 2, 1.0) == pytest.approx(-0.4)


def test_degenerate_bound():
    rep = degenerate_bound(1.0, 3.0, 1, 0.5, 1.0, 0.5)
    assert rep.main == pytest.approx(math.sqrt(0.5) / 0.25, rel=1e-12)
    assert rep.cap == pytest.approx(2.0)
    assert rep.value == pytest.approx(2.0)
    for bad_p in (2.0, 1.5):
        with pytest.raises(RangeError):
            degenerate_bound(1.0, bad_p, 1, 0.5, 1.0, 0.5)
    for bad_eps in (0.0, 2.5):
        with pytest.raises(RangeError):
            degenerate_bound(1.0, 3.0, 1, 0.5, 1.0, 0.5, eps=bad_eps)
    with pytest.raises(ConfigError):
        degenerate_bound(-1.0, 3.0, 1, 0.5, 1.0, 0.5)
    # cap exponent 1/(p-2) blows up approaching 2 from above
    assert degenerate_bound(1.0, 2.01, 1, 0.5, 1.0, 0.5).cap \
        == pytest.approx(2.0 ** (1.0 / 0.01), rel=1e-9)


def test_singular_bound():
    rep = singular_bound(1.0, 1.5, 2, 0.5, 1.0, 1.0)
    # lam = 2: main = 0.5^{-1.5*3.5/2} = 2^{2.625}
    assert rep.main == pytest.approx(2.0 ** 2.625, rel=1e-12)
    assert rep.cap == pytest.approx(1.0)
    for bad_p in (1.0, 2.0, 2.5):
        with pytest.raises(RangeError):
            singular_bound(1.0, bad_p, 2, 0.5, 1.0, 1.0)
    with pytest.raises(RangeError):
        singular_bound(1.0, 1.5, 2, 0.5, 1.0, 1.0, r=0.5)
    with pytest.raises(RangeError):
        singular_bound(1.0, 1.2, 2, 0.5, 1.0, 1.0, r=1.0)   # lam < 0
    with pytest.raises(ConfigError):
        singular_bound(-1.0, 1.5, 2, 0.5, 1.0, 1.0)
    cap = singular_bound(1.0, 1.99, 1, 0.5, 1.0, 2.0).cap
    assert cap == pytest.approx(2.0 ** (1.0 / 0.01), rel=1e-9)


def test_classical_bounds_branch_selection():
    at2 = classical_bounds(1.0, 2.0, 2, 0.5, 1.0, 1.0)
    assert at2.deg is None and at2.sing is None
    assert at2.deg_exponent_blowup == math.inf
    assert at2.sing_exponent_blowup == math.inf

    above = classical_bounds(1.0, 2.5, 2, 0.5, 1.0, 1.0)
    assert above.deg is not None and above.sing is None
    assert above.deg_exponent_blowup == pytest.approx(2.0)

    below = classical_bounds(1.0, 1.9, 2, 0.5, 1.0, 1.0)
    assert below.sing is not None and below.deg is None
    assert below.sing_exponent_blowup == pytest.approx(10.0)

    near = classical_bounds(1.0, 1.99, 2, 0.5, 1.0, 1.0)
    assert near.sing_exponent_blowup == pytest.approx(100.0, rel=1e-9)
    assert near.sing_exponent_blowup > 99.0

    # singular branch also vanishes when lambda_r closes
    degenerate_r = classical_bounds(1.0, 1.2, 2, 0.5, 1.0, 1.0, r=1.0)
    assert degenerate_r.sing is None


# ---- eps0 window root ---------------------------------------------------------

def test_g_window_anchors():
    for n_dim in range(1, 7):
        left = g_window(2.0 / (n_dim + 1), n_dim)
        want_left = 2.0 * n_dim * (n_dim - 1) / (n_dim + 1) ** 2
        assert left == pytest.approx(want_left, abs=1e-12)
        right = g_window(4.0 / (n_dim + 2), n_dim)
        want_right = -8.0 * n_dim / (n_dim + 2) ** 2
        assert right == pytest.approx(want_right, abs=1e-12)


def test_delta0_root_values():
    assert delta0_root(2) == pytest.approx(3.0 - math.sqrt(5.0), abs=1e-12)
    assert delta0_root(1) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ConfigError):
        delta0_root(0)


def test_delta0_bracket():
    for n_dim in range(2, 7):
        d0 = delta0_root(n_dim)
        assert 2.0 / (n_dim + 1) < d0 < 4.0 / (n_dim + 2)
        # the p-window bracket: 2N/(N+2) < 2 - delta0 < 2N/(N+1)
        assert 2.0 * n_dim / (n_dim + 2) < 2.0 - d0 < 2.0 * n_dim / (n_dim + 1)
        # sign change across the root
        assert g_window(d0 - 0.01, n_dim) > 0
        assert g_window(d0 + 0.01, n_dim) < 0


def test_delta0_bisect_agrees():
    for n_dim in range(1, 7):
        assert delta0_bisect(n_dim) == pytest.approx(delta0_root(n_dim),
                                                     abs=1e-12)
