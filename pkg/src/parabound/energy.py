"""Cutoff functions and both sides of the energy and embedding
inequalities the iteration rests on.

Cutoffs are products of clamped linear ramps, radial in space and
one-sided in time: the profile rises from 0 on the outer parabolic
boundary to 1 on the inner cylinder and stays 1 up to the final time
slice (only the lateral and initial faces belong to the parabolic
boundary).  A linear ramp is the only profile whose maximum slope
matches the advertised gradient bounds exactly: any smooth ramp over the
same band must exceed 1/band somewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cylinders import (Cylinder, ShrinkSchedule, ball_mask, cylinder_mask,
                        level_schedule, time_mask)
from .errors import (AdmissibilityError, BoundaryError, ConfigError,
                     GridTooCoarse)
from .grid import Grid, SpaceTimeField
from .levelset import trunc_power_integral, truncate
from .structure import eps0_window_ok, sobolev_q


@dataclass(frozen=True)
class Cutoff:
    inner: Cylinder
    outer: Cylinder
    kind: str                 # "full" or "lateral"
    grad_bound: float         # advertised max |grad zeta|
    dt_bound: float           # advertised max |d_t zeta|

    def __post_init__(self):
        if self.kind not in ("full", "lateral"):
            raise ConfigError(f"unknown cutoff kind {self.kind!r}")
        if not (self.inner.rho < self.outer.rho
                and self.inner.theta <= self.outer.theta):
            raise ConfigError("inner cylinder must sit inside the outer one")

    # spatial ramp: 1 for r <= rho_in, 0 for r >= rho_out
    def _space(self, r: np.ndarray) -> np.ndarray:
        lo, hi = self.inner.rho, self.outer.rho
        return np.clip((hi - r) / (hi - lo), 0.0, 1.0)

    def _space_slope(self, r: np.ndarray) -> np.ndarray:
        lo, hi = self.inner.rho, self.outer.rho
        return np.where((r > lo) & (r < hi), 1.0 / (hi - lo), 0.0)

    # temporal ramp: 0 at t <= -theta_out, 1 from -theta_in onward
    def _time(self, t: np.ndarray) -> np.ndarray:
        if self.kind == "lateral":
            return np.ones_like(t)
        lo, hi = self.inner.theta, self.outer.theta
        if hi == lo:
            return (t >= -lo).astype(float)
        return np.clip((t + hi) / (hi - lo), 0.0, 1.0)

    def _time_slope(self, t: np.ndarray) -> np.ndarray:
        if self.kind == "lateral":
            return np.zeros_like(t)
        lo, hi = self.inner.theta, self.outer.theta
        return np.where((t > -hi) & (t < -lo), 1.0 / (hi - lo), 0.0)

    def values(self, grid: Grid) -> np.ndarray:
        r = grid.radius()
        return self._space(r)[..., None] * self._time(grid.t_axis())

    def grad_magnitude(self, grid: Grid) -> np.ndarray:
        r = grid.radius()
        return self._space_slope(r)[..., None] * self._time(grid.t_axis())

    def time_derivative(self, grid: Grid) -> np.ndarray:
        r = grid.radius()
        return self._space(r)[..., None] * self._time_slope(grid.t_axis())


def build_cutoff(schedule: ShrinkSchedule, i: int, kind: str = "full",
                 grid: Grid | None = None) -> Cutoff:
    """Cutoff for step i of the shrinking schedule.

    kind="full": 1 on Q_{i+1}, 0 on the parabolic boundary of Q_i, with
    |grad zeta| <= 2^{i+1}/((1-sigma) rho) and
    |d_t zeta| <= 2^{i+2}/((1-sigma) theta).

    kind="lateral": purely spatial, 1 for |x| <= rho_{i+1}, 0 on the
    lateral boundary of the half-step cylinder, with
    |grad zeta| <= 2^{i+2}/((1-sigma) rho).
    """
    rho_i, th_i, rho_t, th_t = schedule.radii(i)
    rho_n, th_n, _, _ = schedule.radii(i + 1)
    sigma = schedule.sigma
    rho, theta = schedule.base.rho, schedule.base.theta
    if grid is not None:
        band = (1.0 - sigma) * rho / 2 ** (i + 2)
        if band < 2.0 * grid.h:
            raise GridTooCoarse(
                f"transition band {band:.3e} under two cells (h={grid.h:.3e})"
                f" at step {i}")
    dt_bound = 2 ** (i + 2) / ((1.0 - sigma) * theta)
    if kind == "full":
        return Cutoff(Cylinder(rho_n, th_n), Cylinder(rho_i, th_i), kind,
                      grad_bound=2 ** (i + 1) / ((1.0 - sigma) * rho),
                      dt_bound=dt_bound)
    if kind == "lateral":
        return Cutoff(Cylinder(rho_n, th_t), Cylinder(rho_t, th_t), kind,
                      grad_bound=2 ** (i + 2) / ((1.0 - sigma) * rho),
                      dt_bound=dt_bound)
    raise ConfigError(f"unknown cutoff kind {kind!r}")


@dataclass(frozen=True)
class CaccioppoliSides:
    lhs_sup: float
    lhs_grad: float
    rhs_space: float
    rhs_time: float

    def fitted_constant(self) -> float:
        rhs = self.rhs_space + self.rhs_time
        if rhs == 0.0:
            return 0.0 if self.lhs_sup + self.lhs_grad == 0.0 else math.inf
        return (self.lhs_sup + self.lhs_grad) / rhs


def _sup_slice_integral(grid: Grid, integrand: np.ndarray, rho: float,
                        theta: float) -> float:
    """Max over time slices |t| <= theta of the spatial quadrature of
    the integrand over the ball B_rho."""
    bm = ball_mask(grid, rho)
    per_slice = (integrand * bm[..., None]).reshape(-1, grid.nt).sum(axis=0)
    per_slice = per_slice * grid.h ** grid.dim
    return float(per_slice[time_mask(grid, theta)].max())


def caccioppoli_sides(field: SpaceTimeField, k: float, cutoff: Cutoff,
                      p: float) -> CaccioppoliSides:
    """The four quadrature values of the energy inequality for (u-k)_+
    weighted by the cutoff, all over the cutoff's outer cylinder."""
    grid = field.grid
    w = truncate(field, k).values
    zeta = cutoff.values(grid)
    mask = cylinder_mask(grid, cutoff.outer)
    weight = grid.node_weight

    wgrad = SpaceTimeField(grid, w).grad_magnitude()
    lhs_grad = float((wgrad ** p * zeta ** p)[mask].sum()) * weight
    rhs_space = float(
        (w ** p * cutoff.grad_magnitude(grid) ** p)[mask].sum()) * weight
    rhs_time = float(
        (w * w * zeta ** (p - 1.0)
         * np.abs(cutoff.time_derivative(grid)))[mask].sum()) * weight
    lhs_sup = _sup_slice_integral(grid, w * w * zeta * zeta,
                                  cutoff.outer.rho, cutoff.outer.theta)
    return CaccioppoliSides(lhs_sup, lhs_grad, rhs_space, rhs_time)


def lateral_boundary_max(field: SpaceTimeField) -> float:
    """Largest |u| on the spatial boundary across all times."""
    v = np.abs(field.values)
    if field.grid.dim == 1:
        return float(max(v[0].max(), v[-1].max()))
    return float(max(v[0, :].max(), v[-1, :].max(),
                     v[:, 0].max(), v[:, -1].max()))


def sobolev_sides(field: SpaceTimeField, p: float) -> tuple:
    """Both sides of the integrability gain for fields with zero lateral
    trace: (integral of |u|^q, (sup_t integral of u^2)^(p/N) * integral
    of |grad u|^p), q = p(N+2)/N.  The constant lhs/rhs is the caller's
    to fit."""
    grid = field.grid
    if lateral_boundary_max(field) > 1e-12:
        raise BoundaryError("field does not vanish on the lateral boundary")
    n_dim = grid.dim
    q = sobolev_q(p, n_dim)
    weight = grid.node_weight
    lhs = float((np.abs(field.values) ** q).sum()) * weight
    sup_l2 = float(
        (field.values ** 2).reshape(-1, grid.nt).sum(axis=0).max()
    ) * grid.h ** n_dim
    grad_lp = float((field.grad_magnitude() ** p).sum()) * weight
    return lhs, sup_l2 ** (p / n_dim) * grad_lp


def combined_energy_bound(field: SpaceTimeField, schedule: ShrinkSchedule,
                          k: float, i: int, p: float, eps0: float) -> tuple:
    """Energy control of the next truncation by the current moment.

    lhs: sup-slice L2 mass plus gradient p-energy of (u - k_{i+1})_+
    over the half-step cylinder between Q_{i+1} and Q_i.
    rhs: (2^{(i+2)(p+eps0)}/(1-sigma)^p) (1/(rho^p k^eps0)
    + 1/(theta k^{p+eps0-2})) * integral over Q_i of (u-k_i)_+^{p+eps0},
    with the universal constant kept at 1 so the caller can fit it.
    """
    if not eps0_window_ok(p, field.grid.dim, eps0):
        raise AdmissibilityError(
            f"eps0={eps0} not admissible for p={p}, N={field.grid.dim}")
    grid = field.grid
    k_next = level_schedule(k, i + 1)
    k_i = level_schedule(k, i)
    tilde = schedule.tilde_cylinder(i)
    w = truncate(field, k_next).values

    lhs_sup = _sup_slice_integral(grid, w * w, tilde.rho, tilde.theta)
    wgrad = SpaceTimeField(grid, w).grad_magnitude()
    mask = cylinder_mask(grid, tilde)
    lhs = lhs_sup + float((wgrad ** p)[mask].sum()) * grid.node_weight

    sigma = schedule.sigma
    rho, theta = schedule.base.rho, schedule.base.theta
    moment = trunc_power_integral(field, schedule.cylinder(i), k_i, p + eps0)
    rhs = (2.0 ** ((i + 2) * (p + eps0)) / (1.0 - sigma) ** p
           * (1.0 / (rho ** p * k ** eps0)
              + 1.0 / (theta * k ** (p + eps0 - 2.0)))
           * moment)
    return lhs, rhs
