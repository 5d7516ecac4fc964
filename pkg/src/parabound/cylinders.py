"""Parabolic cylinders Q_{rho,theta} = B_rho x [-theta, theta], their
shrinking/expanding families, and quadrature over them.

All cylinders are centered at the space-time origin.  Integrals use the
node-wise midpoint rule clipped to the cylinder; averaged integrals
divide by the continuum measure |B_rho| * 2*theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, CylinderOutOfGrid
from .grid import Grid

# tolerance for "fits inside the grid" checks; pure roundoff slack
_FIT_TOL = 1e-12


def ball_volume(rho: float, n_dim: int) -> float:
    """Volume of the Euclidean ball B_rho in N dimensions (N = 1 or 2)."""
    if n_dim == 1:
        return 2.0 * rho
    if n_dim == 2:
        return math.pi * rho * rho
    raise ConfigError(f"unsupported dimension {n_dim}")


@dataclass(frozen=True)
class Cylinder:
    rho: float
    theta: float

    def __post_init__(self):
        if not (self.rho > 0 and self.theta > 0):
            raise ConfigError("cylinder radii must be positive")

    def volume(self, n_dim: int) -> float:
        return ball_volume(self.rho, n_dim) * 2.0 * self.theta

    def fits(self, grid: Grid) -> bool:
        slack = _FIT_TOL * max(1.0, self.rho, self.theta)
        return (self.rho <= grid.extent + slack
                and self.theta <= grid.t_half + slack)

    def require_fits(self, grid: Grid) -> None:
        if not self.fits(grid):
            raise CylinderOutOfGrid(
                f"Q(rho={self.rho}, theta={self.theta}) exceeds grid "
                f"(extent={grid.extent}, t_half={grid.t_half})")

    def scaled(self, sigma: float) -> "Cylinder":
        return Cylinder(sigma * self.rho, sigma * self.theta)


def ball_mask(grid: Grid, rho: float) -> np.ndarray:
    """Boolean mask of spatial nodes with |x| <= rho (Euclidean)."""
    slack = _FIT_TOL * max(1.0, rho)
    return grid.radius() <= rho + slack


def time_mask(grid: Grid, theta: float) -> np.ndarray:
    slack = _FIT_TOL * max(1.0, theta)
    return np.abs(grid.t_axis()) <= theta + slack


def cylinder_mask(grid: Grid, cyl: Cylinder) -> np.ndarray:
    """Space-time node mask of the cylinder, shape grid.shape."""
    space = ball_mask(grid, cyl.rho)
    return space[..., None] & time_mask(grid, cyl.theta)


def integrate(grid: Grid, values: np.ndarray, cyl: Cylinder) -> float:
    """Midpoint quadrature of values over the cylinder."""
    mask = cylinder_mask(grid, cyl)
    return float(values[mask].sum()) * grid.node_weight


def average(grid: Grid, values: np.ndarray, cyl: Cylinder) -> float:
    """Quadrature divided by the continuum measure |B_rho| * 2*theta."""
    return integrate(grid, values, cyl) / cyl.volume(grid.dim)


def sup_over(grid: Grid, values: np.ndarray, cyl: Cylinder) -> float:
    """Max of values over grid nodes inside the cylinder."""
    mask = cylinder_mask(grid, cyl)
    if not mask.any():
        raise CylinderOutOfGrid("cylinder contains no grid nodes")
    return float(values[mask].max())


@dataclass(frozen=True)
class ShrinkSchedule:
    """Shrinking family rho_i = sigma*rho + (1-sigma)*rho/2^i (same in
    time), interpolating from Q_{rho,theta} at i=0 down to the inner
    cylinder Q_{sigma*rho, sigma*theta}."""

    sigma: float
    base: Cylinder

    def __post_init__(self):
        if not (0.0 < self.sigma < 1.0):
            raise ConfigError(f"sigma must be in (0,1), got {self.sigma}")

    def radii(self, i: int) -> tuple:
        """(rho_i, theta_i, rho_tilde_i, theta_tilde_i); the tilde radii
        are the midpoints between steps i and i+1."""
        if i < 0:
            raise ConfigError("schedule index must be >= 0")
        s, rho, theta = self.sigma, self.base.rho, self.base.theta
        rho_i = s * rho + (1.0 - s) * rho / 2 ** i
        rho_n = s * rho + (1.0 - s) * rho / 2 ** (i + 1)
        th_i = s * theta + (1.0 - s) * theta / 2 ** i
        th_n = s * theta + (1.0 - s) * theta / 2 ** (i + 1)
        return rho_i, th_i, 0.5 * (rho_i + rho_n), 0.5 * (th_i + th_n)

    def cylinder(self, i: int) -> Cylinder:
        rho_i, th_i, _, _ = self.radii(i)
        return Cylinder(rho_i, th_i)

    def tilde_cylinder(self, i: int) -> Cylinder:
        _, _, rho_t, th_t = self.radii(i)
        return Cylinder(rho_t, th_t)

    def inner(self) -> Cylinder:
        return self.base.scaled(self.sigma)


def shrinking_radii(schedule: ShrinkSchedule, i: int) -> tuple:
    return schedule.radii(i)


def level_schedule(k: float, i: int) -> float:
    """Truncation ladder k_i = k - k/2^i, increasing from 0 to k."""
    if k <= 0:
        raise ConfigError(f"level k must be positive, got {k}")
    if i < 0:
        raise ConfigError("index must be >= 0")
    return k - k / 2 ** i


def scale_factor_A(rho: float, theta: float, n_dim: int, p: float) -> float:
    """Intrinsic scaling factor (theta/rho^p) + (rho^p/theta)^(N/p)
    balancing the cylinder shape against the nonlinearity."""
    if not (rho > 0 and theta > 0):
        raise ConfigError("radii must be positive")
    ratio = theta / rho ** p
    return ratio + (1.0 / ratio) ** (n_dim / p)


@dataclass(frozen=True)
class ExpandSchedule:
    """Expanding family rho_n = sigma*rho + (1-sigma)*rho*(1 - 2^-n),
    growing from the inner cylinder at n=0 out to Q_{rho,theta}."""

    sigma: float
    rho: float
    theta: float

    def __post_init__(self):
        if not (0.0 < self.sigma < 1.0):
            raise ConfigError(f"sigma must be in (0,1), got {self.sigma}")
        if not (self.rho > 0 and self.theta > 0):
            raise ConfigError("radii must be positive")

    def radii(self, n: int) -> tuple:
        if n < 0:
            raise ConfigError("schedule index must be >= 0")
        fill = 1.0 - 2.0 ** (-n)
        s = self.sigma
        return (s * self.rho + (1.0 - s) * self.rho * fill,
                s * self.theta + (1.0 - s) * self.theta * fill)

    def cylinder(self, n: int) -> Cylinder:
        rho_n, th_n = self.radii(n)
        return Cylinder(rho_n, th_n)

    def outer(self) -> Cylinder:
        return Cylinder(self.rho, self.theta)
