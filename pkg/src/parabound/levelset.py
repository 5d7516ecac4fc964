"""Truncation machinery: (u-k)_+ fields, superlevel sets, and the
measure/interpolation inequalities that drive the level iteration.

All integrals here are plain midpoint quadrature (not averaged), so each
inequality holds exactly at the discrete level: the Chebyshev bound and
the weighted interpolation inequalities are pointwise arguments over the
same node weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .cylinders import Cylinder, ShrinkSchedule, cylinder_mask, level_schedule
from .errors import AdmissibilityError, ConfigError
from .grid import SpaceTimeField
from .structure import eps0_window_ok


@dataclass(frozen=True)
class TruncatedField:
    base: SpaceTimeField
    level: float
    values: np.ndarray

    @property
    def grid(self):
        return self.base.grid


def truncate(field: SpaceTimeField, k: float) -> TruncatedField:
    """Node-wise positive part (u - k)_+."""
    if k < 0:
        raise ConfigError(f"truncation level must be >= 0, got {k}")
    return TruncatedField(field, k, np.maximum(field.values - k, 0.0))


@dataclass(frozen=True)
class SuperlevelSet:
    cylinder: Cylinder
    level: float
    indicator: np.ndarray
    measure: float


def superlevel_set(field: SpaceTimeField, cyl: Cylinder,
                   k: float) -> SuperlevelSet:
    """Nodes inside the cylinder where u > k strictly; the measure is
    the same midpoint quadrature used by every other integral."""
    grid = field.grid
    ind = (field.values > k) & cylinder_mask(grid, cyl)
    measure = float(ind.sum()) * grid.node_weight
    return SuperlevelSet(cyl, k, ind, measure)


def trunc_power_integral(field: SpaceTimeField, cyl: Cylinder,
                         level: float, power: float) -> float:
    """Quadrature of (u - level)_+^power over the cylinder."""
    grid = field.grid
    mask = cylinder_mask(grid, cyl).ravel().astype(np.uint8)
    s = K.trunc_pow_sum(np.ascontiguousarray(field.values.ravel()), mask,
                        level, power)
    return s * grid.node_weight


def measure_bound_check(field: SpaceTimeField, schedule: ShrinkSchedule,
                        k: float, i: int, s: float) -> tuple:
    """Chebyshev step of the level ladder.

    Returns (|A_{i+1}|, (2^{s(i+1)}/k^s) * integral over Q_i of
    (u-k_i)_+^s).  On the superlevel set of k_{i+1} the integrand
    exceeds (k/2^{i+1})^s node-wise and A_{i+1} sits inside Q_i, so
    lhs <= rhs holds exactly for the shared quadrature weights.
    """
    if s < 1:
        raise ConfigError(f"moment exponent must be >= 1, got {s}")
    if k <= 0:
        raise ConfigError("level k must be positive")
    k_i = level_schedule(k, i)
    k_next = level_schedule(k, i + 1)
    lhs = superlevel_set(field, schedule.cylinder(i + 1), k_next).measure
    integral = trunc_power_integral(field, schedule.cylinder(i), k_i, s)
    rhs = 2.0 ** (s * (i + 1)) / k ** s * integral
    return lhs, rhs


def holder_p_chain(field: SpaceTimeField, schedule: ShrinkSchedule,
                   k: float, i: int, p: float, eps0: float) -> tuple:
    """Interpolation step trading the p-th moment of the next truncation
    for the (p+eps0)-th moment of the current one.

    Returns (integral over Q_i of (u-k_{i+1})_+^p,
    (2^{eps0(i+1)}/k^eps0) * integral over Q_i of (u-k_i)_+^{p+eps0}).
    """
    if not eps0_window_ok(p, field.grid.dim, eps0):
        raise AdmissibilityError(
            f"eps0={eps0} not admissible for p={p}, N={field.grid.dim}")
    return _holder_chain(field, schedule, k, i, p, eps0,
                         lhs_power=p, gain=eps0)


def holder_2_chain(field: SpaceTimeField, schedule: ShrinkSchedule,
                   k: float, i: int, p: float, eps0: float) -> tuple:
    """Companion interpolation step for the quadratic moment.

    Returns (integral over Q_i of (u-k_{i+1})_+^2,
    (2^{(p+eps0-2)(i+1)}/k^{p+eps0-2}) * integral over Q_i of
    (u-k_i)_+^{p+eps0}).
    """
    if p + eps0 <= 2:
        raise AdmissibilityError(f"need p + eps0 > 2, got {p + eps0}")
    return _holder_chain(field, schedule, k, i, p, eps0,
                         lhs_power=2.0, gain=p + eps0 - 2.0)


def _holder_chain(field, schedule, k, i, p, eps0, lhs_power, gain):
    if k <= 0:
        raise ConfigError("level k must be positive")
    k_i = level_schedule(k, i)
    k_next = level_schedule(k, i + 1)
    q_i = schedule.cylinder(i)
    lhs = trunc_power_integral(field, q_i, k_next, lhs_power)
    high = trunc_power_integral(field, q_i, k_i, p + eps0)
    rhs = 2.0 ** (gain * (i + 1)) / k ** gain * high
    return lhs, rhs
