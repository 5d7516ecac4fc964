"""Implicit solver for u_t = div(c(x,t) |grad u|^(p-2) grad u).

Backward Euler in time with a conservative staggered (face-flux)
discretization in space.  The nonlinear system per step is solved by
damped Newton with a lagged-diffusivity substitute step whenever three
dampings in a row fail to reduce the residual.  The gradient is
regularized as (|g|^2 + delta^2)^((p-2)/2) so the singular range
1 < p < 2 stays finite at critical points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import _kernels as K
from .errors import ConfigError, DimensionError, NonConvergence
from .grid import Grid, SpaceTimeField
from .structure import StructureParams

Coefficient = Union[None, float, np.ndarray, Callable]


@dataclass(frozen=True)
class SolverConfig:
    params: StructureParams
    delta: float = 1e-8
    newton_tol: float = 1e-10
    newton_max: int = 60
    # None -> constant lambda0; float -> that constant; ndarray -> node
    # values over the full space-time grid; callable(grid, m) -> spatial
    # slice at time index m
    coefficient: Coefficient = None

    def __post_init__(self):
        if self.newton_tol <= 0:
            raise ConfigError("newton_tol must be positive")
        if self.delta < 0:
            raise ConfigError("delta must be >= 0")
        if self.newton_max < 1:
            raise ConfigError("newton_max must be >= 1")

    def coeff_slice(self, grid: Grid, m: int) -> np.ndarray:
        lam0, lam1 = self.params.lambda0, self.params.lambda1
        c = self.coefficient
        if c is None:
            out = np.full((grid.nx,) * grid.dim, lam0)
        elif np.isscalar(c):
            out = np.full((grid.nx,) * grid.dim, float(c))
        elif callable(c):
            out = np.asarray(c(grid, m), dtype=np.float64)
        else:
            out = np.asarray(c, dtype=np.float64)[..., m]
        tol = 1e-12 * max(1.0, lam1)
        if out.min() < lam0 - tol or out.max() > lam1 + tol:
            raise ConfigError(
                f"coefficient range [{out.min()}, {out.max()}] violates "
                f"[{lam0}, {lam1}]")
        return out


def _bc_array(bc, u_like: np.ndarray) -> np.ndarray:
    """Normalize boundary data to a full spatial array (interior entries
    are ignored; only the boundary ring is read)."""
    if bc is None:
        return u_like
    if isinstance(bc, tuple) and len(bc) == 2 and u_like.ndim == 1:
        out = u_like.copy()
        out[0], out[-1] = bc
        return out
    arr = np.asarray(bc, dtype=np.float64)
    if arr.shape != u_like.shape:
        raise ConfigError(f"bc shape {arr.shape} != slice shape {u_like.shape}")
    return arr


def _apply_bc(u: np.ndarray, bc_arr: np.ndarray) -> None:
    if u.ndim == 1:
        u[0], u[-1] = bc_arr[0], bc_arr[-1]
    else:
        u[0, :], u[-1, :] = bc_arr[0, :], bc_arr[-1, :]
        u[:, 0], u[:, -1] = bc_arr[:, 0], bc_arr[:, -1]


# ---- 1D step ------------------------------------------------------------

def _faces_1d(c_now: np.ndarray) -> np.ndarray:
    return 0.5 * (c_now[:-1] + c_now[1:])


def _residual_1d(u, u_prev, h, dt, p, delta, cface):
    f = K.flux_faces_1d(u, h, p, delta, cface)
    return (u[1:-1] - u_prev[1:-1]) / dt - (f[1:] - f[:-1]) / h


def _step_1d(u_prev, cfg: SolverConfig, bc_arr, grid: Grid, c_now):
    h, dt = grid.h, grid.dt
    p, delta = cfg.params.p, cfg.delta
    cface = _faces_1d(c_now)
    u = u_prev.copy()
    _apply_bc(u, bc_arr)
    r = _residual_1d(u, u_prev, h, dt, p, delta, cface)
    rnorm = float(np.abs(r).max())
    for _ in range(cfg.newton_max):
        if rnorm <= cfg.newton_tol:
            return u
        a = K.dflux_faces_1d(u, h, p, delta, cface)
        main = 1.0 / dt + (a[:-1] + a[1:]) / h ** 2
        off = -a[1:-1] / h ** 2
        du = K.tridiag_solve(off, main, off, -r)
        moved = False
        for lam in (1.0, 0.5, 0.25):
            trial = u.copy()
            trial[1:-1] += lam * du
            rt = _residual_1d(trial, u_prev, h, dt, p, delta, cface)
            rtn = float(np.abs(rt).max())
            if rtn < rnorm:
                u, r, rnorm = trial, rt, rtn
                moved = True
                break
        if not moved:
            # lagged diffusivity: freeze the nonlinear weight at the
            # current iterate and solve the resulting linear step
            w = K.diffusivity_faces_1d(u, h, p, delta, cface)
            main = 1.0 / dt + (w[:-1] + w[1:]) / h ** 2
            off = -w[1:-1] / h ** 2
            rhs = u_prev[1:-1] / dt
            rhs[0] += w[0] * u[0] / h ** 2
            rhs[-1] += w[-1] * u[-1] / h ** 2
            u = u.copy()
            u[1:-1] = K.tridiag_solve(off, main, off, rhs)
            r = _residual_1d(u, u_prev, h, dt, p, delta, cface)
            rnorm = float(np.abs(r).max())
    raise NonConvergence(
        f"implicit step stalled at residual {rnorm:.3e}", residual=rnorm)


# ---- 2D step ------------------------------------------------------------

def _faces_2d(c_now: np.ndarray):
    cfx = 0.5 * (c_now[:-1, :] + c_now[1:, :])
    cfy = 0.5 * (c_now[:, :-1] + c_now[:, 1:])
    return cfx, cfy


def _residual_2d(u, u_prev, h, dt, p, delta, cfx, cfy):
    fx, fy = K.flux_faces_2d(u, h, p, delta, cfx, cfy)
    div = (fx[1:, 1:-1] - fx[:-1, 1:-1]) / h \
        + (fy[1:-1, 1:] - fy[1:-1, :-1]) / h
    return (u[1:-1, 1:-1] - u_prev[1:-1, 1:-1]) / dt - div


def _fivepoint(ax, ay, dt_inv, h):
    """Sparse operator over row-major interior unknowns built from
    positive face weights ax (x-faces) and ay (y-faces)."""
    nj = ay.shape[1] - 1
    h2 = h * h
    aW = ax[:-1, 1:-1]
    aE = ax[1:, 1:-1]
    aS = ay[1:-1, :-1]
    aN = ay[1:-1, 1:]
    diag = dt_inv + (aW + aE + aS + aN) / h2
    east = -aE / h2
    north = -aN / h2
    east_flat = east.ravel()[:-nj]
    north_flat = north.ravel()[:-1].copy()
    # no wrap-around coupling between the last column of one row block
    # and the first column of the next
    north_flat[nj - 1::nj] = 0.0
    west_flat = (-aW / h2).ravel()[nj:]
    south_flat = (-aS / h2).ravel()[1:].copy()
    south_flat[nj - 1::nj] = 0.0
    return sp.diags(
        [diag.ravel(), east_flat, west_flat, north_flat, south_flat],
        [0, nj, -nj, 1, -1], format="csc")


def _step_2d(u_prev, cfg: SolverConfig, bc_arr, grid: Grid, c_now):
    h, dt = grid.h, grid.dt
    p, delta = cfg.params.p, cfg.delta
    cfx, cfy = _faces_2d(c_now)
    u = u_prev.copy()
    _apply_bc(u, bc_arr)
    nj = grid.nx - 2
    r = _residual_2d(u, u_prev, h, dt, p, delta, cfx, cfy)
    rnorm = float(np.abs(r).max())
    for _ in range(cfg.newton_max):
        if rnorm <= cfg.newton_tol:
            return u
        ax, ay = K.newton_faces_2d(u, h, p, delta, cfx, cfy)
        J = _fivepoint(ax, ay, 1.0 / dt, h)
        du = spla.spsolve(J, -r.ravel()).reshape(nj, nj)
        moved = False
        for lam in (1.0, 0.5, 0.25):
            trial = u.copy()
            trial[1:-1, 1:-1] += lam * du
            rt = _residual_2d(trial, u_prev, h, dt, p, delta, cfx, cfy)
            rtn = float(np.abs(rt).max())
            if rtn < rnorm:
                u, r, rnorm = trial, rt, rtn
                moved = True
                break
        if not moved:
            wx, wy = K.diffusivity_faces_2d(u, h, p, delta, cfx, cfy)
            A = _fivepoint(wx, wy, 1.0 / dt, h)
            rhs = u_prev[1:-1, 1:-1] / dt
            rhs[0, :] += wx[0, 1:-1] * u[0, 1:-1] / h ** 2
            rhs[-1, :] += wx[-1, 1:-1] * u[-1, 1:-1] / h ** 2
            rhs[:, 0] += wy[1:-1, 0] * u[1:-1, 0] / h ** 2
            rhs[:, -1] += wy[1:-1, -1] * u[1:-1, -1] / h ** 2
            u = u.copy()
            u[1:-1, 1:-1] = spla.spsolve(A, rhs.ravel()).reshape(nj, nj)
            r = _residual_2d(u, u_prev, h, dt, p, delta, cfx, cfy)
            rnorm = float(np.abs(r).max())
    raise NonConvergence(
        f"implicit step stalled at residual {rnorm:.3e}", residual=rnorm)


# ---- public operations ---------------------------------------------------

def step_implicit(u_prev: np.ndarray, config: SolverConfig, bc,
                  grid: Grid, c_now: Optional[np.ndarray] = None) -> np.ndarray:
    """One backward-Euler step from the spatial slice u_prev; bc supplies
    Dirichlet values on the boundary (full array, or (left, right) in 1D).
    """
    u_prev = np.asarray(u_prev, dtype=np.float64)
    if c_now is None:
        c_now = config.coeff_slice(grid, 0)
    bc_arr = _bc_array(bc, u_prev)
    if grid.dim == 1:
        return _step_1d(u_prev, config, bc_arr, grid, c_now)
    return _step_2d(u_prev, config, bc_arr, grid, c_now)


def solve(initial: np.ndarray, config: SolverConfig, grid: Grid,
          bc=None) -> SpaceTimeField:
    """March the implicit stepper across the whole time axis.

    bc is None (boundary held at the initial slice's boundary values), a
    static spatial array, a callable m -> spatial array, or a full
    space-time array.
    """
    initial = np.asarray(initial, dtype=np.float64)
    vals = np.empty(grid.shape)
    vals[..., 0] = initial

    def bc_at(m):
        if callable(bc):
            return _bc_array(bc(m), initial)
        if isinstance(bc, np.ndarray) and bc.shape == grid.shape:
            return bc[..., m]
        return _bc_array(bc, initial)

    u = initial
    for m in range(1, grid.nt):
        c_now = config.coeff_slice(grid, m)
        try:
            u = step_implicit(u, config, bc_at(m), grid, c_now)
        except NonConvergence as exc:
            raise NonConvergence(str(exc), residual=exc.residual,
                                 time_index=m) from exc
        vals[..., m] = u
    return SpaceTimeField(grid, vals)


def exact_power(B: float, p: float, grid: Grid) -> SpaceTimeField:
    """Exact 1D solution u = (Bp/(p-1))^(p-1) (t + t_half) + B|x|^(p/(p-1))
    for unit coefficient.  Its flux is linear in x, so the profile solves
    the equation exactly, and the time shift keeps u >= 0 on the grid."""
    if grid.dim != 1:
        raise DimensionError("exact power solution is one-dimensional")
    if not (p > 1 and B > 0):
        raise ConfigError("need p > 1 and B > 0")
    rate = (B * p / (p - 1.0)) ** (p - 1.0)
    x = grid.x_axis()
    t = grid.t_axis()
    vals = rate * (t + grid.t_half)[None, :] \
        + (B * np.abs(x) ** (p / (p - 1.0)))[:, None]
    return SpaceTimeField(grid, vals, nonneg=True)


def residual(field: SpaceTimeField, config: SolverConfig) -> float:
    """Max norm of u_t - div flux over interior nodes and interior times,
    everything by centered differences."""
    grid = field.grid
    if grid.nt < 2:
        raise ConfigError("need at least two time levels")
    h, dt = grid.h, grid.dt
    p, delta = config.params.p, config.delta
    ut = np.gradient(field.values, dt, axis=-1, edge_order=1)
    worst = 0.0
    for m in range(1, grid.nt - 1):
        c_now = config.coeff_slice(grid, m)
        u = np.ascontiguousarray(field.values[..., m])
        if grid.dim == 1:
            f = K.flux_faces_1d(u, h, p, delta, _faces_1d(c_now))
            div = (f[1:] - f[:-1]) / h
            res = ut[1:-1, m] - div
        else:
            cfx, cfy = _faces_2d(c_now)
            fx, fy = K.flux_faces_2d(u, h, p, delta, cfx, cfy)
            div = (fx[1:, 1:-1] - fx[:-1, 1:-1]) / h \
                + (fy[1:-1, 1:] - fy[1:-1, :-1]) / h
            res = ut[1:-1, 1:-1, m] - div
        worst = max(worst, float(np.abs(res).max()))
    return worst


def steklov_average(field: SpaceTimeField, h: float) -> SpaceTimeField:
    """Forward time mollification: the mean of the piecewise-linear
    interpolant over [t, t+h] where t+h stays on the grid, zero past the
    tail."""
    grid = field.grid
    span = 2.0 * grid.t_half
    if not (0.0 < h < span):
        raise ConfigError(f"window must lie in (0, {span}), got {h}")
    t = grid.t_axis()
    dt = grid.dt
    vals = field.values
    # antiderivative of the interpolant at the nodes
    U = np.zeros_like(vals)
    np.cumsum(0.5 * (vals[..., 1:] + vals[..., :-1]) * dt, axis=-1,
              out=U[..., 1:])

    def U_at(s: float) -> np.ndarray:
        j = int(np.clip(np.searchsorted(t, s, side="right") - 1, 0,
                        grid.nt - 2))
        tau = s - t[j]
        return U[..., j] + vals[..., j] * tau \
            + 0.5 * (vals[..., j + 1] - vals[..., j]) * tau * tau / dt

    out = np.zeros_like(vals)
    tail_tol = 1e-12 * max(1.0, grid.t_half)
    for m in range(grid.nt):
        if t[m] + h <= grid.t_half + tail_tol:
            out[..., m] = (U_at(t[m] + h) - U[..., m]) / h
    return SpaceTimeField(grid, out)


def flux_nodes(field: SpaceTimeField, config: SolverConfig) -> list:
    """Node-wise flux components c (|grad u|^2+delta^2)^((p-2)/2) grad u
    from centered gradients."""
    grid = field.grid
    p, delta = config.params.p, config.delta
    comps = field.spatial_gradient()
    s = sum(c * c for c in comps) + delta * delta
    w = s ** (0.5 * (p - 2.0))
    c_full = np.stack([config.coeff_slice(grid, m)
                       for m in range(grid.nt)], axis=-1)
    return [c_full * w * g for g in comps]


@dataclass(frozen=True)
class StructureCheck:
    coercivity_ok: bool
    growth_ok: bool
    eta: float
    coercivity_margin: float
    growth_margin: float


def structure_check(field: SpaceTimeField, config: SolverConfig) -> StructureCheck:
    """Node-wise validation of the coercivity and growth conditions on
    the computed flux: <F, grad u> >= lambda0 |grad u|^p - eta(delta) and
    |F| <= lambda1 (|grad u|^2 + delta^2)^((p-1)/2), with
    eta = lambda0 * delta^p."""
    prm = config.params
    p, delta = prm.p, config.delta
    comps = field.spatial_gradient()
    gsq = sum(c * c for c in comps)
    F = flux_nodes(field, config)
    pairing = sum(f * g for f, g in zip(F, comps))
    eta = prm.lambda0 * delta ** p
    coer = pairing - (prm.lambda0 * gsq ** (0.5 * p) - eta)
    fmag = np.sqrt(sum(f * f for f in F))
    grow = prm.lambda1 * (gsq + delta * delta) ** (0.5 * (p - 1.0)) - fmag
    slack = 1e-12 * max(1.0, float(np.abs(pairing).max()))
    return StructureCheck(
        coercivity_ok=bool(coer.min() >= -slack),
        growth_ok=bool(grow.min() >= -slack),
        eta=eta,
        coercivity_margin=float(coer.min()),
        growth_margin=float(grow.min()),
    )


def clipped_nonneg(field: SpaceTimeField) -> SpaceTimeField:
    """Clamp tiny solver undershoots so downstream machinery can assume
    a non-negative field."""
    return SpaceTimeField(field.grid, np.maximum(field.values, 0.0),
                          nonneg=True)
