"""Numpy fallback implementations of the hot kernels.

Same call surface as the compiled extension; selected at import time by
the package __init__ when the extension is unavailable or disabled.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

BACKEND = "pure"


def _face_grad_1d(u: np.ndarray, h: float) -> np.ndarray:
    return np.diff(u) / h


def flux_faces_1d(u, h, p, delta, cface):
    """Regularized flux c * (g^2 + delta^2)^((p-2)/2) * g at the nx-1
    midpoints between nodes."""
    g = _face_grad_1d(u, h)
    return cface * (g * g + delta * delta) ** (0.5 * (p - 2.0)) * g


def dflux_faces_1d(u, h, p, delta, cface):
    """Derivative of the regularized flux with respect to the face
    gradient: c * (g^2+d^2)^((p-4)/2) * ((p-1) g^2 + d^2), positive for
    every p once delta > 0."""
    g = _face_grad_1d(u, h)
    s = g * g + delta * delta
    return cface * s ** (0.5 * (p - 4.0)) * ((p - 1.0) * g * g + delta * delta)


def diffusivity_faces_1d(u, h, p, delta, cface):
    """Lagged diffusivity weight c * (g^2 + delta^2)^((p-2)/2) per face."""
    g = _face_grad_1d(u, h)
    return cface * (g * g + delta * delta) ** (0.5 * (p - 2.0))


def tridiag_solve(dl, d, du, rhs):
    """Solve the tridiagonal system with sub/main/super diagonals."""
    n = d.shape[0]
    ab = np.zeros((3, n))
    ab[0, 1:] = du
    ab[1, :] = d
    ab[2, :-1] = dl
    return solve_banded((1, 1), ab, rhs)


def _face_grads_x(u: np.ndarray, h: float):
    """Gradient components at x-faces (between rows i and i+1).  The
    transverse component averages the four surrounding y-differences and
    is zeroed on the first/last columns, which no interior divergence
    stencil reads."""
    gx = (u[1:, :] - u[:-1, :]) / h
    gy = np.zeros_like(gx)
    gy[:, 1:-1] = (u[:-1, 2:] + u[1:, 2:] - u[:-1, :-2] - u[1:, :-2]) / (4.0 * h)
    return gx, gy


def flux_faces_2d(u, h, p, delta, cfx, cfy):
    """Regularized flux components at x-faces and y-faces."""
    gx, gy = _face_grads_x(u, h)
    s = gx * gx + gy * gy + delta * delta
    fx = cfx * s ** (0.5 * (p - 2.0)) * gx
    tx, ty = _face_grads_x(u.T, h)
    st = tx * tx + ty * ty + delta * delta
    fy = (cfy.T * st ** (0.5 * (p - 2.0)) * tx).T
    return fx, fy


def newton_faces_2d(u, h, p, delta, cfx, cfy):
    """Quasi-Newton face conductivities: the diagonal (normal-direction)
    part of the flux Jacobian, c*((s)^((p-2)/2) + (p-2) s^((p-4)/2) gn^2)
    with s = |g|^2 + delta^2 and gn the normal gradient component."""
    gx, gy = _face_grads_x(u, h)
    s = gx * gx + gy * gy + delta * delta
    ax = cfx * (s ** (0.5 * (p - 2.0))
                + (p - 2.0) * s ** (0.5 * (p - 4.0)) * gx * gx)
    tx, ty = _face_grads_x(u.T, h)
    st = tx * tx + ty * ty + delta * delta
    ay = (cfy.T * (st ** (0.5 * (p - 2.0))
                   + (p - 2.0) * st ** (0.5 * (p - 4.0)) * tx * tx)).T
    return ax, ay


def diffusivity_faces_2d(u, h, p, delta, cfx, cfy):
    """Lagged diffusivity weights at x- and y-faces."""
    gx, gy = _face_grads_x(u, h)
    s = gx * gx + gy * gy + delta * delta
    wx = cfx * s ** (0.5 * (p - 2.0))
    tx, ty = _face_grads_x(u.T, h)
    st = tx * tx + ty * ty + delta * delta
    wy = (cfy.T * st ** (0.5 * (p - 2.0))).T
    return wx, wy


def trunc_pow_sum(values, mask, level, power):
    """Sum of max(v - level, 0)^power over nodes where mask != 0."""
    v = values[mask.astype(bool)] - level
    v = v[v > 0]
    if v.size == 0:
        return 0.0
    return float(np.sum(v ** power))


def masked_max(values, mask):
    """Max of values over nodes where mask != 0; -inf on empty mask."""
    sel = values[mask.astype(bool)]
    if sel.size == 0:
        return float("-inf")
    return float(sel.max())
