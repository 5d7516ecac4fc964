# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the numpy kernels in _pure.py.

Typed single-pass loops; the call surface and semantics match _pure
exactly so the two backends are interchangeable.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport pow, sqrt

cnp.import_array()

BACKEND = "fast"


def flux_faces_1d(double[::1] u, double h, double p, double delta,
                  double[::1] cface):
    cdef Py_ssize_t n = u.shape[0] - 1
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    cdef double g, d2 = delta * delta, e = 0.5 * (p - 2.0)
    for i in range(n):
        g = (u[i + 1] - u[i]) / h
        o[i] = cface[i] * pow(g * g + d2, e) * g
    return out


def dflux_faces_1d(double[::1] u, double h, double p, double delta,
                   double[::1] cface):
    cdef Py_ssize_t n = u.shape[0] - 1
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    cdef double g, s, d2 = delta * delta, e = 0.5 * (p - 4.0)
    for i in range(n):
        g = (u[i + 1] - u[i]) / h
        s = g * g + d2
        o[i] = cface[i] * pow(s, e) * ((p - 1.0) * g * g + d2)
    return out


def diffusivity_faces_1d(double[::1] u, double h, double p, double delta,
                         double[::1] cface):
    cdef Py_ssize_t n = u.shape[0] - 1
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    cdef double g, d2 = delta * delta, e = 0.5 * (p - 2.0)
    for i in range(n):
        g = (u[i + 1] - u[i]) / h
        o[i] = cface[i] * pow(g * g + d2, e)
    return out


def tridiag_solve(double[::1] dl, double[::1] d, double[::1] du,
                  double[::1] rhs):
    """Thomas algorithm; valid for the diagonally dominant systems the
    implicit stepper produces."""
    cdef Py_ssize_t n = d.shape[0]
    cdef cnp.ndarray[double, ndim=1] x = np.empty(n)
    cdef double[::1] xv = x
    cdef cnp.ndarray[double, ndim=1] cp = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] dp = np.empty(n)
    cdef double[::1] c = cp, y = dp
    cdef Py_ssize_t i
    cdef double m
    c[0] = du[0] / d[0] if n > 1 else 0.0
    y[0] = rhs[0] / d[0]
    for i in range(1, n):
        m = d[i] - dl[i - 1] * c[i - 1]
        c[i] = du[i] / m if i < n - 1 else 0.0
        y[i] = (rhs[i] - dl[i - 1] * y[i - 1]) / m
    xv[n - 1] = y[n - 1]
    for i in range(n - 2, -1, -1):
        xv[i] = y[i] - c[i] * xv[i + 1]
    return x


cdef void _x_face_grads(double[:, ::1] u, double h, double[:, ::1] gx,
                        double[:, ::1] gy) noexcept:
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1]
    cdef Py_ssize_t i, j
    for i in range(nx - 1):
        for j in range(ny):
            gx[i, j] = (u[i + 1, j] - u[i, j]) / h
            if 0 < j < ny - 1:
                gy[i, j] = (u[i, j + 1] + u[i + 1, j + 1]
                            - u[i, j - 1] - u[i + 1, j - 1]) / (4.0 * h)
            else:
                gy[i, j] = 0.0


def flux_faces_2d(double[:, ::1] u, double h, double p, double delta,
                  double[:, ::1] cfx, double[:, ::1] cfy):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1]
    cdef cnp.ndarray[double, ndim=2] fx = np.empty((nx - 1, ny))
    cdef cnp.ndarray[double, ndim=2] fy = np.empty((nx, ny - 1))
    cdef double[:, ::1] fxv = fx, fyv = fy
    cdef cnp.ndarray[double, ndim=2] gxa = np.empty((nx - 1, ny))
    cdef cnp.ndarray[double, ndim=2] gya = np.empty((nx - 1, ny))
    cdef double[:, ::1] gx = gxa, gy = gya
    cdef Py_ssize_t i, j
    cdef double s, gn, gt, d2 = delta * delta, e = 0.5 * (p - 2.0)
    _x_face_grads(u, h, gx, gy)
    for i in range(nx - 1):
        for j in range(ny):
            s = gx[i, j] * gx[i, j] + gy[i, j] * gy[i, j] + d2
            fxv[i, j] = cfx[i, j] * pow(s, e) * gx[i, j]
    for i in range(nx):
        for j in range(ny - 1):
            gn = (u[i, j + 1] - u[i, j]) / h
            if 0 < i < nx - 1:
                gt = (u[i + 1, j] + u[i + 1, j + 1]
                      - u[i - 1, j] - u[i - 1, j + 1]) / (4.0 * h)
            else:
                gt = 0.0
            s = gn * gn + gt * gt + d2
            fyv[i, j] = cfy[i, j] * pow(s, e) * gn
    return fx, fy


def newton_faces_2d(double[:, ::1] u, double h, double p, double delta,
                    double[:, ::1] cfx, double[:, ::1] cfy):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1]
    cdef cnp.ndarray[double, ndim=2] ax = np.empty((nx - 1, ny))
    cdef cnp.ndarray[double, ndim=2] ay = np.empty((nx, ny - 1))
    cdef double[:, ::1] axv = ax, ayv = ay
    cdef cnp.ndarray[double, ndim=2] gxa = np.empty((nx - 1, ny))
    cdef cnp.ndarray[double, ndim=2] gya = np.empty((nx - 1, ny))
    cdef double[:, ::1] gx = gxa, gy = gya
    cdef Py_ssize_t i, j
    cdef double s, gn, gt, d2 = delta * delta
    cdef double e2 = 0.5 * (p - 2.0), e4 = 0.5 * (p - 4.0)
    _x_face_grads(u, h, gx, gy)
    for i in range(nx - 1):
        for j in range(ny):
            s = gx[i, j] * gx[i, j] + gy[i, j] * gy[i, j] + d2
            axv[i, j] = cfx[i, j] * (pow(s, e2)
                                     + (p - 2.0) * pow(s, e4)
                                     * gx[i, j] * gx[i, j])
    for i in range(nx):
        for j in range(ny - 1):
            gn = (u[i, j + 1] - u[i, j]) / h
            if 0 < i < nx - 1:
                gt = (u[i + 1, j] + u[i + 1, j + 1]
                      - u[i - 1, j] - u[i - 1, j + 1]) / (4.0 * h)
            else:
                gt = 0.0
            s = gn * gn + gt * gt + d2
            ayv[i, j] = cfy[i, j] * (pow(s, e2)
                                     + (p - 2.0) * pow(s, e4) * gn * gn)
    return ax, ay


def diffusivity_faces_2d(double[:, ::1] u, double h, double p, double delta,
                         double[:, ::1] cfx, double[:, ::1] cfy):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1]
    cdef cnp.ndarray[double, ndim=2] wx = np.empty((nx - 1, ny))
    cdef cnp.ndarray[double, ndim=2] wy = np.empty((nx, ny - 1))
    cdef double[:, ::1] wxv = wx, wyv = wy
    cdef cnp.ndarray[double, ndim=2] gxa = np.empty((nx - 1, ny))
    cdef cnp.ndarray[double, ndim=2] gya = np.empty((nx - 1, ny))
    cdef double[:, ::1] gx = gxa, gy = gya
    cdef Py_ssize_t i, j
    cdef double s, gn, gt, d2 = delta * delta, e = 0.5 * (p - 2.0)
    _x_face_grads(u, h, gx, gy)
    for i in range(nx - 1):
        for j in range(ny):
            s = gx[i, j] * gx[i, j] + gy[i, j] * gy[i, j] + d2
            wxv[i, j] = cfx[i, j] * pow(s, e)
    for i in range(nx):
        for j in range(ny - 1):
            gn = (u[i, j + 1] - u[i, j]) / h
            if 0 < i < nx - 1:
                gt = (u[i + 1, j] + u[i + 1, j + 1]
                      - u[i - 1, j] - u[i - 1, j + 1]) / (4.0 * h)
            else:
                gt = 0.0
            s = gn * gn + gt * gt + d2
            wyv[i, j] = cfy[i, j] * pow(s, e)
    return wx, wy


def trunc_pow_sum(double[::1] values, unsigned char[::1] mask,
                  double level, double power):
    cdef Py_ssize_t i, n = values.shape[0]
    cdef double acc = 0.0, v
    for i in range(n):
        if mask[i]:
            v = values[i] - level
            if v > 0.0:
                acc += pow(v, power)
    return acc


def masked_max(double[::1] values, unsigned char[::1] mask):
    cdef Py_ssize_t i, n = values.shape[0]
    cdef double best = -np.inf
    cdef bint seen = False
    for i in range(n):
        if mask[i]:
            if not seen or values[i] > best:
                best = values[i]
                seen = True
    return best
