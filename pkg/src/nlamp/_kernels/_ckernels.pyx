# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled grid kernels; same contract as ``_pykernels``."""
import numpy as np

from libc.math cimport exp, floor, sqrt, M_PI


def q_function(lam, coeffs, xs, ys):
    cdef const double[::1] w = np.ascontiguousarray(lam, dtype=np.float64)
    cdef const double complex[:, ::1] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef const double[::1] x = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] y = np.ascontiguousarray(ys, dtype=np.float64)
    cdef Py_ssize_t rank = c.shape[0], dim = c.shape[1]
    cdef Py_ssize_t nx = x.shape[0], ny = y.shape[0]
    out_arr = np.empty((nx, ny), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    work = np.empty((3, ny), dtype=np.float64)
    cdef double[::1] sr = work[0]
    cdef double[::1] si = work[1]
    cdef double[::1] total = work[2]
    cdef Py_ssize_t i, j, k, n
    cdef double ar, tr, br, bi

    for i in range(nx):
        ar = x[i]
        for j in range(ny):
            total[j] = 0.0
        for k in range(rank):
            # Horner evaluation of sum_n c[k, n] alpha^n along the whole row;
            # the nodes are independent, so the inner loop vectorizes
            br = c[k, dim - 1].real
            bi = c[k, dim - 1].imag
            for j in range(ny):
                sr[j] = br
                si[j] = bi
            for n in range(dim - 2, -1, -1):
                br = c[k, n].real
                bi = c[k, n].imag
                for j in range(ny):
                    tr = sr[j] * ar - si[j] * y[j] + br
                    si[j] = sr[j] * y[j] + si[j] * ar + bi
                    sr[j] = tr
            for j in range(ny):
                total[j] += w[k] * (sr[j] * sr[j] + si[j] * si[j])
        for j in range(ny):
            out[i, j] = total[j] * exp(-(ar * ar + y[j] * y[j])) / M_PI
    return out_arr


def reweight_resample(values, xs, ys, double g):
    cdef const double[:, ::1] q = np.ascontiguousarray(values, dtype=np.float64)
    cdef const double[::1] x = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] y = np.ascontiguousarray(ys, dtype=np.float64)
    cdef Py_ssize_t nx = x.shape[0], ny = y.shape[0]
    out_arr = np.zeros((nx, ny), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double hx = x[1] - x[0], hy = y[1] - y[0]
    cdef double g2m1 = g * g - 1.0
    cdef Py_ssize_t i, j, ix, iy
    cdef double fx, fy, tx, ty, val

    for i in range(nx):
        fx = (g * x[i] - x[0]) / hx
        if fx < 0:
            continue
        ix = <Py_ssize_t>floor(fx)
        if ix == nx - 1:
            ix = nx - 2
        if ix > nx - 2:
            continue
        tx = fx - ix
        for j in range(ny):
            fy = (g * y[j] - y[0]) / hy
            if fy < 0:
                continue
            iy = <Py_ssize_t>floor(fy)
            if iy == ny - 1:
                iy = ny - 2
            if iy > ny - 2:
                continue
            ty = fy - iy
            val = ((1 - tx) * (1 - ty) * q[ix, iy] + tx * (1 - ty) * q[ix + 1, iy]
                   + (1 - tx) * ty * q[ix, iy + 1] + tx * ty * q[ix + 1, iy + 1])
            out[i, j] = exp(g2m1 * (x[i] * x[i] + y[j] * y[j])) * val
    return out_arr
