# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled reference-solver kernel (see fallback.py for the numpy twin)."""

import numpy as np


def ista_solve(double[:, ::1] AtA, double[::1] Atb, double lam, double s,
               double[::1] x0, long iters):
    """Run ``iters`` proximal-gradient steps x <- soft(x - s*(AtA x - Atb), lam*s)."""
    cdef Py_ssize_t d = Atb.shape[0]
    cdef Py_ssize_t i, j
    cdef long it
    cdef double acc, ui
    cdef double thresh = lam * s

    x_arr = np.array(x0, dtype=np.float64)
    u_arr = np.empty(d, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double[::1] u = u_arr

    for it in range(iters):
        for i in range(d):
            acc = 0.0
            for j in range(d):
                acc += AtA[i, j] * x[j]
            u[i] = x[i] - s * (acc - Atb[i])
        for i in range(d):
            ui = u[i]
            if ui > thresh:
                x[i] = ui - thresh
            elif ui < -thresh:
                x[i] = ui + thresh
            else:
                x[i] = 0.0
    return x_arr
