# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled tableau kernels; same contracts as ``_tableau_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def pivot(double[:, ::1] T, Py_ssize_t row, Py_ssize_t col):
    cdef Py_ssize_t m = T.shape[0], n = T.shape[1], i, j
    cdef double piv = T[row, col]
    cdef double factor
    for j in range(n):
        T[row, j] /= piv
    T[row, col] = 1.0
    for i in range(m):
        if i == row:
            continue
        factor = T[i, col]
        if factor == 0.0:
            continue
        for j in range(n):
            T[i, j] -= factor * T[row, j]
        T[i, col] = 0.0


def entering_bland(double[::1] costs, Py_ssize_t ncols, double tol):
    cdef Py_ssize_t j
    for j in range(ncols):
        if costs[j] < -tol:
            return j
    return -1


def leaving_bland(double[:, ::1] T, Py_ssize_t col, Py_ssize_t nrows,
                  cnp.int64_t[::1] basis, double tol):
    cdef Py_ssize_t i, best_row = -1, rhs = T.shape[1] - 1
    cdef double a, ratio, best = 0.0, cutoff
    cdef bint found = False
    for i in range(nrows):
        a = T[i, col]
        if a > tol:
            ratio = T[i, rhs] / a
            if not found or ratio < best:
                best = ratio
                found = True
    if not found:
        return -1
    cutoff = best + tol * (best if best > 1.0 else 1.0)
    for i in range(nrows):
        a = T[i, col]
        if a > tol and T[i, rhs] / a <= cutoff:
            if best_row < 0 or basis[i] < basis[best_row]:
                best_row = i
    return best_row
