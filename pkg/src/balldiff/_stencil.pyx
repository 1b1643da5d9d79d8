# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled three-point stencil kernel.

Arithmetic is ordered exactly as in the numpy fallback; together with
-ffp-contract=off at build time the two backends agree bit for bit.
"""
import numpy as np


def apply_passes(const double[::1] values, const double[::1] nus):
    """Run one explicit stencil pass per entry of ``nus``.

    Interior nodes update as v[i] + nu * (v[i+1] - 2 v[i] + v[i-1]);
    the two edge nodes keep their incoming values.
    """
    cdef Py_ssize_t nx = values.shape[0]
    cdef Py_ssize_t n_pass = nus.shape[0]
    if nx < 3:
        raise ValueError("stencil needs at least 3 nodes")

    a_arr = np.array(values, dtype=np.float64)
    b_arr = np.empty(nx, dtype=np.float64)
    cdef double[::1] a = a_arr
    cdef double[::1] b = b_arr
    cdef double[::1] tmp
    cdef double nu
    cdef Py_ssize_t i, j

    for j in range(n_pass):
        nu = nus[j]
        b[0] = a[0]
        b[nx - 1] = a[nx - 1]
        for i in range(1, nx - 1):
            b[i] = a[i] + nu * ((a[i + 1] - 2.0 * a[i]) + a[i - 1])
        tmp = a
        a = b
        b = tmp

    return np.asarray(a)
