# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled dynamics kernel; mirrors _kernel_py.dyn_eval exactly.

Small dense problems (n up to ~100) dominate, so the Cholesky solve is
hand-rolled over typed memoryviews to avoid per-call Python and LAPACK
dispatch overhead inside the integrator's inner loop.
"""

import numpy as np
from numpy.linalg import LinAlgError

from libc.math cimport sqrt

NAME = "compiled"


def dyn_eval(double[:, ::1] Df, double[::1] inv_m, double[:, ::1] Le,
             double g, double[:, ::1] Q, double[:, ::1] Qdot, double[:, ::1] F):
    """See linksim._kernel_py.dyn_eval for the contract."""
    cdef Py_ssize_t n = Df.shape[0]
    cdef Py_ssize_t k = Df.shape[1]
    cdef Py_ssize_t i, j, a, b_i
    cdef double acc0, acc1, s, d

    qdd_arr = np.empty((n, 2))
    lam_arr = np.empty(k)
    cdef double[:, ::1] qdd = qdd_arr
    cdef double[::1] lam = lam_arr

    if k == 0:
        for i in range(n):
            qdd[i, 0] = F[i, 0] * inv_m[i]
            qdd[i, 1] = F[i, 1] * inv_m[i] - g
        return qdd_arr, lam_arr

    qe_arr = np.empty((k, 2))
    qed_arr = np.empty((k, 2))
    J_arr = np.empty((k, k))
    cdef double[:, ::1] qe = qe_arr
    cdef double[:, ::1] qed = qed_arr
    cdef double[:, ::1] J = J_arr

    # qe = Df^T Q, qed = Df^T Qdot
    for j in range(k):
        acc0 = 0.0
        acc1 = 0.0
        for i in range(n):
            d = Df[i, j]
            if d != 0.0:
                acc0 += d * Q[i, 0]
                acc1 += d * Q[i, 1]
        qe[j, 0] = acc0
        qe[j, 1] = acc1
        acc0 = 0.0
        acc1 = 0.0
        for i in range(n):
            d = Df[i, j]
            if d != 0.0:
                acc0 += d * Qdot[i, 0]
                acc1 += d * Qdot[i, 1]
        qed[j, 0] = acc0
        qed[j, 1] = acc1

    # J = Le o (qe qe^T); rhs b_j = (Df^T M^-1 F)_j . qe_j + |qed_j|^2
    for a in range(k):
        for j in range(k):
            J[a, j] = Le[a, j] * (qe[a, 0] * qe[j, 0] + qe[a, 1] * qe[j, 1])
    for j in range(k):
        acc0 = 0.0
        acc1 = 0.0
        for i in range(n):
            d = Df[i, j]
            if d != 0.0:
                acc0 += d * F[i, 0] * inv_m[i]
                acc1 += d * F[i, 1] * inv_m[i]
        lam[j] = acc0 * qe[j, 0] + acc1 * qe[j, 1] + qed[j, 0] ** 2 + qed[j, 1] ** 2

    # In-place lower Cholesky of J, then solve J lam = b (b held in lam).
    for j in range(k):
        s = J[j, j]
        for a in range(j):
            s -= J[j, a] * J[j, a]
        if s <= 0.0 or s != s:
            raise LinAlgError("multiplier matrix is not positive definite")
        d = sqrt(s)
        J[j, j] = d
        for i in range(j + 1, k):
            s = J[i, j]
            for a in range(j):
                s -= J[i, a] * J[j, a]
            J[i, j] = s / d
    for j in range(k):  # forward substitution
        s = lam[j]
        for a in range(j):
            s -= J[j, a] * lam[a]
        lam[j] = s / J[j, j]
    for b_i in range(k):  # back substitution on the transpose
        j = k - 1 - b_i
        s = lam[j]
        for a in range(j + 1, k):
            s -= J[a, j] * lam[a]
        lam[j] = s / J[j, j]

    # qdd = (F - D diag(lam) qe) / m - [0, g]
    for i in range(n):
        acc0 = 0.0
        acc1 = 0.0
        for j in range(k):
            d = Df[i, j]
            if d != 0.0:
                acc0 += d * lam[j] * qe[j, 0]
                acc1 += d * lam[j] * qe[j, 1]
        qdd[i, 0] = (F[i, 0] - acc0) * inv_m[i]
        qdd[i, 1] = (F[i, 1] - acc1) * inv_m[i] - g
    return qdd_arr, lam_arr
