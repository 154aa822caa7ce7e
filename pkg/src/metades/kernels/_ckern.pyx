# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same contracts as `_pykern`; see that module."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, INFINITY

cnp.import_array()


def perceptron_epochs(const double[:, ::1] x, const double[::1] ypm,
                      const long long[:, ::1] orders, double lr,
                      double w0, double w1, double b):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t epochs = orders.shape[0]
    cdef Py_ssize_t e, t, j
    cdef double a, pred, yj
    for e in range(epochs):
        for t in range(n):
            j = <Py_ssize_t> orders[e, t]
            a = w0 * x[j, 0] + w1 * x[j, 1] + b
            pred = 1.0 if a >= 0.0 else -1.0
            yj = ypm[j]
            if pred != yj:
                w0 += lr * yj * x[j, 0]
                w1 += lr * yj * x[j, 1]
                b += lr * yj
    return w0, w1, b


cdef void _select_smallest(double* d, Py_ssize_t n, Py_ssize_t k,
                           long long* out) noexcept nogil:
    # Repeated min scan; strict < keeps the lowest index on ties.
    cdef Py_ssize_t slot, j, arg
    cdef double best
    for slot in range(k):
        arg = -1
        best = INFINITY
        for j in range(n):
            if d[j] < best:
                best = d[j]
                arg = j
        out[slot] = arg
        d[arg] = INFINITY


def knn_indices(const double[:, ::1] queries, const double[:, ::1] points,
                Py_ssize_t k, const long long[::1] skip):
    cdef Py_ssize_t nq = queries.shape[0]
    cdef Py_ssize_t n = points.shape[0]
    out_arr = np.empty((nq, k), dtype=np.int64)
    cdef long long[:, ::1] out = out_arr
    buf_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] buf = buf_arr
    cdef Py_ssize_t i, j
    cdef double qx, qy, dx, dy
    for i in range(nq):
        qx = queries[i, 0]
        qy = queries[i, 1]
        for j in range(n):
            dx = qx - points[j, 0]
            dy = qy - points[j, 1]
            buf[j] = dx * dx + dy * dy
        if skip[i] >= 0:
            buf[<Py_ssize_t> skip[i]] = INFINITY
        _select_smallest(&buf[0], n, k, &out[i, 0])
    return out_arr


def profile_knn_indices(const unsigned char[:, ::1] profiles,
                        const unsigned char[:, ::1] ref_profiles,
                        Py_ssize_t kp, const long long[::1] skip):
    cdef Py_ssize_t nq = profiles.shape[0]
    cdef Py_ssize_t n = ref_profiles.shape[0]
    cdef Py_ssize_t m = profiles.shape[1]
    out_arr = np.empty((nq, kp), dtype=np.int64)
    cdef long long[:, ::1] out = out_arr
    buf_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] buf = buf_arr
    cdef Py_ssize_t i, j, c, ham
    for i in range(nq):
        for j in range(n):
            ham = 0
            for c in range(m):
                if profiles[i, c] != ref_profiles[j, c]:
                    ham += 1
            buf[j] = <double> ham
        if skip[i] >= 0:
            buf[<Py_ssize_t> skip[i]] = INFINITY
        _select_smallest(&buf[0], n, kp, &out[i, 0])
    return out_arr


def assemble_meta(const long long[:, ::1] roc_idx, const long long[:, ::1] prof_idx,
                  const unsigned char[:, ::1] correct, const double[:, ::1] post_true,
                  const double[:, ::1] confidence, Py_ssize_t k, Py_ssize_t kp):
    cdef Py_ssize_t nq = confidence.shape[0]
    cdef Py_ssize_t m = confidence.shape[1]
    cdef Py_ssize_t dim = 2 * k + kp + 2
    out_arr = np.empty((nq, m, dim), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t q, i, t, nb, cnt
    with nogil:
        for q in range(nq):
            for i in range(m):
                cnt = 0
                for t in range(k):
                    nb = <Py_ssize_t> roc_idx[q, t]
                    if correct[nb, i]:
                        out[q, i, t] = 1.0
                        cnt += 1
                    else:
                        out[q, i, t] = 0.0
                    out[q, i, k + t] = post_true[nb, i]
                out[q, i, 2 * k] = (<double> cnt) / (<double> k)
                for t in range(kp):
                    nb = <Py_ssize_t> prof_idx[q, t]
                    out[q, i, 2 * k + 1 + t] = 1.0 if correct[nb, i] else 0.0
                out[q, i, dim - 1] = confidence[q, i]
    return out_arr


def gnb_delta(const double[:, ::1] v, const double[:, ::1] means,
              const double[:, ::1] half_inv_var, const double[::1] class_const):
    cdef Py_ssize_t ns = v.shape[0]
    cdef Py_ssize_t dim = v.shape[1]
    out_arr = np.empty(ns, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, d
    cdef double s0, s1, diff, hi, e0, e1
    with nogil:
        for i in range(ns):
            s0 = class_const[0]
            s1 = class_const[1]
            for d in range(dim):
                diff = v[i, d] - means[0, d]
                s0 -= diff * diff * half_inv_var[0, d]
                diff = v[i, d] - means[1, d]
                s1 -= diff * diff * half_inv_var[1, d]
            hi = s0 if s0 > s1 else s1
            e0 = exp(s0 - hi)
            e1 = exp(s1 - hi)
            out[i] = e1 / (e0 + e1)
    return out_arr
