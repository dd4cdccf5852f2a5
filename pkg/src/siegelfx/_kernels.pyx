# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled batch kernels; see ``_kernels_py`` for the reference semantics."""

import numpy as np

from libc.float cimport DBL_MAX, DBL_MIN
from libc.math cimport exp, log, sqrt
from libc.stdlib cimport malloc, free
from libcpp.algorithm cimport sort

from . import _kernels_py

NAME = "cython"

# Past this row width numpy's vectorised sort beats a per-row std::sort
# (see benchmarks/bench_kernels.py), so sort-based kernels hand over.
SORT_CUTOFF = 12
MEDIAN_CUTOFF = 6


cdef inline void _sort_row(const double[:, ::1] X, Py_ssize_t i, double *buf) noexcept nogil:
    cdef Py_ssize_t j, n = X.shape[1]
    for j in range(n):
        buf[j] = X[i, j]
    sort(buf, buf + n)


cdef inline double _row_min(const double[:, ::1] X, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t j
    cdef double v = X[i, 0]
    for j in range(1, X.shape[1]):
        if X[i, j] < v:
            v = X[i, j]
    return v


cdef inline double _pivoted_log_mean(const double[:, ::1] X, Py_ssize_t i, double piv) noexcept nogil:
    # logs relative to the row minimum: constant rows give exact zeros
    cdef Py_ssize_t j, n = X.shape[1]
    cdef double s = 0.0, lp = log(piv)
    for j in range(n):
        s += log(X[i, j]) - lp
    return s / n


def log_mean_rows(const double[:, ::1] X):
    cdef Py_ssize_t m = X.shape[0], i
    cdef double piv
    out = np.empty(m)
    cdef double[::1] o = out
    with nogil:
        for i in range(m):
            piv = _row_min(X, i)
            o[i] = log(piv) + _pivoted_log_mean(X, i, piv)
    return out


def geometric_rows(const double[:, ::1] X):
    cdef Py_ssize_t m = X.shape[0], i
    cdef double piv
    out = np.empty(m)
    cdef double[::1] o = out
    with nogil:
        for i in range(m):
            piv = _row_min(X, i)
            o[i] = piv * exp(_pivoted_log_mean(X, i, piv))
    return out


def arithmetic_rows(const double[:, ::1] X):
    cdef Py_ssize_t m = X.shape[0], n = X.shape[1], i, j
    cdef double s
    out = np.empty(m)
    cdef double[::1] o = out
    with nogil:
        for i in range(m):
            s = 0.0
            for j in range(n):
                s += X[i, j]
            o[i] = s / n
    return out


def harmonic_rows(const double[:, ::1] X):
    cdef Py_ssize_t m = X.shape[0], n = X.shape[1], i, j
    cdef double s
    out = np.empty(m)
    cdef double[::1] o = out
    with nogil:
        for i in range(m):
            s = 0.0
            for j in range(n):
                s += 1.0 / X[i, j]
            o[i] = 1.0 / (s / n)
    return out


def sorted_rows(const double[:, ::1] X):
    cdef Py_ssize_t m = X.shape[0], n = X.shape[1], i
    out = np.empty((m, n))
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(m):
            _sort_row(X, i, &o[i, 0])
    return out


def median_rows(const double[:, ::1] X):
    cdef Py_ssize_t m = X.shape[0], n = X.shape[1], i
    cdef double p
    if n > MEDIAN_CUTOFF:
        return _kernels_py.median_rows(np.asarray(X))
    out = np.empty(m)
    cdef double[::1] o = out
    cdef double *buf = <double *>malloc(n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(m):
                _sort_row(X, i, buf)
                if n % 2:
                    o[i] = buf[n // 2]
                else:
                    p = buf[n // 2 - 1] * buf[n // 2]
                    if DBL_MIN <= p <= DBL_MAX:
                        o[i] = sqrt(p)
                    else:
                        o[i] = sqrt(buf[n // 2 - 1]) * sqrt(buf[n // 2])
    finally:
        free(buf)
    return out


def ratio_rows(const double[:, ::1] X):
    cdef Py_ssize_t m = X.shape[0], n = X.shape[1], i, k
    if n > SORT_CUTOFF:
        return _kernels_py.ratio_rows(np.asarray(X))
    out = np.empty((m, n - 1))
    cdef double[:, ::1] o = out
    cdef double *buf = <double *>malloc(n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(m):
                _sort_row(X, i, buf)
                for k in range(n - 1):
                    o[i, k] = buf[n - 1 - k] / buf[n - 2 - k]
    finally:
        free(buf)
    return out


def power_beta_rows(const double[:, ::1] X, a):
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t m = X.shape[0], n = X.shape[1], i, j, k
    cdef double s, t, piv
    if av.shape[0] != n - 1:
        raise ValueError("exponent count must be n - 1")
    if n > SORT_CUTOFF:
        return _kernels_py.power_beta_rows(np.asarray(X), np.asarray(av))
    out = np.empty(m)
    cdef double[::1] o = out
    cdef double *buf = <double *>malloc(n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(m):
                piv = _row_min(X, i)
                t = log(piv)
                for j in range(n):
                    buf[j] = log(X[i, j]) - t
                # log is monotone, so sorting logs gives the log order statistics
                sort(buf, buf + n)
                s = 0.0
                for j in range(n):
                    s += buf[j]
                s /= n
                for k in range(n - 1):
                    s += av[k] * (buf[n - 1 - k] - buf[n - 2 - k])
                o[i] = piv * exp(s)
    finally:
        free(buf)
    return out


def weighted_log_mean(const double[::1] x, const double[::1] w):
    cdef Py_ssize_t j
    cdef double s = 0.0
    for j in range(x.shape[0]):
        s += w[j] * log(x[j])
    return s
