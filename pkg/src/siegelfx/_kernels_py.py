"""Pure numpy implementation of the batch kernels.

Every kernel takes a C-contiguous ``(m, n)`` float64 array whose rows are
scenarios and returns one value (or row) per scenario. The compiled module
``_kernels`` exposes the same names and semantics.
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def _pivoted_logs(X):
    # logs relative to the row minimum: constant rows give exact zeros
    m = X.min(axis=1)
    return m, np.log(X) - np.log(m)[:, None]


def log_mean_rows(X):
    m, L = _pivoted_logs(X)
    return np.log(m) + L.mean(axis=1)


def geometric_rows(X):
    m, L = _pivoted_logs(X)
    return m * np.exp(L.mean(axis=1))


def arithmetic_rows(X):
    return X.mean(axis=1)


def harmonic_rows(X):
    return 1.0 / (1.0 / X).mean(axis=1)


def sorted_rows(X):
    return np.sort(X, axis=1, kind="stable")


def median_rows(X):
    n = X.shape[1]
    S = np.sort(X, axis=1)
    if n % 2:
        return S[:, n // 2].copy()
    lo, hi = S[:, n // 2 - 1], S[:, n // 2]
    prod = lo * hi
    safe = np.isfinite(prod) & (prod >= np.finfo(np.float64).tiny)
    # split sqrt only where the product leaves the normal range
    return np.where(safe, np.sqrt(prod), np.sqrt(lo) * np.sqrt(hi))


def ratio_rows(X):
    """Consecutive order-statistic ratios, largest pair first."""
    S = np.sort(X, axis=1)
    return (S[:, 1:] / S[:, :-1])[:, ::-1].copy()


def power_beta_rows(X, a):
    """Geometric mean times prod(u_k ** a_k) over the consecutive ratios u."""
    m, L = _pivoted_logs(X)
    L = np.sort(L, axis=1)
    log_u = np.diff(L, axis=1)[:, ::-1]
    return m * np.exp(L.mean(axis=1) + log_u @ np.asarray(a, dtype=np.float64))


def weighted_log_mean(x, w):
    return float(np.dot(w, np.log(x)))
