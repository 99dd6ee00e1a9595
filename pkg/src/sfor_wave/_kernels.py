"""Hot loops: kernel rows, history sums, tridiagonal solves.

Every kernel has a numba variant (``*_nb``) and a pure-numpy variant
(``*_np``). The module-level names without suffix point at the backend
picked by :mod:`sfor_wave._accel`. Both variants are kept importable so
tests and the benchmark can compare them.

Conventions: ``points`` holds t_0..t_N, ``steps`` holds tau_1..tau_N at
indices 0..N-1. A kernel row for level n has length n and stores
A^{(n)}_{n-k} at index k-1, so it lines up with increments 1..n.
"""

import math

import numpy as np
import scipy.linalg

from ._accel import USE_NUMBA, njit

# Switch between the series and the closed form of the Alikhanov moment.
_MOMENT_SERIES_MAX = 0.3


# ---------------------------------------------------------------- numba path


@njit
def _moment_nb(w1, tau, beta, g1b):
    # int_{t_{k-1}}^{t_k} (s - t_{k-1/2}) w_{1-beta}(t_{n-theta} - s) ds
    h = 0.5 * tau
    c = w1 + h
    x = h / c
    if x < _MOMENT_SERIES_MAX:
        s = 0.0
        pj = beta
        xp = x * x * x
        j = 1
        for _ in range(200):
            term = pj * 2.0 * xp / (j + 2)
            s += term
            if abs(term) <= 1e-18 * abs(s):
                break
            pj *= (beta + j) / (j + 1) * (beta + j + 1) / (j + 2)
            xp *= x * x
            j += 2
        return c ** (2.0 - beta) * s / g1b
    p = 1.0 - beta
    w0 = w1 + tau
    return (c * (w0**p - w1**p) / p - (w0 ** (2.0 - beta) - w1 ** (2.0 - beta)) / (2.0 - beta)) / g1b


@njit
def l1_row_nb(points, steps, n, beta, g2b):
    p = 1.0 - beta
    out = np.empty(n)
    tn = points[n]
    for k in range(1, n + 1):
        tau = steps[k - 1]
        d = tn - points[k]
        if d <= 0.0:
            val = tau**p
        else:
            val = d**p * math.expm1(p * math.log1p(tau / d))
        out[k - 1] = val / (tau * g2b)
    return out


@njit
def alikhanov_row_nb(points, steps, n, beta, theta, g1b, g2b):
    p = 1.0 - beta
    out = np.empty(n)
    tau_n = steps[n - 1]
    a0 = ((1.0 - theta) * tau_n) ** p / (tau_n * g2b)
    if n == 1:
        out[0] = a0
        return out
    a = np.empty(n - 1)
    b = np.empty(n - 1)
    off = (1.0 - theta) * tau_n
    tnm1 = points[n - 1]
    for k in range(1, n):
        tau = steps[k - 1]
        w1 = (tnm1 - points[k]) + off
        a[k - 1] = w1**p * math.expm1(p * math.log1p(tau / w1)) / (tau * g2b)
        b[k - 1] = 2.0 * _moment_nb(w1, tau, beta, g1b) / (tau * (tau + steps[k]))
    out[n - 1] = a0 + steps[n - 2] / steps[n - 1] * b[n - 2]
    for k in range(2, n):
        out[k - 1] = a[k - 1] + steps[k - 2] / steps[k - 1] * b[k - 2] - b[k - 1]
    out[0] = a[0] - b[0]
    return out


@njit
def history_nb(coeffs, incr, m):
    ncol = incr.shape[1]
    out = np.zeros(ncol)
    for k in range(1, m + 1):
        c = coeffs[k - 1]
        for j in range(ncol):
            out[j] += c * incr[k, j]
    return out


@njit
def spd_tridiag_solve_nb(diag, off, rhs):
    """Thomas sweep; returns (x, ok). ok is False on a nonpositive pivot."""
    n = diag.shape[0]
    cp = np.empty(n)
    x = np.empty(n)
    piv = diag[0]
    if not piv > 0.0:
        return x, False
    cp[0] = off[0] / piv if n > 1 else 0.0
    x[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - off[i - 1] * cp[i - 1]
        if not piv > 0.0:
            return x, False
        if i < n - 1:
            cp[i] = off[i] / piv
        x[i] = (rhs[i] - off[i - 1] * x[i - 1]) / piv
    for i in range(n - 2, -1, -1):
        x[i] -= cp[i] * x[i + 1]
    return x, True


# ---------------------------------------------------------------- numpy path


def _moment_np(w1, tau, beta, g1b):
    h = 0.5 * tau
    c = w1 + h
    x = h / c
    out = np.empty_like(w1)
    small = x < _MOMENT_SERIES_MAX
    if np.any(small):
        xs = x[small]
        s = np.zeros_like(xs)
        pj = beta
        xp = xs**3
        j = 1
        for _ in range(200):
            term = pj * 2.0 * xp / (j + 2)
            s += term
            if np.all(np.abs(term) <= 1e-18 * np.abs(s)):
                break
            pj *= (beta + j) / (j + 1) * (beta + j + 1) / (j + 2)
            xp = xp * xs * xs
            j += 2
        out[small] = c[small] ** (2.0 - beta) * s / g1b
    big = ~small
    if np.any(big):
        p = 1.0 - beta
        w1b, cb = w1[big], c[big]
        w0 = w1b + tau[big]
        out[big] = (cb * (w0**p - w1b**p) / p - (w0 ** (2.0 - beta) - w1b ** (2.0 - beta)) / (2.0 - beta)) / g1b
    return out


def l1_row_np(points, steps, n, beta, g2b):
    p = 1.0 - beta
    tau = steps[:n]
    d = points[n] - points[1 : n + 1]
    val = np.empty(n)
    val[-1] = tau[-1] ** p
    dd = d[:-1]
    val[:-1] = dd**p * np.expm1(p * np.log1p(tau[:-1] / dd))
    return val / (tau * g2b)


def alikhanov_row_np(points, steps, n, beta, theta, g1b, g2b):
    p = 1.0 - beta
    tau_n = steps[n - 1]
    a0 = ((1.0 - theta) * tau_n) ** p / (tau_n * g2b)
    if n == 1:
        return np.array([a0])
    tau = steps[: n - 1]
    w1 = (points[n - 1] - points[1:n]) + (1.0 - theta) * tau_n
    a = w1**p * np.expm1(p * np.log1p(tau / w1)) / (tau * g2b)
    b = 2.0 * _moment_np(w1, tau, beta, g1b) / (tau * (tau + steps[1:n]))
    rho = steps[: n - 1] / steps[1:n]  # rho_1..rho_{n-1}
    out = np.empty(n)
    out[n - 1] = a0 + rho[n - 2] * b[n - 2]
    out[1 : n - 1] = a[1:] + rho[: n - 2] * b[: n - 2] - b[1:]
    out[0] = a[0] - b[0]
    return out


def history_np(coeffs, incr, m):
    if m == 0:
        return np.zeros(incr.shape[1])
    return coeffs[:m] @ incr[1 : m + 1]


def spd_tridiag_solve_np(diag, off, rhs):
    ab = np.empty((2, diag.shape[0]))
    ab[0, 0] = 0.0
    ab[0, 1:] = off
    ab[1] = diag
    try:
        cb = scipy.linalg.cholesky_banded(ab, lower=False)
    except np.linalg.LinAlgError:
        return np.empty_like(rhs), False
    return scipy.linalg.cho_solve_banded((cb, False), rhs), True


if USE_NUMBA:
    l1_row = l1_row_nb
    alikhanov_row = alikhanov_row_nb
    history = history_nb
    spd_tridiag_solve = spd_tridiag_solve_nb
    BACKEND = "numba"
else:
    l1_row = l1_row_np
    alikhanov_row = alikhanov_row_np
    history = history_np
    spd_tridiag_solve = spd_tridiag_solve_np
    BACKEND = "numpy"
