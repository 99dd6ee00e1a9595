"""Discrete Caputo kernels (L1 and Alikhanov) and their complementary kernels."""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import _kernels
from .errors import ValidationError
from .mesh import GradedMesh

# Step-ratio bound under which the Alikhanov rows are known to satisfy A1.
ALIKHANOV_RATIO_LIMIT = 7.0 / 4.0

PI_L1 = 1.0
PI_ALIKHANOV = 11.0 / 4.0


@dataclass(frozen=True)
class KernelRow:
    """Coefficients of the discrete Caputo derivative at level n.

    ``coeffs[k-1]`` multiplies the increment u^k - u^{k-1}; so ``coeffs[-1]``
    is A^{(n)}_0 and ``coeffs[0]`` is A^{(n)}_{n-1}.
    """

    n: int
    beta: float
    theta: float
    coeffs: np.ndarray

    @property
    def leading(self):
        return float(self.coeffs[-1])

    def by_lag(self):
        """Coefficients reordered as A_0, A_1, ..., A_{n-1}."""
        return self.coeffs[::-1].copy()

    def apply(self, values):
        """Discrete derivative at level n of ``values`` (u^0..u^n, axis 0)."""
        values = np.asarray(values, dtype=float)
        return self.coeffs @ np.diff(values[: self.n + 1], axis=0)


def _check_beta(beta):
    if not 0 < beta < 1:
        raise ValidationError(f"fractional order beta must lie in (0, 1), got {beta}")


def _check_level(mesh, n):
    if not isinstance(mesh, GradedMesh):
        raise ValidationError("mesh must be a GradedMesh")
    if not 1 <= n <= mesh.N:
        raise ValidationError(f"level n={n} out of range 1..{mesh.N}")


def _as_arrays(mesh):
    return np.ascontiguousarray(mesh.points), np.ascontiguousarray(mesh.steps)


def l1_kernel_row(mesh, n, beta):
    """L1 coefficients A^{(n)}_{n-k} = int_{t_{k-1}}^{t_k} w_{1-beta}(t_n - s) ds / tau_k."""
    _check_beta(beta)
    _check_level(mesh, n)
    pts, st = _as_arrays(mesh)
    row = _kernels.l1_row(pts, st, n, float(beta), math.gamma(2.0 - beta))
    return KernelRow(n=n, beta=float(beta), theta=0.0, coeffs=row)


def _warn_ratio(mesh):
    if mesh.max_ratio > ALIKHANOV_RATIO_LIMIT:
        warnings.warn(
            f"max step ratio {mesh.max_ratio:.3f} exceeds {ALIKHANOV_RATIO_LIMIT}; "
            "Alikhanov kernel positivity is not guaranteed",
            RuntimeWarning,
            stacklevel=3,
        )


def alikhanov_kernel_row(mesh, n, beta, warn=True):
    """Alikhanov (L2-1_sigma) coefficients at the offset point t_{n-theta}, theta = beta/2."""
    _check_beta(beta)
    _check_level(mesh, n)
    if warn:
        _warn_ratio(mesh)
    theta = beta / 2.0
    pts, st = _as_arrays(mesh)
    row = _kernels.alikhanov_row(
        pts, st, n, float(beta), theta, math.gamma(1.0 - beta), math.gamma(2.0 - beta)
    )
    return KernelRow(n=n, beta=float(beta), theta=theta, coeffs=row)


def kernel_rows(mesh, beta, formula="L1"):
    """All rows n = 1..N for ``formula`` in {"L1", "ALIKHANOV"}."""
    formula = str(getattr(formula, "value", formula)).upper()
    if formula == "L1":
        return [l1_kernel_row(mesh, n, beta) for n in range(1, mesh.N + 1)]
    if formula == "ALIKHANOV":
        _check_beta(beta)
        _warn_ratio(mesh)
        return [alikhanov_kernel_row(mesh, n, beta, warn=False) for n in range(1, mesh.N + 1)]
    raise ValidationError(f"unknown formula {formula!r}")


@dataclass(frozen=True)
class ComplementaryKernels:
    """P^{(n)}_{n-j}, stored as a lower-triangular matrix ``P[n-1, j-1]``."""

    P: np.ndarray

    def row(self, n):
        return self.P[n - 1, :n]


def complementary_kernels(rows):
    """Complementary kernels for a full set of rows (levels 1..N).

    Defined by P^{(n)}_0 = 1/A^{(n)}_0 and
    P^{(n)}_{n-j} = (1/A^{(j)}_0) sum_{k=j+1}^n (A^{(k)}_{k-j-1} - A^{(k)}_{k-j}) P^{(n)}_{n-k},
    so that sum_{j=k}^n P^{(n)}_{n-j} A^{(j)}_{j-k} = 1.
    """
    N = len(rows)
    if N == 0:
        raise ValidationError("need at least one kernel row")
    # full[k-1, j-1] = A^{(k)}_{k-j} for j <= k
    full = np.zeros((N, N))
    for k, row in enumerate(rows, start=1):
        if row.n != k:
            raise ValidationError("rows must be ordered by level starting at 1")
        full[k - 1, :k] = row.coeffs
    if np.any(np.diag(full) <= 0):
        raise ValidationError("leading kernel coefficient A_0 must be positive")
    P = np.zeros((N, N))
    for n in range(1, N + 1):
        P[n - 1, n - 1] = 1.0 / full[n - 1, n - 1]
        for j in range(n - 1, 0, -1):
            ks = np.arange(j + 1, n + 1)
            diff = full[ks - 1, j] - full[ks - 1, j - 1]  # A^{(k)}_{k-j-1} - A^{(k)}_{k-j}
            P[n - 1, j - 1] = diff @ P[n - 1, ks - 1] / full[j - 1, j - 1]
    return ComplementaryKernels(P=P)


def complementary_identity_residual(rows, comp=None):
    """max_{n,k} |sum_{j=k}^n P^{(n)}_{n-j} A^{(j)}_{j-k} - 1|."""
    comp = comp or complementary_kernels(rows)
    N = len(rows)
    full = np.zeros((N, N))
    for k, row in enumerate(rows, start=1):
        full[k - 1, :k] = row.coeffs
    prod = comp.P @ full  # [n-1, k-1] = sum_j P[n,j] A^{(j)}_{j-k}
    mask = np.tril(np.ones((N, N), dtype=bool))
    return float(np.max(np.abs(prod[mask] - 1.0)))


def complementary_bound_ratio(mesh, rows, comp, beta, pi_a):
    """max of P^{(n)}_{n-j} / (pi_A Gamma(2-beta) tau_j^beta); at most 1 when the bound holds."""
    tau = np.asarray(mesh.steps)
    bound = pi_a * math.gamma(2.0 - beta) * tau**beta
    N = len(rows)
    mask = np.tril(np.ones((N, N), dtype=bool))
    ratio = comp.P / bound[None, :]
    return float(ratio[mask].max())


@dataclass(frozen=True)
class AssumptionReport:
    positive: bool
    monotone: bool
    a1_min_margin: float
    a2_standard: bool
    a2_standard_min_margin: float
    a2_printed: bool
    a2_printed_min_margin: float

    @property
    def a1(self):
        return self.positive and self.monotone


def check_a1(rows, rtol=1e-12):
    """A1: every row is positive and A_{k-1} >= A_k (non-increasing in the lag).

    Returns (positive, monotone, smallest relative margin).
    """
    margin = math.inf
    positive = monotone = True
    for row in rows:
        lag = row.by_lag()
        scale = abs(lag[0])
        if lag.min() <= 0:
            positive = False
        margin = min(margin, lag.min() / scale)
        if lag.size > 1:
            d = lag[:-1] - lag[1:]
            if d.min() < -rtol * scale:
                monotone = False
            margin = min(margin, d.min() / scale)
    return positive, monotone, float(margin)


def _a2_integrals(mesh, n, beta, theta, printed):
    # For each k: (1/tau_k) int_{t_{k-1}}^{t_k} w_{1-beta}(t_{n-theta} - s) ds,
    # optionally with the extra 1/s weight (which diverges on the first cell).
    t = np.asarray(mesh.points)
    tau = np.asarray(mesh.steps)
    tn = theta * t[n - 1] + (1.0 - theta) * t[n]
    g = math.gamma(2.0 - beta)
    hi = tn - t[: n]  # distance to t_{k-1}
    lo = tn - t[1 : n + 1]  # distance to t_k
    lo = np.maximum(lo, 0.0)
    p = 1.0 - beta
    with np.errstate(divide="ignore", invalid="ignore"):
        diff = np.where(lo > 0, lo**p * np.expm1(p * np.log1p(tau[:n] / np.where(lo > 0, lo, 1.0))), hi**p)
    base = diff / (tau[:n] * g)
    if not printed:
        return base
    out = np.empty(n)
    for k in range(1, n + 1):
        a, b = t[k - 1], t[k]
        if a == 0.0:
            out[k - 1] = math.inf
            continue
        val, _ = integrate.quad(
            lambda s: 1.0 / s, a, b, weight="alg", wvar=(0.0, -beta)
        ) if lo[k - 1] == 0.0 else integrate.quad(lambda s: (tn - s) ** (-beta) / s, a, b)
        out[k - 1] = val / (tau[k - 1] * math.gamma(1.0 - beta))
    return out


def check_a2(mesh, rows, pi_a, printed=False):
    """A2: A^{(n)}_{n-k} >= (1/pi_A) (1/tau_k) int_{t_{k-1}}^{t_k} w_{1-beta}(t_{n-theta} - s) ds.

    ``printed=True`` adds the trailing 1/s weight; that integrand is not
    integrable on the first cell, so the check fails there by construction.
    Returns (holds, smallest relative margin).
    """
    margin = math.inf
    for row in rows:
        ref = _a2_integrals(mesh, row.n, row.beta, row.theta, printed) / pi_a
        with np.errstate(invalid="ignore", divide="ignore"):
            m = (row.coeffs - ref) / row.coeffs
        m = np.where(np.isnan(m), -math.inf, m)
        margin = min(margin, float(m.min()))
    return margin >= -1e-12, margin


def check_assumptions(mesh, beta, formula="L1"):
    rows = kernel_rows(mesh, beta, formula)
    pi_a = PI_L1 if str(getattr(formula, "value", formula)).upper() == "L1" else PI_ALIKHANOV
    positive, monotone, m1 = check_a1(rows)
    s_ok, s_m = check_a2(mesh, rows, pi_a, printed=False)
    p_ok, p_m = check_a2(mesh, rows, pi_a, printed=True)
    return AssumptionReport(positive, monotone, m1, s_ok, s_m, p_ok, p_m)
