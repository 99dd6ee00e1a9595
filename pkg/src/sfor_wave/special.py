"""Gamma, the Riemann-Liouville kernel, and Mittag-Leffler on z <= 0.

E_{alpha,nu}(z) for real z <= 0 and 0 < alpha <= 2 is evaluated by one of
three branches, tried in order until one meets the tolerance:

series
    The defining Taylor series, used for |z| <= crossover as long as the
    alternating cancellation stays within budget.
asymptotic
    -sum_{k=1}^{K} z^{-k} / Gamma(nu - alpha k), optimally truncated, plus
    the two complex-conjugate pole residues (2/alpha) Re[s^{1-nu} e^s],
    s = |z|^{1/alpha} e^{i pi/alpha}, which are present for alpha > 1 and
    are not small on the negative axis when alpha is close to 2.
integral
    Inverse Laplace transform with the Bromwich line folded onto the
    negative real axis: pole residues, J leading asymptotic terms and a
    real integral over the cut computed by adaptive quadrature.

For alpha in (1, 2) the first two branches do not overlap in double
precision (the series loses ~|z|^{1/alpha}/ln 10 digits while the
asymptotic sum only converges once that same quantity exceeds ~-ln tol),
so the integral branch covers the gap.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate
from scipy.special import rgamma

from .errors import DomainError, MLAccuracyError, ValidationError

_EPS = np.finfo(float).eps


def gamma_fn(x):
    """Gamma function; raises :class:`DomainError` at nonpositive integers."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise DomainError(f"Gamma has a pole at {x}")
    try:
        return math.gamma(x)
    except OverflowError:
        return math.inf


def omega(beta, t):
    """Riemann-Liouville kernel t^{beta-1} / Gamma(beta), for t > 0."""
    if not beta > 0:
        raise ValidationError(f"omega needs beta > 0, got {beta}")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise ValidationError("omega is only defined for t > 0")
    out = t_arr ** (beta - 1.0) / gamma_fn(beta)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MLEvalPolicy:
    series_terms_max: int = 200
    asymptotic_terms: int = 20
    crossover_magnitude: float = 10.0
    target_rel_tol: float = 1e-12

    def __post_init__(self):
        if not 0 < self.target_rel_tol <= 1e-6:
            raise ValidationError("target_rel_tol must lie in (0, 1e-6]")
        if not self.crossover_magnitude > 1:
            raise ValidationError("crossover_magnitude must exceed 1")
        if self.series_terms_max < 2 or self.asymptotic_terms < 1:
            raise ValidationError("term budgets must be positive")


DEFAULT_POLICY = MLEvalPolicy()


def _check_order(alpha):
    if not 0 < alpha <= 2:
        raise ValidationError(f"Mittag-Leffler order alpha must lie in (0, 2], got {alpha}")


# ------------------------------------------------------------------ branches


def ml_series(alpha, nu, x, policy=DEFAULT_POLICY):
    """Taylor series at z = -x. Returns (value, relative error estimate)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = np.arange(policy.series_terms_max, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        terms = np.power.outer(-x, k) * rgamma(alpha * k + nu)
    terms = np.nan_to_num(terms, nan=np.inf)
    val = terms.sum(axis=1)
    absum = np.abs(terms).sum(axis=1)
    tail = np.abs(terms[:, -1]) + np.abs(terms[:, -2])
    with np.errstate(divide="ignore", invalid="ignore"):
        err = (8 * _EPS * absum + tail) / np.abs(val)
    err = np.where(np.isfinite(err), err, np.inf)
    err = np.where(absum == 0, 0.0, err)
    return val, err


def _pole_part(alpha, nu, x):
    x = np.asarray(x, dtype=float)
    if alpha > 1:
        s = x ** (1.0 / alpha) * np.exp(1j * np.pi / alpha)
        return (2.0 / alpha) * (np.exp(s) * s ** (1.0 - nu)).real
    return np.zeros_like(x)


def ml_asymptotic(alpha, nu, x, policy=DEFAULT_POLICY):
    """Asymptotic expansion at z = -x (x > 0). Returns (value, error estimate).

    The error estimate is the first omitted term, relative to the larger of
    |E| and the pole-residue magnitude.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    K = policy.asymptotic_terms
    k = np.arange(1, K + 2, dtype=float)
    terms = -np.power.outer(-x, -k) * rgamma(nu - alpha * k)
    mag = np.abs(terms)
    mag_nz = np.where(mag == 0, np.inf, mag)
    kstop = np.argmin(mag_nz, axis=1)
    all_zero = ~np.isfinite(mag_nz.min(axis=1))
    keep = np.arange(K + 1)[None, :] < kstop[:, None]
    keep[all_zero] = True
    keep[:, K] = keep[:, K] & all_zero  # never sum past the budget
    alg = np.where(keep, terms, 0.0).sum(axis=1)
    omitted = np.where(all_zero, 0.0, mag[np.arange(len(x)), kstop])
    if alpha == 1 and nu == round(nu):
        # Single real pole on the cut.
        pole = (-x) ** (1.0 - nu) * np.exp(-x)
    elif alpha == 1:
        # Non-integer nu: the exponential part is not captured; bound it.
        pole = np.zeros_like(x)
        omitted = omitted + x ** (1.0 - nu) * np.exp(-x) * abs(rgamma(nu - 1.0)) + x ** (1.0 - nu) * np.exp(-x)
    else:
        pole = _pole_part(alpha, nu, x)
    val = alg + pole
    scale = np.maximum(np.abs(val), np.abs(pole))
    with np.errstate(divide="ignore", invalid="ignore"):
        err = np.where(omitted == 0, 0.0, omitted / scale)
    return val, err


def _cut_integral(alpha, nu, lam, epsrel):
    # -(1/pi) int_0^inf e^{-r} r^{alpha-nu} [lam sin(pi(alpha-nu)) - r^alpha sin(pi nu)]
    #                    / (r^{2 alpha} + 2 lam r^alpha cos(pi alpha) + lam^2) dr
    sa = math.sin(math.pi * (alpha - nu))
    sn = math.sin(math.pi * nu)
    ca = math.cos(math.pi * alpha)

    def f(r):
        ra = r**alpha
        return math.exp(-r) * (lam * sa - ra * sn) / (ra * ra + 2.0 * lam * ra * ca + lam * lam)

    upper = 60.0
    peak = lam ** (1.0 / alpha)
    split = min(max(peak, 1.0), upper / 2)
    kw = dict(epsabs=0.0, epsrel=epsrel, limit=500)
    v1, e1 = integrate.quad(f, 0.0, split, weight="alg", wvar=(alpha - nu, 0.0), **kw)
    pts = [peak] if split < peak < upper else None
    v2, e2 = integrate.quad(lambda r: f(r) * r ** (alpha - nu), split, upper, points=pts, **kw)
    return -(v1 + v2) / math.pi, (e1 + e2) / math.pi


# Fixed panel layout for the vectorised cut integral: geometric cells (ratio
# sqrt 2) from 1e-16 up to 1, unit cells up to the truncation point 60.
_R0 = 1e-16
_PANEL_EDGES = np.concatenate([np.geomspace(_R0, 1.0, 107), np.arange(2.0, 61.0)])


def _panel_rule(npts):
    x, w = leggauss(npts)
    a, b = _PANEL_EDGES[:-1, None], _PANEL_EDGES[1:, None]
    half = 0.5 * (b - a)
    return ((a + b) * 0.5 + half * x).ravel(), (half * w).ravel()


_RULES = {n: _panel_rule(n) for n in (24, 32)}


def _cut_integral_panels(alpha, nu, lam, chunk=256):
    """Vectorised cut integral over many lam at once.

    Two Gauss-Legendre orders on the same panels; the difference is the
    (conservative) absolute error estimate. Valid when the complex poles of
    the integrand stay away from the real axis, i.e. alpha not close to 1.
    """
    lam = np.asarray(lam, dtype=float)
    sa = math.sin(math.pi * (alpha - nu))
    sn = math.sin(math.pi * nu)
    ca = math.cos(math.pi * alpha)
    a = alpha - nu
    # [0, _R0]: expand in rho = r^alpha,
    # f = sa/lam - rho (sn + 2 sa ca)/lam^2 + rho^2 (...)/lam^3 + ...
    head = sa / lam * _R0 ** (a + 1.0) / (a + 1.0) - (sn + 2.0 * sa * ca) / lam**2 * _R0 ** (
        a + alpha + 1.0
    ) / (a + alpha + 1.0)
    head_err = 4.0 * (abs(sa) + abs(sn)) / lam**3 * _R0 ** (a + 2 * alpha + 1.0) / (a + 2 * alpha + 1.0)
    out = {}
    for npts, (r, w) in _RULES.items():
        ra = r**alpha
        base = w * np.exp(-r) * r**a
        vals = np.empty(lam.size)
        for i in range(0, lam.size, chunk):
            L = lam[i : i + chunk, None]
            f = (L * sa - ra * sn) / (ra * ra + 2.0 * L * ra * ca + L * L)
            vals[i : i + chunk] = f @ base
        out[npts] = -(vals + head) / math.pi
    return out[32], np.abs(out[32] - out[24]) + head_err / math.pi


def _ml_integral_alpha1(nu, x, policy):
    # E_{1,nu}(-x): closed forms / recurrences; x is past the series range.
    tol = policy.target_rel_tol
    if nu == round(nu):
        m = int(round(nu))
        if m >= 1:
            e = math.exp(-x)
            for j in range(1, m):
                e = (e - 1.0 / math.gamma(j)) / (-x)
            return e, 4 * m * _EPS
        e = math.exp(-x)
        for _ in range(1 - m):
            e = -x * e
        return e, 4 * (1 - m) * _EPS
    if nu > 1:
        v, err = integrate.quad(
            lambda u: math.exp(-x * u), 0.0, 1.0, weight="alg", wvar=(0.0, nu - 2.0),
            epsabs=0.0, epsrel=max(tol / (10 * max(1.0, x)), 1.2e-14), limit=500,
        )
        g = rgamma(nu - 1.0)
        return g * v, err / abs(v) if v else math.inf
    # nu < 1: one upward step; cancellation grows with x.
    up, e_up = _ml_integral_alpha1(nu + 1.0, x, policy)
    val = float(rgamma(nu)) - x * up
    return val, (e_up * x * abs(up) + _EPS * abs(rgamma(nu))) / abs(val)


def ml_integral(alpha, nu, x, policy=DEFAULT_POLICY):
    """Cut-integral representation at z = -x (x > 0), scalar x.

    Returns (value, error estimate relative to max(|E|, |pole part|)).
    """
    x = float(x)
    if alpha == 1:
        return _ml_integral_alpha1(nu, x, policy)
    J, nu_c = _shift(alpha, nu)
    alg = 0.0
    for k in range(1, J + 1):
        alg -= (-x) ** (-k) * float(rgamma(nu - alpha * k))
    pole = float(_pole_part(alpha, nu, x))
    cut, cut_err = _cut_integral(alpha, nu_c, x, max(policy.target_rel_tol / 10, 1e-13))
    fac = (-x) ** (-J)
    val = pole + alg + fac * cut
    scale = max(abs(val), abs(pole))
    if scale == 0:
        return val, 0.0
    err = (abs(fac) * cut_err + 4 * _EPS * (abs(pole) + abs(alg) + abs(fac * cut))) / scale
    return val, err


def _shift(alpha, nu):
    # Shift nu below 1 + alpha so the cut integrand is integrable at 0.
    J = max(0, math.floor((nu - 1.0 - alpha) / alpha) + 1)
    return J, nu - J * alpha


def _ml_integral_panels(alpha, nu, x):
    """Vectorised counterpart of :func:`ml_integral` for alpha != 1."""
    J, nu_c = _shift(alpha, nu)
    alg = np.zeros_like(x)
    for k in range(1, J + 1):
        alg -= (-x) ** (-k) * float(rgamma(nu - alpha * k))
    pole = _pole_part(alpha, nu, x)
    cut, cut_err = _cut_integral_panels(alpha, nu_c, x)
    fac = (-x) ** (-J)
    val = pole + alg + fac * cut
    scale = np.maximum(np.abs(val), np.abs(pole))
    with np.errstate(divide="ignore", invalid="ignore"):
        err = (np.abs(fac) * cut_err + 4 * _EPS * (np.abs(pole) + np.abs(alg) + np.abs(fac * cut))) / scale
    err = np.where(scale == 0, np.where(cut_err == 0, 0.0, np.inf), err)
    return val, err


# ------------------------------------------------------------------ driver


def mittag_leffler(alpha, nu, z, policy=DEFAULT_POLICY):
    """Two-parameter Mittag-Leffler function E_{alpha,nu}(z) for real z <= 0.

    Accepts a scalar or an array of z. Raises :class:`MLAccuracyError` when
    no branch reaches ``policy.target_rel_tol``.
    """
    _check_order(alpha)
    alpha = float(alpha)
    nu = float(nu)
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr > 0) or np.any(~np.isfinite(z_arr)):
        raise ValidationError("mittag_leffler supports finite z <= 0 only")
    x = -z_arr.ravel()
    out = np.empty_like(x)
    done = np.zeros(x.shape, dtype=bool)
    tol = policy.target_rel_tol

    zero = x == 0
    out[zero] = rgamma(nu)
    done |= zero

    cand = ~done & (x <= policy.crossover_magnitude)
    if np.any(cand):
        v, e = ml_series(alpha, nu, x[cand], policy)
        ok = e <= tol
        idx = np.flatnonzero(cand)[ok]
        out[idx] = v[ok]
        done[idx] = True

    cand = ~done & (x >= policy.crossover_magnitude)
    if np.any(cand):
        v, e = ml_asymptotic(alpha, nu, x[cand], policy)
        ok = e <= tol
        idx = np.flatnonzero(cand)[ok]
        out[idx] = v[ok]
        done[idx] = True

    rest = np.flatnonzero(~done)
    if rest.size and alpha != 1:
        v, e = _ml_integral_panels(alpha, nu, x[rest])
        ok = e <= tol
        out[rest[ok]] = v[ok]
        done[rest[ok]] = True
    for i in np.flatnonzero(~done):
        v, e = ml_integral(alpha, nu, x[i], policy)
        if not e <= tol:
            raise MLAccuracyError(
                f"E_{{{alpha},{nu}}}({-x[i]}): error estimate {e:.2e} exceeds {tol:.1e}",
                achieved=e,
            )
        out[i] = v

    out = out.reshape(z_arr.shape)
    return float(out) if out.ndim == 0 else out


def series_limit(alpha, nu, policy=DEFAULT_POLICY, grid=400):
    """Largest |z| <= crossover (on a geometric grid) where the series is accepted everywhere below."""
    xs = np.geomspace(1e-3, policy.crossover_magnitude, grid)
    _, e = ml_series(alpha, nu, xs, policy)
    bad = np.flatnonzero(e > policy.target_rel_tol)
    if bad.size == 0:
        return float(xs[-1])
    return float(xs[bad[0] - 1]) if bad[0] > 0 else 0.0


def asymptotic_onset(alpha, nu, policy=DEFAULT_POLICY, x_max=1e8):
    """Smallest |z| >= crossover (geometric scan) where the asymptotic branch meets tolerance."""
    xs = np.geomspace(policy.crossover_magnitude, x_max, 2000)
    _, e = ml_asymptotic(alpha, nu, xs, policy)
    ok = e <= policy.target_rel_tol
    # require acceptance from the onset onward, not at an isolated point
    if not ok[-1]:
        return math.inf
    last_bad = np.flatnonzero(~ok)
    return float(xs[last_bad[-1] + 1]) if last_bad.size else float(xs[0])
