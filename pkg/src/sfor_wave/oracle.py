"""Sine-series reference solutions built from Mittag-Leffler functions.

With phi_n = sqrt(2/L) sin(n pi x / L), lambda_n = (n pi / L)^2,
c_n = (a0, phi_n) and d_n = (a1, phi_n) + Gamma(2-alpha) (f, phi_n):

    u = sum [E_{a,1}(-l t^a) c_n + t E_{a,2}(-l t^a) d_n] phi_n
    v = sum [-l t^{a-b} E_{a,1+b}(-l t^a) c_n + t^{1-b} E_{a,2-b}(-l t^a) d_n] phi_n
    z = sum [-l t^b E_{a,1+b}(-l t^a) c_n - l t^{1+b} E_{a,2+b}(-l t^a) d_n] phi_n

with b = a/2. Note z = v - d omega_{2-b}(t).
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import NumericalError, ValidationError
from .space1d import DataDescriptor
from .special import DEFAULT_POLICY, gamma_fn, mittag_leffler

DEFAULT_MODES = 2000


def _closed_form(data, L, n):
    name = data.name
    s = math.sqrt(2.0 / L)
    if name == "hat":
        return s * (2.0 * L**2 / (n**2 * math.pi**2)) * np.sin(n * math.pi / 2)
    if name == "indicator":
        return s * (L / (n * math.pi)) * (1.0 - np.cos(n * math.pi / 2))
    if name == "zero":
        return np.zeros(n.shape)
    if name.startswith("sin") and name[3:].isdigit():
        m = int(name[3:])
        return np.where(n == m, math.sqrt(L / 2.0), 0.0)
    return None


def sine_coefficients(data, L, n_modes):
    """(data, phi_n) for n = 1..n_modes.

    Closed forms for the named descriptors (hat, indicator, sine, zero);
    adaptive quadrature otherwise.
    """
    if not L > 0:
        raise ValidationError(f"L must be positive, got {L}")
    n = np.arange(1, int(n_modes) + 1)
    if isinstance(data, DataDescriptor):
        out = _closed_form(data, L, n)
        if out is not None:
            return np.asarray(out, dtype=float)
        pts = [p for p in data.breakpoints if 0 < p < L]
    else:
        data = DataDescriptor(data)
        pts = []
    s = math.sqrt(2.0 / L)
    out = np.empty(n.size)
    for i, k in enumerate(n):
        w = k * math.pi / L
        val, err = integrate.quad(
            lambda x: float(data(x)), 0.0, L, weight="sin", wvar=w, epsabs=1e-12, limit=400
        ) if not pts else _split_quad(data, L, pts, w)
        if err > 1e-10:
            raise NumericalError(f"sine coefficient {k}: quadrature error {err:.1e}")
        out[i] = s * val
    return out


def _split_quad(data, L, pts, w):
    edges = [0.0, *sorted(pts), L]
    tot = err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        v, e = integrate.quad(lambda x: float(data(x)), a, b, weight="sin", wvar=w, epsabs=1e-12, limit=400)
        tot += v
        err += e
    return tot, err


@dataclass(frozen=True)
class SpectralData:
    L: float
    n_modes: int
    coeffs_a0: np.ndarray = field(repr=False)
    coeffs_a1: np.ndarray = field(repr=False)
    coeffs_f: np.ndarray = field(repr=False)

    @property
    def lambdas(self):
        n = np.arange(1, self.n_modes + 1)
        return (n * math.pi / self.L) ** 2

    def d(self, alpha):
        return self.coeffs_a1 + gamma_fn(2.0 - alpha) * self.coeffs_f

    def basis(self, x):
        """phi_n(x) as an (n_modes, len(x)) array."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        n = np.arange(1, self.n_modes + 1)
        return math.sqrt(2.0 / self.L) * np.sin(np.outer(n, x) * math.pi / self.L)


def spectral_data(a0, a1, f, L=math.pi, n_modes=DEFAULT_MODES):
    return SpectralData(
        L=float(L),
        n_modes=int(n_modes),
        coeffs_a0=sine_coefficients(a0, L, n_modes),
        coeffs_a1=sine_coefficients(a1, L, n_modes),
        coeffs_f=sine_coefficients(f, L, n_modes),
    )


def _check(alpha, t):
    if not 1 < alpha < 2:
        raise ValidationError(f"alpha must lie in (1, 2), got {alpha}")
    if t < 0:
        raise ValidationError(f"t must be nonnegative, got {t}")


def _ml(alpha, nu, z, policy):
    return mittag_leffler(alpha, nu, z, policy)


def modal_u(sd, alpha, t, policy=DEFAULT_POLICY):
    """Modal coefficients of u(., t)."""
    _check(alpha, t)
    if t == 0:
        return sd.coeffs_a0.copy()
    z = -sd.lambdas * t**alpha
    return _ml(alpha, 1.0, z, policy) * sd.coeffs_a0 + t * _ml(alpha, 2.0, z, policy) * sd.d(alpha)


def modal_v(sd, alpha, t, policy=DEFAULT_POLICY):
    _check(alpha, t)
    if t == 0:
        return np.zeros(sd.n_modes)
    b = alpha / 2.0
    lam = sd.lambdas
    z = -lam * t**alpha
    return (
        -lam * t ** (alpha - b) * _ml(alpha, 1.0 + b, z, policy) * sd.coeffs_a0
        + t ** (1.0 - b) * _ml(alpha, 2.0 - b, z, policy) * sd.d(alpha)
    )


def modal_z(sd, alpha, t, policy=DEFAULT_POLICY):
    _check(alpha, t)
    if t == 0:
        return np.zeros(sd.n_modes)
    b = alpha / 2.0
    lam = sd.lambdas
    z = -lam * t**alpha
    return (
        -lam * t**b * _ml(alpha, 1.0 + b, z, policy) * sd.coeffs_a0
        - lam * t ** (1.0 + b) * _ml(alpha, 2.0 + b, z, policy) * sd.d(alpha)
    )


def _tail(sd, coeffs):
    """Sup-norm estimate of the omitted modes n > n_modes.

    Fits |c_n| <~ E n^-p from the envelope over the last two octaves. For
    p > 1.5 the absolute tail sum E N / (p - 1) is returned; slower decay
    (jump data, ~1/n) only converges conditionally and is reported as the
    size of the next term.
    """
    N = sd.n_modes
    c = np.abs(np.asarray(coeffs))
    if N < 8:
        return 0.0
    w = max(1, N // 10)
    e_end = c[-w:].max()
    e_mid = c[N // 2 - w : N // 2].max()
    if e_end == 0:
        return 0.0
    p = math.log2(e_mid / e_end) if e_mid > 0 else math.inf
    s = math.sqrt(2.0 / sd.L)
    if p > 1.5:
        return s * e_end * N / (p - 1.0) if math.isfinite(p) else 0.0
    return s * e_end


def _evaluate(sd, modal, x, with_tail):
    vals = modal @ sd.basis(x)
    if with_tail:
        return vals, _tail(sd, modal)
    return vals


def eval_u(sd, alpha, x, t, with_tail=False, policy=DEFAULT_POLICY):
    """u(x, t) on the grid x; with ``with_tail`` also returns a tail estimate."""
    return _evaluate(sd, modal_u(sd, alpha, t, policy), x, with_tail)


def eval_v(sd, alpha, x, t, with_tail=False, policy=DEFAULT_POLICY):
    return _evaluate(sd, modal_v(sd, alpha, t, policy), x, with_tail)


def eval_z(sd, alpha, x, t, with_tail=False, policy=DEFAULT_POLICY):
    return _evaluate(sd, modal_z(sd, alpha, t, policy), x, with_tail)


def l2_norm_modal(coeffs):
    """L2(0, L) norm of a sine series by Parseval."""
    return float(np.sqrt(np.sum(np.asarray(coeffs) ** 2)))


def h1_norm_modal(sd, coeffs):
    return float(np.sqrt(np.sum((1.0 + sd.lambdas) * np.asarray(coeffs) ** 2)))


def envelope_slope(norm_fn, t_min=1e-6, t_max=1e-2, points=13):
    """Least-squares log-log slope of ``norm_fn(t)`` over a geometric grid."""
    ts = np.geomspace(t_min, t_max, points)
    vals = np.array([norm_fn(t) for t in ts])
    slope, _ = np.polyfit(np.log(ts), np.log(vals), 1)
    return float(slope)
