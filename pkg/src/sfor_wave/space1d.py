"""Piecewise-linear finite elements on (0, L) with homogeneous Dirichlet data."""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import _kernels
from .errors import NotSPDError, ValidationError

_GAUSS_X, _GAUSS_W = leggauss(4)


@dataclass(frozen=True)
class DataDescriptor:
    """A spatial function with the points where it is not smooth.

    Load integrals split elements at ``breakpoints`` so that the Gauss rule
    only ever sees smooth pieces.
    """

    func: object
    breakpoints: tuple = ()
    name: str = "function"

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))


def hat(L=math.pi):
    """Tent with peak L/2 at x = L/2: x on [0, L/2], L - x on [L/2, L]."""
    return DataDescriptor(lambda x: np.minimum(x, L - x), (L / 2,), "hat")


def indicator_left_half(L=math.pi):
    """Indicator of (0, L/2]."""
    return DataDescriptor(lambda x: np.where(x <= L / 2, 1.0, 0.0), (L / 2,), "indicator")


def sine(mode=1, L=math.pi):
    return DataDescriptor(lambda x: np.sin(mode * math.pi * x / L), (), f"sin{mode}")


def zero():
    return DataDescriptor(lambda x: np.zeros_like(x), (), "zero")


def function(f, breakpoints=(), name="function"):
    return DataDescriptor(f, tuple(breakpoints), name)


@dataclass(frozen=True)
class SpatialDisc:
    """Uniform P1 discretisation with M elements; unknowns are the M-1 interior nodes.

    Mass and stiffness are symmetric tridiagonal and kept as (diag, off) pairs.
    """

    L: float
    M: int
    h: float
    nodes: np.ndarray = field(repr=False)
    mass_diag: np.ndarray = field(repr=False)
    mass_off: np.ndarray = field(repr=False)
    stiff_diag: np.ndarray = field(repr=False)
    stiff_off: np.ndarray = field(repr=False)

    @property
    def interior(self):
        return self.nodes[1:-1]

    @property
    def dim(self):
        return self.M - 1

    def mass(self, v):
        return tridiag_matvec(self.mass_diag, self.mass_off, v)

    def stiff(self, v):
        return tridiag_matvec(self.stiff_diag, self.stiff_off, v)

    def dense_mass(self):
        return _dense(self.mass_diag, self.mass_off)

    def dense_stiff(self):
        return _dense(self.stiff_diag, self.stiff_off)


def _dense(d, o):
    return np.diag(d) + np.diag(o, 1) + np.diag(o, -1)


def tridiag_matvec(diag, off, v):
    v = np.asarray(v, dtype=float)
    out = diag * v
    out[:-1] += off * v[1:]
    out[1:] += off * v[:-1]
    return out


def build_fem(L, M):
    if isinstance(M, bool) or int(M) != M or M < 2:
        raise ValidationError(f"need an integer M >= 2 elements, got {M!r}")
    if not L > 0:
        raise ValidationError(f"interval length must be positive, got {L}")
    M = int(M)
    L = float(L)
    h = L / M
    n = M - 1
    nodes = np.linspace(0.0, L, M + 1)
    arrays = dict(
        mass_diag=np.full(n, 4.0 * h / 6.0),
        mass_off=np.full(n - 1, h / 6.0),
        stiff_diag=np.full(n, 2.0 / h),
        stiff_off=np.full(n - 1, -1.0 / h),
    )
    for a in arrays.values():
        a.flags.writeable = False
    nodes.flags.writeable = False
    return SpatialDisc(L=L, M=M, h=h, nodes=nodes, **arrays)


def _pieces(disc, breakpoints):
    # Sub-intervals of each element, split at any breakpoint strictly inside it.
    x = disc.nodes
    out = []
    for e in range(disc.M):
        a, b = x[e], x[e + 1]
        cuts = sorted(p for p in breakpoints if a < p < b)
        edges = [a, *cuts, b]
        for lo, hi in zip(edges[:-1], edges[1:]):
            out.append((e, lo, hi))
    return out


def load_vector(disc, data):
    """(data, phi_i) for the interior hat functions, by 4-point Gauss per smooth piece."""
    if not isinstance(data, DataDescriptor):
        data = function(data)
    pieces = _pieces(disc, data.breakpoints)
    e = np.array([p[0] for p in pieces])
    lo = np.array([p[1] for p in pieces])
    hi = np.array([p[2] for p in pieces])
    half = 0.5 * (hi - lo)
    s = (0.5 * (hi + lo))[:, None] + half[:, None] * _GAUSS_X[None, :]
    # evaluate strictly inside the piece so one-sided data picks the right side
    fv = np.asarray(data(s.ravel()), dtype=float).reshape(s.shape) * (half[:, None] * _GAUSS_W[None, :])
    xl = disc.nodes[e][:, None]
    lam_right = (s - xl) / disc.h  # shape fn rising towards node e+1
    lam_left = 1.0 - lam_right
    full = np.zeros(disc.M + 1)
    np.add.at(full, e, (fv * lam_left).sum(axis=1))
    np.add.at(full, e + 1, (fv * lam_right).sum(axis=1))
    return full[1:-1]


def solve_spd_tridiagonal(diag, off, rhs):
    x, ok = _kernels.spd_tridiag_solve(
        np.ascontiguousarray(diag, dtype=float),
        np.ascontiguousarray(off, dtype=float),
        np.ascontiguousarray(rhs, dtype=float),
    )
    if not ok:
        raise NotSPDError("tridiagonal system is not positive definite")
    return x


def l2_project(disc, data):
    """Coefficients of the L2 projection onto the interior P1 space."""
    return solve_spd_tridiagonal(disc.mass_diag, disc.mass_off, load_vector(disc, data))


def interpolate(disc, data):
    if not isinstance(data, DataDescriptor):
        data = function(data)
    return np.asarray(data(disc.interior), dtype=float)


def l2_norm(disc, v):
    return math.sqrt(max(float(v @ disc.mass(v)), 0.0))


def h1_seminorm(disc, v):
    return math.sqrt(max(float(v @ disc.stiff(v)), 0.0))


def h1_norm(disc, v):
    """Full H1 norm sqrt(||v||^2 + ||v'||^2)."""
    return math.sqrt(max(float(v @ disc.mass(v) + v @ disc.stiff(v)), 0.0))
