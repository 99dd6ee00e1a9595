"""Time stepping for the reduced half-order system.

With beta = alpha/2 the wave-type problem is split into

    D^beta u = w + G(t),       M D^beta w + K u = F(t),

where ``w`` is either v = D^beta u (``V_FORM``, singular source in F) or
z = v - [a1 + Gamma(2-alpha) f] w_{2-beta}(t) (``Z_FORM``, source moved into
G). Both equations are discretised at t_{n-theta} with the same kernel row;
theta = 0 for L1 and beta/2 for Alikhanov. Eliminating W^n leaves one SPD
tridiagonal solve per level.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels, space1d
from .errors import NumericalError, StepError, ValidationError
from .fracops import _warn_ratio, alikhanov_kernel_row, l1_kernel_row
from .mesh import GradedMesh, offset_time
from .space1d import DataDescriptor, SpatialDisc
from .special import gamma_fn, omega

log = logging.getLogger(__name__)
_ic_logged = False


class Scheme(str, Enum):
    V_FORM = "V_FORM"
    Z_FORM = "Z_FORM"


class Formula(str, Enum):
    L1 = "L1"
    ALIKHANOV = "ALIKHANOV"


def _enum(cls, value):
    try:
        return cls(str(getattr(value, "value", value)).upper())
    except ValueError:
        raise ValidationError(f"unknown {cls.__name__} {value!r}") from None


@dataclass(frozen=True)
class ProblemSpec:
    alpha: float
    a0: DataDescriptor
    a1: DataDescriptor
    f: DataDescriptor
    scheme: Scheme = Scheme.V_FORM
    formula: Formula = Formula.L1
    L: float = math.pi
    T: float = 1.0

    def __post_init__(self):
        if not 1 < self.alpha < 2:
            raise ValidationError(f"alpha must lie in (1, 2), got {self.alpha}")
        if not (self.L > 0 and self.T > 0):
            raise ValidationError("L and T must be positive")
        object.__setattr__(self, "scheme", _enum(Scheme, self.scheme))
        object.__setattr__(self, "formula", _enum(Formula, self.formula))
        for name in ("a0", "a1", "f"):
            d = getattr(self, name)
            if not isinstance(d, DataDescriptor):
                object.__setattr__(self, name, space1d.function(d, name=name))

    @property
    def beta(self):
        return self.alpha / 2.0

    @property
    def theta(self):
        return self.beta / 2.0 if self.formula is Formula.ALIKHANOV else 0.0


@dataclass
class SolverState:
    """U^0..U^n and W^0..W^n with their increments.

    Buffers are sized for the whole mesh; rows above ``level`` are
    scratch. ``step`` fills the next row and returns a new state object
    over the same buffers.
    """

    level: int
    U: np.ndarray = field(repr=False)
    W: np.ndarray = field(repr=False)
    dU: np.ndarray = field(repr=False)
    dW: np.ndarray = field(repr=False)

    @property
    def u(self):
        return self.U[self.level]

    @property
    def w(self):
        return self.W[self.level]


@dataclass(frozen=True)
class Trajectory:
    spec: ProblemSpec
    mesh: GradedMesh
    disc: SpatialDisc
    U: np.ndarray = field(repr=False)
    W: np.ndarray = field(repr=False)
    dU: np.ndarray = field(repr=False)
    dW: np.ndarray = field(repr=False)

    @property
    def times(self):
        return self.mesh.points


@dataclass(frozen=True)
class _Sources:
    load_a1: np.ndarray
    load_f: np.ndarray
    s_proj: np.ndarray


def _sources(spec, disc):
    load_a1 = space1d.load_vector(disc, spec.a1)
    load_f = space1d.load_vector(disc, spec.f)
    s = space1d.solve_spd_tridiagonal(
        disc.mass_diag, disc.mass_off, load_a1 + gamma_fn(2.0 - spec.alpha) * load_f
    )
    return _Sources(load_a1, load_f, s)


def initial_state(spec, mesh, disc):
    """U^0 = L2 projection of a0, W^0 = 0."""
    global _ic_logged
    if not _ic_logged:
        log.info("initial values: U^0 = projection of a0, W^0 = 0 (zero U^0 would drop the a0 data)")
        _ic_logged = True
    d = disc.dim
    U = np.zeros((mesh.N + 1, d))
    W = np.zeros((mesh.N + 1, d))
    U[0] = space1d.l2_project(disc, spec.a0)
    return SolverState(0, U, W, np.zeros_like(U), np.zeros_like(W))


def kernel_row(spec, mesh, n):
    if spec.formula is Formula.L1:
        return l1_kernel_row(mesh, n, spec.beta).coeffs
    return alikhanov_kernel_row(mesh, n, spec.beta, warn=False).coeffs


def _forcing(spec, src, t, d):
    """(F, G) at time t: Galerkin right-hand side of the second equation, source of the first."""
    if spec.scheme is Scheme.V_FORM:
        F = src.load_a1 * omega(2.0 - spec.alpha, t) + t ** (1.0 - spec.alpha) * src.load_f
        return F, np.zeros(d)
    return np.zeros(d), src.s_proj * omega(2.0 - spec.beta, t)


def step(state, spec, mesh, disc, src=None, row=None):
    """Advance ``state`` from level n to n+1."""
    n = state.level + 1
    if n > mesh.N:
        raise ValidationError(f"state already at final level {mesh.N}")
    src = src or _sources(spec, disc)
    if row is None:
        row = kernel_row(spec, mesh, n)
    theta = spec.theta
    c = 1.0 - theta
    A0 = float(row[-1])
    HU = _kernels.history(row, state.dU, n - 1)
    HW = _kernels.history(row, state.dW, n - 1)
    t = offset_time(mesh, n, theta)
    F, G = _forcing(spec, src, t, disc.dim)
    HUp = HU - G
    Up, Wp = state.U[n - 1], state.W[n - 1]

    # Solve for the increment; forming U^n - U^{n-1} afterwards would cancel
    # catastrophically when A0 ~ tau^{-beta} is large.
    diag = (A0 * A0 / c) * disc.mass_diag + c * disc.stiff_diag
    off = (A0 * A0 / c) * disc.mass_off + c * disc.stiff_off
    rhs = F - disc.stiff(Up) + disc.mass((A0 / c) * (Wp - HUp) - HW)
    try:
        dUn = space1d.solve_spd_tridiagonal(diag, off, rhs)
    except NumericalError as exc:
        raise StepError(str(exc), n) from exc
    dWn = (A0 * dUn + HUp - Wp) / c
    if not (np.all(np.isfinite(dUn)) and np.all(np.isfinite(dWn))):
        raise StepError("non-finite values", n)

    state.U[n] = Up + dUn
    state.W[n] = Wp + dWn
    state.dU[n] = dUn
    state.dW[n] = dWn
    return SolverState(n, state.U, state.W, state.dU, state.dW)


def run(spec, mesh, disc):
    """Step from level 0 to N; returns the full :class:`Trajectory`."""
    if abs(mesh.T - spec.T) > 1e-14 * spec.T:
        raise ValidationError(f"mesh ends at {mesh.T}, problem at {spec.T}")
    if abs(disc.L - spec.L) > 1e-14 * spec.L:
        raise ValidationError(f"spatial grid covers {disc.L}, problem {spec.L}")
    if spec.formula is Formula.ALIKHANOV:
        _warn_ratio(mesh)
    src = _sources(spec, disc)
    state = initial_state(spec, mesh, disc)
    for _ in range(mesh.N):
        state = step(state, spec, mesh, disc, src)
    return Trajectory(spec, mesh, disc, state.U, state.W, state.dU, state.dW)


def residuals(traj, n):
    """Relative residuals of both discrete equations at level n.

    Returns (first, second): first is D^beta U - theta-average(W) - G,
    second is M D^beta W + K theta-average(U) - F.
    """
    spec, mesh, disc = traj.spec, traj.mesh, traj.disc
    theta = spec.theta
    row = kernel_row(spec, mesh, n)
    src = _sources(spec, disc)
    t = offset_time(mesh, n, theta)
    F, G = _forcing(spec, src, t, disc.dim)
    DU = row @ traj.dU[1 : n + 1]
    DW = row @ traj.dW[1 : n + 1]
    Wt = (1 - theta) * traj.W[n] + theta * traj.W[n - 1]
    Ut = (1 - theta) * traj.U[n] + theta * traj.U[n - 1]
    r1 = DU - Wt - G
    s1 = np.abs(DU).max() + np.abs(Wt).max() + np.abs(G).max() + 1e-300
    r2 = disc.mass(DW) + disc.stiff(Ut) - F
    s2 = np.abs(disc.mass(DW)).max() + np.abs(disc.stiff(Ut)).max() + np.abs(F).max() + 1e-300
    return float(np.abs(r1).max() / s1), float(np.abs(r2).max() / s2)
