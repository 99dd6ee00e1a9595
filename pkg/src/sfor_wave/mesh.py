"""Graded temporal meshes t_k = T (k/N)^r."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class GradedMesh:
    """Time grid on [0, T] with N intervals and grading exponent r.

    ``points`` has length N+1 and ``steps`` length N (``steps[k-1]`` is
    tau_k). Both arrays are read-only.
    """

    T: float
    N: int
    r: float
    points: np.ndarray = field(repr=False)
    steps: np.ndarray = field(repr=False)

    @property
    def ratios(self):
        """rho_k = tau_k / tau_{k+1} for k = 1..N-1."""
        return self.steps[:-1] / self.steps[1:]

    @property
    def max_ratio(self):
        return float(self.ratios.max()) if self.N > 1 else 0.0

    def offset_time(self, n, theta):
        return offset_time(self, n, theta)


def build_graded_mesh(T, N, r):
    """Build the graded mesh t_k = T (k/N)^r, k = 0..N.

    Points are evaluated directly from the formula (never by summing
    steps), so t_N == T exactly. Steps are also taken from the formula
    rather than differenced, which keeps step ratios accurate to a few ulps.
    """
    if isinstance(N, bool) or int(N) != N:
        raise ValidationError(f"N must be an integer, got {N!r}")
    N = int(N)
    T = float(T)
    r = float(r)
    if N < 1:
        raise ValidationError(f"N must be >= 1, got {N}")
    if not T > 0:
        raise ValidationError(f"T must be positive, got {T}")
    if not r >= 1:
        raise ValidationError(f"grading exponent r must be >= 1, got {r}")
    k = np.arange(N + 1, dtype=float)
    points = T * (k / N) ** r
    points[-1] = T
    # tau_k = t_k (1 - (1 - 1/k)^r) avoids cancellation between close points
    steps = np.empty(N)
    steps[0] = points[1]
    kk = k[2:]
    steps[1:] = points[2:] * -np.expm1(r * np.log1p(-1.0 / kk))
    points.flags.writeable = False
    steps.flags.writeable = False
    return GradedMesh(T=T, N=N, r=r, points=points, steps=steps)


def uniform_mesh(T, N):
    return build_graded_mesh(T, N, 1.0)


def offset_time(mesh, n, theta):
    """t_{n-theta} = theta t_{n-1} + (1 - theta) t_n."""
    if not 1 <= n <= mesh.N:
        raise ValidationError(f"level n={n} out of range 1..{mesh.N}")
    if not 0 <= theta < 1:
        raise ValidationError(f"offset theta={theta} must lie in [0, 1)")
    return theta * mesh.points[n - 1] + (1.0 - theta) * mesh.points[n]


# Optimal grading exponents for alpha in (1, 2).


def r_opt_l1_v(alpha):
    """L1 on the v-system: (4 - alpha) / (2 - alpha)."""
    return (4.0 - alpha) / (2.0 - alpha)


def r_opt_l1_z(alpha):
    """L1 on the z-system: max{(4 - alpha) / alpha, 2}."""
    return max((4.0 - alpha) / alpha, 2.0)


def r_opt_alikhanov_v(alpha):
    """L2-1sigma on the v-system: 4 / (2 - alpha)."""
    return 4.0 / (2.0 - alpha)


def r_opt_alikhanov_z(alpha):
    """L2-1sigma on the z-system: max{4 / alpha, 8 / (4 - alpha)}."""
    return max(4.0 / alpha, 8.0 / (4.0 - alpha))


def optimal_grading(formula, scheme, alpha):
    """Look up the optimal r by formula ("L1"/"ALIKHANOV") and scheme ("V_FORM"/"Z_FORM")."""
    table = {
        ("L1", "V_FORM"): r_opt_l1_v,
        ("L1", "Z_FORM"): r_opt_l1_z,
        ("ALIKHANOV", "V_FORM"): r_opt_alikhanov_v,
        ("ALIKHANOV", "Z_FORM"): r_opt_alikhanov_z,
    }
    key = (str(getattr(formula, "value", formula)), str(getattr(scheme, "value", scheme)))
    try:
        return table[key](alpha)
    except KeyError:
        raise ValidationError(f"no optimal grading for {key}") from None
